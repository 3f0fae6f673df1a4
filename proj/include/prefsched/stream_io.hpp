#pragma once

#include "prefsched/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace prefsched {

// Stream files are JSON Lines, UTF-8, one query per line:
//   {"id": <int>, "arrival": <number>, "tokens": [<int>, ...]}
// Arrival literals are captured digit-for-digit and parsed to exact
// rationals, so canonical files round-trip byte-identically through
// load -> canonicalize -> save.

Query parse_query_line(const std::string& line);  // throws std::runtime_error
std::string format_query_line(const Query& query);

QueryStream read_stream(std::istream& in);  // canonicalizes
QueryStream load_stream(const std::filesystem::path& path);
void write_stream(const QueryStream& stream, std::ostream& out);
void save_stream(const QueryStream& stream, const std::filesystem::path& path);

// Per-query rows in processing order, times as exact decimal strings.
// Header: id,arrival,start,completion,ttft
void write_result_csv(const SimResult& result, std::ostream& out);

}  // namespace prefsched
