#include "prefsched/stream_io.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace prefsched {

namespace {

using json = nlohmann::json;

// SAX handler for one stream line. The float callback receives the raw
// literal, which is what keeps decimal arrivals exact.
struct QueryLineSax {
  enum class Field { none, id, arrival, tokens };

  Field field = Field::none;
  bool in_object = false;
  bool done_object = false;
  bool in_tokens = false;
  bool saw_id = false;
  bool saw_arrival = false;
  bool saw_tokens = false;
  QueryId id = 0;
  Time arrival;
  TokenSeq tokens;
  std::string error;

  bool fail(std::string message) {
    error = std::move(message);
    return false;
  }

  bool set_unsigned(std::uint64_t value) {
    if (in_tokens) {
      tokens.push_back(value);
      return true;
    }
    switch (field) {
      case Field::id:
        id = value;
        saw_id = true;
        break;
      case Field::arrival:
        arrival = Time(value);
        saw_arrival = true;
        break;
      default:
        return fail("number outside a known field");
    }
    field = Field::none;
    return true;
  }

  bool null() { return fail("unexpected null"); }
  bool boolean(bool) { return fail("unexpected boolean"); }

  bool number_integer(json::number_integer_t value) {
    if (value < 0) {
      return fail("negative integer");
    }
    return set_unsigned(static_cast<std::uint64_t>(value));
  }

  bool number_unsigned(json::number_unsigned_t value) { return set_unsigned(value); }

  bool number_float(json::number_float_t, const json::string_t& raw) {
    if (in_tokens || field != Field::arrival) {
      return fail("non-integer number outside the arrival field");
    }
    arrival = parse_decimal(raw);
    if (arrival < 0) {
      return fail("negative arrival");
    }
    saw_arrival = true;
    field = Field::none;
    return true;
  }

  bool string(json::string_t&) { return fail("unexpected string"); }
  bool binary(json::binary_t&) { return fail("unexpected binary value"); }

  bool start_object(std::size_t) {
    if (in_object || done_object) {
      return fail("nested or repeated object");
    }
    in_object = true;
    return true;
  }

  bool key(json::string_t& name) {
    if (name == "id") {
      field = Field::id;
    } else if (name == "arrival") {
      field = Field::arrival;
    } else if (name == "tokens") {
      field = Field::tokens;
    } else {
      return fail("unknown key '" + name + "'");
    }
    return true;
  }

  bool end_object() {
    in_object = false;
    done_object = true;
    return true;
  }

  bool start_array(std::size_t) {
    if (!in_object || in_tokens || field != Field::tokens) {
      return fail("unexpected array");
    }
    in_tokens = true;
    saw_tokens = true;
    return true;
  }

  bool end_array() {
    in_tokens = false;
    field = Field::none;
    return true;
  }

  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
    error = ex.what();
    return false;
  }
};

}  // namespace

Query parse_query_line(const std::string& line) {
  QueryLineSax handler;
  if (!json::sax_parse(line, &handler) || !handler.done_object) {
    throw std::runtime_error("bad stream line: " +
                             (handler.error.empty() ? "malformed JSON" : handler.error));
  }
  if (!handler.saw_id || !handler.saw_arrival || !handler.saw_tokens) {
    throw std::runtime_error("bad stream line: missing id, arrival, or tokens");
  }
  if (handler.tokens.empty()) {
    throw std::runtime_error("bad stream line: empty tokens array");
  }
  return Query{handler.id, std::move(handler.tokens), std::move(handler.arrival)};
}

std::string format_query_line(const Query& query) {
  std::string out = "{\"id\":";
  out += std::to_string(query.id);
  out += ",\"arrival\":";
  out += to_decimal_string(query.arrival);
  out += ",\"tokens\":[";
  for (std::size_t i = 0; i < query.prompt.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += std::to_string(query.prompt[i]);
  }
  out += "]}";
  return out;
}

QueryStream read_stream(std::istream& in) {
  QueryStream stream;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      stream.queries.push_back(parse_query_line(line));
    } catch (const std::exception& ex) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return canonicalize(std::move(stream));
}

QueryStream load_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open stream file: " + path.string());
  }
  return read_stream(in);
}

void write_stream(const QueryStream& stream, std::ostream& out) {
  for (const Query& q : stream.queries) {
    out << format_query_line(q) << '\n';
  }
}

void save_stream(const QueryStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write stream file: " + path.string());
  }
  write_stream(stream, out);
}

void write_result_csv(const SimResult& result, std::ostream& out) {
  out << "id,arrival,start,completion,ttft\n";
  for (const QueryTiming& t : result.records) {
    out << t.id << ',' << to_decimal_string(t.arrival) << ','
        << to_decimal_string(t.start) << ',' << to_decimal_string(t.completion) << ','
        << to_decimal_string(t.ttft) << '\n';
  }
}

}  // namespace prefsched
