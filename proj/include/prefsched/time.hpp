#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace prefsched {

using BigInt = boost::multiprecision::cpp_int;

// Simulator clock values are exact rationals in token-time units (one unit =
// one prompt token at c_attn = 0). All analytic identities are checked with
// exact comparisons, never epsilon ones.
using Time = boost::multiprecision::cpp_rational;

// Parses a plain or scientific decimal literal ("12", "-0.5", "1.5e-3") into
// an exact rational. Throws std::invalid_argument on malformed input.
Time parse_decimal(std::string_view text);

// Exact decimal rendering with no trailing zeros. Requires the reduced
// denominator to be of the form 2^a * 5^b; throws std::domain_error otherwise.
std::string to_decimal_string(const Time& value);

// "num/den" form, used for values with no finite decimal expansion.
std::string to_fraction_string(const Time& value);

// Decimal when exactly representable, fraction otherwise.
std::string to_number_string(const Time& value);

bool is_integer(const Time& value);

// Smallest integer >= value.
BigInt ceil_of(const Time& value);

// Narrowing with range check.
std::uint64_t to_u64(const BigInt& value);

}  // namespace prefsched
