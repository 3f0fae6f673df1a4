#include "prefsched/time.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace prefsched {

namespace {

BigInt pow10(std::size_t e) {
  BigInt r = 1;
  while (e-- > 0) {
    r *= 10;
  }
  return r;
}

// den = 2^a * 5^b * rest with rest coprime to 10.
void split_ten_factors(BigInt den, std::size_t& a, std::size_t& b, BigInt& rest) {
  a = 0;
  b = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++a;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++b;
  }
  rest = den;
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Time parse_decimal(std::string_view text) {
  const auto fail = [&]() -> Time {
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  if (text.empty()) {
    return fail();
  }
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  std::size_t int_digits = 0;
  std::size_t frac_digits = 0;
  while (i < text.size() && is_digit(text[i])) {
    mantissa = mantissa * 10 + (text[i] - '0');
    ++i;
    ++int_digits;
  }
  if (int_digits == 0) {
    return fail();
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && is_digit(text[i])) {
      mantissa = mantissa * 10 + (text[i] - '0');
      ++i;
      ++frac_digits;
    }
    if (frac_digits == 0) {
      return fail();
    }
  }
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    std::size_t exp_digits = 0;
    long exp_value = 0;
    while (i < text.size() && is_digit(text[i])) {
      exp_value = exp_value * 10 + (text[i] - '0');
      if (exp_value > 1000000) {
        return fail();
      }
      ++i;
      ++exp_digits;
    }
    if (exp_digits == 0) {
      return fail();
    }
    exponent = exp_negative ? -exp_value : exp_value;
  }
  if (i != text.size()) {
    return fail();
  }
  const long scale = static_cast<long>(frac_digits) - exponent;
  BigInt num = mantissa;
  BigInt den = 1;
  if (scale > 0) {
    den = pow10(static_cast<std::size_t>(scale));
  } else if (scale < 0) {
    num *= pow10(static_cast<std::size_t>(-scale));
  }
  if (negative) {
    num = -num;
  }
  return Time(num, den);
}

std::string to_decimal_string(const Time& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  std::size_t a = 0;
  std::size_t b = 0;
  BigInt rest;
  split_ten_factors(den, a, b, rest);
  if (rest != 1) {
    throw std::domain_error("value " + to_fraction_string(value) +
                            " has no finite decimal form");
  }
  const std::size_t e = a > b ? a : b;
  BigInt scaled = boost::multiprecision::abs(num);
  for (std::size_t i = a; i < e; ++i) {
    scaled *= 2;
  }
  for (std::size_t i = b; i < e; ++i) {
    scaled *= 5;
  }
  std::string digits = scaled.str();
  std::string out;
  if (num < 0) {
    out += '-';
  }
  if (e == 0) {
    out += digits;
    return out;
  }
  if (digits.size() <= e) {
    digits.insert(0, e + 1 - digits.size(), '0');
  }
  out.append(digits, 0, digits.size() - e);
  out += '.';
  out.append(digits, digits.size() - e, e);
  return out;
}

std::string to_fraction_string(const Time& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

std::string to_number_string(const Time& value) {
  std::size_t a = 0;
  std::size_t b = 0;
  BigInt rest;
  split_ten_factors(boost::multiprecision::denominator(value), a, b, rest);
  return rest == 1 ? to_decimal_string(value) : to_fraction_string(value);
}

bool is_integer(const Time& value) {
  return boost::multiprecision::denominator(value) == 1;
}

BigInt ceil_of(const Time& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  BigInt q = num / den;  // truncates toward zero
  if (num % den != 0 && num > 0) {
    ++q;
  }
  return q;
}

std::uint64_t to_u64(const BigInt& value) {
  if (value < 0 || value > BigInt(std::numeric_limits<std::uint64_t>::max())) {
    throw std::overflow_error("value out of uint64 range: " + value.str());
  }
  return value.convert_to<std::uint64_t>();
}

}  // namespace prefsched
