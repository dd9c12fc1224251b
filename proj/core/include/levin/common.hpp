#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace levin {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A value in {0, ..., p-1}.
using Residue = std::uint32_t;

/// Raised when an operation would materialize more than the caller allowed.
/// The CLI maps this to exit code 2.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// p^e as an arbitrary-precision integer.
BigInt big_pow(std::uint64_t base, std::uint64_t exponent);

/// p^e when it fits in 64 bits; throws std::overflow_error otherwise.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exponent);

/// Renders a rational as "n" or "n/d".
std::string to_string(const Rational& q);

/// Decimal rendering of a big integer.
std::string to_string(const BigInt& n);

/// Lossy conversion for CSV convenience columns.
double to_double(const Rational& q);

} // namespace levin
