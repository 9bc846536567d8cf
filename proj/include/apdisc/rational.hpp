#pragma once

// Exact rational scalars and Eigen types over them.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

namespace apdisc {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

/// Parses "p" or "p/q" with optional sign; anything else throws StructuralError.
Rational parse_rational(std::string_view token);

std::string to_string(const Rational& q);

std::int64_t floor_to_int(const Rational& q);
std::int64_t ceil_to_int(const Rational& q);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace apdisc
