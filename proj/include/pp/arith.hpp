#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pp/common.hpp"

namespace pp {

// Exact positive rational, used where a box scale must survive flooring
// without floating-point noise.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

Rational parse_rational(const std::string& text);  // "2", "1/2", ...
std::string to_string(const Rational& r);

// Count of integers n with 1 <= n <= beta*Q and gcd(n, q) = 1.
struct SieveCountQuery {
  Rational beta;
  std::int64_t Q = 1;
  std::int64_t q = 1;
};

// gcd of all entries, non-negative; gcd of an all-zero list is 0.
std::int64_t gcd_many(const std::vector<std::int64_t>& values);

// distinct prime factors of n >= 1, ascending (trial division up to sqrt n)
std::vector<std::int64_t> prime_factors(std::int64_t n);

// all divisors of n >= 1, ascending
std::vector<std::int64_t> divisors(std::int64_t n);

int moebius(std::int64_t n);
std::int64_t euler_phi(std::int64_t n);

// Moebius-sieve count: sum over d | q of mu(d) * floor(beta*Q/d), evaluated
// in exact integer arithmetic.  Agrees with brute force for every input.
std::int64_t legendre_sieve_count(const SieveCountQuery& query);

// Riemann zeta at integer d >= 2: partial sum plus the integral tail bracket
//   int_{N+1..inf} x^-d dx  <=  tail  <=  int_{N..inf} x^-d dx.
// `value` is the bracket midpoint; `error_bound` (half-width plus rounding
// slack) is guaranteed <= the requested tolerance.
struct ZetaValue {
  double value = 0.0;
  double error_bound = 0.0;
  std::int64_t terms = 0;
};
ZetaValue zeta(int d, double tolerance);

// Exact count, by box enumeration, of d-tuples in {1..Q}^d with gcd 1.
// Refuses when Q^d exceeds `budget`.
std::int64_t count_primitive_in_box(int d, std::int64_t Q,
                                    std::int64_t budget = kDefaultBudget,
                                    Exec exec = Exec::parallel);

}  // namespace pp
