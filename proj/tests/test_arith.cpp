#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pp/arith.hpp"

using namespace pp;

namespace {

// brute-force oracle for the sieve count
std::int64_t brute_coprime_count(const Rational& beta, std::int64_t Q, std::int64_t q) {
  const std::int64_t limit = beta.num * Q / beta.den;
  std::int64_t count = 0;
  for (std::int64_t n = 1; n <= limit; ++n)
    if (std::gcd(n, q) == 1) ++count;
  return count;
}

// brute-force oracle for euler_phi
std::int64_t brute_phi(std::int64_t n) {
  std::int64_t count = 0;
  for (std::int64_t k = 1; k <= n; ++k)
    if (std::gcd(k, n) == 1) ++count;
  return count;
}

}  // namespace

TEST_CASE("gcd_many") {
  CHECK(gcd_many({6, 10, 15}) == 1);
  CHECK(gcd_many({0, 0}) == 0);
  CHECK(gcd_many({8}) == 8);
  CHECK(gcd_many({-4, 6}) == 2);
  CHECK_THROWS_AS(gcd_many({}), std::invalid_argument);
}

TEST_CASE("moebius") {
  CHECK(moebius(1) == 1);
  CHECK(moebius(12) == 0);
  CHECK(moebius(30) == -1);
  CHECK(moebius(6) == 1);
  CHECK_THROWS_AS(moebius(0), std::invalid_argument);
}

TEST_CASE("euler_phi") {
  CHECK(euler_phi(1) == 1);
  CHECK(euler_phi(10) == brute_phi(10));
  CHECK(euler_phi(10) == 4);
  CHECK(euler_phi(6) == brute_phi(6));
  CHECK(euler_phi(6) == 2);
  CHECK_THROWS_AS(euler_phi(0), std::invalid_argument);
}

TEST_CASE("moebius and phi identities up to 1e4") {
  for (std::int64_t n = 1; n <= 10'000; ++n) {
    // sum over divisors of mu is the unit impulse at n = 1
    std::int64_t mu_sum = 0;
    for (std::int64_t d : divisors(n)) mu_sum += moebius(d);
    CHECK(mu_sum == (n == 1 ? 1 : 0));
    // phi(n)/n equals the product over prime divisors of (1 - 1/p)
    double prod = 1.0;
    for (std::int64_t p : prime_factors(n)) prod *= 1.0 - 1.0 / static_cast<double>(p);
    CHECK(std::fabs(static_cast<double>(euler_phi(n)) / static_cast<double>(n) - prod) <= 1e-12);
  }
}

TEST_CASE("legendre_sieve_count matches brute force") {
  CHECK(legendre_sieve_count({{1, 1}, 30, 1}) == 30);
  CHECK(legendre_sieve_count({{1, 1}, 30, 6}) == brute_coprime_count({1, 1}, 30, 6));
  CHECK(legendre_sieve_count({{1, 1}, 30, 6}) == 10);
  CHECK(legendre_sieve_count({{1, 2}, 20, 4}) == brute_coprime_count({1, 2}, 20, 4));
  CHECK(legendre_sieve_count({{1, 2}, 20, 4}) == 5);

  for (std::int64_t q : {1, 2, 17, 60, 210, 499})
    for (std::int64_t Q : {1, 7, 100, 500})
      for (const Rational beta : {Rational{1, 2}, Rational{1, 1}, Rational{2, 1}})
        CHECK(legendre_sieve_count({beta, Q, q}) == brute_coprime_count(beta, Q, q));
}

TEST_CASE("sieve validation") {
  CHECK_THROWS_AS(legendre_sieve_count({{1, 1}, 0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(legendre_sieve_count({{1, 1}, 3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x/2"), std::invalid_argument);
  CHECK(parse_rational("1/2").den == 2);
  CHECK(to_string(Rational{1, 2}) == "1/2");
  CHECK(to_string(Rational{2, 1}) == "2");
}

TEST_CASE("zeta with certified tail") {
  // oracle: partial sum over 1e6 terms plus the integral tail bracket
  auto oracle = [](int d) {
    const std::int64_t N = 1'000'000;
    double sum = 0.0;
    for (std::int64_t k = N; k >= 1; --k) sum += std::pow(static_cast<double>(k), -d);
    const double lo = std::pow(static_cast<double>(N + 1), 1.0 - d) / (d - 1);
    const double hi = std::pow(static_cast<double>(N), 1.0 - d) / (d - 1);
    return sum + (lo + hi) / 2;
  };
  const ZetaValue z2 = zeta(2, 1e-9);
  CHECK(z2.error_bound <= 1e-9);
  CHECK(std::fabs(z2.value - oracle(2)) <= 2e-9);
  CHECK(std::fabs(z2.value - 1.6449340668482264) <= 1e-8);

  const ZetaValue z4 = zeta(4, 1e-9);
  CHECK(z4.error_bound <= 1e-9);
  CHECK(std::fabs(z4.value - oracle(4)) <= 2e-9);
  CHECK(std::fabs(z4.value - 1.0823232337111382) <= 1e-8);

  const ZetaValue loose = zeta(2, 0.5);
  CHECK(std::fabs(loose.value - 1.6449340668482264) <= 0.5);

  CHECK_THROWS_AS(zeta(1, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(zeta(0, 1e-3), std::invalid_argument);
}

TEST_CASE("count_primitive_in_box small cases") {
  CHECK(count_primitive_in_box(2, 1) == 1);
  CHECK(count_primitive_in_box(2, 2) == 3);  // (2,2) excluded
  CHECK(count_primitive_in_box(3, 2) == 7);  // (2,2,2) excluded

  // exhaustive oracle at d = 2, Q = 50
  std::int64_t brute = 0;
  for (std::int64_t i = 1; i <= 50; ++i)
    for (std::int64_t j = 1; j <= 50; ++j)
      if (std::gcd(i, j) == 1) ++brute;
  CHECK(count_primitive_in_box(2, 50) == brute);

  CHECK_THROWS_AS(count_primitive_in_box(2, 100, /*budget=*/100), budget_error);
  CHECK_THROWS_AS(count_primitive_in_box(1, 10), std::invalid_argument);
}

TEST_CASE("primitive density approaches 1/zeta(d)") {
  const double d2 = static_cast<double>(count_primitive_in_box(2, 2000)) / (2000.0 * 2000.0);
  CHECK(std::fabs(d2 - 0.6079271018540267) / 0.6079271018540267 <= 0.01);
  const double d3 = static_cast<double>(count_primitive_in_box(3, 200)) / (200.0 * 200.0 * 200.0);
  CHECK(std::fabs(d3 - 0.8319073725807077) / 0.8319073725807077 <= 0.015);
}

TEST_CASE("Mertens-type average of phi(j)/j") {
  const std::int64_t L = 100'000;
  double sum = 0.0;
  for (std::int64_t j = 1; j <= L; ++j) sum += static_cast<double>(euler_phi(j)) / static_cast<double>(j);
  const double avg = sum / static_cast<double>(L);
  CHECK(std::fabs(avg - 0.6079271018540267) / 0.6079271018540267 <= 0.01);
}
