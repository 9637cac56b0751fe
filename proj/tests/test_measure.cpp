#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pp/measure.hpp"
#include "pp/rng.hpp"

using namespace pp;

namespace {

Partition trivial(int m, int n) {
  std::vector<int> all(static_cast<std::size_t>(m + n));
  std::iota(all.begin(), all.end(), 1);
  return validate_partition(m, n, {all});
}

double powi(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

TEST_CASE("strip membership") {
  const Partition t11 = trivial(1, 1);
  SUBCASE("F: nearest-integer distance") {
    StripQuery f{{3}, {0.0}, 0.1, StripVariant::Fq, {}};
    CHECK(strip_membership(Mat(1, 1, {1.0 / 3.0}), f, t11));  // 3 * 1/3 = 1, distance 0
    CHECK_FALSE(strip_membership(Mat(1, 1, {0.5}), f, t11));  // distance 1/2
  }
  SUBCASE("E: candidate p plus coprimality") {
    StripQuery e{{2}, {0.0}, 0.1, StripVariant::Eq, {}};
    CHECK(strip_membership(Mat(1, 1, {0.5}), e, t11));  // p = -1, gcd(2,-1) = 1
  }
  SUBCASE("E is empty when a pure-q component fails") {
    const Partition p = validate_partition(2, 2, {{1, 2}, {3, 4}});
    StripQuery e{{2, 4}, {0.0, 0.0}, 0.4, StripVariant::Eq, {}};
    CHECK_FALSE(strip_membership(Mat(2, 2, {0.0, 0.0, 0.0, 0.0}), e, p));
  }
  SUBCASE("E subset of F pointwise") {
    SplitMix64 rng(5);
    const Partition t12 = trivial(1, 2);
    StripQuery e{{4}, {0.2, -0.1}, 0.3, StripVariant::Eq, {}};
    StripQuery f = e;
    f.variant = StripVariant::Fq;
    for (int i = 0; i < 3000; ++i) {
      Mat theta(2, 1);
      for (auto& x : theta.a) x = rng.next_box();
      if (strip_membership(theta, e, t12)) CHECK(strip_membership(theta, f, t12));
    }
  }
  SUBCASE("validation") {
    StripQuery bad{{0}, {0.0}, 0.1, StripVariant::Fq, {}};
    CHECK_THROWS_AS(strip_membership(Mat(1, 1, {0.0}), bad, t11), std::invalid_argument);
  }
}

TEST_CASE("mc_measure hits the closed-form F measure") {
  SUBCASE("m = n = 1, q = 3, y = 0.2, psi = 0.1") {
    StripQuery f{{3}, {0.2}, 0.1, StripVariant::Fq, {}};
    const auto est = mc_measure(f, trivial(1, 1), 1'000'000, 42);
    CHECK(std::fabs(est.estimate - 0.2) <= 3 * est.std_err);
  }
  SUBCASE("n = 2, m = 1, q = 5, psi = 0.05") {
    StripQuery f{{5}, {0.0, 0.0}, 0.05, StripVariant::Fq, {}};
    const auto est = mc_measure(f, trivial(1, 2), 1'000'000, 43);
    CHECK(std::fabs(est.estimate - 0.01) <= 3 * est.std_err + 1e-4);
  }
  SUBCASE("E below F with shared samples") {
    StripQuery e{{6}, {0.15}, 0.2, StripVariant::Eq, {}};
    StripQuery f = e;
    f.variant = StripVariant::Fq;
    const auto ee = mc_measure(e, trivial(1, 1), 200'000, 44);
    const auto fe = mc_measure(f, trivial(1, 1), 200'000, 44);
    CHECK(ee.estimate <= fe.estimate + 3 * (ee.std_err + fe.std_err));
  }
  SUBCASE("warning flag when psi >= 1/2 on an E query") {
    StripQuery e{{2}, {0.0}, 0.6, StripVariant::Eq, {}};
    const auto est = mc_measure(e, trivial(1, 1), 1000, 4);
    CHECK(est.disjointness_warning);
    CHECK_FALSE(mc_measure({{2}, {0.0}, 0.4, StripVariant::Eq, {}}, trivial(1, 1), 1000, 4).disjointness_warning);
  }
  SUBCASE("determinism: same seed gives identical bits") {
    StripQuery f{{3}, {0.2}, 0.1, StripVariant::Fq, {}};
    const auto a = mc_measure(f, trivial(1, 1), 50'000, 7);
    const auto b = mc_measure(f, trivial(1, 1), 50'000, 7);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_err == b.std_err);
  }
  CHECK_THROWS_AS(mc_measure({{1}, {0.0}, 0.1, StripVariant::Fq, {}}, trivial(1, 1), 10, 1),
                  std::invalid_argument);
}

TEST_CASE("mc_pair_measure") {
  SUBCASE("independent pair follows the product law") {
    const auto pair = mc_pair_measure({1, 0}, {0, 1}, {0.0}, make_power_psi(0.1, 0.0), StripVariant::Fq,
                                      trivial(2, 1), 1'000'000, 45);
    CHECK_FALSE(pair.proportional);
    CHECK(pair.product_value == doctest::Approx(0.04));
    CHECK(std::fabs(pair.est.estimate - pair.product_value) <= 3 * pair.est.std_err);
  }
  SUBCASE("proportional coprime pair obeys the one-sided bound") {
    const auto pair = mc_pair_measure({2}, {3}, {0.0}, make_power_psi(0.1, 0.0), StripVariant::Fq,
                                      trivial(1, 1), 400'000, 46);
    CHECK(pair.proportional);
    CHECK(std::abs(pair.factor_primary) == 3);
    CHECK(std::abs(pair.factor_secondary) == 2);
    CHECK(pair.est.estimate <= pair.proportional_bound + 3 * pair.est.std_err);
  }
  SUBCASE("q = q' collapses to the single-strip estimate") {
    const IVec q = {3, -2};
    const Vec y = {0.1};
    const auto pair = mc_pair_measure(q, q, y, make_power_psi(0.2, 0.0), StripVariant::Fq, trivial(2, 1),
                                      100'000, 47);
    StripQuery single{q, y, 0.2, StripVariant::Fq, {}};
    const auto est = mc_measure(single, trivial(2, 1), 100'000, 47);
    CHECK(pair.est.estimate == est.estimate);
  }
  SUBCASE("proportional factors must be coprime") {
    CHECK_THROWS_AS(mc_pair_measure({2, 0}, {4, 0}, {0.0}, make_power_psi(0.1, 0.0), StripVariant::Fq,
                                    trivial(2, 1), 10'000, 48),
                    std::invalid_argument);
  }
}

TEST_CASE("strip_volume_lower_bound") {
  SUBCASE("m = 1 reduces to psi/6 at |q|_2 = 12") {
    CHECK(strip_volume_lower_bound({12}, {1}, {0.0}, 0.3, 1, 1) == doctest::Approx(0.3 / 6.0).epsilon(1e-12));
  }
  SUBCASE("m = 2 worked example") {
    CHECK(strip_volume_lower_bound({12, 0}, {0}, {0.0}, 0.1, 2, 1) ==
          doctest::Approx(0.1 / 12.0).epsilon(1e-12));
  }
  SUBCASE("hypothesis violations") {
    CHECK_THROWS_AS(strip_volume_lower_bound({6}, {2}, {0.0}, 0.1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(strip_volume_lower_bound({2}, {0}, {0.9}, 0.1, 1, 1), std::invalid_argument);
  }
  SUBCASE("Monte Carlo estimate sits above the bound") {
    SplitMix64 rng(321);
    const Partition t21 = trivial(2, 1);
    for (int trial = 0; trial < 20; ++trial) {
      IVec q(2);
      q[0] = 10 + static_cast<std::int64_t>(rng.next() % 30);
      q[1] = 1 + static_cast<std::int64_t>(rng.next() % 20);
      const double q2 = euclid_norm(q);
      IVec p = {static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(q2 / 6.0))};
      const Vec y = {rng.next_box()};
      const double psi_value = 0.05 + 0.3 * rng.next_unit();
      const double bound = strip_volume_lower_bound(q, p, y, psi_value, 2, 1);
      StripQuery rv{q, y, psi_value, StripVariant::Rv, p};
      const auto est = mc_measure(rv, t21, 200'000, 9000 + static_cast<std::uint64_t>(trial));
      CHECK(est.estimate >= bound - 3 * est.std_err);
    }
  }
}

TEST_CASE("eq_shell_moments and derived quantities") {
  const Partition t21 = trivial(2, 1);
  const PsiFunction psi = make_power_psi(0.4, 1.0);
  const Vec y = {0.25};
  SUBCASE("diagonal dominance and ratio positivity") {
    const auto rows = eq_shell_moments(2, 1, t21, psi, y, {10, 20, 40}, 4000, 50);
    for (const auto& row : rows) {
      CHECK(row.mean_count_sq >= row.mean_count);  // k^2 >= k pointwise
      const double ratio = row.mean_count * row.mean_count / row.mean_count_sq;
      CHECK(ratio > 1e-4);
    }
    // monotone in Q
    CHECK(rows[0].mean_count <= rows[1].mean_count);
    CHECK(rows[1].mean_count <= rows[2].mean_count);
  }
  SUBCASE("averaged lower bound is ratio-stable across Q") {
    const auto a10 = averaged_lower_bound(2, 1, t21, psi, y, 10, 4000, 51);
    const auto a20 = averaged_lower_bound(2, 1, t21, psi, y, 20, 4000, 51);
    const auto a40 = averaged_lower_bound(2, 1, t21, psi, y, 40, 4000, 51);
    CHECK(a10.ratio > 0);
    CHECK(a20.ratio > 0);
    CHECK(a40.ratio > 0);
    const double lo = std::min({a10.ratio, a20.ratio, a40.ratio});
    const double hi = std::max({a10.ratio, a20.ratio, a40.ratio});
    CHECK(hi <= 2.0 * lo);
  }
  SUBCASE("halving psi halves the series side exactly") {
    PsiFunction half = psi;
    half.c = psi.c / 2;
    const auto full = averaged_lower_bound(2, 1, t21, psi, y, 20, 2000, 52);
    const auto halved = averaged_lower_bound(2, 1, t21, half, y, 20, 2000, 52);
    CHECK(halved.rhs == full.rhs / 2);  // power-of-two scaling is exact
    CHECK(halved.lhs <= full.lhs);
  }
  SUBCASE("smallest case Q = 1") {
    const auto a = averaged_lower_bound(2, 1, t21, psi, y, 1, 1000, 53);
    CHECK(a.lhs >= 0.0);
    CHECK(a.rhs == doctest::Approx(0.4));
  }
  SUBCASE("borel_cantelli_ratio positive in the divergent regime") {
    const double r = borel_cantelli_ratio(2, 1, t21, psi, y, 20, 4000, 54);
    CHECK(r > 1e-4);
    CHECK(r <= 1.0 + 1e-12);
  }
  SUBCASE("empty strips give ratio zero") {
    const PsiFunction tiny = make_power_psi(1e-9, 0.0);
    const double r = borel_cantelli_ratio(1, 2, trivial(1, 2), tiny, {0.3, 0.3}, 5, 2000, 55);
    CHECK(r == 0.0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(averaged_lower_bound(1, 1, trivial(1, 1), psi, {0.0}, 10, 1000, 56), std::invalid_argument);
    // m = 2 with constant psi grows, violating the decay hypothesis
    CHECK_THROWS_AS(averaged_lower_bound(2, 1, t21, make_power_psi(0.4, 0.0), y, 10, 1000, 57),
                    std::invalid_argument);
    CHECK_THROWS_AS(averaged_lower_bound(2, 1, t21, make_power_psi(0.6, 1.0), y, 1, 1000, 58),
                    std::invalid_argument);  // psi(1) >= 1/2
  }
}

TEST_CASE("pushforward uniformity") {
  SUBCASE("identity map is exactly uniform") {
    const auto res = pushforward_check({1}, 1, 100'000, 20, 60);
    CHECK(res.within_band);
  }
  SUBCASE("q = 7 wraps uniformly") {
    const auto res = pushforward_check({7}, 1, 100'000, 20, 61);
    CHECK(res.within_band);
  }
  SUBCASE("m = 2, n = 1, q = (3, 5)") {
    const auto res = pushforward_check({3, 5}, 1, 100'000, 20, 62);
    CHECK(res.within_band);
  }
  SUBCASE("under-sampled histogram is rejected") {
    CHECK_THROWS_WITH_AS(pushforward_check({1}, 2, 1000, 32, 63), "under-sampled histogram",
                         std::invalid_argument);
  }
}

TEST_CASE("pair bound formula sanity") {
  // proportional bound majorizes the true measure even when psi is larger on
  // the shorter vector
  const auto pair = mc_pair_measure({6}, {1}, {0.0}, make_power_psi(0.3, 0.5), StripVariant::Fq,
                                    trivial(1, 1), 200'000, 64);
  CHECK(pair.proportional);
  const int n = 1;
  CHECK(pair.proportional_bound <=
        powi(12.0, n) * powi(psi_eval(make_power_psi(0.3, 0.5), 6), n) *
                std::max(powi(psi_eval(make_power_psi(0.3, 0.5), 1), n), powi(1.0 / 6.0, n)) +
            1e-12);
  CHECK(pair.est.estimate <= pair.proportional_bound + 3 * pair.est.std_err);
}
