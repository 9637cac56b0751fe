#pragma once

#include <cstdint>
#include <vector>

#include "pp/common.hpp"
#include "pp/linalg.hpp"
#include "pp/partition.hpp"
#include "pp/psi.hpp"

namespace pp {

// Monte Carlo estimate of a Lebesgue measure on the unit box of matrices
// {theta : |theta| <= 1/2}.  Reproducible: (seed, samples, query) determine
// the estimate bit-for-bit, for any thread count.
struct MeasureEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  bool disjointness_warning = false;  // set when psi >= 1/2 on an E-set query
};

// The three strip families over a fixed nonzero q:
//   Rv: one explicit p             |theta q + p - y| <= psi
//   Eq: union over p with (q,p) in P(pi)
//   Fq: union over all integer p   ||theta q - y|| <= psi (nearest integer)
enum class StripVariant { Rv, Eq, Fq };

struct StripQuery {
  IVec q;
  Vec y;
  double psi_value = 0.0;
  StripVariant variant = StripVariant::Fq;
  IVec p;  // only for Rv
};

// Exact membership test of theta in the queried strip.
bool strip_membership(const Mat& theta, const StripQuery& query, const Partition& partition);

MeasureEstimate mc_measure(const StripQuery& query, const Partition& partition,
                           std::int64_t samples, std::uint64_t seed, Exec exec = Exec::parallel);

// Pairwise intersection measure with the pair classified on the way in:
// linearly independent pairs report the product-law value 4^n psi^n psi'^n,
// proportional pairs (q = alpha*a, q' = beta*a, gcd(alpha,beta) = 1) report
// the one-sided bound 12^n psi(|q|)^n max(psi(|q'|)^n, alpha^-n) with the
// larger scalar factor in the role of alpha.
struct PairMeasure {
  MeasureEstimate est;
  bool proportional = false;
  std::int64_t factor_primary = 0;    // proportional pairs only
  std::int64_t factor_secondary = 0;
  double product_value = 0.0;         // independent pairs
  double proportional_bound = 0.0;    // proportional pairs
};

PairMeasure mc_pair_measure(const IVec& q, const IVec& qprime, const Vec& y, const PsiFunction& psi,
                            StripVariant variant, const Partition& partition, std::int64_t samples,
                            std::uint64_t seed, Exec exec = Exec::parallel);

// Closed-form lower bound (psi / (2^(m-2) (m-1)! |q|_2))^n for the volume of
// the single strip Rv intersected with the unit box, valid under the
// smallness hypotheses |p| <= |q|_2/6 and max_i |y_i - p_i|/|q|_2 <= 1/5;
// throws when they fail.
double strip_volume_lower_bound(const IVec& q, const IVec& p, const Vec& y, double psi_value,
                                int m, int n);

// One pass over uniform theta samples counting k(theta) = #{q : 1 <= |q| <= Q,
// theta in E_q(y)} at each truncation of the schedule.  E[k] is the sum of
// the strip measures and E[k^2] the double sum of pairwise intersection
// measures, which is everything the averaged bound and the second-moment
// ratio need.
struct ShellMomentRow {
  std::int64_t Q = 0;
  double mean_count = 0.0;     // estimates sum_q lambda(E_q)
  double mean_count_sq = 0.0;  // estimates sum_{q,q'} lambda(E_q cap E_q')
  double std_err = 0.0;        // standard error of mean_count
};

std::vector<ShellMomentRow> eq_shell_moments(int m, int n, const Partition& partition,
                                             const PsiFunction& psi, const Vec& y,
                                             const std::vector<std::int64_t>& Qs,
                                             std::int64_t samples, std::uint64_t seed,
                                             std::int64_t budget = kDefaultBudget,
                                             Exec exec = Exec::parallel);

// lhs = estimated sum over 1 <= |q| <= Q of lambda(E_q cap box), rhs = the
// series sum_{l<=Q} l^(m-1) psi(l)^n, plus their ratio (an empirical constant).
struct AveragedBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  MeasureEstimate lhs_estimate;
};

AveragedBound averaged_lower_bound(int m, int n, const Partition& partition, const PsiFunction& psi,
                                   const Vec& y, std::int64_t Q, std::int64_t samples,
                                   std::uint64_t seed, std::int64_t budget = kDefaultBudget,
                                   Exec exec = Exec::parallel);

// Second-moment (Borel-Cantelli) ratio (sum lambda(E_q))^2 / sum lambda(E_q
// cap E_q') at truncation Q; 0 when the numerator vanishes.
double borel_cantelli_ratio(int m, int n, const Partition& partition, const PsiFunction& psi,
                            const Vec& y, std::int64_t Q, std::int64_t samples, std::uint64_t seed,
                            std::int64_t budget = kDefaultBudget, Exec exec = Exec::parallel);

// Uniformity check of theta |-> theta*q mod 1 on the n-torus: chi-square
// statistic over a bins^n grid with its 99% normal-approximation band.
struct PushforwardResult {
  double statistic = 0.0;
  std::int64_t dof = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool within_band = false;
};

PushforwardResult pushforward_check(const IVec& q, int n, std::int64_t samples, int bins,
                                    std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace pp
