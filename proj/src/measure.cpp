#include "pp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "pp/arith.hpp"
#include "pp/rng.hpp"

namespace pp {

namespace {

constexpr std::int64_t kBlock = 2048;  // fixed sample blocks, one substream each

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

double dist_to_nearest_int(double x) { return std::fabs(x - std::nearbyint(x)); }

double powi(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Membership in E_q decomposed once per q: components with no p-index pin a
// gcd condition on q alone (possibly emptying the whole union), the rest mix
// a fixed q-side gcd with candidate p coordinates.
struct EqTester {
  struct MixedComp {
    std::int64_t q_gcd = 0;     // 0 when the component has no q-side index
    std::vector<int> p_idx;     // 0-based positions into p
  };
  std::vector<MixedComp> comps;
  bool feasible = true;  // false when a pure-q component is not coprime
};

EqTester make_eq_tester(const IVec& q, const Partition& partition) {
  EqTester t;
  for (const auto& comp : partition.components) {
    EqTester::MixedComp mc;
    std::int64_t g = 0;
    for (int idx : comp) {
      if (idx <= partition.m)
        g = std::gcd(g, iabs(q[static_cast<std::size_t>(idx) - 1]));
      else
        mc.p_idx.push_back(idx - partition.m - 1);
    }
    if (mc.p_idx.empty()) {
      if (g != 1) {
        t.feasible = false;
        return t;
      }
    } else {
      mc.q_gcd = g;
      t.comps.push_back(std::move(mc));
    }
  }
  return t;
}

// z = theta*q - y; searches integer p with |z + p| <= psi componentwise and
// all component gcds equal to 1.
bool eq_membership(const Vec& z, double psi, const EqTester& tester) {
  if (!tester.feasible) return false;
  const int n = static_cast<int>(z.size());
  std::int64_t first[16], last[16];
  for (int i = 0; i < n; ++i) {
    first[i] = static_cast<std::int64_t>(std::ceil(-z[i] - psi));
    last[i] = static_cast<std::int64_t>(std::floor(-z[i] + psi));
    if (last[i] < first[i]) return false;
  }
  IVec p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[i] = first[i];
  while (true) {
    bool ok = true;
    for (const auto& comp : tester.comps) {
      std::int64_t g = comp.q_gcd;
      for (int idx : comp.p_idx) {
        g = std::gcd(g, iabs(p[static_cast<std::size_t>(idx)]));
        if (g == 1) break;
      }
      if (g != 1) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
    int pos = n - 1;
    while (pos >= 0 && p[pos] == last[pos]) {
      p[pos] = first[pos];
      --pos;
    }
    if (pos < 0) return false;
    ++p[pos];
  }
}

void validate_query(const StripQuery& query, const Partition& partition) {
  if (query.q.empty() || sup_norm(query.q) == 0) throw std::invalid_argument("strip query: q must be nonzero");
  if (!(query.psi_value > 0)) throw std::invalid_argument("strip query: psi must be positive");
  if (query.y.size() != static_cast<std::size_t>(partition.n))
    throw std::invalid_argument("strip query: y must have length n");
  if (static_cast<int>(query.q.size()) != partition.m)
    throw std::invalid_argument("strip query: q must have length m");
  if (query.variant == StripVariant::Rv && query.p.size() != query.y.size())
    throw std::invalid_argument("strip query: Rv needs p of length n");
  if (static_cast<int>(query.y.size()) > 16) throw std::invalid_argument("strip query: n too large");
}

// Counting kernel shared by the hit estimators.  Samples are split into
// fixed blocks with one substream each, so the integer hit total does not
// depend on the schedule.
std::uint64_t mc_count_hits(std::int64_t samples, std::uint64_t seed, int rows, int cols, Exec exec,
                            const std::function<bool(const Mat&)>& pred) {
  const std::int64_t nblocks = (samples + kBlock - 1) / kBlock;
  std::uint64_t hits = 0;
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) reduction(+ : hits) if (par)
  for (std::int64_t b = 0; b < nblocks; ++b) {
    SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(b)));
    Mat theta(rows, cols);
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(samples, lo + kBlock);
    std::uint64_t local = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      for (auto& x : theta.a) x = rng.next_box();
      if (pred(theta)) ++local;
    }
    hits += local;
  }
  return hits;
}

MeasureEstimate finish_estimate(std::uint64_t hits, std::int64_t samples, std::uint64_t seed) {
  MeasureEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_err = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(samples));
  return est;
}

}  // namespace

bool strip_membership(const Mat& theta, const StripQuery& query, const Partition& partition) {
  validate_query(query, partition);
  const Vec thetaq = mat_vec(theta, query.q);
  const int n = static_cast<int>(query.y.size());
  switch (query.variant) {
    case StripVariant::Rv: {
      double r = 0.0;
      for (int i = 0; i < n; ++i)
        r = std::max(r, std::fabs(thetaq[i] + static_cast<double>(query.p[i]) - query.y[i]));
      return r <= query.psi_value;
    }
    case StripVariant::Fq: {
      double r = 0.0;
      for (int i = 0; i < n; ++i) r = std::max(r, dist_to_nearest_int(thetaq[i] - query.y[i]));
      return r <= query.psi_value;
    }
    case StripVariant::Eq: {
      const EqTester tester = make_eq_tester(query.q, partition);
      Vec z(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) z[i] = thetaq[i] - query.y[i];
      return eq_membership(z, query.psi_value, tester);
    }
  }
  throw std::logic_error("strip_membership: unknown variant");
}

MeasureEstimate mc_measure(const StripQuery& query, const Partition& partition,
                           std::int64_t samples, std::uint64_t seed, Exec exec) {
  validate_query(query, partition);
  if (samples < 1000) throw std::invalid_argument("mc_measure: need at least 1000 samples");
  const int m = partition.m, n = partition.n;
  const EqTester tester = make_eq_tester(query.q, partition);

  std::function<bool(const Mat&)> pred;
  switch (query.variant) {
    case StripVariant::Rv:
      pred = [&](const Mat& theta) {
        const Vec thetaq = mat_vec(theta, query.q);
        double r = 0.0;
        for (int i = 0; i < n; ++i)
          r = std::max(r, std::fabs(thetaq[i] + static_cast<double>(query.p[i]) - query.y[i]));
        return r <= query.psi_value;
      };
      break;
    case StripVariant::Fq:
      pred = [&](const Mat& theta) {
        const Vec thetaq = mat_vec(theta, query.q);
        double r = 0.0;
        for (int i = 0; i < n; ++i) r = std::max(r, dist_to_nearest_int(thetaq[i] - query.y[i]));
        return r <= query.psi_value;
      };
      break;
    case StripVariant::Eq:
      pred = [&](const Mat& theta) {
        const Vec thetaq = mat_vec(theta, query.q);
        Vec z(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) z[i] = thetaq[i] - query.y[i];
        return eq_membership(z, query.psi_value, tester);
      };
      break;
  }

  MeasureEstimate est = finish_estimate(mc_count_hits(samples, seed, n, m, exec, pred), samples, seed);
  est.disjointness_warning = query.variant == StripVariant::Eq && query.psi_value >= 0.5;
  return est;
}

PairMeasure mc_pair_measure(const IVec& q, const IVec& qprime, const Vec& y, const PsiFunction& psi,
                            StripVariant variant, const Partition& partition, std::int64_t samples,
                            std::uint64_t seed, Exec exec) {
  if (q.size() != qprime.size()) throw std::invalid_argument("pair: q and q' must have equal length");
  if (sup_norm(q) == 0 || sup_norm(qprime) == 0) throw std::invalid_argument("pair: q and q' must be nonzero");
  const int m = static_cast<int>(q.size());
  const int n = static_cast<int>(y.size());
  const double psi_q = psi_eval(psi, sup_norm(q));
  const double psi_qp = psi_eval(psi, sup_norm(qprime));

  PairMeasure out;
  bool proportional = true;
  for (int i = 0; i < m && proportional; ++i)
    for (int j = i + 1; j < m; ++j) {
      const __int128 cross = static_cast<__int128>(q[i]) * qprime[j] - static_cast<__int128>(q[j]) * qprime[i];
      if (cross != 0) {
        proportional = false;
        break;
      }
    }
  out.proportional = proportional;
  if (proportional) {
    // primitive direction, sign fixed by the first nonzero coordinate
    IVec dir = q;
    const std::int64_t content = gcd_many(dir);
    for (auto& x : dir) x /= content;
    for (std::int64_t x : dir)
      if (x != 0) {
        if (x < 0)
          for (auto& d : dir) d = -d;
        break;
      }
    std::int64_t alpha = 0, beta = 0;
    for (int i = 0; i < m; ++i)
      if (dir[i] != 0) {
        alpha = q[i] / dir[i];
        beta = qprime[i] / dir[i];
        break;
      }
    for (int i = 0; i < m; ++i)
      if (qprime[i] != beta * dir[i]) throw std::logic_error("pair: inconsistent proportional decomposition");
    if (std::gcd(iabs(alpha), iabs(beta)) != 1)
      throw std::invalid_argument("proportional pair: scalar factors are not coprime");
    // the larger scalar factor plays the primary role in the bound
    std::int64_t a1 = alpha, a2 = beta;
    double psi1 = psi_q, psi2 = psi_qp;
    if (iabs(a1) < iabs(a2)) {
      std::swap(a1, a2);
      std::swap(psi1, psi2);
    }
    out.factor_primary = a1;
    out.factor_secondary = a2;
    out.proportional_bound =
        powi(12.0, n) * powi(psi1, n) * std::max(powi(psi2, n), powi(1.0 / static_cast<double>(iabs(a1)), n));
  } else {
    out.product_value = powi(4.0, n) * powi(psi_q, n) * powi(psi_qp, n);
  }

  if (variant == StripVariant::Rv) throw std::invalid_argument("pair: Rv variant needs explicit p; use Eq or Fq");
  if (n > 16) throw std::invalid_argument("pair: n too large");
  const EqTester tester_a = make_eq_tester(q, partition);
  const EqTester tester_b = make_eq_tester(qprime, partition);

  auto member = [&](const Mat& theta, const IVec& qq, const EqTester& tester, double psiv) {
    const Vec thetaq = mat_vec(theta, qq);
    if (variant == StripVariant::Fq) {
      double r = 0.0;
      for (int i = 0; i < n; ++i) r = std::max(r, dist_to_nearest_int(thetaq[i] - y[i]));
      return r <= psiv;
    }
    Vec z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[i] = thetaq[i] - y[i];
    return eq_membership(z, psiv, tester);
  };
  const auto pred = [&](const Mat& theta) {
    return member(theta, q, tester_a, psi_q) && member(theta, qprime, tester_b, psi_qp);
  };
  out.est = finish_estimate(mc_count_hits(samples, seed, n, m, exec, pred), samples, seed);
  out.est.disjointness_warning = variant == StripVariant::Eq && std::max(psi_q, psi_qp) >= 0.5;
  return out;
}

double strip_volume_lower_bound(const IVec& q, const IVec& p, const Vec& y, double psi_value,
                                int m, int n) {
  if (static_cast<int>(q.size()) != m || static_cast<int>(p.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("strip_volume_lower_bound: dimension mismatch");
  if (sup_norm(q) == 0) throw std::invalid_argument("strip_volume_lower_bound: q must be nonzero");
  if (!(psi_value > 0)) throw std::invalid_argument("strip_volume_lower_bound: psi must be positive");
  const double q2 = euclid_norm(q);
  if (static_cast<double>(sup_norm(p)) > q2 / 6.0)
    throw std::invalid_argument("strip lower bound hypothesis not met: |p| > |q|_2 / 6");
  for (int i = 0; i < n; ++i)
    if (std::fabs(y[i] - static_cast<double>(p[i])) / q2 > 0.2)
      throw std::invalid_argument("strip lower bound hypothesis not met: |q| too small for the smallness condition");
  double factorial = 1.0;
  for (int i = 2; i < m; ++i) factorial *= i;
  const double denom = std::pow(2.0, m - 2) * factorial * q2;
  return powi(psi_value / denom, n);
}

std::vector<ShellMomentRow> eq_shell_moments(int m, int n, const Partition& partition,
                                             const PsiFunction& psi, const Vec& y,
                                             const std::vector<std::int64_t>& Qs,
                                             std::int64_t samples, std::uint64_t seed,
                                             std::int64_t budget, Exec exec) {
  if (Qs.empty()) throw std::invalid_argument("eq_shell_moments: empty Q schedule");
  for (std::size_t i = 1; i < Qs.size(); ++i)
    if (Qs[i] <= Qs[i - 1]) throw std::invalid_argument("eq_shell_moments: Q schedule must be increasing");
  if (partition.m != m || partition.n != n) throw std::invalid_argument("eq_shell_moments: partition mismatch");
  if (static_cast<int>(y.size()) != n) throw std::invalid_argument("eq_shell_moments: y must have length n");
  if (samples < 1000) throw std::invalid_argument("eq_shell_moments: need at least 1000 samples");
  if (n > 16) throw std::invalid_argument("eq_shell_moments: n too large");
  if (Qs.front() < 1) throw std::invalid_argument("eq_shell_moments: Q must be >= 1");
  const std::int64_t Qmax = Qs.back();
  __int128 cells = 1;
  for (int i = 0; i < m; ++i) {
    cells *= 2 * Qmax + 1;
    if (cells > budget) throw budget_error("eq_shell_moments: q box exceeds budget");
  }

  // Pre-build one tester per q, grouped by shell, feasible ones only.
  struct QEntry {
    IVec q;
    EqTester tester;
    double psi_val;
  };
  std::vector<std::vector<QEntry>> shells(static_cast<std::size_t>(Qmax) + 1);
  {
    IVec q(static_cast<std::size_t>(m), -Qmax);
    while (true) {
      const std::int64_t norm = sup_norm(q);
      if (norm >= 1) {
        EqTester t = make_eq_tester(q, partition);
        if (t.feasible)
          shells[static_cast<std::size_t>(norm)].push_back({q, std::move(t), psi_eval(psi, norm)});
      }
      int pos = m - 1;
      while (pos >= 0 && q[pos] == Qmax) {
        q[pos] = -Qmax;
        --pos;
      }
      if (pos < 0) break;
      ++q[pos];
    }
  }

  const std::size_t nq = Qs.size();
  std::vector<std::uint64_t> sum_k(nq, 0), sum_k2(nq, 0);
  const std::int64_t nblocks = (samples + kBlock - 1) / kBlock;
  const bool par = exec == Exec::parallel;
#pragma omp parallel if (par)
  {
    std::vector<std::uint64_t> loc_k(nq, 0), loc_k2(nq, 0);
    Mat theta(n, m);
    Vec z(static_cast<std::size_t>(n));
#pragma omp for schedule(static) nowait
    for (std::int64_t b = 0; b < nblocks; ++b) {
      SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(b)));
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(samples, lo + kBlock);
      for (std::int64_t i = lo; i < hi; ++i) {
        for (auto& x : theta.a) x = rng.next_box();
        std::uint64_t k = 0;
        std::size_t qi = 0;
        for (std::int64_t s = 1; s <= Qmax; ++s) {
          for (const auto& entry : shells[static_cast<std::size_t>(s)]) {
            const Vec thetaq = mat_vec(theta, entry.q);
            for (int r = 0; r < n; ++r) z[r] = thetaq[r] - y[r];
            if (eq_membership(z, entry.psi_val, entry.tester)) ++k;
          }
          while (qi < nq && Qs[qi] == s) {
            loc_k[qi] += k;
            loc_k2[qi] += k * k;
            ++qi;
          }
        }
      }
    }
#pragma omp critical
    for (std::size_t j = 0; j < nq; ++j) {
      sum_k[j] += loc_k[j];
      sum_k2[j] += loc_k2[j];
    }
  }

  std::vector<ShellMomentRow> rows(nq);
  for (std::size_t j = 0; j < nq; ++j) {
    rows[j].Q = Qs[j];
    rows[j].mean_count = static_cast<double>(sum_k[j]) / static_cast<double>(samples);
    rows[j].mean_count_sq = static_cast<double>(sum_k2[j]) / static_cast<double>(samples);
    const double var = rows[j].mean_count_sq - rows[j].mean_count * rows[j].mean_count;
    rows[j].std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
  }
  return rows;
}

namespace {

void check_avg_preconditions(int m, int n, const PsiFunction& psi, std::int64_t Q) {
  if (m == 1 && n == 1) throw std::invalid_argument("averaged bound: (m, n) = (1, 1) is excluded");
  if (!check_decay_hypothesis(psi, m, n, std::max<std::int64_t>(Q, 2)))
    throw std::invalid_argument("averaged bound: decay hypothesis fails");
  for (std::int64_t j = 1; j <= Q; ++j)
    if (psi_eval(psi, j) >= 0.5) throw std::invalid_argument("averaged bound: psi must stay below 1/2");
}

}  // namespace

AveragedBound averaged_lower_bound(int m, int n, const Partition& partition, const PsiFunction& psi,
                                   const Vec& y, std::int64_t Q, std::int64_t samples,
                                   std::uint64_t seed, std::int64_t budget, Exec exec) {
  check_avg_preconditions(m, n, psi, Q);
  const auto rows = eq_shell_moments(m, n, partition, psi, y, {Q}, samples, seed, budget, exec);
  AveragedBound out;
  out.lhs = rows[0].mean_count;
  out.rhs = series_partial_sum(psi, m, n, Q);
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
  out.lhs_estimate.estimate = rows[0].mean_count;
  out.lhs_estimate.std_err = rows[0].std_err;
  out.lhs_estimate.samples = samples;
  out.lhs_estimate.seed = seed;
  return out;
}

double borel_cantelli_ratio(int m, int n, const Partition& partition, const PsiFunction& psi,
                            const Vec& y, std::int64_t Q, std::int64_t samples, std::uint64_t seed,
                            std::int64_t budget, Exec exec) {
  check_avg_preconditions(m, n, psi, Q);
  const auto rows = eq_shell_moments(m, n, partition, psi, y, {Q}, samples, seed, budget, exec);
  if (rows[0].mean_count == 0.0) return 0.0;
  return rows[0].mean_count * rows[0].mean_count / rows[0].mean_count_sq;
}

PushforwardResult pushforward_check(const IVec& q, int n, std::int64_t samples, int bins,
                                    std::uint64_t seed, Exec exec) {
  if (q.empty() || sup_norm(q) == 0) throw std::invalid_argument("pushforward: q must be nonzero");
  if (n < 1) throw std::invalid_argument("pushforward: n must be >= 1");
  if (bins < 2) throw std::invalid_argument("pushforward: need at least 2 bins");
  const int m = static_cast<int>(q.size());
  __int128 cells128 = 1;
  for (int i = 0; i < n; ++i) {
    cells128 *= bins;
    if (cells128 > (1 << 24)) throw std::invalid_argument("pushforward: bin grid too large");
  }
  const auto cells = static_cast<std::int64_t>(cells128);
  if (cells > samples / 10) throw std::invalid_argument("under-sampled histogram");

  std::vector<std::uint64_t> hist(static_cast<std::size_t>(cells), 0);
  const std::int64_t nblocks = (samples + kBlock - 1) / kBlock;
  const bool par = exec == Exec::parallel;
#pragma omp parallel if (par)
  {
    std::vector<std::uint64_t> local(static_cast<std::size_t>(cells), 0);
    Mat theta(n, m);
#pragma omp for schedule(static) nowait
    for (std::int64_t b = 0; b < nblocks; ++b) {
      SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(b)));
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(samples, lo + kBlock);
      for (std::int64_t i = lo; i < hi; ++i) {
        for (auto& x : theta.a) x = rng.next_box();
        const Vec thetaq = mat_vec(theta, q);
        std::int64_t cell = 0;
        for (int r = 0; r < n; ++r) {
          const double frac = thetaq[r] - std::floor(thetaq[r]);
          auto idx = static_cast<std::int64_t>(frac * bins);
          if (idx >= bins) idx = bins - 1;
          cell = cell * bins + idx;
        }
        ++local[static_cast<std::size_t>(cell)];
      }
    }
#pragma omp critical
    for (std::size_t c = 0; c < hist.size(); ++c) hist[c] += local[c];
  }

  const double expected = static_cast<double>(samples) / static_cast<double>(cells);
  double chi2 = 0.0;
  for (std::uint64_t o : hist) {
    const double d = static_cast<double>(o) - expected;
    chi2 += d * d / expected;
  }
  PushforwardResult out;
  out.statistic = chi2;
  out.dof = cells - 1;
  const double sigma = std::sqrt(2.0 * static_cast<double>(out.dof));
  out.lower = static_cast<double>(out.dof) - 2.5758 * sigma;  // two-sided 99%
  out.upper = static_cast<double>(out.dof) + 2.5758 * sigma;
  out.within_band = out.statistic >= out.lower && out.statistic <= out.upper;
  return out;
}

}  // namespace pp
