#include "pp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pp {

namespace {

// Visit every q in Z^m with |q| = shell, ascending lexicographic order.
// The recursion tracks whether some earlier coordinate already realises the
// norm; if none does, the last free coordinate is restricted to +-shell.
template <class F>
void walk_shell(IVec& q, std::size_t pos, bool pinned, std::int64_t shell, F& visit) {
  const std::size_t mdim = q.size();
  if (pos + 1 == mdim) {
    if (pinned) {
      for (std::int64_t v = -shell; v <= shell; ++v) {
        q[pos] = v;
        visit(q);
      }
    } else {
      q[pos] = -shell;
      visit(q);
      q[pos] = shell;
      visit(q);
    }
    return;
  }
  for (std::int64_t v = -shell; v <= shell; ++v) {
    q[pos] = v;
    walk_shell(q, pos + 1, pinned || v == shell || v == -shell, shell, visit);
  }
}

template <class F>
void for_each_q_in_shell(int m, std::int64_t shell, F visit) {
  IVec q(static_cast<std::size_t>(m), 0);
  walk_shell(q, 0, false, shell, visit);
}

double residual_sup(const Vec& thetaq, const IVec& p, const Vec& y) {
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    r = std::max(r, std::fabs(thetaq[i] + static_cast<double>(p[i]) - y[i]));
  return r;
}

double residual_sup_affine(const Vec& thetaq, const Vec& phip, const Vec& y) {
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::fabs(thetaq[i] + phip[i] - y[i]));
  return r;
}

// integer endpoints of [lo, hi] widened by one ulp on each side, so boundary
// integers cannot be lost to rounding; candidates are re-verified exactly
void integer_range(double lo, double hi, std::int64_t& first, std::int64_t& last) {
  first = static_cast<std::int64_t>(std::ceil(std::nextafter(lo, -HUGE_VAL)));
  last = static_cast<std::int64_t>(std::floor(std::nextafter(hi, HUGE_VAL)));
}

void fill_component_flags(const Partition& partition, const IVec& q, const IVec& p,
                          SolutionRecord& rec) {
  rec.component_primitive.clear();
  rec.primitive = true;
  for (const auto& comp : partition.components) {
    std::int64_t g = 0;
    for (int idx : comp) {
      const std::int64_t x = idx <= partition.m ? q[idx - 1] : p[idx - 1 - partition.m];
      g = std::gcd(g, x < 0 ? -x : x);
      if (g == 1) break;
    }
    rec.component_primitive.push_back(g == 1);
    rec.primitive = rec.primitive && g == 1;
  }
}

struct AffineContext {
  Mat phi_inv;
  double halfwidth_factor = 0.0;  // n * max_abs(phi_inv)
};

// Shared engine: enumerates one shell into `out` (or only counts when
// out == nullptr).  `affine` selects the phi-aware candidate box.
std::int64_t enumerate_shell(const ProblemInstance& inst, std::int64_t shell, bool constrained,
                             const AffineContext* affine, std::vector<SolutionRecord>* out) {
  const int n = inst.n;
  const double psi_val = psi_eval(inst.psi, shell);
  std::int64_t count = 0;
  for_each_q_in_shell(inst.m, shell, [&](const IVec& q) {
    const Vec thetaq = mat_vec(inst.theta, q);
    std::int64_t first[16], last[16];
    if (n > 16) throw std::invalid_argument("n too large");
    if (!affine) {
      for (int i = 0; i < n; ++i) {
        const double center = inst.y[i] - thetaq[i];
        integer_range(center - psi_val, center + psi_val, first[i], last[i]);
        if (last[i] < first[i]) return;
      }
    } else {
      Vec gap(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) gap[i] = inst.y[i] - thetaq[i];
      const Vec center = mat_vec(affine->phi_inv, gap);
      const double hw = affine->halfwidth_factor * psi_val;
      for (int i = 0; i < n; ++i) {
        integer_range(center[i] - hw, center[i] + hw, first[i], last[i]);
        if (last[i] < first[i]) return;
      }
    }
    __int128 combos = 1;
    for (int i = 0; i < n; ++i) combos *= (last[i] - first[i] + 1);
    if (combos > 4'000'000) throw budget_error("solver: candidate box too large for one q");

    IVec p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[i] = first[i];
    while (true) {
      double res;
      if (!affine) {
        res = residual_sup(thetaq, p, inst.y);
      } else {
        const Vec phip = mat_vec(*inst.phi, p);
        res = residual_sup_affine(thetaq, phip, inst.y);
      }
      if (res <= psi_val) {
        SolutionRecord rec;
        fill_component_flags(inst.partition, q, p, rec);
        if (!constrained || rec.primitive) {
          ++count;
          if (out) {
            rec.q = q;
            rec.p = p;
            rec.shell = shell;
            rec.residual = res;
            out->push_back(std::move(rec));
          }
        }
      }
      int pos = n - 1;
      while (pos >= 0 && p[pos] == last[pos]) {
        p[pos] = first[pos];
        --pos;
      }
      if (pos < 0) break;
      ++p[pos];
    }
  });
  return count;
}

void check_budget(const ProblemInstance& inst, std::int64_t Q, std::int64_t budget) {
  __int128 cells = 1;
  for (int i = 0; i < inst.m; ++i) {
    cells *= 2 * Q + 1;
    if (cells > budget) throw budget_error("solver: (2Q+1)^m exceeds enumeration budget");
  }
}

std::optional<AffineContext> make_affine_context(const ProblemInstance& inst) {
  if (!inst.phi) return std::nullopt;
  AffineContext ctx;
  try {
    ctx.phi_inv = invert(*inst.phi);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("Phi not invertible");
  }
  ctx.halfwidth_factor = inst.n * max_abs(ctx.phi_inv);
  return ctx;
}

std::vector<SolutionRecord> enumerate_impl(const ProblemInstance& inst, std::int64_t Q,
                                           bool constrained, const EnumerateOptions& opts,
                                           const AffineContext* affine) {
  validate_instance(inst);
  if (Q < 1) throw std::invalid_argument("solver: Q must be >= 1");
  check_budget(inst, Q, opts.budget);
  std::vector<std::vector<SolutionRecord>> per_shell(static_cast<std::size_t>(Q) + 1);
  const bool par = opts.exec == Exec::parallel;
  std::exception_ptr err;
#pragma omp parallel for schedule(guided) if (par)
  for (std::int64_t s = 1; s <= Q; ++s) {
    try {
      enumerate_shell(inst, s, constrained, affine, &per_shell[static_cast<std::size_t>(s)]);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  std::vector<SolutionRecord> all;
  for (auto& shell : per_shell)
    for (auto& rec : shell) all.push_back(std::move(rec));
  return all;
}

}  // namespace

void validate_instance(const ProblemInstance& inst) {
  if (inst.m < 1 || inst.n < 1) throw std::invalid_argument("instance: m and n must be >= 1");
  if (inst.theta.rows != inst.n || inst.theta.cols != inst.m)
    throw std::invalid_argument("instance: theta must be n x m");
  if (static_cast<int>(inst.y.size()) != inst.n) throw std::invalid_argument("instance: y must have length n");
  if (inst.partition.m != inst.m || inst.partition.n != inst.n)
    throw std::invalid_argument("instance: partition dimensions disagree with (m, n)");
  if (inst.phi) {
    if (inst.phi->rows != inst.n || inst.phi->cols != inst.n)
      throw std::invalid_argument("instance: phi must be n x n");
    make_affine_context(inst);  // throws "Phi not invertible" when degenerate
  }
}

std::vector<SolutionRecord> enumerate_solutions(const ProblemInstance& inst, std::int64_t Q,
                                                bool constrained, const EnumerateOptions& opts) {
  if (inst.phi) throw std::invalid_argument("enumerate_solutions: instance has phi; use enumerate_affine");
  return enumerate_impl(inst, Q, constrained, opts, nullptr);
}

std::vector<SolutionRecord> enumerate_affine(const ProblemInstance& inst, std::int64_t Q,
                                             bool constrained, const EnumerateOptions& opts) {
  if (!inst.phi) throw std::invalid_argument("enumerate_affine: instance has no phi");
  validate_instance(inst);
  const auto ctx = make_affine_context(inst);
  return enumerate_impl(inst, Q, constrained, opts, &*ctx);
}

GrowthCurve growth_curve(const ProblemInstance& inst, const std::vector<std::int64_t>& Qs,
                         bool constrained, const EnumerateOptions& opts) {
  if (Qs.empty()) throw std::invalid_argument("growth_curve: empty Q schedule");
  for (std::size_t i = 1; i < Qs.size(); ++i)
    if (Qs[i] <= Qs[i - 1]) throw std::invalid_argument("growth_curve: Q schedule must be increasing");
  if (Qs.front() < 1) throw std::invalid_argument("growth_curve: Q must be >= 1");
  validate_instance(inst);
  const std::int64_t Qmax = Qs.back();
  check_budget(inst, Qmax, opts.budget);
  const auto affine = make_affine_context(inst);
  const AffineContext* ctx = affine ? &*affine : nullptr;

  std::vector<std::int64_t> shell_counts(static_cast<std::size_t>(Qmax) + 1, 0);
  const bool par = opts.exec == Exec::parallel;
  std::exception_ptr err;
#pragma omp parallel for schedule(guided) if (par)
  for (std::int64_t s = 1; s <= Qmax; ++s) {
    try {
      shell_counts[static_cast<std::size_t>(s)] = enumerate_shell(inst, s, constrained, ctx, nullptr);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  GrowthCurve curve;
  curve.Q = Qs;
  std::size_t qi = 0;
  std::int64_t cumulative = 0;
  for (std::int64_t s = 1; s <= Qmax && qi < Qs.size(); ++s) {
    cumulative += shell_counts[static_cast<std::size_t>(s)];
    while (qi < Qs.size() && Qs[qi] == s) {
      curve.N.push_back(cumulative);
      ++qi;
    }
  }
  for (std::int64_t q : Qs) curve.S.push_back(series_partial_sum(inst.psi, inst.m, inst.n, q));
  return curve;
}

std::vector<Interval> fiber_hypercube(const Mat& theta_rest, const Mat& phi, const Vec& y,
                                      const IVec& v, double psi_value) {
  const int n = phi.rows;
  if (phi.cols != n) throw std::invalid_argument("fiber_hypercube: phi must be square");
  if (theta_rest.rows != n) throw std::invalid_argument("fiber_hypercube: theta_rest must have n rows");
  if (static_cast<int>(y.size()) != n) throw std::invalid_argument("fiber_hypercube: y must have length n");
  const int m = theta_rest.cols + 1;
  if (static_cast<int>(v.size()) != m + n) throw std::invalid_argument("fiber_hypercube: v must have length m+n");
  if (psi_value < 0) throw std::invalid_argument("fiber_hypercube: psi_value must be >= 0");
  const std::int64_t q1 = v[0];
  if (q1 == 0) throw std::invalid_argument("fiber_hypercube: q1 must be nonzero");
  const double aq1 = std::fabs(static_cast<double>(q1));

  IVec q_rest(v.begin() + 1, v.begin() + m);
  IVec p(v.begin() + m, v.end());
  const Vec theta_qrest = mat_vec(theta_rest, q_rest);
  const Vec phip = mat_vec(phi, p);

  std::vector<Interval> cube(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double center = (-phip[i] - theta_qrest[i] + y[i]) / aq1;
    const double half = psi_value / aq1;
    cube[i] = {center - half, center + half};
  }
  return cube;
}

}  // namespace pp
