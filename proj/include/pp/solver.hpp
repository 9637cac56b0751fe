#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pp/common.hpp"
#include "pp/linalg.hpp"
#include "pp/partition.hpp"
#include "pp/psi.hpp"

namespace pp {

// Everything defining the inequality |theta q + phi p - y| <= psi(|q|):
// dimensions, coefficient matrices, target, approximating function and the
// coprimality pattern.  An absent phi means the normalized system (phi = I).
struct ProblemInstance {
  int m = 1;
  int n = 1;
  Mat theta;                // n x m
  std::optional<Mat> phi;   // n x n, must be invertible when present
  Vec y;                    // length n
  PsiFunction psi;
  Partition partition;
};

// Throws std::invalid_argument when dimensions are inconsistent or phi is
// present but not safely invertible.
void validate_instance(const ProblemInstance& inst);

struct SolutionRecord {
  IVec q;                    // length m, q != 0
  IVec p;                    // length n
  std::int64_t shell = 0;    // |q| sup norm
  double residual = 0.0;     // |theta q + phi p - y| sup norm
  std::vector<bool> component_primitive;  // per component of the partition
  bool primitive = false;                 // all components coprime
};

struct EnumerateOptions {
  std::int64_t budget = kDefaultBudget;
  Exec exec = Exec::parallel;
};

// All solutions with 1 <= |q| <= Q, ordered by shell then lexicographically
// in q then in p.  `constrained` keeps only records in P(pi).  Results are
// independent of the execution policy.
std::vector<SolutionRecord> enumerate_solutions(const ProblemInstance& inst, std::int64_t Q,
                                                bool constrained, const EnumerateOptions& opts = {});

// Same contract with phi present: p candidates come from the box around
// phi^-1 (y - theta q) of half-width n*|phi^-1|*psi per coordinate, each
// verified against the exact inequality before acceptance.
std::vector<SolutionRecord> enumerate_affine(const ProblemInstance& inst, std::int64_t Q,
                                             bool constrained, const EnumerateOptions& opts = {});

// N(Q) = number of solutions with |q| <= Q (counted without materializing
// records) alongside S(Q) = series_partial_sum(psi, m, n, Q).
struct GrowthCurve {
  std::vector<std::int64_t> Q;
  std::vector<std::int64_t> N;
  std::vector<double> S;
};

GrowthCurve growth_curve(const ProblemInstance& inst, const std::vector<std::int64_t>& Qs,
                         bool constrained, const EnumerateOptions& opts = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// The fiber of a solution v = (q, p)^t over the first column of theta: the
// set of first-column vectors xi keeping v a solution is the product of the
// n closed intervals returned here, each of length 2*psi_value/|q1| with a
// center that does not depend on psi_value.
//   theta_rest: n x (m-1) (the remaining columns), phi: n x n, y: length n.
std::vector<Interval> fiber_hypercube(const Mat& theta_rest, const Mat& phi, const Vec& y,
                                      const IVec& v, double psi_value);

}  // namespace pp
