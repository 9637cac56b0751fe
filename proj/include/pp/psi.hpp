#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pp {

// Approximating function psi: N -> (0, inf) with the two scalings that the
// experiments need: an integer multiplier kappa and an integer dilation l,
// so that eval(j) = kappa * psi_base(l * j).
enum class PsiKind { power, logpow, table };

struct PsiFunction {
  PsiKind kind = PsiKind::power;
  double c = 1.0;               // power/logpow: leading constant, > 0
  double s = 1.0;               // exponent of x, >= 0
  double t = 0.0;               // logpow only: exponent of log(x+1), >= 0
  std::vector<double> table;    // table kind: table[j-1] = psi(j), last value extends
  std::int64_t kappa = 1;
  std::int64_t l = 1;
};

PsiFunction make_power_psi(double c, double s);
PsiFunction make_logpow_psi(double c, double s, double t);
PsiFunction make_table_psi(std::vector<double> values);

// kappa * psi(l*j); j must be >= 1
double psi_eval(const PsiFunction& f, std::int64_t j);

// true iff j^(m-1) * eval(j)^n is non-increasing over 1..Jmax, allowing
// relative slack 1e-12 for float noise
bool check_decay_hypothesis(const PsiFunction& f, int m, int n, std::int64_t Jmax);

// sum_{j=1..Q} j^(m-1) * eval(j)^n, ascending with Kahan compensation
double series_partial_sum(const PsiFunction& f, int m, int n, std::int64_t Q);

// l^-m * sum_{j=l..Q} j^(m-1) psi(j)^n, together with the partial sum of the
// dilated function up to floor(Q/l); the latter dominates the former whenever
// the decay hypothesis holds, and the function asserts it.
struct ScaledSeriesBound {
  double bound = 0.0;
  double dilated_partial_sum = 0.0;
};
ScaledSeriesBound scaled_series_lower_bound(const PsiFunction& f, int m, int n, std::int64_t l,
                                            std::int64_t Q);

// spec strings: "power:c=1,s=1.5", "logpow:c=1,s=1,t=1", "table:@file.csv";
// optional ",kappa=K,l=L" suffixes on any kind
std::string to_string(const PsiFunction& f);
PsiFunction parse_psi(const std::string& spec);

}  // namespace pp
