#pragma once

#include <cstdint>
#include <vector>

#include "pp/linalg.hpp"
#include "pp/partition.hpp"
#include "pp/psi.hpp"

namespace pp {

// Elementary transvection E_{row,col}^sign acting on column vectors by
// v[row] += sign * v[col]; row != col, both inside one partition component.
struct Transvection {
  int row = 0;  // 0-based
  int col = 0;
  int sign = 1;
};

// Element of the product over components of the integer special linear
// groups supported on that component's coordinates.  Always unimodular; when
// built from a word the factorization is kept.
struct GroupElement {
  IMat matrix;
  std::vector<Transvection> word;
  bool has_word = false;
};

// All transvections (and their inverses) supported inside the components:
// 2*nu*(nu-1) generators for a component of size nu.  They generate the
// whole component-wise special linear group.
std::vector<GroupElement> group_generators(const Partition& p);

// v[t.row] += t.sign * v[t.col], applied left to right.
IVec apply_word(const std::vector<Transvection>& word, IVec v);
GroupElement word_to_element(int dim, const std::vector<Transvection>& word);

// Breadth-first closure of the all-ones base point under the generators,
// pruned to |v| <= norm_bound, exploring words up to length word_budget.
// `completed` reports whether the frontier emptied before the budget.
struct OrbitResult {
  std::vector<IVec> vectors;  // sorted lexicographically
  bool completed = false;
  std::int64_t depth_reached = 0;
};

OrbitResult orbit_ball(const Partition& p, std::int64_t norm_bound, std::int64_t word_budget);

// A word w with apply_word(w, (1,...,1)) == v, built by component-wise
// Euclidean pivot reduction; requires v in P(pi).  The word is verified by
// applying it before it is returned.
std::vector<Transvection> reduce_to_base(const IVec& v, const Partition& p);

// One-line text form "E(r,c)^+1 E(c,r)^-1 ..." with 1-based indices; the
// empty word prints as "id".  parse is the exact inverse.
std::string to_string(const std::vector<Transvection>& word);
std::vector<Transvection> parse_word(const std::string& text);

// X * g or X * g^-1, the inverse taken exactly over the integers.
Mat act_right(const Mat& X, const GroupElement& g, bool inverse);

// Transport of a solution v of |theta q + phi p - y| <= psi(a*l*|q|) by g:
// v' = g v and (theta', phi') = (theta, phi) g^-1 satisfy the same linear
// identity, so the residual is preserved exactly; when the norm threshold
// (m+n)|g||v| <= a|q| holds, |q'| <= a|q| and the residual is within the
// dilated budget psi_l(|q'|).
struct TransportRecord {
  IVec v_out;
  Mat theta_out;
  Mat phi_out;
  double residual_in = 0.0;
  double residual_out = 0.0;
  bool meets_norm_threshold = false;  // sufficient condition (m+n)|g||v| <= a|q|
  bool norm_chain_ok = false;         // |q'| <= a|q|, checked directly
  bool scaled_bound_ok = false;       // residual_out <= psi_l(|q'|), checked directly
};

TransportRecord transport_solution(const Mat& theta, const Mat& phi, const Vec& y,
                                   const PsiFunction& psi, const IVec& v, const GroupElement& g,
                                   std::int64_t l, std::int64_t a);

}  // namespace pp
