#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pp/common.hpp"
#include "pp/linalg.hpp"

namespace pp {

// Partition of the index set {1, ..., m+n} into components of size >= 2.
// The first m indices address the q-block of a vector (q,p)^t, the last n
// the p-block.  A vector belongs to P(pi) when, for every component, the
// coordinates it selects are coprime.
struct Partition {
  int m = 0;
  int n = 0;
  std::vector<std::vector<int>> components;  // 1-based, each sorted ascending

  int dimension() const { return m + n; }
  int size() const { return static_cast<int>(components.size()); }
};

// Checks disjointness, coverage and the minimum component size; returns the
// partition with components and their elements in canonical sorted order.
Partition validate_partition(int m, int n, std::vector<std::vector<int>> components);

// True iff every component has at least n+1 elements (the ergodicity
// threshold for the associated group action).
bool meets_ergodicity_bound(const Partition& p);

// Membership in P(pi): per-component coprimality of the selected coordinates.
bool is_in_P_pi(const IVec& v, const Partition& p);

// Renumbered form: after applying `perm`, components 1..a are the mixed ones
// and contain {j, m+j}, components a+1..b sit inside the p-block, and
// components b+1..k inside the q-block.  `perm` fixes the q- and p-blocks
// setwise; perm[i-1] is the new index of old index i.
struct NormalizedPartition {
  Partition base;
  Partition renumbered;
  std::vector<int> perm;
  int a = 0;
  int b = 0;
};

NormalizedPartition normalize(const Partition& p);

// Applies the renumbering to a vector: out[perm[i]-1] = v[i-1].
IVec apply_permutation(const std::vector<int>& perm, const IVec& v);

// Exact count of p in {1..floor(beta*|q|)}^n with (q,p)^t in P(pi), the
// indices taken in renumbered order.  Requires q to already satisfy the
// pure-q components' coprimality ("q not admissible" otherwise).
std::int64_t count_admissible_p(const IVec& q, double beta, const NormalizedPartition& np,
                                std::int64_t budget = kDefaultBudget, Exec exec = Exec::parallel);

// Plain-text form "m=3 n=1 pi={1,2}/{3,4}"; parse(to_string(p)) == p.
std::string to_string(const Partition& p);
Partition parse_partition(const std::string& text);

}  // namespace pp
