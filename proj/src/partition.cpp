#include "pp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pp/arith.hpp"

namespace pp {

Partition validate_partition(int m, int n, std::vector<std::vector<int>> components) {
  if (m < 1 || n < 1) throw std::invalid_argument("partition: m and n must be >= 1");
  const int d = m + n;
  std::vector<int> owner(static_cast<std::size_t>(d) + 1, -1);
  for (std::size_t j = 0; j < components.size(); ++j) {
    auto& comp = components[j];
    if (comp.size() < 2) throw std::invalid_argument("partition: component " + std::to_string(j + 1) + " has fewer than 2 elements");
    std::sort(comp.begin(), comp.end());
    for (int idx : comp) {
      if (idx < 1 || idx > d) throw std::invalid_argument("partition: index " + std::to_string(idx) + " outside 1.." + std::to_string(d));
      if (owner[idx] != -1)
        throw std::invalid_argument("partition: index " + std::to_string(idx) + " appears in components " +
                                    std::to_string(owner[idx] + 1) + " and " + std::to_string(j + 1));
      owner[idx] = static_cast<int>(j);
    }
  }
  for (int idx = 1; idx <= d; ++idx)
    if (owner[idx] == -1) throw std::invalid_argument("partition: index " + std::to_string(idx) + " is not covered");
  std::sort(components.begin(), components.end());
  Partition p;
  p.m = m;
  p.n = n;
  p.components = std::move(components);
  return p;
}

bool meets_ergodicity_bound(const Partition& p) {
  for (const auto& comp : p.components)
    if (static_cast<int>(comp.size()) < p.n + 1) return false;
  return true;
}

bool is_in_P_pi(const IVec& v, const Partition& p) {
  if (static_cast<int>(v.size()) != p.dimension())
    throw std::invalid_argument("is_in_P_pi: vector length " + std::to_string(v.size()) + " != " + std::to_string(p.dimension()));
  for (const auto& comp : p.components) {
    std::int64_t g = 0;
    for (int idx : comp) {
      const std::int64_t x = v[idx - 1];
      g = std::gcd(g, x < 0 ? -x : x);
      if (g == 1) break;
    }
    if (g != 1) return false;
  }
  return true;
}

NormalizedPartition normalize(const Partition& p) {
  const int m = p.m, n = p.n;
  struct CompInfo {
    std::vector<int> qside, pside;
    int order_key;
  };
  std::vector<CompInfo> mixed, pure_p, pure_q;
  for (const auto& comp : p.components) {
    CompInfo info;
    for (int idx : comp) (idx <= m ? info.qside : info.pside).push_back(idx);
    if (!info.qside.empty() && !info.pside.empty()) {
      info.order_key = info.qside.front();
      mixed.push_back(std::move(info));
    } else if (info.qside.empty()) {
      info.order_key = info.pside.front();
      pure_p.push_back(std::move(info));
    } else {
      info.order_key = info.qside.front();
      pure_q.push_back(std::move(info));
    }
  }
  auto by_key = [](const CompInfo& x, const CompInfo& y) { return x.order_key < y.order_key; };
  std::sort(mixed.begin(), mixed.end(), by_key);
  std::sort(pure_p.begin(), pure_p.end(), by_key);
  std::sort(pure_q.begin(), pure_q.end(), by_key);

  const int a = static_cast<int>(mixed.size());
  const int b = a + static_cast<int>(pure_p.size());

  // Mixed component j gets its smallest q-index sent to j and its smallest
  // p-index to m+j; every remaining old index fills the leftover slots of its
  // own block in increasing order.
  std::vector<int> perm(static_cast<std::size_t>(m + n) + 1, 0);  // 1-based
  std::vector<char> old_taken(static_cast<std::size_t>(m + n) + 1, 0);
  std::vector<char> slot_taken(static_cast<std::size_t>(m + n) + 1, 0);
  for (int j = 0; j < a; ++j) {
    const int qrep = mixed[j].qside.front();
    const int prep = mixed[j].pside.front();
    perm[qrep] = j + 1;
    perm[prep] = m + j + 1;
    old_taken[qrep] = old_taken[prep] = 1;
    slot_taken[j + 1] = slot_taken[m + j + 1] = 1;
  }
  int slot = 1;
  for (int idx = 1; idx <= m; ++idx) {
    if (old_taken[idx]) continue;
    while (slot_taken[slot]) ++slot;
    perm[idx] = slot;
    slot_taken[slot] = 1;
  }
  slot = m + 1;
  for (int idx = m + 1; idx <= m + n; ++idx) {
    if (old_taken[idx]) continue;
    while (slot_taken[slot]) ++slot;
    perm[idx] = slot;
    slot_taken[slot] = 1;
  }

  std::vector<std::vector<int>> renum;
  auto push_renumbered = [&](const CompInfo& info) {
    std::vector<int> comp;
    for (int idx : info.qside) comp.push_back(perm[idx]);
    for (int idx : info.pside) comp.push_back(perm[idx]);
    std::sort(comp.begin(), comp.end());
    renum.push_back(std::move(comp));
  };
  for (const auto& c : mixed) push_renumbered(c);
  for (const auto& c : pure_p) push_renumbered(c);
  for (const auto& c : pure_q) push_renumbered(c);

  NormalizedPartition np;
  np.base = p;
  np.renumbered.m = m;
  np.renumbered.n = n;
  np.renumbered.components = std::move(renum);
  np.perm.assign(perm.begin() + 1, perm.end());
  np.a = a;
  np.b = b;
  return np;
}

IVec apply_permutation(const std::vector<int>& perm, const IVec& v) {
  if (perm.size() != v.size()) throw std::invalid_argument("apply_permutation: size mismatch");
  IVec out(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(perm[i]) - 1] = v[i];
  return out;
}

std::int64_t count_admissible_p(const IVec& q, double beta, const NormalizedPartition& np,
                                std::int64_t budget, Exec exec) {
  const int m = np.renumbered.m, n = np.renumbered.n;
  if (static_cast<int>(q.size()) != m) throw std::invalid_argument("count_admissible_p: q has wrong length");
  for (std::int64_t qi : q)
    if (qi < 1) throw std::invalid_argument("count_admissible_p: q must be positive");
  if (!(beta > 0)) throw std::invalid_argument("count_admissible_p: beta must be positive");
  // hypothesis: pure-q components must already be coprime in q
  const int k = np.renumbered.size();
  for (int j = np.b; j < k; ++j) {
    std::int64_t g = 0;
    for (int idx : np.renumbered.components[j]) g = std::gcd(g, q[idx - 1]);
    if (g != 1) throw std::invalid_argument("q not admissible");
  }
  const std::int64_t qnorm = sup_norm(q);
  const auto bound = static_cast<std::int64_t>(std::floor(beta * static_cast<double>(qnorm)));
  if (bound < 1) return 0;
  __int128 cells = 1;
  for (int i = 0; i < n; ++i) {
    cells *= bound;
    if (cells > budget) throw budget_error("count_admissible_p: box exceeds enumeration budget");
  }
  std::int64_t total = 0;
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) reduction(+ : total) if (par && n > 1)
  for (std::int64_t p1 = 1; p1 <= bound; ++p1) {
    IVec v(static_cast<std::size_t>(m + n));
    std::copy(q.begin(), q.end(), v.begin());
    v[m] = p1;
    IVec rest(static_cast<std::size_t>(n - 1), 1);
    std::int64_t local = 0;
    while (true) {
      for (int i = 1; i < n; ++i) v[m + i] = rest[i - 1];
      if (is_in_P_pi(v, np.renumbered)) ++local;
      int pos = n - 2;
      while (pos >= 0 && rest[pos] == bound) {
        rest[pos] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++rest[pos];
    }
    total += local;
  }
  return total;
}

std::string to_string(const Partition& p) {
  std::ostringstream os;
  os << "m=" << p.m << " n=" << p.n << " pi=";
  for (std::size_t j = 0; j < p.components.size(); ++j) {
    if (j) os << "/";
    os << "{";
    for (std::size_t i = 0; i < p.components[j].size(); ++i) {
      if (i) os << ",";
      os << p.components[j][i];
    }
    os << "}";
  }
  return os.str();
}

Partition parse_partition(const std::string& text) {
  int m = -1, n = -1;
  std::string pi;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok.rfind("m=", 0) == 0)
      m = std::stoi(tok.substr(2));
    else if (tok.rfind("n=", 0) == 0)
      n = std::stoi(tok.substr(2));
    else if (tok.rfind("pi=", 0) == 0)
      pi = tok.substr(3);
    else
      throw std::invalid_argument("partition: unexpected token '" + tok + "'");
  }
  if (m < 0 || n < 0 || pi.empty()) throw std::invalid_argument("partition: need m=, n= and pi=");
  std::vector<std::vector<int>> components;
  std::size_t pos = 0;
  while (pos < pi.size()) {
    if (pi[pos] != '{') throw std::invalid_argument("partition: expected '{' in '" + pi + "'");
    const auto close = pi.find('}', pos);
    if (close == std::string::npos) throw std::invalid_argument("partition: unbalanced '{'");
    std::vector<int> comp;
    std::istringstream cs(pi.substr(pos + 1, close - pos - 1));
    std::string num;
    while (std::getline(cs, num, ',')) comp.push_back(std::stoi(num));
    components.push_back(std::move(comp));
    pos = close + 1;
    if (pos < pi.size()) {
      if (pi[pos] != '/') throw std::invalid_argument("partition: expected '/' between components");
      ++pos;
    }
  }
  return validate_partition(m, n, std::move(components));
}

}  // namespace pp
