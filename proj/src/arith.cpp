#include "pp/arith.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pp {

namespace {

std::int64_t iabs(std::int64_t x) { return x < 0 ? -x : x; }

void require_positive(std::int64_t n, const char* op) {
  if (n < 1) throw std::invalid_argument(std::string(op) + ": argument must be >= 1");
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  Rational r;
  std::size_t pos = 0;
  if (slash == std::string::npos) {
    r.num = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("malformed rational: " + text);
    r.den = 1;
  } else {
    r.num = std::stoll(text.substr(0, slash), &pos);
    if (pos != slash) throw std::invalid_argument("malformed rational: " + text);
    r.den = std::stoll(text.substr(slash + 1), &pos);
    if (pos != text.size() - slash - 1) throw std::invalid_argument("malformed rational: " + text);
  }
  if (r.num <= 0 || r.den <= 0) throw std::invalid_argument("rational must be positive: " + text);
  return r;
}

std::string to_string(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::int64_t gcd_many(const std::vector<std::int64_t>& values) {
  if (values.empty()) throw std::invalid_argument("empty gcd");
  std::int64_t g = 0;
  for (std::int64_t v : values) {
    g = std::gcd(g, iabs(v));
    if (g == 1) break;
  }
  return g;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  require_positive(n, "prime_factors");
  std::vector<std::int64_t> ps;
  for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  require_positive(n, "divisors");
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  for (auto it = large.rbegin(); it != large.rend(); ++it) small.push_back(*it);
  return small;
}

int moebius(std::int64_t n) {
  require_positive(n, "moebius");
  int k = 0;
  for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      ++k;
    }
  }
  if (n > 1) ++k;
  return (k & 1) ? -1 : 1;
}

std::int64_t euler_phi(std::int64_t n) {
  require_positive(n, "euler_phi");
  std::int64_t phi = n;
  for (std::int64_t p : prime_factors(n)) phi -= phi / p;
  return phi;
}

std::int64_t legendre_sieve_count(const SieveCountQuery& query) {
  if (query.beta.num <= 0 || query.beta.den <= 0) throw std::invalid_argument("beta must be positive");
  if (query.Q < 1) throw std::invalid_argument("Q must be >= 1");
  if (query.q < 1) throw std::invalid_argument("q must be >= 1");
  const __int128 numQ = static_cast<__int128>(query.beta.num) * query.Q;
  if (numQ > static_cast<__int128>(INT64_MAX)) throw std::overflow_error("beta*Q exceeds 64-bit range");
  std::int64_t total = 0;
  for (std::int64_t d : divisors(query.q)) {
    const int mu = moebius(d);
    if (mu == 0) continue;
    const __int128 denom = static_cast<__int128>(query.beta.den) * d;
    const std::int64_t term = static_cast<std::int64_t>(numQ / denom);  // exact floor, all positive
    total += mu * term;
  }
  return total;
}

ZetaValue zeta(int d, double tolerance) {
  if (d <= 1) throw std::invalid_argument("divergent series");
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  // Tail bracket half-width shrinks like N^-d / 2; grow N until it is inside
  // the tolerance, leaving room for summation rounding.
  std::int64_t N = 16;
  auto tail_lo = [&](std::int64_t n) { return std::pow(static_cast<double>(n) + 1.0, 1.0 - d) / (d - 1); };
  auto tail_hi = [&](std::int64_t n) { return std::pow(static_cast<double>(n), 1.0 - d) / (d - 1); };
  while ((tail_hi(N) - tail_lo(N)) / 2 > tolerance / 2) {
    N *= 2;
    if (N > (std::int64_t(1) << 28)) throw std::invalid_argument("tolerance unattainably small");
  }
  // Sum ascending with Kahan compensation; rounding stays near machine eps.
  double sum = 0.0, comp = 0.0;
  for (std::int64_t k = 1; k <= N; ++k) {
    const double term = std::pow(static_cast<double>(k), -static_cast<double>(d));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double lo = tail_lo(N), hi = tail_hi(N);
  ZetaValue out;
  out.value = sum + (lo + hi) / 2;
  out.error_bound = (hi - lo) / 2 + 8e-16 * out.value;
  out.terms = N;
  if (out.error_bound > tolerance) throw std::logic_error("zeta certificate exceeded tolerance");
  return out;
}

namespace {

// 1 + Q + Q^2 + ... is never needed; only Q^k with k < d, guarded upstream.
std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Count completions of a prefix with running gcd g and `rest` free slots.
// Once the prefix gcd hits 1 every completion counts, so whole subtrees
// collapse to Q^rest.
std::int64_t count_completions(std::int64_t g, int rest, std::int64_t Q) {
  if (g == 1) return ipow(Q, rest);
  if (rest == 0) return 0;
  std::int64_t total = 0;
  for (std::int64_t v = 1; v <= Q; ++v) total += count_completions(std::gcd(g, v), rest - 1, Q);
  return total;
}

}  // namespace

std::int64_t count_primitive_in_box(int d, std::int64_t Q, std::int64_t budget, Exec exec) {
  if (d < 2) throw std::invalid_argument("count_primitive_in_box: d must be >= 2");
  if (Q < 1) throw std::invalid_argument("count_primitive_in_box: Q must be >= 1");
  __int128 cells = 1;
  for (int i = 0; i < d; ++i) {
    cells *= Q;
    if (cells > budget) throw budget_error("count_primitive_in_box: Q^d exceeds enumeration budget");
  }
  std::int64_t total = 0;
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : total) if (par)
  for (std::int64_t q1 = 1; q1 <= Q; ++q1) total += count_completions(q1, d - 1, Q);
  return total;
}

}  // namespace pp
