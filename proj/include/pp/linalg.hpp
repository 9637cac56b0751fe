#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pp {

using Vec = std::vector<double>;
using IVec = std::vector<std::int64_t>;

// Dense row-major real matrix, small sizes only.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  Mat(int r, int c, std::vector<double> data) : rows(r), cols(c), a(std::move(data)) {
    if (a.size() != static_cast<std::size_t>(r) * c) throw std::invalid_argument("matrix data size mismatch");
  }

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

inline Mat identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

inline double sup_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline std::int64_t sup_norm(const IVec& v) {
  std::int64_t m = 0;
  for (std::int64_t x : v) m = std::max(m, x < 0 ? -x : x);
  return m;
}

inline double euclid_norm(const IVec& v) {
  double s = 0.0;
  for (std::int64_t x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

// largest absolute entry; the operator bound used throughout is
// |M v|_inf <= cols * max_abs(M) * |v|_inf
inline double max_abs(const Mat& m) {
  double r = 0.0;
  for (double x : m.a) r = std::max(r, std::fabs(x));
  return r;
}

template <class V>
Vec mat_vec(const Mat& m, const V& v) {
  if (static_cast<int>(v.size()) != m.cols) throw std::invalid_argument("mat_vec dimension mismatch");
  Vec out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * static_cast<double>(v[j]);
    out[i] = s;
  }
  return out;
}

inline Mat mat_mul(const Mat& x, const Mat& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul dimension mismatch");
  Mat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double xv = x(i, k);
      if (xv == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += xv * y(k, j);
    }
  return out;
}

// Gauss-Jordan inverse with partial pivoting.  Throws when the matrix is
// singular or too ill-conditioned for the downstream integer rounding to be
// trusted (max-entry condition estimate above `cond_limit`).
inline Mat invert(const Mat& m, double cond_limit = 1e12) {
  if (m.rows != m.cols) throw std::invalid_argument("invert: matrix not square");
  const int n = m.rows;
  Mat a = m;
  Mat inv = identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (std::fabs(a(piv, col)) < 1e-300) throw std::invalid_argument("matrix not invertible");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const double d = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  const double cond = max_abs(m) * max_abs(inv) * n;
  if (!(cond < cond_limit)) throw std::invalid_argument("matrix not invertible (condition estimate too large)");
  return inv;
}

// ---- square integer matrices (group elements) ------------------------------

struct IMat {
  int dim = 0;
  std::vector<std::int64_t> a;

  IMat() = default;
  explicit IMat(int d) : dim(d), a(static_cast<std::size_t>(d) * d, 0) {}

  std::int64_t& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
  std::int64_t operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }

  bool operator==(const IMat& o) const { return dim == o.dim && a == o.a; }
};

inline IMat imat_identity(int d) {
  IMat m(d);
  for (int i = 0; i < d; ++i) m(i, i) = 1;
  return m;
}

inline constexpr std::int64_t kEntryLimit = std::int64_t(1) << 62;

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r) || r >= kEntryLimit || r <= -kEntryLimit)
    throw std::overflow_error("integer matrix entry overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r) || r >= kEntryLimit || r <= -kEntryLimit)
    throw std::overflow_error("integer matrix entry overflow");
  return r;
}

inline IMat imat_mul(const IMat& x, const IMat& y) {
  if (x.dim != y.dim) throw std::invalid_argument("imat_mul dimension mismatch");
  IMat out(x.dim);
  for (int i = 0; i < x.dim; ++i)
    for (int k = 0; k < x.dim; ++k) {
      const std::int64_t xv = x(i, k);
      if (xv == 0) continue;
      for (int j = 0; j < x.dim; ++j) out(i, j) = checked_add(out(i, j), checked_mul(xv, y(k, j)));
    }
  return out;
}

inline IVec imat_vec(const IMat& m, const IVec& v) {
  if (static_cast<int>(v.size()) != m.dim) throw std::invalid_argument("imat_vec dimension mismatch");
  IVec out(m.dim, 0);
  for (int i = 0; i < m.dim; ++i) {
    std::int64_t s = 0;
    for (int j = 0; j < m.dim; ++j) s = checked_add(s, checked_mul(m(i, j), v[j]));
    out[i] = s;
  }
  return out;
}

// Fraction-free Bareiss determinant; exact for the sizes in play.
inline std::int64_t imat_det(IMat m) {
  const int n = m.dim;
  if (n == 0) return 1;
  __int128 prev = 1;
  int sign = 1;
  std::vector<__int128> w(m.a.begin(), m.a.end());
  auto at = [&](int r, int c) -> __int128& { return w[static_cast<std::size_t>(r) * n + c]; };
  for (int k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      int r = k + 1;
      while (r < n && at(r, k) == 0) ++r;
      if (r == n) return 0;
      for (int j = 0; j < n; ++j) std::swap(at(k, j), at(r, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  __int128 det = at(n - 1, n - 1) * sign;
  if (det >= kEntryLimit || det <= -static_cast<__int128>(kEntryLimit)) throw std::overflow_error("determinant overflow");
  return static_cast<std::int64_t>(det);
}

// Exact inverse of a unimodular integer matrix via the adjugate.
inline IMat imat_inverse_unimodular(const IMat& m) {
  const int n = m.dim;
  const std::int64_t det = imat_det(m);
  if (det != 1 && det != -1) throw std::invalid_argument("matrix is not unimodular");
  IMat inv(n);
  if (n == 1) {
    inv(0, 0) = det;
    return inv;
  }
  IMat minor(n - 1);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int mi = 0;
      for (int i = 0; i < n; ++i) {
        if (i == r) continue;
        int mj = 0;
        for (int j = 0; j < n; ++j) {
          if (j == c) continue;
          minor(mi, mj) = m(i, j);
          ++mj;
        }
        ++mi;
      }
      const std::int64_t cof = (((r + c) & 1) ? -1 : 1) * imat_det(minor);
      inv(c, r) = det * cof;  // adjugate transpose, divided by det (= +-1)
    }
  return inv;
}

}  // namespace pp
