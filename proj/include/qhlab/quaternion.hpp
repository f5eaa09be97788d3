#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qhlab/matrix.hpp"
#include "qhlab/rational.hpp"

namespace qhlab {

/// Quaternion re + im_i i + im_j j + im_k k with exact rational components.
struct Quaternion {
  Rational re, im_i, im_j, im_k;

  Quaternion() = default;
  Quaternion(Rational a, Rational b = 0, Rational c = 0, Rational d = 0)  // NOLINT
      : re(std::move(a)), im_i(std::move(b)), im_j(std::move(c)), im_k(std::move(d)) {}

  static Quaternion unit(int u) {
    switch (u) {
      case 0: return {1, 0, 0, 0};
      case 1: return {0, 1, 0, 0};
      case 2: return {0, 0, 1, 0};
      case 3: return {0, 0, 0, 1};
      default: throw std::out_of_range("Quaternion::unit: index must be 0..3");
    }
  }

  [[nodiscard]] Rational operator[](int u) const {
    switch (u) {
      case 0: return re;
      case 1: return im_i;
      case 2: return im_j;
      default: return im_k;
    }
  }
  Rational& at(int u) {
    switch (u) {
      case 0: return re;
      case 1: return im_i;
      case 2: return im_j;
      default: return im_k;
    }
  }

  [[nodiscard]] Quaternion conj() const { return {re, -im_i, -im_j, -im_k}; }
  [[nodiscard]] Rational norm2() const { return re * re + im_i * im_i + im_j * im_j + im_k * im_k; }
  [[nodiscard]] Quaternion real_part() const { return {re, 0, 0, 0}; }
  [[nodiscard]] Quaternion imag_part() const { return {0, im_i, im_j, im_k}; }
  [[nodiscard]] bool is_zero() const { return re.is_zero() && im_i.is_zero() && im_j.is_zero() && im_k.is_zero(); }
  [[nodiscard]] Quaternion inverse() const {
    Rational n = norm2();
    if (n.is_zero()) throw std::domain_error("Quaternion: inverse of zero");
    Quaternion c = conj();
    return {c.re / n, c.im_i / n, c.im_j / n, c.im_k / n};
  }

  Quaternion& operator+=(const Quaternion& o) {
    re += o.re; im_i += o.im_i; im_j += o.im_j; im_k += o.im_k;
    return *this;
  }
  Quaternion& operator-=(const Quaternion& o) {
    re -= o.re; im_i -= o.im_i; im_j -= o.im_j; im_k -= o.im_k;
    return *this;
  }
  friend Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
  friend Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
  friend Quaternion operator-(const Quaternion& a) { return {-a.re, -a.im_i, -a.im_j, -a.im_k}; }
  friend Quaternion operator*(const Quaternion& a, const Rational& s) {
    return {a.re * s, a.im_i * s, a.im_j * s, a.im_k * s};
  }
  friend Quaternion operator*(const Rational& s, const Quaternion& a) { return a * s; }

  /// Hamilton product.
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.re * b.re - a.im_i * b.im_i - a.im_j * b.im_j - a.im_k * b.im_k,
            a.re * b.im_i + a.im_i * b.re + a.im_j * b.im_k - a.im_k * b.im_j,
            a.re * b.im_j - a.im_i * b.im_k + a.im_j * b.re + a.im_k * b.im_i,
            a.re * b.im_k + a.im_i * b.im_j - a.im_j * b.im_i + a.im_k * b.re};
  }

  friend bool operator==(const Quaternion& a, const Quaternion& b) {
    return a.re == b.re && a.im_i == b.im_i && a.im_j == b.im_j && a.im_k == b.im_k;
  }
  friend bool operator!=(const Quaternion& a, const Quaternion& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << "(" << q.re << ", " << q.im_i << ", " << q.im_j << ", " << q.im_k << ")";
  }
};

inline Quaternion qmul(const Quaternion& a, const Quaternion& b) { return a * b; }

/// 4x4 real matrix of x -> a x on H = R^4 (basis 1, i, j, k).
inline RatMatrix left_mult_matrix(const Quaternion& a) {
  RatMatrix m(4, 4);
  for (int u = 0; u < 4; ++u) {
    Quaternion col = a * Quaternion::unit(u);
    for (int r = 0; r < 4; ++r) m(r, u) = col[r];
  }
  return m;
}

/// 4x4 real matrix of x -> x a.
inline RatMatrix right_mult_matrix(const Quaternion& a) {
  RatMatrix m(4, 4);
  for (int u = 0; u < 4; ++u) {
    Quaternion col = Quaternion::unit(u) * a;
    for (int r = 0; r < 4; ++r) m(r, u) = col[r];
  }
  return m;
}

using QVector = std::vector<Quaternion>;

/// g(q1, q2) = Re(sum_p q1_p conj(q2_p)).
inline Rational hermitian_metric(const QVector& q1, const QVector& q2) {
  if (q1.size() != q2.size()) throw std::invalid_argument("hermitian_metric: length mismatch");
  Rational s(0);
  for (std::size_t p = 0; p < q1.size(); ++p) s += (q1[p] * q2[p].conj()).re;
  return s;
}

/// Quaternion-valued product <q1, q2> = sum_p conj(q1_p) q2_p, right-linear in q2.
inline Quaternion hermitian_product(const QVector& q1, const QVector& q2) {
  if (q1.size() != q2.size()) throw std::invalid_argument("hermitian_product: length mismatch");
  Quaternion s;
  for (std::size_t p = 0; p < q1.size(); ++p) s += q1[p].conj() * q2[p];
  return s;
}

/// Quaternionic matrix acting on column vectors from the left; scalars act on the right.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("QMatrix: dimensions must be positive");
  }
  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Quaternion(1);
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  Quaternion& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
  const Quaternion& operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("QMatrix: shape mismatch");
    QMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j)
        for (std::size_t k = 0; k < a.cols_; ++k) out(i, j) += a(i, k) * b(k, j);
    return out;
  }
  friend QMatrix operator+(QMatrix a, const QMatrix& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.e_.size(); ++i) a.e_[i] += b.e_[i];
    return a;
  }
  friend QMatrix operator-(QMatrix a, const QMatrix& b) {
    a.check_same(b);
    for (std::size_t i = 0; i < a.e_.size(); ++i) a.e_[i] -= b.e_[i];
    return a;
  }
  friend bool operator==(const QMatrix& a, const QMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
  }

  [[nodiscard]] QMatrix adjoint() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j).conj();
    return t;
  }

  [[nodiscard]] QVector apply(const QVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("QMatrix::apply: length mismatch");
    QVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

 private:
  void check_same(const QMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("QMatrix: shape mismatch");
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Quaternion> e_;
};

/// Real 4r x 4c matrix of the left action of m on H^c = R^{4c}.
inline RatMatrix realify(const QMatrix& m) {
  RatMatrix out(4 * m.rows(), 4 * m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m(r, c).is_zero()) continue;
      RatMatrix b = left_mult_matrix(m(r, c));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(4 * r + i, 4 * c + j) = b(i, j);
    }
  return out;
}

/// Real coordinates of a quaternionic column vector (slot-major, 1,i,j,k per slot).
inline RatVector to_real(const QVector& v) {
  RatVector out(4 * v.size());
  for (std::size_t p = 0; p < v.size(); ++p)
    for (int u = 0; u < 4; ++u) out[4 * p + u] = v[p][u];
  return out;
}

inline QVector from_real(const RatVector& x) {
  if (x.size() % 4 != 0) throw std::invalid_argument("from_real: length not divisible by 4");
  QVector out(x.size() / 4);
  for (std::size_t p = 0; p < out.size(); ++p)
    out[p] = Quaternion(x[4 * p], x[4 * p + 1], x[4 * p + 2], x[4 * p + 3]);
  return out;
}

/// Basis of sp(p, q) = { X : X^dag eta + eta X = 0 }, eta = diag(I_p, -I_q).
/// Order: imaginary units on each diagonal slot, then for each slot pair (a < b) the four
/// elements with X_ab = u and X_ba = -eta_a eta_b conj(u), u in {1, i, j, k}.
inline std::vector<QMatrix> sp_basis(std::size_t p, std::size_t q) {
  const std::size_t m = p + q;
  if (m == 0) throw std::invalid_argument("sp_basis: p + q must be at least 1");
  auto eta = [p](std::size_t a) { return a < p ? 1 : -1; };
  std::vector<QMatrix> basis;
  basis.reserve(m * (2 * m + 1));
  for (std::size_t a = 0; a < m; ++a)
    for (int u = 1; u < 4; ++u) {
      QMatrix x(m, m);
      x(a, a) = Quaternion::unit(u);
      basis.push_back(x);
    }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (int u = 0; u < 4; ++u) {
        QMatrix x(m, m);
        Quaternion e = Quaternion::unit(u);
        x(a, b) = e;
        x(b, a) = e.conj() * Rational(-eta(a) * eta(b));
        basis.push_back(x);
      }
  return basis;
}

/// True when X^dag eta + eta X = 0 for eta = diag(I_p, -I_q).
inline bool in_sp(const QMatrix& x, std::size_t p) {
  if (x.rows() != x.cols()) return false;
  const std::size_t m = x.rows();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      Rational ea = a < p ? 1 : -1, eb = b < p ? 1 : -1;
      if (x(b, a).conj() * eb + x(a, b) * ea != Quaternion()) return false;
    }
  return true;
}

}  // namespace qhlab
