#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "qhlab/lie.hpp"
#include "qhlab/matrix.hpp"
#include "qhlab/rational.hpp"

namespace qhlab {

// Forms on an N-dimensional space (N <= 32) in the dual basis theta^0..theta^{N-1}.
// A basis k-form theta^{i1} ^ ... ^ theta^{ik}, i1 < ... < ik, is keyed by its bitmask.

using Mask = std::uint32_t;

inline int popcount(Mask m) { return std::popcount(m); }
inline Mask below(int i) { return (Mask{1} << i) - 1; }

/// Sign of theta^a ^ theta^b relative to theta^{a|b}; 0 if they overlap.
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (Mask bb = b; bb; bb &= bb - 1) {
    const int j = std::countr_zero(bb);
    swaps += popcount(a & ~below(j + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

/// All masks of popcount k among N bits, in increasing numeric order.
inline std::vector<Mask> masks_of_degree(int N, int k) {
  std::vector<Mask> out;
  if (k < 0 || k > N) return out;
  if (k == 0) return {0};
  Mask m = below(k);
  const Mask limit = Mask{1} << N;
  while (m < limit) {
    out.push_back(m);
    const Mask t = m | (m - 1);
    m = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(m) + 1));
  }
  return out;
}

template <class S>
class KForm {
 public:
  KForm() = default;
  KForm(int N, int k) : N_(N), k_(k) {
    if (N < 0 || N > 32 || k < 0 || k > N) throw std::invalid_argument("KForm: degree out of range");
  }

  static KForm basis(int N, Mask m, S c = S(1)) {
    KForm f(N, popcount(m));
    f.add(m, c);
    return f;
  }
  static KForm one(int N, S c = S(1)) { return basis(N, 0, c); }

  [[nodiscard]] int dim() const { return N_; }
  [[nodiscard]] int degree() const { return k_; }
  [[nodiscard]] const std::map<Mask, S>& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] S coeff(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? S(0) : it->second;
  }

  void add(Mask m, const S& c) {
    if (popcount(m) != k_) throw std::invalid_argument("KForm: term of wrong degree");
    if (qhlab::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (qhlab::is_zero(it->second)) terms_.erase(it);
    }
  }

  KForm& operator+=(const KForm& o) {
    same_shape(o);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    same_shape(o);
    for (const auto& [m, c] : o.terms_) add(m, S(0) - c);
    return *this;
  }
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  template <class T>
  [[nodiscard]] KForm scaled(const T& s) const {
    KForm out(N_, k_);
    for (const auto& [m, c] : terms_) out.add(m, c * s);
    return out;
  }
  friend bool operator==(const KForm& a, const KForm& b) {
    return a.N_ == b.N_ && a.k_ == b.k_ && a.terms_ == b.terms_;
  }

  template <class F>
  [[nodiscard]] auto map_coefficients(F f) const {
    using T = decltype(f(std::declval<S>()));
    KForm<T> out(N_, k_);
    for (const auto& [m, c] : terms_) out.add(m, f(c));
    return out;
  }

  /// Dense coefficient vector in the masks_of_degree order.
  [[nodiscard]] std::vector<S> to_dense(const std::vector<Mask>& order) const {
    std::vector<S> v(order.size(), S(0));
    for (const auto& [m, c] : terms_) {
      auto it = std::lower_bound(order.begin(), order.end(), m);
      v[it - order.begin()] = c;
    }
    return v;
  }
  static KForm from_dense(int N, int k, const std::vector<Mask>& order, const std::vector<S>& v) {
    KForm f(N, k);
    for (std::size_t i = 0; i < order.size(); ++i) f.add(order[i], v[i]);
    return f;
  }

 private:
  void same_shape(const KForm& o) const {
    if (o.N_ != N_ || o.k_ != k_) throw std::invalid_argument("KForm: shape mismatch");
  }
  int N_ = 0, k_ = 0;
  std::map<Mask, S> terms_;
};

template <class S, class T>
auto wedge(const KForm<S>& a, const KForm<T>& b) {
  using R = decltype(std::declval<S>() * std::declval<T>());
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim()) return KForm<R>(a.dim(), a.dim());
  KForm<R> out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      const int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      R v = ca * cb;
      out.add(ma | mb, s > 0 ? v : R(0) - v);
    }
  return out;
}

/// Interior product i_v with v a vector in coordinates.
template <class S>
KForm<S> interior(const RatVector& v, const KForm<S>& a) {
  if (a.degree() == 0) throw std::invalid_argument("interior: degree zero");
  KForm<S> out(a.dim(), a.degree() - 1);
  for (const auto& [m, c] : a.terms())
    for (Mask mm = m; mm; mm &= mm - 1) {
      const int i = std::countr_zero(mm);
      if (v[i].is_zero()) continue;
      const S w = c * v[i];
      out.add(m & ~(Mask{1} << i), (popcount(m & below(i)) & 1) ? S(0) - w : w);
    }
  return out;
}

/// Linear substitution theta^i -> sum_j M(i, j) theta^j extended multiplicatively.
template <class S>
KForm<S> substitute_dual(const RatMatrix& M, const KForm<S>& a) {
  const int N = a.dim();
  std::vector<KForm<Rational>> img;
  for (int i = 0; i < N; ++i) {
    KForm<Rational> f(N, 1);
    for (int j = 0; j < N; ++j) f.add(Mask{1} << j, M(i, j));
    img.push_back(std::move(f));
  }
  KForm<S> out(N, a.degree());
  for (const auto& [m, c] : a.terms()) {
    KForm<Rational> prod = KForm<Rational>::one(N);
    for (Mask mm = m; mm; mm &= mm - 1) prod = wedge(prod, img[std::countr_zero(mm)]);
    for (const auto& [mp, cp] : prod.terms()) out.add(mp, c * cp);
  }
  return out;
}

/// (A^* alpha)(X_1, ..., X_k) = alpha(A X_1, ..., A X_k).
template <class S>
KForm<S> pullback(const RatMatrix& A, const KForm<S>& a) {
  return substitute_dual(A, a);
}

/// Derivation action of an endomorphism X on forms: (X.alpha)(v_1..v_k) = -sum alpha(.., X v_i, ..).
template <class S>
KForm<S> derivation(const RatMatrix& X, const KForm<S>& a) {
  KForm<S> out(a.dim(), a.degree());
  const int N = a.dim();
  for (const auto& [m, c] : a.terms())
    for (Mask mm = m; mm; mm &= mm - 1) {
      const int i = std::countr_zero(mm);
      const Mask rest = m & ~(Mask{1} << i);
      const int s1 = popcount(m & below(i)) & 1;
      // theta^i -> -sum_j X(i, j) theta^j
      for (int j = 0; j < N; ++j) {
        if (X(i, j).is_zero() || (rest >> j & 1)) continue;
        const int s2 = popcount(rest & below(j)) & 1;
        S v = c * X(i, j);
        out.add(rest | (Mask{1} << j), ((s1 + s2 + 1) & 1) ? S(0) - v : v);
      }
    }
  return out;
}

/// Slotwise insertion: (i_A alpha)(X_1..X_k) = sum alpha(.., A X_i, ..).
template <class S>
KForm<S> endo_insert(const RatMatrix& A, const KForm<S>& a) {
  return derivation(A, a).scaled(Rational(-1));
}

/// Sparse matrix of the derivation action of X on k-forms in the masks_of_degree order.
inline SparseOp derivation_matrix(const RatMatrix& X, int N, int k, const std::vector<Mask>& order) {
  SparseOp op;
  op.cols = order.size();
  op.rows.assign(order.size(), {});
  std::vector<std::map<std::uint32_t, Rational>> rows(order.size());
  for (std::size_t col = 0; col < order.size(); ++col) {
    KForm<Rational> img = derivation(X, KForm<Rational>::basis(N, order[col]));
    for (const auto& [m, c] : img.terms()) {
      auto it = std::lower_bound(order.begin(), order.end(), m);
      rows[it - order.begin()][static_cast<std::uint32_t>(col)] += c;
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r])
      if (!v.is_zero()) op.rows[r].emplace_back(c, v);
  (void)k;
  return op;
}

/// Evaluates a form on k vectors (determinant convention).
template <class S>
S evaluate(const KForm<S>& a, const std::vector<RatVector>& vs) {
  if (static_cast<int>(vs.size()) != a.degree()) throw std::invalid_argument("evaluate: wrong number of vectors");
  S total(0);
  for (const auto& [m, c] : a.terms()) {
    std::vector<int> idx;
    for (Mask mm = m; mm; mm &= mm - 1) idx.push_back(std::countr_zero(mm));
    RatMatrix sub(vs.size(), vs.size());
    for (std::size_t r = 0; r < vs.size(); ++r)
      for (std::size_t s = 0; s < idx.size(); ++s) sub(r, s) = vs[r][idx[s]];
    // determinant by Bareiss: product of pivots up to sign is awkward; use permutation expansion for small k
    Rational det(0);
    std::vector<int> perm(idx.size());
    for (std::size_t t = 0; t < perm.size(); ++t) perm[t] = static_cast<int>(t);
    do {
      Rational p(1);
      for (std::size_t r = 0; r < perm.size() && !p.is_zero(); ++r) p *= sub(r, perm[r]);
      if (p.is_zero()) continue;
      int inv = 0;
      for (std::size_t x = 0; x < perm.size(); ++x)
        for (std::size_t y = x + 1; y < perm.size(); ++y)
          if (perm[x] > perm[y]) ++inv;
      det += (inv & 1) ? -p : p;
    } while (std::next_permutation(perm.begin(), perm.end()));
    total += c * det;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Chevalley-Eilenberg differential built from an antisymmetric bracket on the space.

class CEDifferential {
 public:
  explicit CEDifferential(const BilinearMap<Rational>& bracket) : N_(static_cast<int>(bracket.dom())) {
    // d theta^k = - sum_{i<j} c_{ij}^k theta^i ^ theta^j
    for (int k = 0; k < N_; ++k) dtheta_.emplace_back(N_, 2);
    for (int i = 0; i < N_; ++i)
      for (int j = i + 1; j < N_; ++j)
        for (const auto& [k, c] : bracket.upper(i, j)) dtheta_[k].add((Mask{1} << i) | (Mask{1} << j), -c);
  }

  template <class S>
  [[nodiscard]] KForm<S> operator()(const KForm<S>& a) const {
    if (a.dim() != N_) throw std::invalid_argument("CEDifferential: dimension mismatch");
    if (a.degree() == N_) return KForm<S>(N_, N_);
    KForm<S> out(N_, a.degree() + 1);
    for (const auto& [m, c] : a.terms())
      for (Mask mm = m; mm; mm &= mm - 1) {
        const int i = std::countr_zero(mm);
        const Mask rest = m & ~(Mask{1} << i);
        const int s1 = popcount(m & below(i)) & 1;
        for (const auto& [m2, c2] : dtheta_[i].terms()) {
          const int s2 = wedge_sign(m2, rest);
          if (s2 == 0) continue;
          S v = c * c2;
          out.add(m2 | rest, ((s1 == 1) != (s2 < 0)) ? S(0) - v : v);
        }
      }
    return out;
  }

  [[nodiscard]] const KForm<Rational>& dtheta(int k) const { return dtheta_[k]; }

 private:
  int N_;
  std::vector<KForm<Rational>> dtheta_;
};

// ---------------------------------------------------------------------------
// Metric operations for a diagonal metric diag(g_0..g_{N-1}).

class DiagonalMetric {
 public:
  explicit DiagonalMetric(std::vector<Rational> diag) : g_(std::move(diag)) {
    Rational det(1);
    for (const auto& x : g_) {
      if (x.sign() <= 0) throw std::invalid_argument("DiagonalMetric: entries must be positive");
      det *= x;
    }
    if (!rational_sqrt(det, sqrt_det_)) throw std::invalid_argument("DiagonalMetric: volume factor is not rational");
  }
  [[nodiscard]] int dim() const { return static_cast<int>(g_.size()); }
  [[nodiscard]] const std::vector<Rational>& diag() const { return g_; }
  [[nodiscard]] const Rational& sqrt_det() const { return sqrt_det_; }

  [[nodiscard]] Rational inverse_weight(Mask m) const {
    Rational w(1);
    for (Mask mm = m; mm; mm &= mm - 1) w /= g_[std::countr_zero(mm)];
    return w;
  }

  template <class S>
  [[nodiscard]] S inner(const KForm<S>& a, const KForm<S>& b) const {
    S s(0);
    for (const auto& [m, c] : a.terms()) {
      auto it = b.terms().find(m);
      if (it != b.terms().end()) s += c * it->second * inverse_weight(m);
    }
    return s;
  }

  /// Hodge star with alpha ^ *beta = <alpha, beta> vol, vol = sqrt(det g) theta^{0..N-1}.
  template <class S>
  [[nodiscard]] KForm<S> star(const KForm<S>& a) const {
    const int N = dim();
    const Mask all = N == 32 ? ~Mask{0} : below(N);
    KForm<S> out(N, N - a.degree());
    for (const auto& [m, c] : a.terms()) {
      const Mask comp = all & ~m;
      const int s = wedge_sign(m, comp);
      const Rational w = sqrt_det_ * inverse_weight(m);
      out.add(comp, s > 0 ? c * w : S(0) - c * w);
    }
    return out;
  }

  /// Codifferential delta = (-1)^{N(k+1)+1} * d *.
  template <class S>
  [[nodiscard]] KForm<S> codifferential(const CEDifferential& d, const KForm<S>& a) const {
    if (a.degree() == 0) return KForm<S>(dim(), 0);
    KForm<S> r = star(d(star(a)));
    const int e = dim() * (a.degree() + 1) + 1;
    return (e & 1) ? r.scaled(Rational(-1)) : r;
  }

  /// 1-form <beta, omega>: X -> <i_X beta, omega> for a (p+1)-form beta and p-form omega.
  template <class S>
  [[nodiscard]] KForm<S> contract(const KForm<S>& beta, const KForm<S>& omega) const {
    KForm<S> out(dim(), 1);
    for (int x = 0; x < dim(); ++x) {
      RatVector e(dim(), Rational(0));
      e[x] = 1;
      S v = inner(interior(e, beta), omega);
      out.add(Mask{1} << x, v);
    }
    return out;
  }

  /// Index lowering: vector -> 1-form g(v, .).
  [[nodiscard]] KForm<Rational> flat(const RatVector& v) const {
    KForm<Rational> f(dim(), 1);
    for (int i = 0; i < dim(); ++i) f.add(Mask{1} << i, g_[i] * v[i]);
    return f;
  }

 private:
  std::vector<Rational> g_;
  Rational sqrt_det_;
};

}  // namespace qhlab
