#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qhlab/linalg.hpp"
#include "qhlab/matrix.hpp"
#include "qhlab/poly.hpp"
#include "qhlab/rational.hpp"

namespace qhlab {

/// Antisymmetric bilinear map V x V -> W stored on pairs i < j.
template <class S>
class BilinearMap {
 public:
  BilinearMap() = default;
  BilinearMap(std::size_t dom, std::size_t cod) : dom_(dom), cod_(cod), data_(dom * dom) {}

  [[nodiscard]] std::size_t dom() const { return dom_; }
  [[nodiscard]] std::size_t cod() const { return cod_; }

  /// Adds c to B(e_i, e_j)_k (and -c to B(e_j, e_i)_k).
  void add(std::size_t i, std::size_t j, std::size_t k, const S& c) {
    if (i == j) {
      if (!is_zero(c)) throw std::invalid_argument("BilinearMap: diagonal entry must vanish");
      return;
    }
    if (k >= cod_ || i >= dom_ || j >= dom_) throw std::out_of_range("BilinearMap: index");
    auto& slot = i < j ? data_[i * dom_ + j] : data_[j * dom_ + i];
    S v = i < j ? c : S(0) - c;
    auto [it, inserted] = slot.try_emplace(static_cast<std::uint32_t>(k), v);
    if (!inserted) {
      it->second += v;
      if (is_zero(it->second)) slot.erase(it);
    }
  }

  /// B(e_i, e_j) for i < j; empty when i >= j.
  [[nodiscard]] const std::map<std::uint32_t, S>& upper(std::size_t i, std::size_t j) const {
    static const std::map<std::uint32_t, S> empty;
    return i < j ? data_[i * dom_ + j] : empty;
  }

  [[nodiscard]] std::vector<S> value(std::size_t i, std::size_t j) const {
    std::vector<S> out(cod_, S(0));
    if (i == j) return out;
    const auto& e = i < j ? data_[i * dom_ + j] : data_[j * dom_ + i];
    for (const auto& [k, c] : e) out[k] = i < j ? c : S(0) - c;
    return out;
  }

  template <class V>
  [[nodiscard]] std::vector<S> apply(const std::vector<V>& x, const std::vector<V>& y) const {
    std::vector<S> out(cod_, S(0));
    for (std::size_t i = 0; i < dom_; ++i)
      for (std::size_t j = i + 1; j < dom_; ++j) {
        const auto& e = data_[i * dom_ + j];
        if (e.empty()) continue;
        if (is_zero(x[i]) && is_zero(x[j])) continue;
        S w = S(x[i] * y[j]) - S(x[j] * y[i]);
        if (is_zero(w)) continue;
        for (const auto& [k, c] : e) out[k] += c * w;
      }
    return out;
  }

  [[nodiscard]] bool is_zero_map() const {
    for (const auto& e : data_)
      if (!e.empty()) return false;
    return true;
  }

  BilinearMap& operator+=(const BilinearMap& o) {
    check(o);
    for (std::size_t i = 0; i < dom_; ++i)
      for (std::size_t j = i + 1; j < dom_; ++j)
        for (const auto& [k, c] : o.data_[i * dom_ + j]) add(i, j, k, c);
    return *this;
  }
  friend BilinearMap operator+(BilinearMap a, const BilinearMap& b) { return a += b; }
  friend BilinearMap operator*(const S& s, const BilinearMap& b) {
    BilinearMap out(b.dom_, b.cod_);
    if (is_zero(s)) return out;
    for (std::size_t p = 0; p < b.data_.size(); ++p)
      for (const auto& [k, c] : b.data_[p]) out.data_[p][k] = s * c;
    return out;
  }
  friend bool operator==(const BilinearMap& a, const BilinearMap& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.data_ == b.data_;
  }

  /// Coefficient vector over the (i<j, k) basis, used for linear independence checks.
  [[nodiscard]] std::vector<S> flatten() const {
    std::vector<S> out;
    out.reserve(dom_ * (dom_ - 1) / 2 * cod_);
    for (std::size_t i = 0; i < dom_; ++i)
      for (std::size_t j = i + 1; j < dom_; ++j) {
        std::vector<S> v(cod_, S(0));
        for (const auto& [k, c] : data_[i * dom_ + j]) v[k] = c;
        out.insert(out.end(), v.begin(), v.end());
      }
    return out;
  }

  template <class F>
  [[nodiscard]] auto map_coefficients(F f) const {
    using T = decltype(f(std::declval<S>()));
    BilinearMap<T> out(dom_, cod_);
    for (std::size_t i = 0; i < dom_; ++i)
      for (std::size_t j = i + 1; j < dom_; ++j)
        for (const auto& [k, c] : data_[i * dom_ + j]) out.add(i, j, k, f(c));
    return out;
  }

 private:
  void check(const BilinearMap& o) const {
    if (o.dom_ != dom_ || o.cod_ != cod_) throw std::invalid_argument("BilinearMap: shape mismatch");
  }
  std::size_t dom_ = 0, cod_ = 0;
  std::vector<std::map<std::uint32_t, S>> data_;
};

/// Components of the cyclic sum B(B(x,y),z) + B(B(y,z),x) + B(B(z,x),y) over basis triples
/// i < j < k; only nonzero components are returned.
template <class S>
std::vector<S> jacobiator(const BilinearMap<S>& b) {
  if (b.dom() != b.cod()) throw std::invalid_argument("jacobiator: bracket must map V x V -> V");
  const std::size_t d = b.dom();
  std::vector<S> out;
  auto term = [&](std::size_t i, std::size_t j, std::size_t k, std::vector<S>& acc) {
    // B(B(e_i,e_j), e_k)
    std::vector<S> ij = b.value(i, j);
    for (std::size_t m = 0; m < d; ++m) {
      if (is_zero(ij[m])) continue;
      if (m == k) continue;
      const bool lo = m < k;
      for (const auto& [l, c] : b.upper(lo ? m : k, lo ? k : m)) acc[l] += lo ? ij[m] * c : S(0) - ij[m] * c;
    }
  };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      for (std::size_t k = j + 1; k < d; ++k) {
        std::vector<S> acc(d, S(0));
        term(i, j, k, acc);
        term(j, k, i, acc);
        term(k, i, j, acc);
        for (auto& v : acc)
          if (!is_zero(v)) out.push_back(v);
      }
  return out;
}

/// Finite-dimensional real Lie algebra given by structure constants.
class LieAlgebra {
 public:
  LieAlgebra() = default;
  explicit LieAlgebra(BilinearMap<Rational> bracket) : br_(std::move(bracket)) {
    if (br_.dom() != br_.cod()) throw std::invalid_argument("LieAlgebra: bracket must be V x V -> V");
  }
  [[nodiscard]] std::size_t dim() const { return br_.dom(); }
  [[nodiscard]] const BilinearMap<Rational>& structure() const { return br_; }
  [[nodiscard]] RatVector bracket(const RatVector& x, const RatVector& y) const { return br_.apply(x, y); }
  [[nodiscard]] RatVector bracket(std::size_t i, std::size_t j) const { return br_.value(i, j); }
  [[nodiscard]] bool satisfies_jacobi() const { return jacobiator(br_).empty(); }

  [[nodiscard]] RatMatrix ad(std::size_t i) const {
    RatMatrix m(dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j) {
      RatVector v = br_.value(i, j);
      for (std::size_t k = 0; k < dim(); ++k) m(k, j) = v[k];
    }
    return m;
  }

  /// Subalgebra spanned by iterated brackets of the given vectors; returns an echelon basis size.
  [[nodiscard]] std::size_t generated_dim(const std::vector<RatVector>& gens) const {
    SparseEchelon<Rational> ech(dim());
    std::vector<RatVector> span, queue;
    auto push = [&](const RatVector& v) {
      SparseRow<Rational> row;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (!v[k].is_zero()) row.emplace_back(static_cast<std::uint32_t>(k), v[k]);
      if (ech.insert(row)) queue.push_back(v);
    };
    for (const auto& g : gens) push(g);
    while (!queue.empty()) {
      RatVector v = queue.back();
      queue.pop_back();
      for (const auto& g : gens) push(bracket(g, v));
    }
    return ech.rank();
  }

  /// Greedy subset of basis indices that generates the whole algebra.
  [[nodiscard]] std::vector<std::size_t> generating_subset() const {
    std::vector<std::size_t> idx;
    std::vector<RatVector> gens;
    std::size_t have = 0;
    for (std::size_t i = 0; i < dim() && have < dim(); ++i) {
      RatVector e(dim(), Rational(0));
      e[i] = 1;
      gens.push_back(e);
      std::size_t d = generated_dim(gens);
      if (d > have) {
        idx.push_back(i);
        have = d;
      } else {
        gens.pop_back();
      }
    }
    return idx;
  }

 private:
  BilinearMap<Rational> br_;
};

/// Coordinates of matrices in the span of a fixed linearly independent family.
class MatrixSpan {
 public:
  explicit MatrixSpan(std::vector<RatMatrix> basis) : basis_(std::move(basis)) {
    if (basis_.empty()) return;
    const std::size_t entries = basis_[0].rows() * basis_[0].cols();
    RatMatrix t(basis_.size(), entries);
    for (std::size_t b = 0; b < basis_.size(); ++b)
      for (std::size_t e = 0; e < entries; ++e) t(b, e) = basis_[b].data()[e];
    auto ech = bareiss_echelon(t);
    if (ech.pivot_cols.size() != basis_.size()) throw std::invalid_argument("MatrixSpan: dependent family");
    pivots_ = ech.pivot_cols;
    RatMatrix sq(basis_.size(), basis_.size());
    for (std::size_t r = 0; r < pivots_.size(); ++r)
      for (std::size_t b = 0; b < basis_.size(); ++b) sq(r, b) = t(b, pivots_[r]);
    inv_ = inverse(sq).value();
  }

  [[nodiscard]] std::size_t size() const { return basis_.size(); }
  [[nodiscard]] const std::vector<RatMatrix>& basis() const { return basis_; }

  /// Coordinates of x; nullopt when x is not in the span.
  [[nodiscard]] std::optional<RatVector> coords(const RatMatrix& x) const {
    RatVector sel(pivots_.size());
    for (std::size_t r = 0; r < pivots_.size(); ++r) sel[r] = x.data()[pivots_[r]];
    RatVector c = inv_.apply(sel);
    RatMatrix back(x.rows(), x.cols());
    for (std::size_t b = 0; b < basis_.size(); ++b)
      if (!c[b].is_zero()) back += basis_[b] * c[b];
    if (!(back == x)) return std::nullopt;
    return c;
  }

  /// Lie algebra of the span under the matrix commutator; throws if the span is not closed.
  [[nodiscard]] LieAlgebra lie_algebra() const {
    BilinearMap<Rational> br(size(), size());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) {
        auto c = coords(commutator(basis_[i], basis_[j]));
        if (!c) throw std::runtime_error("MatrixSpan: not closed under commutator");
        for (std::size_t k = 0; k < size(); ++k)
          if (!(*c)[k].is_zero()) br.add(i, j, k, (*c)[k]);
      }
    return LieAlgebra(std::move(br));
  }

 private:
  std::vector<RatMatrix> basis_;
  std::vector<std::size_t> pivots_;
  RatMatrix inv_;
};

/// Linear maps rho(e_i) on a vector space, indexed like the algebra basis.
struct Representation {
  std::size_t space_dim = 0;
  std::vector<RatMatrix> mats;

  [[nodiscard]] bool is_homomorphism(const LieAlgebra& g) const {
    if (mats.size() != g.dim()) return false;
    for (std::size_t i = 0; i < g.dim(); ++i)
      for (std::size_t j = i + 1; j < g.dim(); ++j) {
        RatMatrix lhs(space_dim, space_dim);
        RatVector c = g.bracket(i, j);
        for (std::size_t k = 0; k < c.size(); ++k)
          if (!c[k].is_zero()) lhs += mats[k] * c[k];
        if (!(lhs == commutator(mats[i], mats[j]))) return false;
      }
    return true;
  }

  [[nodiscard]] Representation restrict(const std::vector<std::size_t>& idx) const {
    Representation r{space_dim, {}};
    for (auto i : idx) r.mats.push_back(mats[i]);
    return r;
  }
};

// ---------------------------------------------------------------------------
// Sparse operators and the induced action on Lambda^2.

using SparseOp = SparseMatrix<Rational>;  // rows of a square operator

inline SparseOp to_sparse(const RatMatrix& m) {
  SparseOp s;
  s.cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    SparseRow<Rational> row;
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!m(r, c).is_zero()) row.emplace_back(static_cast<std::uint32_t>(c), m(r, c));
    s.rows.push_back(std::move(row));
  }
  return s;
}

/// Index of the pair (i, j), i < j, in lexicographic order.
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t d) { return i * d - i * (i + 1) / 2 + (j - i - 1); }

/// Action of X on Lambda^2 V in the e_i ^ e_j basis (i < j, lexicographic).
inline RatMatrix lambda2_action(const RatMatrix& x) {
  const std::size_t d = x.rows();
  const std::size_t D = d * (d - 1) / 2;
  RatMatrix out(D, D);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const std::size_t col = pair_index(i, j, d);
      // X e_i ^ e_j + e_i ^ X e_j
      for (std::size_t k = 0; k < d; ++k) {
        if (!x(k, i).is_zero() && k != j) {
          if (k < j) out(pair_index(k, j, d), col) += x(k, i);
          else out(pair_index(j, k, d), col) -= x(k, i);
        }
        if (!x(k, j).is_zero() && k != i) {
          if (i < k) out(pair_index(i, k, d), col) += x(k, j);
          else out(pair_index(k, i, d), col) -= x(k, j);
        }
      }
    }
  return out;
}

/// Basis of {T : B(h) T = T A(h) for all generators h}; maps returned as dim(B) x dim(A) matrices.
inline std::vector<RatMatrix> equivariant_hom(const std::vector<RatMatrix>& a, const std::vector<RatMatrix>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("equivariant_hom: generator count mismatch");
  if (a.empty()) throw std::invalid_argument("equivariant_hom: no generators");
  const std::size_t da = a[0].rows(), db = b[0].rows();
  SparseMatrix<Rational> sys;
  sys.cols = da * db;
  for (std::size_t g = 0; g < a.size(); ++g) {
    const RatMatrix& A = a[g];
    const RatMatrix& B = b[g];
    for (std::size_t r = 0; r < db; ++r)
      for (std::size_t c = 0; c < da; ++c) {
        SparseRow<Rational> row;
        for (std::size_t k = 0; k < db; ++k)
          if (!B(r, k).is_zero()) row.emplace_back(static_cast<std::uint32_t>(k * da + c), B(r, k));
        for (std::size_t k = 0; k < da; ++k)
          if (!A(k, c).is_zero()) row.emplace_back(static_cast<std::uint32_t>(r * da + k), -A(k, c));
        sys.add_row(std::move(row));
      }
  }
  std::vector<RatMatrix> out;
  for (const auto& v : sparse_nullspace(sys)) {
    RatMatrix t(db, da);
    for (std::size_t r = 0; r < db; ++r)
      for (std::size_t c = 0; c < da; ++c) t(r, c) = v[r * da + c];
    out.push_back(std::move(t));
  }
  return out;
}

/// Common kernel of the given operators.
inline std::vector<RatVector> invariant_vectors(const std::vector<SparseOp>& ops, std::size_t dim) {
  SparseMatrix<Rational> sys;
  sys.cols = dim;
  for (const auto& op : ops)
    for (const auto& row : op.rows)
      if (!row.empty()) sys.add_row(row);
  if (sys.rows.empty()) {
    std::vector<RatVector> all;
    for (std::size_t i = 0; i < dim; ++i) {
      RatVector e(dim, Rational(0));
      e[i] = 1;
      all.push_back(e);
    }
    return all;
  }
  return sparse_nullspace(sys);
}

/// Gram matrix of the trace form tr(XY), restricted to blocks of indices that share an ideal label.
inline RatMatrix ideal_trace_gram(const std::vector<RatMatrix>& mats, const std::vector<int>& ideal) {
  RatMatrix g(mats.size(), mats.size());
  for (std::size_t a = 0; a < mats.size(); ++a)
    for (std::size_t b = a; b < mats.size(); ++b) {
      if (ideal[a] != ideal[b]) continue;
      Rational t = (mats[a] * mats[b]).trace();
      g(a, b) = t;
      g(b, a) = t;
    }
  return g;
}

/// Casimir sum_{ab} G^{ab} rho(e_a) rho(e_b) with G the invariant form's Gram matrix.
inline RatMatrix casimir(const std::vector<RatMatrix>& rho, const RatMatrix& gram) {
  auto ginv = inverse(gram);
  if (!ginv) throw std::domain_error("casimir: degenerate invariant form");
  const std::size_t d = rho.at(0).rows();
  RatMatrix c(d, d);
  for (std::size_t a = 0; a < rho.size(); ++a)
    for (std::size_t b = 0; b < rho.size(); ++b)
      if (!(*ginv)(a, b).is_zero()) c += (rho[a] * rho[b]) * (*ginv)(a, b);
  return c;
}

/// Checks B(x, T y) + B(T x, y) = 0 type invariance of a symmetric form under ad.
inline bool is_ad_invariant(const LieAlgebra& g, const RatMatrix& form) {
  for (std::size_t x = 0; x < g.dim(); ++x) {
    RatMatrix ad = g.ad(x);
    if (!(ad.transpose() * form + form * ad).is_zero()) return false;
  }
  return true;
}

}  // namespace qhlab
