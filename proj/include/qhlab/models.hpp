#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qhlab/lie.hpp"
#include "qhlab/linalg.hpp"
#include "qhlab/poly.hpp"
#include "qhlab/quaternion.hpp"

namespace qhlab {

// The complement m = R + Im(H) + H^{n-1} uses coordinates 4p+u: slot p = 0 holds R (u = 0) and
// Im(H) (u = 1..3); slots p >= 1 hold H^{n-1} with quaternion components 1, i, j, k.

struct Dims {
  long D, d, delta;
};

inline Dims dims(int n) {
  if (n < 1) throw std::invalid_argument("dims: n must be positive");
  const long N = n;
  long d = 2 * N * N + N + 4;
  if (n <= 2) d += 1;
  return {2 * N * N + 5 * N + 3, d, 2 * N * N - 3 * N + 4};
}

// ---------------------------------------------------------------------------
// Quaternionic coordinates on R^{4n}.

inline Quaternion slot(const RatVector& x, std::size_t p) {
  return {x[4 * p], x[4 * p + 1], x[4 * p + 2], x[4 * p + 3]};
}
inline void put(RatVector& x, std::size_t p, const Quaternion& q) {
  for (int u = 0; u < 4; ++u) x[4 * p + u] += q[u];
}

/// Block-diagonal right multiplication x -> x a on every slot of H^n.
inline RatMatrix right_mult_all(std::size_t n, const Quaternion& a) {
  RatMatrix r = right_mult_matrix(a), out(4 * n, 4 * n);
  for (std::size_t p = 0; p < n; ++p)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out(4 * p + i, 4 * p + j) = r(i, j);
  return out;
}

/// Realification of an m x m quaternionic matrix acting on slots offset..offset+m-1 of H^n.
inline RatMatrix realify_at(const QMatrix& x, std::size_t n, std::size_t offset) {
  RatMatrix small = realify(x), out(4 * n, 4 * n);
  for (std::size_t i = 0; i < small.rows(); ++i)
    for (std::size_t j = 0; j < small.cols(); ++j) out(4 * offset + i, 4 * offset + j) = small(i, j);
  return out;
}

/// Bilinear map on R^dom from a function of coordinate vectors, sampled on basis pairs.
template <class F>
BilinearMap<Rational> tabulate(std::size_t dom, std::size_t cod, F f) {
  BilinearMap<Rational> b(dom, cod);
  for (std::size_t i = 0; i < dom; ++i)
    for (std::size_t j = i + 1; j < dom; ++j) {
      RatVector x(dom, Rational(0)), y(dom, Rational(0));
      x[i] = 1;
      y[j] = 1;
      RatVector v = f(x, y);
      for (std::size_t k = 0; k < cod; ++k)
        if (!v[k].is_zero()) b.add(i, j, k, v[k]);
    }
  return b;
}

template <class S>
bool is_equivariant(const BilinearMap<S>& b, const std::vector<RatMatrix>& rho_dom, const std::vector<RatMatrix>& rho_cod) {
  const std::size_t d = b.dom();
  for (std::size_t g = 0; g < rho_dom.size(); ++g) {
    const RatMatrix& A = rho_dom[g];
    const RatMatrix& C = rho_cod[g];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) {
        std::vector<S> lhs(b.cod(), S(0));
        std::vector<S> bij = b.value(i, j);
        for (std::size_t r = 0; r < b.cod(); ++r)
          for (std::size_t k = 0; k < b.cod(); ++k)
            if (!C(r, k).is_zero() && !is_zero(bij[k])) lhs[r] += bij[k] * C(r, k);
        for (std::size_t k = 0; k < d; ++k) {
          if (!A(k, i).is_zero()) {
            std::vector<S> v = b.value(k, j);
            for (std::size_t r = 0; r < b.cod(); ++r) lhs[r] -= v[r] * A(k, i);
          }
          if (!A(k, j).is_zero()) {
            std::vector<S> v = b.value(i, k);
            for (std::size_t r = 0; r < b.cod(); ++r) lhs[r] -= v[r] * A(k, j);
          }
        }
        for (const auto& x : lhs)
          if (!is_zero(x)) return false;
      }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Isotropy h = sp(1) + sp(n-1) on m.

struct Isotropy {
  int n = 0;
  std::size_t N = 0;                  // dim m = 4n
  LieAlgebra h;                       // basis: D(i), D(j), D(k), then sp(n-1)
  std::vector<RatMatrix> rho;         // action on m
  std::vector<std::size_t> generators;  // generating subset of the basis
  std::vector<QMatrix> spn1;          // sp(n-1) basis as quaternionic matrices
};

inline Isotropy isotropy_rep(int n) {
  if (n < 2) throw std::invalid_argument("isotropy_rep: n must be at least 2");
  Isotropy iso;
  iso.n = n;
  iso.N = 4 * static_cast<std::size_t>(n);
  const std::size_t nn = static_cast<std::size_t>(n);
  for (int u = 1; u < 4; ++u) {
    // left multiplication on the first slot minus right multiplication everywhere
    QMatrix d(nn, nn);
    d(0, 0) = Quaternion::unit(u);
    iso.rho.push_back(realify(d) - right_mult_all(nn, Quaternion::unit(u)));
  }
  iso.spn1 = sp_basis(nn - 1, 0);
  for (const auto& x : iso.spn1) iso.rho.push_back(realify_at(x, nn, 1));
  iso.h = MatrixSpan(iso.rho).lie_algebra();
  iso.generators = iso.h.generating_subset();
  return iso;
}

/// Ambient k = sp(1) + sp(n) on H^n with ideal labels (0 for sp(1), 1 for sp(n)).
struct Ambient {
  std::vector<RatMatrix> mats;
  std::vector<int> ideal;
};

inline Ambient ambient_k(int n) {
  const std::size_t nn = static_cast<std::size_t>(n);
  Ambient k;
  for (int u = 1; u < 4; ++u) {
    k.mats.push_back(right_mult_all(nn, Quaternion::unit(u)));
    k.ideal.push_back(0);
  }
  for (const auto& x : sp_basis(nn, 0)) {
    k.mats.push_back(realify(x));
    k.ideal.push_back(1);
  }
  return k;
}

/// I, J, K = -R_i, -R_j, -R_k (right multiplications span the invariant quaternionic structure).
inline std::array<RatMatrix, 3> quaternionic_triple(int n) {
  const std::size_t nn = static_cast<std::size_t>(n);
  return {right_mult_all(nn, Quaternion::unit(1)) * Rational(-1), right_mult_all(nn, Quaternion::unit(2)) * Rational(-1),
          right_mult_all(nn, Quaternion::unit(3)) * Rational(-1)};
}

struct BracketDims {
  std::size_t horizontal = 0, vertical = 0;
};

/// Dimensions of h-equivariant maps Lambda^2 m -> m and Lambda^2 m -> h, using a generating set of h.
inline BracketDims invariant_bracket_dims(const Isotropy& iso) {
  std::vector<RatMatrix> l2, on_m, on_h;
  for (auto g : iso.generators) {
    l2.push_back(lambda2_action(iso.rho[g]));
    on_m.push_back(iso.rho[g]);
    on_h.push_back(iso.h.ad(g));
  }
  return {equivariant_hom(l2, on_m).size(), equivariant_hom(l2, on_h).size()};
}

/// Cartan tori inside the isotropy candidates: i in sp(1) acting on the right, or diag(i,...) in sp(n) per slot.
inline std::vector<RatMatrix> torus_sp1(int n) { return {right_mult_all(static_cast<std::size_t>(n), Quaternion::unit(1))}; }

inline std::vector<RatMatrix> torus_spn(int n) {
  const std::size_t nn = n;
  std::vector<RatMatrix> out;
  for (std::size_t p = 0; p < nn; ++p) {
    QMatrix d(nn, nn);
    d(p, p) = Quaternion::unit(1);
    out.push_back(realify(d));
  }
  return out;
}

/// Number of maps Lambda^2 H^n -> H^n equivariant under the given endomorphisms.
inline std::size_t equivariant_bracket_count(const std::vector<RatMatrix>& torus) {
  std::vector<RatMatrix> l2;
  for (const auto& t : torus) l2.push_back(lambda2_action(t));
  return equivariant_hom(l2, torus).size();
}

// ---------------------------------------------------------------------------
// Invariant brackets.

enum HIndex { kTheta = 0, kPsi1, kPsi2, kUps1, kUps2 };
inline constexpr std::array<const char*, 5> kHorizontalNames{"Theta", "Psi1", "Psi2", "Upsilon1", "Upsilon2"};
inline constexpr std::array<const char*, 4> kVerticalNames{"Theta_h", "Psi1_h", "Upsilon1_h", "Xi"};

/// Im <q1, q2> with <x, y> = sum conj(x_p) y_p over slots first..last-1.
inline Quaternion theta_value(const RatVector& x, const RatVector& y, std::size_t first, std::size_t last) {
  Quaternion s;
  for (std::size_t p = first; p < last; ++p) s += slot(x, p).conj() * slot(y, p);
  return s.imag_part();
}

/// Xi(q1, q2) = q2 q1^dag - q1 q2^dag on slots first..last-1.
inline QMatrix xi_value(const RatVector& x, const RatVector& y, std::size_t first, std::size_t last) {
  const std::size_t m = last - first;
  QMatrix out(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      out(a, b) = slot(y, first + a) * slot(x, first + b).conj() - slot(x, first + a) * slot(y, first + b).conj();
  return out;
}

inline std::array<BilinearMap<Rational>, 5> horizontal_brackets(int n) {
  const std::size_t N = 4 * static_cast<std::size_t>(n), nn = n;
  auto im_part = [](const RatVector& x) { return Quaternion(0, x[1], x[2], x[3]); };
  auto theta = [&](const RatVector& x, const RatVector& y) {
    RatVector out(N, Rational(0));
    put(out, 0, theta_value(x, y, 1, nn));
    return out;
  };
  auto psi1 = [&](const RatVector& x, const RatVector& y) {
    RatVector out(N, Rational(0));
    put(out, 0, im_part(y) * x[0] - im_part(x) * y[0]);
    return out;
  };
  auto psi2 = [&](const RatVector& x, const RatVector& y) {
    RatVector out(N, Rational(0));
    for (std::size_t p = 1; p < nn; ++p) put(out, p, slot(y, p) * x[0] - slot(x, p) * y[0]);
    return out;
  };
  auto ups1 = [&](const RatVector& x, const RatVector& y) {
    RatVector out(N, Rational(0));
    Quaternion a = im_part(x), b = im_part(y);
    put(out, 0, a * b - b * a);
    return out;
  };
  auto ups2 = [&](const RatVector& x, const RatVector& y) {
    RatVector out(N, Rational(0));
    Quaternion a = im_part(x), b = im_part(y);
    for (std::size_t p = 1; p < nn; ++p) put(out, p, slot(y, p) * a.conj() - slot(x, p) * b.conj());
    return out;
  };
  return {tabulate(N, N, theta), tabulate(N, N, psi1), tabulate(N, N, psi2), tabulate(N, N, ups1),
          tabulate(N, N, ups2)};
}

/// Vertical brackets with values in h coordinates: Theta, Psi1, Upsilon1 into sp(1) and Xi into sp(n-1).
inline std::array<BilinearMap<Rational>, 4> vertical_brackets(const Isotropy& iso) {
  const std::size_t N = iso.N, nn = iso.n, H = iso.h.dim();
  auto horiz = horizontal_brackets(iso.n);
  auto lift = [&](const BilinearMap<Rational>& b) {
    // Im(H)-valued map re-read with values D(w) in the sp(1) ideal of h
    BilinearMap<Rational> out(N, H);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j)
        for (const auto& [k, c] : b.upper(i, j)) {
          if (k < 1 || k > 3) throw std::logic_error("vertical_brackets: value outside Im(H)");
          out.add(i, j, k - 1, c);
        }
    return out;
  };
  std::vector<RatMatrix> spn1_real;
  for (const auto& x : iso.spn1) spn1_real.push_back(realify(x));
  MatrixSpan span(spn1_real);
  auto xi = [&](const RatVector& x, const RatVector& y) {
    RatVector out(H, Rational(0));
    auto c = span.coords(realify(xi_value(x, y, 1, nn)));
    if (!c) throw std::logic_error("vertical_brackets: Xi value outside sp(n-1)");
    for (std::size_t k = 0; k < c->size(); ++k) out[3 + k] = (*c)[k];
    return out;
  };
  return {lift(horiz[kTheta]), lift(horiz[kPsi1]), lift(horiz[kUps1]), tabulate(N, H, xi)};
}

// ---------------------------------------------------------------------------
// Horizontal bracket families.

template <class S>
struct BracketParamsT {
  S alpha, beta1, beta2, gamma1, gamma2;
  [[nodiscard]] std::array<S, 5> as_array() const { return {alpha, beta1, beta2, gamma1, gamma2}; }
  friend bool operator==(const BracketParamsT& a, const BracketParamsT& b) { return a.as_array() == b.as_array(); }
};
using BracketParams = BracketParamsT<Rational>;

template <class S>
BilinearMap<S> combine(const std::array<BilinearMap<Rational>, 5>& basis, const BracketParamsT<S>& p) {
  auto coeffs = p.as_array();
  BilinearMap<S> out(basis[0].dom(), basis[0].cod());
  for (int t = 0; t < 5; ++t) {
    if (is_zero(coeffs[t])) continue;
    const auto& b = basis[t];
    for (std::size_t i = 0; i < b.dom(); ++i)
      for (std::size_t j = i + 1; j < b.dom(); ++j)
        for (const auto& [k, c] : b.upper(i, j)) out.add(i, j, k, coeffs[t] * c);
  }
  return out;
}

/// Coordinates of an equivariant bracket in the basis Theta, Psi1, Psi2, Upsilon1, Upsilon2.
inline std::optional<BracketParams> horizontal_coordinates(const BilinearMap<Rational>& b, int n) {
  auto basis = horizontal_brackets(n);
  std::vector<RatVector> cols;
  for (const auto& e : basis) cols.push_back(e.flatten());
  RatVector target = b.flatten();
  RatMatrix A(target.size(), 5);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t r = 0; r < target.size(); ++r) A(r, t) = cols[t][r];
  auto x = solve(A, target);
  if (!x) return std::nullopt;
  return BracketParams{(*x)[0], (*x)[1], (*x)[2], (*x)[3], (*x)[4]};
}

/// Reduced row echelon basis of the linear span of the polynomials (monomials in grlex order).
inline std::vector<Poly> reduced_span(const std::vector<Poly>& polys) {
  std::map<Monomial, std::size_t, GrlexGreater> cols;
  for (const auto& p : polys)
    for (const auto& [m, c] : p.terms()) cols.emplace(m, 0);
  std::vector<Monomial> mons;
  for (auto& [m, idx] : cols) {
    idx = mons.size();
    mons.push_back(m);
  }
  std::vector<RatVector> rows;
  for (const auto& p : polys) {
    RatVector r(mons.size(), Rational(0));
    for (const auto& [m, c] : p.terms()) r[cols[m]] = c;
    rows.push_back(std::move(r));
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < mons.size() && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    const Rational inv = rows[rank][col].inverse();
    for (auto& x : rows[rank]) x *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col].is_zero()) continue;
      const Rational f = rows[r][col];
      for (std::size_t k = 0; k < mons.size(); ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  std::vector<Poly> out;
  for (std::size_t r = 0; r < rank; ++r) {
    Poly p;
    for (std::size_t k = 0; k < mons.size(); ++k)
      if (!rows[r][k].is_zero()) p += Poly::monomial(mons[k], rows[r][k]);
    out.push_back(std::move(p));
  }
  return out;
}

/// Jacobi components of the symbolic horizontal bracket.
inline std::vector<Poly> jacobi_components(int n = 3) {
  auto basis = horizontal_brackets(n);
  BracketParamsT<Poly> p{Poly::var(Var::alpha), Poly::var(Var::beta1), Poly::var(Var::beta2), Poly::var(Var::gamma1),
                         Poly::var(Var::gamma2)};
  return jacobiator(combine(basis, p));
}

/// Canonical generators of the Jacobi conditions: the reduced basis of their linear span.
inline std::vector<Poly> jacobi_equations(int n = 3) { return reduced_span(jacobi_components(n)); }

/// The six defining polynomials of the Jacobi variety in closed form.
inline constexpr std::array<const char*, 6> kJacobiEquations{"alpha*(2*beta2 - beta1)", "alpha*gamma1",
                                                             "alpha*gamma2",            "beta1*gamma1",
                                                             "beta1*gamma2",            "gamma2*(gamma1 - gamma2)"};

inline std::vector<Poly> reference_jacobi_polys() {
  std::vector<Poly> out;
  for (const char* s : kJacobiEquations) out.push_back(parse_poly(s));
  return out;
}

inline std::array<Rational, kNumVars> bracket_point(const BracketParams& p) {
  std::array<Rational, kNumVars> pt{};
  pt[static_cast<int>(Var::alpha)] = p.alpha;
  pt[static_cast<int>(Var::beta1)] = p.beta1;
  pt[static_cast<int>(Var::beta2)] = p.beta2;
  pt[static_cast<int>(Var::gamma1)] = p.gamma1;
  pt[static_cast<int>(Var::gamma2)] = p.gamma2;
  return pt;
}

/// Indices into kJacobiEquations of the equations a parameter tuple violates.
inline std::vector<std::size_t> violated_equations(const BracketParams& p) {
  auto eqs = reference_jacobi_polys();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < eqs.size(); ++i)
    if (!eqs[i].eval(bracket_point(p)).is_zero()) out.push_back(i);
  return out;
}

enum class Family { F1 = 1, F2, F3, F4 };

inline std::vector<Family> in_families(const BracketParams& p) {
  std::vector<Family> out;
  const bool g0 = p.gamma1.is_zero() && p.gamma2.is_zero();
  if (p.beta1 == p.beta2 * Rational(2) && g0) out.push_back(Family::F1);
  if (p.alpha.is_zero() && g0) out.push_back(Family::F2);
  if (p.alpha.is_zero() && p.beta1.is_zero() && p.gamma1 == p.gamma2) out.push_back(Family::F3);
  if (p.alpha.is_zero() && p.beta1.is_zero() && p.gamma2.is_zero()) out.push_back(Family::F4);
  return out;
}

enum class ModelKind { H1plus, H1minus, H2, H3, H4, H5, H6, QHP, QHH, FlatMax, MaxCurved, TwistedTheta };

inline std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::H1plus: return "H1+";
    case ModelKind::H1minus: return "H1-";
    case ModelKind::H2: return "H2";
    case ModelKind::H3: return "H3";
    case ModelKind::H4: return "H4";
    case ModelKind::H5: return "H5";
    case ModelKind::H6: return "H6";
    case ModelKind::QHP: return "QHP";
    case ModelKind::QHH: return "QHH";
    case ModelKind::FlatMax: return "FlatMax";
    case ModelKind::MaxCurved: return "MaxCurved";
    case ModelKind::TwistedTheta: return "TwistedTheta";
  }
  return "?";
}

/// Normalized tuple of a left-invariant model family.
inline BracketParams canonical_params(ModelKind k, const Rational& beta = 0) {
  switch (k) {
    case ModelKind::H1plus: return {1, 2, 1, 0, 0};
    case ModelKind::H1minus: return {-1, 2, 1, 0, 0};
    case ModelKind::H2: return {1, 0, 0, 0, 0};
    case ModelKind::H3: return {0, 2, beta, 0, 0};
    case ModelKind::H4: return {0, 0, 1, 0, 0};
    case ModelKind::H5: return {0, 0, beta, 1, 0};
    case ModelKind::H6: return {0, 0, beta, 1, 1};
    default: throw std::invalid_argument("canonical_params: not a left-invariant family");
  }
}

/// Action (alpha, b1, b2, g1, g2) -> (t^2 s^-1 alpha, s b1, s b2, s g1, s g2).
inline BracketParams act(const BracketParams& p, const Rational& s, const Rational& t_squared) {
  return {t_squared / s * p.alpha, s * p.beta1, s * p.beta2, s * p.gamma1, s * p.gamma2};
}

struct Normalized {
  ModelKind kind;
  Rational beta;  // H3, H5, H6 only
  BracketParams canonical;
  Rational s, t_squared;
};

/// Normal form under the admissible rescalings; throws for the flat bracket or a non-Jacobi input.
inline Normalized normalize(const BracketParams& p) {
  if (p.alpha.is_zero() && p.beta1.is_zero() && p.beta2.is_zero() && p.gamma1.is_zero() && p.gamma2.is_zero())
    throw std::invalid_argument("normalize: flat bracket has no normal form");
  if (in_families(p).empty()) throw std::invalid_argument("normalize: parameters violate the Jacobi identity");
  Normalized out{};
  if (!p.alpha.is_zero()) {
    if (!p.beta2.is_zero()) {
      out.s = p.beta2.inverse();
      out.t_squared = (p.alpha * p.beta2).abs().inverse();
      out.kind = (p.alpha * p.beta2).sign() > 0 ? ModelKind::H1plus : ModelKind::H1minus;
    } else {
      out.s = p.alpha;
      out.t_squared = 1;
      out.kind = ModelKind::H2;
    }
  } else if (!p.gamma1.is_zero()) {
    out.s = p.gamma1.inverse();
    out.t_squared = 1;
    out.beta = p.beta2 / p.gamma1;
    out.kind = p.gamma2.is_zero() ? ModelKind::H5 : ModelKind::H6;
  } else if (!p.beta1.is_zero()) {
    out.s = Rational(2) / p.beta1;
    out.t_squared = 1;
    out.beta = Rational(2) * p.beta2 / p.beta1;
    out.kind = ModelKind::H3;
  } else {
    out.s = p.beta2.inverse();
    out.t_squared = 1;
    out.kind = ModelKind::H4;
  }
  out.canonical = act(p, out.s, out.t_squared);
  if (!(out.canonical == canonical_params(out.kind, out.beta)))
    throw std::logic_error("normalize: action did not reach the canonical tuple");
  return out;
}

// ---------------------------------------------------------------------------
// Model specifications.

struct ModelSpec {
  ModelKind kind = ModelKind::H2;
  int n = 3;
  Rational c1 = 1, c2 = 1;
  Rational beta = 0;  // H3, H5
  Rational c = 1;     // MaxCurved

  [[nodiscard]] std::string str() const {
    std::ostringstream os;
    os << kind_name(kind);
    if (kind == ModelKind::H3 || kind == ModelKind::H5) os << ":beta=" << beta;
    if (kind == ModelKind::MaxCurved) os << ":c=" << c;
    os << ":n=" << n << ":c1=" << c1 << ":c2=" << c2;
    return os.str();
  }
};

inline ModelKind parse_kind(const std::string& s) {
  static const std::map<std::string, ModelKind> names{
      {"H1+", ModelKind::H1plus},       {"H1plus", ModelKind::H1plus},   {"H1-", ModelKind::H1minus},
      {"H1minus", ModelKind::H1minus},  {"H2", ModelKind::H2},           {"H3", ModelKind::H3},
      {"H4", ModelKind::H4},            {"H5", ModelKind::H5},           {"QHP", ModelKind::QHP},
      {"QHH", ModelKind::QHH},          {"FlatMax", ModelKind::FlatMax}, {"MaxCurved", ModelKind::MaxCurved},
      {"TwistedTheta", ModelKind::TwistedTheta}};
  auto it = names.find(s);
  if (it == names.end()) throw std::invalid_argument("unknown model kind '" + s + "'");
  return it->second;
}

/// Parses "KIND[:key=value]..." with keys n, c1, c2, beta, c.
inline ModelSpec parse_spec(const std::string& text) {
  ModelSpec spec;
  std::stringstream ss(text);
  std::string field;
  bool first = true, has_beta = false;
  while (std::getline(ss, field, ':')) {
    if (first) {
      spec.kind = parse_kind(field);
      first = false;
      continue;
    }
    auto eq = field.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("spec field without '=': " + field);
    std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "n") {
      spec.n = std::stoi(val);
    } else if (key == "c1") {
      spec.c1 = Rational::parse(val);
    } else if (key == "c2") {
      spec.c2 = Rational::parse(val);
    } else if (key == "beta") {
      spec.beta = Rational::parse(val);
      has_beta = true;
    } else if (key == "c") {
      spec.c = Rational::parse(val);
    } else {
      throw std::invalid_argument("unknown spec key '" + key + "'");
    }
  }
  if (first) throw std::invalid_argument("empty model spec");
  if (has_beta && spec.kind != ModelKind::H3 && spec.kind != ModelKind::H5)
    throw std::invalid_argument("beta only applies to H3 and H5");
  if (spec.n < 2 || spec.n > 5) throw std::invalid_argument("n must be in 2..5");
  if (spec.c1.sign() <= 0 || spec.c2.sign() <= 0) throw std::invalid_argument("c1, c2 must be positive");
  return spec;
}

// ---------------------------------------------------------------------------
// Assembled models.

struct HomogeneousModel {
  ModelSpec spec;
  int n = 0;
  std::size_t dim_h = 0, dim_m = 0;
  LieAlgebra h;
  std::vector<RatMatrix> rho;           // h on m
  BilinearMap<Rational> bracket_m;      // Lambda^2 m -> m
  BilinearMap<Rational> bracket_h;      // Lambda^2 m -> h
  LieAlgebra g;                         // basis: h first, then m
  std::array<RatMatrix, 3> IJK;
  std::vector<Rational> metric;         // diagonal entries
  std::string notes;

  [[nodiscard]] std::size_t dim() const { return dim_h + dim_m; }
  [[nodiscard]] bool is_left_invariant() const { return dim_h == 0 || bracket_h.is_zero_map(); }
};

/// g = h + m with [h, h] from h, [h, m] = rho(h) m and [m, m] = bracket_m + bracket_h.
inline LieAlgebra assemble(const LieAlgebra& h, const std::vector<RatMatrix>& rho, const BilinearMap<Rational>& bm,
                           const BilinearMap<Rational>& bh) {
  const std::size_t H = h.dim(), M = bm.dom(), D = H + M;
  BilinearMap<Rational> br(D, D);
  for (std::size_t a = 0; a < H; ++a)
    for (std::size_t b = a + 1; b < H; ++b)
      for (const auto& [k, c] : h.structure().upper(a, b)) br.add(a, b, k, c);
  for (std::size_t a = 0; a < H; ++a)
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t k = 0; k < M; ++k)
        if (!rho[a](k, i).is_zero()) br.add(a, H + i, H + k, rho[a](k, i));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = i + 1; j < M; ++j) {
      for (const auto& [k, c] : bm.upper(i, j)) br.add(H + i, H + j, H + k, c);
      for (const auto& [k, c] : bh.upper(i, j)) br.add(H + i, H + j, k, c);
    }
  return LieAlgebra(std::move(br));
}

inline std::vector<Rational> standard_metric(int n, const Rational& c1, const Rational& c2) {
  std::vector<Rational> g(4 * static_cast<std::size_t>(n), c2);
  for (int u = 0; u < 4; ++u) g[u] = c1;
  return g;
}

/// Conjugation v -> i v i^{-1} on the Im(H) block of slot 0, identity elsewhere.
inline RatMatrix twist_matrix(int n) {
  RatMatrix t = RatMatrix::identity(4 * static_cast<std::size_t>(n));
  t(2, 2) = -1;
  t(3, 3) = -1;
  return t;
}

/// Horizontal Theta twisted by the quaternion i: output-only conjugation, or output and arguments.
inline BilinearMap<Rational> twisted_theta(int n, bool conjugate_arguments) {
  const std::size_t N = 4 * static_cast<std::size_t>(n), nn = n;
  const Quaternion i = Quaternion::unit(1), iinv = i.conj();
  return tabulate(N, N, [&](const RatVector& x, const RatVector& y) {
    RatVector xx = x, yy = y;
    if (conjugate_arguments) {
      // I^{-1} acting on H^{n-1} by right multiplication with i^{-1}
      std::fill(xx.begin(), xx.end(), Rational(0));
      std::fill(yy.begin(), yy.end(), Rational(0));
      for (std::size_t p = 1; p < nn; ++p) {
        put(xx, p, slot(x, p) * iinv);
        put(yy, p, slot(y, p) * iinv);
      }
    }
    RatVector out(N, Rational(0));
    put(out, 0, i * theta_value(xx, yy, 1, nn) * iinv);
    return out;
  });
}

namespace detail {

inline void finish_checks(HomogeneousModel& m) {
  const std::size_t N = m.dim_m;
  // m is an h-module and g is a Lie algebra
  if (!m.g.satisfies_jacobi()) throw std::runtime_error("build_model: Jacobi identity fails for " + m.spec.str());
  RatMatrix id = RatMatrix::identity(N);
  const auto& [I, J, K] = m.IJK;
  if (!(I * I == id * Rational(-1)) || !(J * J == id * Rational(-1)) || !(K * K == id * Rational(-1)) ||
      !(I * J * K == id * Rational(-1)))
    throw std::runtime_error("build_model: quaternion relations fail");
  RatMatrix G(N, N);
  for (std::size_t i = 0; i < N; ++i) G(i, i) = m.metric[i];
  for (const auto* A : {&I, &J, &K})
    if (!(A->transpose() * G + G * (*A)).is_zero()) throw std::runtime_error("build_model: metric not Hermitian");
  MatrixSpan qspan({I, J, K});
  for (const auto& r : m.rho) {
    if (!(r.transpose() * G + G * r).is_zero()) throw std::runtime_error("build_model: metric not invariant");
    for (const auto* A : {&I, &J, &K})
      if (!qspan.coords(commutator(r, *A))) throw std::runtime_error("build_model: quaternionic structure not invariant");
  }
}

}  // namespace detail

/// Left-invariant model h x| (m, B) from horizontal parameters.
inline HomogeneousModel build_semidirect(const ModelSpec& spec, const BracketParams& params) {
  Isotropy iso = isotropy_rep(spec.n);
  HomogeneousModel m;
  m.spec = spec;
  m.n = spec.n;
  m.dim_h = iso.h.dim();
  m.dim_m = iso.N;
  m.h = iso.h;
  m.rho = iso.rho;
  m.bracket_m = combine(horizontal_brackets(spec.n), params);
  m.bracket_h = BilinearMap<Rational>(iso.N, iso.h.dim());
  if (!is_equivariant(m.bracket_m, iso.rho, iso.rho)) throw std::runtime_error("build_model: bracket not equivariant");
  m.g = assemble(m.h, m.rho, m.bracket_m, m.bracket_h);
  m.IJK = quaternionic_triple(spec.n);
  m.metric = standard_metric(spec.n, spec.c1, spec.c2);
  detail::finish_checks(m);
  return m;
}

/// Identification scale tau = t^2 of H^{n-1} with the off-diagonal block in the reductive models.
inline const Rational kReductiveScale = Rational(2);

/// g = H + sp(1, n-1) (noncompact) or H + sp(n) with h = sp(1)_diag + sp(n-1).
inline HomogeneousModel build_reductive(const ModelSpec& spec, bool noncompact, const Rational& tau = kReductiveScale) {
  const int n = spec.n;
  const std::size_t nn = n, Q = 4 + 4 * nn;
  auto eta = [&](std::size_t a) { return (noncompact && a > 0) ? -1 : 1; };
  // elements (a, X) of H + sp realified as diag(L_a, realify X)
  auto embed = [&](const Quaternion& a, const QMatrix& x) {
    RatMatrix out(Q, Q);
    RatMatrix la = left_mult_matrix(a), rx = realify(x);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out(i, j) = la(i, j);
    for (std::size_t i = 0; i < rx.rows(); ++i)
      for (std::size_t j = 0; j < rx.cols(); ++j) out(4 + i, 4 + j) = rx(i, j);
    return out;
  };
  std::vector<RatMatrix> basis;
  std::vector<int> odd;  // 1 for the off-diagonal block
  for (int u = 1; u < 4; ++u) {
    QMatrix d(nn, nn);
    d(0, 0) = Quaternion::unit(u);
    basis.push_back(embed(Quaternion::unit(u), d));
    odd.push_back(0);
  }
  for (const auto& y : sp_basis(nn - 1, 0)) {
    QMatrix big(nn, nn);
    for (std::size_t a = 0; a + 1 < nn; ++a)
      for (std::size_t b = 0; b + 1 < nn; ++b) big(a + 1, b + 1) = y(a, b);
    basis.push_back(embed(Quaternion(), big));
    odd.push_back(0);
  }
  const std::size_t H = basis.size();
  basis.push_back(embed(Quaternion::unit(0), QMatrix(nn, nn)));
  odd.push_back(0);
  for (int u = 1; u < 4; ++u) {
    QMatrix d(nn, nn);
    d(0, 0) = Quaternion::unit(u) * Rational(-1);
    basis.push_back(embed(Quaternion::unit(u), d));
    odd.push_back(0);
  }
  for (std::size_t p = 1; p < nn; ++p)
    for (int u = 0; u < 4; ++u) {
      QMatrix e(nn, nn);
      e(p, 0) = Quaternion::unit(u);
      e(0, p) = Quaternion::unit(u).conj() * Rational(-eta(0) * eta(p));
      basis.push_back(embed(Quaternion(), e));
      odd.push_back(1);
    }
  LieAlgebra unit = MatrixSpan(basis).lie_algebra();
  // rescale the off-diagonal basis vectors by t, t^2 = tau: constants pick up t^{e_i + e_j - e_k}
  const std::size_t D = basis.size();
  BilinearMap<Rational> br(D, D);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = i + 1; j < D; ++j)
      for (const auto& [k, c] : unit.structure().upper(i, j)) {
        const int e = odd[i] + odd[j] - odd[k];
        if (e == 0) br.add(i, j, k, c);
        else if (e == 2) br.add(i, j, k, c * tau);
        else throw std::logic_error("build_reductive: odd grading violated");
      }
  HomogeneousModel m;
  m.spec = spec;
  m.n = n;
  m.dim_h = H;
  m.dim_m = D - H;
  m.g = LieAlgebra(std::move(br));
  BilinearMap<Rational> hb(H, H);
  for (std::size_t a = 0; a < H; ++a)
    for (std::size_t b = a + 1; b < H; ++b)
      for (const auto& [k, c] : m.g.structure().upper(a, b)) {
        if (k >= H) throw std::runtime_error("build_reductive: h is not a subalgebra");
        hb.add(a, b, k, c);
      }
  m.h = LieAlgebra(std::move(hb));
  m.rho.assign(H, RatMatrix(m.dim_m, m.dim_m));
  for (std::size_t a = 0; a < H; ++a)
    for (std::size_t i = 0; i < m.dim_m; ++i)
      for (const auto& [k, c] : m.g.structure().upper(a, H + i)) {
        if (k < H) throw std::runtime_error("build_reductive: complement is not h-invariant");
        m.rho[a](k - H, i) = c;
      }
  m.bracket_m = BilinearMap<Rational>(m.dim_m, m.dim_m);
  m.bracket_h = BilinearMap<Rational>(m.dim_m, H);
  for (std::size_t i = 0; i < m.dim_m; ++i)
    for (std::size_t j = i + 1; j < m.dim_m; ++j)
      for (const auto& [k, c] : m.g.structure().upper(H + i, H + j)) {
        if (k >= H) m.bracket_m.add(i, j, k - H, c);
        else m.bracket_h.add(i, j, k, c);
      }
  Isotropy iso = isotropy_rep(n);
  for (std::size_t a = 0; a < H; ++a)
    if (!(m.rho[a] == iso.rho[a])) throw std::runtime_error("build_reductive: isotropy differs from the standard one");
  m.IJK = quaternionic_triple(n);
  m.metric = standard_metric(n, spec.c1, spec.c2);
  detail::finish_checks(m);
  return m;
}

/// Maximal-isotropy model on m = H^n with bracket c' Theta + c Xi valued in k = sp(1) + sp(n).
inline BilinearMap<Rational> maximal_bracket(int n, const Rational& cprime, const Rational& c) {
  const std::size_t nn = n, N = 4 * nn;
  Ambient k = ambient_k(n);
  std::vector<RatMatrix> spn(k.mats.begin() + 3, k.mats.end());
  MatrixSpan span(spn);
  return tabulate(N, k.mats.size(), [&](const RatVector& x, const RatVector& y) {
    RatVector out(k.mats.size(), Rational(0));
    Quaternion w = theta_value(x, y, 0, nn);
    for (int u = 1; u < 4; ++u) out[u - 1] = cprime * w[u];
    auto co = span.coords(realify(xi_value(x, y, 0, nn)));
    if (!co) throw std::logic_error("maximal_bracket: Xi value outside sp(n)");
    for (std::size_t t = 0; t < co->size(); ++t) out[3 + t] = c * (*co)[t];
    return out;
  });
}

inline HomogeneousModel build_maximal(const ModelSpec& spec, const Rational& cprime, const Rational& c,
                                      bool verify = true) {
  const int n = spec.n;
  Ambient k = ambient_k(n);
  HomogeneousModel m;
  m.spec = spec;
  m.n = n;
  m.rho = k.mats;
  m.dim_h = k.mats.size();
  m.dim_m = 4 * static_cast<std::size_t>(n);
  m.h = MatrixSpan(k.mats).lie_algebra();
  m.bracket_m = BilinearMap<Rational>(m.dim_m, m.dim_m);
  m.bracket_h = maximal_bracket(n, cprime, c);
  m.g = assemble(m.h, m.rho, m.bracket_m, m.bracket_h);
  m.IJK = quaternionic_triple(n);
  m.metric = standard_metric(n, spec.c1, spec.c2);
  if (verify) detail::finish_checks(m);
  return m;
}

/// Jacobi identity on triples from m alone for a purely vertical bracket with values in k.
inline bool maximal_jacobi(int n, const Rational& cprime, const Rational& c) {
  ModelSpec spec;
  spec.kind = ModelKind::MaxCurved;
  spec.n = n;
  HomogeneousModel m = build_maximal(spec, cprime, c, false);
  return m.g.satisfies_jacobi();
}

/// Isotropy Z_h(I) = so(2) + sp(n-1) acting on m with the twisted Theta bracket.
struct TwistResult {
  HomogeneousModel model;
  bool arguments_conjugated = false;
  bool centralizer_equivariant = false;
  bool full_equivariant = false;
  std::size_t centralizer_dim = 0;
};

inline TwistResult build_twisted(const ModelSpec& spec) {
  Isotropy iso = isotropy_rep(spec.n);
  // centralizer of D(i) in h: D(i) and sp(n-1)
  std::vector<std::size_t> zidx{0};
  for (std::size_t a = 3; a < iso.h.dim(); ++a) zidx.push_back(a);
  std::vector<RatMatrix> zr;
  for (auto a : zidx) zr.push_back(iso.rho[a]);
  TwistResult out;
  for (bool conj_args : {false, true}) {
    BilinearMap<Rational> b = twisted_theta(spec.n, conj_args);
    const bool cz = is_equivariant(b, zr, zr);
    const bool full = is_equivariant(b, iso.rho, iso.rho);
    out.arguments_conjugated = conj_args;
    out.centralizer_equivariant = cz;
    out.full_equivariant = full;
    if (cz && !full) break;
  }
  HomogeneousModel& m = out.model;
  m.spec = spec;
  m.n = spec.n;
  m.rho = zr;
  m.dim_h = zr.size();
  m.dim_m = iso.N;
  m.h = MatrixSpan(zr).lie_algebra();
  m.bracket_m = twisted_theta(spec.n, out.arguments_conjugated);
  m.bracket_h = BilinearMap<Rational>(m.dim_m, m.dim_h);
  m.g = assemble(m.h, m.rho, m.bracket_m, m.bracket_h);
  m.IJK = quaternionic_triple(spec.n);
  m.metric = standard_metric(spec.n, spec.c1, spec.c2);
  out.centralizer_dim = m.dim_h;
  detail::finish_checks(m);
  return out;
}

inline HomogeneousModel build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::QHP: return build_reductive(spec, false);
    case ModelKind::QHH: return build_reductive(spec, true);
    case ModelKind::FlatMax: return build_maximal(spec, 0, 0);
    case ModelKind::MaxCurved: return build_maximal(spec, spec.c * Rational(2), spec.c);
    case ModelKind::TwistedTheta: return build_twisted(spec).model;
    case ModelKind::H6: throw std::invalid_argument("build_model: H6 is not constructed");
    default: return build_semidirect(spec, canonical_params(spec.kind, spec.beta));
  }
}

}  // namespace qhlab
