#include <gtest/gtest.h>

#include <random>

#include "qhlab/models.hpp"

using namespace qhlab;

namespace {

RatVector vec(std::size_t n, std::size_t p, const Quaternion& q) {
  RatVector x(4 * n, Rational(0));
  put(x, p, q);
  return x;
}

ModelSpec spec_of(ModelKind k, int n, const Rational& beta = 0) {
  ModelSpec s;
  s.kind = k;
  s.n = n;
  s.beta = beta;
  return s;
}

}  // namespace

TEST(Dims, ClosedForms) {
  Dims d3 = dims(3);
  EXPECT_EQ(d3.D, 36);
  EXPECT_EQ(d3.d, 25);
  EXPECT_EQ(d3.delta, 13);
  EXPECT_EQ(dims(2).D, 21);
  EXPECT_EQ(dims(2).d, 15);
  EXPECT_EQ(dims(1).D, 10);
  EXPECT_EQ(dims(1).d, 8);
}

TEST(Isotropy, DimensionAndTrivialDirection) {
  Isotropy iso = isotropy_rep(3);
  EXPECT_EQ(iso.h.dim(), 13u);
  EXPECT_EQ(iso.N, 12u);
  RatVector e0(12, Rational(0));
  e0[0] = 1;
  for (const auto& x : iso.rho)
    for (const auto& r : x.apply(e0)) EXPECT_TRUE(r.is_zero());
  // the sp(1) ideal moves every other direction
  for (int u = 0; u < 3; ++u) {
    std::size_t moved = 0;
    for (std::size_t i = 1; i < 12; ++i)
      for (std::size_t r = 0; r < 12; ++r) moved += !iso.rho[u](r, i).is_zero();
    EXPECT_GT(moved, 0u);
  }
}

TEST(Isotropy, QuaternionicTriple) {
  auto q = quaternionic_triple(3);
  const RatMatrix minus_one = RatMatrix::identity(12) * Rational(-1);
  EXPECT_EQ(q[0] * q[0], minus_one);
  EXPECT_EQ(q[0] * q[1], q[2]);
  EXPECT_EQ(q[0] * q[1] * q[2], minus_one);
}

TEST(HorizontalBrackets, ThetaHandValue) {
  const std::size_t n = 3;
  const Quaternion i = Quaternion::unit(1), j = Quaternion::unit(2);
  RatVector x = vec(n, 1, i), y = vec(n, 1, j);
  // sum over a in {i, j, k} of g(q1 a, q2) a
  Quaternion oracle;
  for (int u = 1; u < 4; ++u) {
    const Quaternion a = Quaternion::unit(u);
    oracle += a * hermitian_metric({Quaternion(), i * a, Quaternion()}, {Quaternion(), j, Quaternion()});
  }
  EXPECT_EQ(oracle, -Quaternion::unit(3));
  auto theta = horizontal_brackets(3)[kTheta].apply(x, y);
  EXPECT_EQ(slot(theta, 0), oracle);
  for (std::size_t p = 1; p < n; ++p) EXPECT_TRUE(slot(theta, p).is_zero());
}

TEST(HorizontalBrackets, PsiAndUpsilonValues) {
  auto h = horizontal_brackets(3);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> v(-4, 4);
  RatVector one = vec(3, 0, Quaternion(1));
  RatVector w(12, Rational(0));
  for (auto& c : w) c = v(rng);
  w[0] = 0;
  // Psi1(1, v) is the Im part of v, Psi2(1, v) the H^{n-1} part
  auto p1 = h[kPsi1].apply(one, w), p2 = h[kPsi2].apply(one, w);
  for (std::size_t r = 0; r < 12; ++r) {
    EXPECT_EQ(p1[r], r >= 1 && r < 4 ? w[r] : Rational(0));
    EXPECT_EQ(p2[r], r >= 4 ? w[r] : Rational(0));
  }
  RatVector iv = vec(3, 0, Quaternion::unit(1));
  RatVector q = vec(3, 2, Quaternion(1, 2, -1, 3));
  EXPECT_EQ(slot(h[kUps2].apply(iv, q), 2), -(Quaternion(1, 2, -1, 3) * Quaternion::unit(1)));
  EXPECT_EQ(slot(h[kUps1].apply(iv, vec(3, 0, Quaternion::unit(2))), 0), Quaternion::unit(3) * Rational(2));
}

TEST(HorizontalBrackets, EquivariantAndIndependent) {
  Isotropy iso = isotropy_rep(3);
  std::vector<RatVector> flat;
  for (const auto& b : horizontal_brackets(3)) {
    EXPECT_TRUE(is_equivariant(b, iso.rho, iso.rho));
    flat.push_back(b.flatten());
  }
  EXPECT_EQ(rank_of(flat), 5u);
  std::vector<RatMatrix> ad_h;
  for (std::size_t i = 0; i < iso.h.dim(); ++i) ad_h.push_back(iso.h.ad(i));
  std::vector<RatVector> vflat;
  for (const auto& b : vertical_brackets(iso)) {
    EXPECT_TRUE(is_equivariant(b, iso.rho, ad_h));
    vflat.push_back(b.flatten());
  }
  EXPECT_EQ(rank_of(vflat), 4u);
}

TEST(VerticalBrackets, XiValues) {
  const std::size_t n = 3;
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> v(-3, 3);
  auto rq = [&] { return Quaternion(v(rng), v(rng), v(rng), v(rng)); };
  RatVector q(12, Rational(0));
  for (std::size_t p = 1; p < n; ++p) put(q, p, rq());
  EXPECT_TRUE(realify(xi_value(q, q, 1, n)).is_zero());
  // Xi(q1, q2) q3 = q2 <q1, q3> - q1 <q2, q3>
  for (int t = 0; t < 20; ++t) {
    QVector q1{rq(), rq()}, q2{rq(), rq()}, q3{rq(), rq()};
    RatVector x(12, Rational(0)), y(12, Rational(0));
    for (std::size_t p = 0; p < 2; ++p) {
      put(x, p + 1, q1[p]);
      put(y, p + 1, q2[p]);
    }
    QVector got = xi_value(x, y, 1, n).apply(q3);
    const Quaternion a = hermitian_product(q1, q3), b = hermitian_product(q2, q3);
    for (std::size_t p = 0; p < 2; ++p) EXPECT_EQ(got[p], q2[p] * a - q1[p] * b);
    EXPECT_TRUE(in_sp(xi_value(x, y, 1, n), 2));
  }
}

TEST(Jacobi, GeneratorsAreTheSixEquations) {
  auto computed = jacobi_equations(3);
  auto reference = reference_jacobi_polys();
  ASSERT_EQ(computed.size(), 6u);
  for (const auto& g : computed) {
    std::size_t hits = 0;
    for (const auto& r : reference) hits += proportionality(g, r).has_value();
    EXPECT_EQ(hits, 1u) << g.str();
  }
}

TEST(Jacobi, PointEvaluations) {
  EXPECT_TRUE(violated_equations({1, 2, 1, 0, 0}).empty());
  EXPECT_EQ(violated_equations({1, 1, 1, 0, 0}), std::vector<std::size_t>{0});
  EXPECT_TRUE(violated_equations({0, 0, Rational(7, 3), 1, 1}).empty());
  // the six equations agree with the jacobiator of the assembled bracket
  ModelSpec spec;
  for (const BracketParams& p : {BracketParams{1, 1, 1, 0, 0}, BracketParams{0, 1, 0, 1, 1}, BracketParams{0, 0, 1, 1, 2}})
    EXPECT_THROW(build_semidirect(spec, p), std::runtime_error);
}

TEST(Families, Membership) {
  EXPECT_EQ(in_families({0, 0, 0, 0, 0}).size(), 4u);
  EXPECT_EQ(in_families({1, 2, 1, 0, 0}), std::vector<Family>{Family::F1});
  EXPECT_EQ(in_families({0, 2, 3, 0, 0}), std::vector<Family>{Family::F2});
  EXPECT_EQ(in_families({0, 0, Rational(1, 2), 1, 1}), std::vector<Family>{Family::F3});
  EXPECT_TRUE(in_families({1, 1, 1, 0, 0}).empty());
}

TEST(Normalize, Examples) {
  Normalized a = normalize({4, 8, 4, 0, 0});
  EXPECT_EQ(a.kind, ModelKind::H1plus);
  EXPECT_EQ(a.canonical, (BracketParams{1, 2, 1, 0, 0}));
  EXPECT_EQ(a.s, Rational(1, 4));
  EXPECT_EQ(a.t_squared * Rational(4) / a.s, Rational(1));
  Normalized b = normalize({-1, 2, 1, 0, 0});
  EXPECT_EQ(b.kind, ModelKind::H1minus);
  EXPECT_EQ(b.s, Rational(1));
  EXPECT_EQ(b.t_squared, Rational(1));
  Normalized c = normalize({0, 0, 5, 3, 0});
  EXPECT_EQ(c.kind, ModelKind::H5);
  EXPECT_EQ(c.beta, Rational(5, 3));
  EXPECT_EQ(c.canonical, (BracketParams{0, 0, Rational(5, 3), 1, 0}));
  EXPECT_EQ(c.s, Rational(1, 3));
  EXPECT_THROW(normalize({0, 0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(normalize({1, 1, 1, 0, 0}), std::invalid_argument);
}

TEST(Normalize, OrbitRoundTrip) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  auto draw = [&] {
    Rational x;
    do x = Rational(num(rng), den(rng)); while (x.is_zero());
    return x;
  };
  for (int t = 0; t < 200; ++t) {
    Rational b2 = draw(), g = draw();
    const std::array<BracketParams, 4> samples{BracketParams{draw(), Rational(2) * b2, b2, 0, 0},
                                               BracketParams{0, draw(), draw(), 0, 0},
                                               BracketParams{0, 0, draw(), g, g}, BracketParams{0, 0, draw(), draw(), 0}};
    for (const auto& p : samples) {
      Normalized nf = normalize(p);
      ASSERT_EQ(act(p, nf.s, nf.t_squared), nf.canonical);
      ASSERT_EQ(normalize(nf.canonical).canonical, nf.canonical);
    }
  }
}

TEST(Models, TableDimensions) {
  for (int n : {3, 4})
    for (ModelKind k : {ModelKind::H1plus, ModelKind::H1minus, ModelKind::H2, ModelKind::H3, ModelKind::H4,
                        ModelKind::H5, ModelKind::QHP, ModelKind::QHH}) {
      HomogeneousModel m = build_model(spec_of(k, n, 2));
      EXPECT_EQ(static_cast<long>(m.dim()), dims(n).d) << kind_name(k) << " n=" << n;
    }
}

TEST(Models, ReductiveModelsShareTheIsotropy) {
  Isotropy iso = isotropy_rep(3);
  for (ModelKind k : {ModelKind::QHP, ModelKind::QHH}) {
    HomogeneousModel m = build_model(spec_of(k, 3));
    EXPECT_FALSE(m.is_left_invariant());
    EXPECT_EQ(m.rho.size(), iso.rho.size());
    for (std::size_t i = 0; i < m.rho.size(); ++i) EXPECT_EQ(m.rho[i], iso.rho[i]);
  }
}

TEST(Models, IsotropyModuleDecomposition) {
  // m = R + Im(H) + H^{n-1}: one trivial line, and each nontrivial piece occurs once
  Isotropy iso = isotropy_rep(3);
  std::vector<SparseOp> ops;
  for (const auto& x : iso.rho) ops.push_back(to_sparse(x));
  EXPECT_EQ(invariant_vectors(ops, iso.N).size(), 1u);
  auto block = [&](std::size_t lo, std::size_t hi) {
    std::vector<RatMatrix> out;
    for (const auto& x : iso.rho) {
      RatMatrix b(hi - lo, hi - lo);
      for (std::size_t r = lo; r < hi; ++r)
        for (std::size_t c = lo; c < hi; ++c) b(r - lo, c - lo) = x(r, c);
      out.push_back(b);
    }
    return out;
  };
  EXPECT_EQ(equivariant_hom(iso.rho, block(1, 4)).size(), 1u);
  EXPECT_EQ(equivariant_hom(iso.rho, block(4, 12)).size(), 1u);
}

TEST(Models, MaximalBracketJacobiLocus) {
  for (const Rational& c : {Rational(1), Rational(-2, 3), Rational(5)}) {
    EXPECT_TRUE(maximal_jacobi(2, Rational(2) * c, c));
    EXPECT_FALSE(maximal_jacobi(2, c, c));
  }
  EXPECT_FALSE(maximal_jacobi(2, Rational(1), Rational(0)));
  ModelSpec s = spec_of(ModelKind::MaxCurved, 2);
  EXPECT_EQ(static_cast<long>(build_model(s).dim()), dims(2).D);
}

TEST(Models, TwistedThetaSymmetry) {
  TwistResult tw = build_twisted(spec_of(ModelKind::TwistedTheta, 3));
  EXPECT_TRUE(tw.centralizer_equivariant);
  EXPECT_FALSE(tw.full_equivariant);
  EXPECT_FALSE(tw.arguments_conjugated);
  EXPECT_EQ(static_cast<long>(tw.model.dim()), dims(3).d - 2);
}

TEST(Models, H6IsNotBuilt) {
  EXPECT_THROW(build_model(spec_of(ModelKind::H6, 3)), std::invalid_argument);
}

TEST(ModelSpec, ParseAndPrint) {
  ModelSpec s = parse_spec("H3:beta=2:n=3:c1=1:c2=1");
  EXPECT_EQ(s.kind, ModelKind::H3);
  EXPECT_EQ(s.beta, Rational(2));
  EXPECT_EQ(parse_spec(s.str()).str(), s.str());
  ModelSpec q = parse_spec("QHH:n=4:c1=1:c2=3/2");
  EXPECT_EQ(q.n, 4);
  EXPECT_EQ(q.c2, Rational(3, 2));
  EXPECT_THROW(parse_spec("H9:n=3"), std::invalid_argument);
  EXPECT_THROW(parse_spec("H2:n=7"), std::invalid_argument);
  EXPECT_THROW(parse_spec("H2:c1=-1"), std::invalid_argument);
}
