#pragma once

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qhlab/forms.hpp"
#include "qhlab/geometry.hpp"
#include "qhlab/models.hpp"

namespace qhlab::report {

using json = nlohmann::ordered_json;

inline std::string rat(const Rational& r) { return r.str(); }

inline json poly_json(const Poly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    json e = json::object();
    for (int v = 0; v < kNumVars; ++v)
      if (m.exp[v]) e[std::string(kVarNames[v])] = m.exp[v];
    terms.push_back({{"coeff", rat(c)}, {"exponents", e}});
  }
  return {{"poly", p.str()}, {"terms", terms}};
}

inline json dims_json(int n) {
  Dims d = dims(n);
  return {{"D", d.D}, {"d", d.d}, {"delta", d.delta}};
}

inline json params_json(const BracketParams& p) {
  json a = json::array();
  for (const auto& x : p.as_array()) a.push_back(rat(x));
  return a;
}

inline std::string family_name(Family f) { return "F" + std::to_string(static_cast<int>(f)); }

inline json families_json(const BracketParams& p) {
  json a = json::array();
  for (auto f : in_families(p)) a.push_back(family_name(f));
  return a;
}

inline std::string opt_rat(const std::optional<Rational>& r) { return r ? rat(*r) : std::string("-"); }

inline json flags_json(const RiemannianFlags& f) {
  json product = json::array();
  for (const auto& b : f.product) {
    json blocks = json::array();
    for (auto x : b.blocks) blocks.push_back(block_name(x));
    product.push_back({{"blocks", blocks},
                       {"dim", b.indices.size()},
                       {"sectional", b.sectional ? json(rat(*b.sectional)) : json(nullptr)}});
  }
  return {{"einstein", f.einstein ? json(rat(*f.einstein)) : json(nullptr)},
          {"conformally_flat", f.conformally_flat},
          {"locally_symmetric", f.locally_symmetric},
          {"constant_sectional", f.constant_sectional ? json(rat(*f.constant_sectional)) : json(nullptr)},
          {"scalar", rat(f.scalar)},
          {"product", product}};
}

using Grid = std::vector<std::pair<Rational, Rational>>;

/// "c1,c2;c1,c2;..." with rational entries.
inline Grid parse_grid(const std::string& text) {
  Grid g;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    auto comma = item.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("grid point without ',': " + item);
    Rational c1 = Rational::parse(item.substr(0, comma)), c2 = Rational::parse(item.substr(comma + 1));
    if (c1.sign() <= 0 || c2.sign() <= 0) throw std::invalid_argument("grid points must be positive");
    g.emplace_back(c1, c2);
  }
  if (g.empty()) throw std::invalid_argument("empty grid");
  return g;
}

inline std::vector<Rational> parse_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Rational::parse(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

/// Off-diagonal points of {1/2, 1, 2, 3}^2 followed by points on c1 = c2, 3c1 = 2c2 and 3c1 = 4c2.
inline Grid standard_grid() {
  const std::vector<Rational> v{Rational(1, 2), 1, 2, 3};
  Grid g;
  for (const auto& a : v)
    for (const auto& b : v)
      if (a != b) g.emplace_back(a, b);
  g.emplace_back(1, 1);
  g.emplace_back(Rational(2, 3), 1);
  g.emplace_back(Rational(4, 3), 1);
  g.emplace_back(4, 3);
  return g;
}

struct Result {
  json doc;
  bool ok = true;
  std::vector<std::string> text;
  std::vector<std::vector<std::string>> csv;
};

// ---------------------------------------------------------------------------

inline Result invariant_dims(int n) {
  if (n < 2 || n > 5) throw std::invalid_argument("n must be in 2..5");
  Result r;
  Isotropy iso = isotropy_rep(n);
  BracketDims bd = invariant_bracket_dims(iso);
  const std::size_t t1 = equivariant_bracket_count(torus_sp1(n)), tn = equivariant_bracket_count(torus_spn(n));
  // the count of five and four is stated for n >= 3
  const bool dims_ok = n < 3 || (bd.horizontal == 5 && bd.vertical == 4);
  r.ok = dims_ok && t1 == 0 && tn == 0;
  r.doc = {{"command", "invariant-dims"},
           {"n", n},
           {"dims", dims_json(n)},
           {"horizontal", bd.horizontal},
           {"vertical", bd.vertical},
           {"inadmissible", {{"sp1_torus", t1}, {"spn_torus", tn}}},
           {"suite", {{"passed", r.ok}}}};
  r.text = {"n=" + std::to_string(n), "horizontal=" + std::to_string(bd.horizontal) + " vertical=" + std::to_string(bd.vertical),
            "sp(1) torus: equivariant maps: " + std::to_string(t1),
            "sp(n) torus: equivariant maps: " + std::to_string(tn)};
  r.csv = {{"n", "horizontal", "vertical", "sp1_torus", "spn_torus"},
           {std::to_string(n), std::to_string(bd.horizontal), std::to_string(bd.vertical), std::to_string(t1),
            std::to_string(tn)}};
  return r;
}

inline json normalized_json(const Normalized& nf) {
  json j = {{"model", kind_name(nf.kind)}, {"params", params_json(nf.canonical)}, {"s", rat(nf.s)},
            {"t_squared", rat(nf.t_squared)}};
  if (nf.kind == ModelKind::H3 || nf.kind == ModelKind::H5 || nf.kind == ModelKind::H6) j["beta"] = rat(nf.beta);
  return j;
}

inline std::string tuple_str(const BracketParams& p) {
  std::string s = "(";
  auto a = p.as_array();
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + rat(a[i]);
  return s + ")";
}

inline Result classify_bracket(const BracketParams& p) {
  Result r;
  auto bad = violated_equations(p);
  json violated = json::array();
  for (auto i : bad) violated.push_back(kJacobiEquations[i]);
  const bool flat = p == BracketParams{0, 0, 0, 0, 0};
  r.doc = {{"command", "classify-bracket"}, {"input", params_json(p)}, {"family", families_json(p)},
           {"violated", violated}, {"flat", flat}, {"canonical", nullptr}};
  std::vector<std::string> fams;
  for (auto f : in_families(p)) fams.push_back(family_name(f));
  std::string famtext;
  for (const auto& f : fams) famtext += (famtext.empty() ? "" : ", ") + f;
  r.csv = {{"input", "families", "canonical", "s", "t_squared", "violated"}};
  if (!bad.empty()) {
    r.ok = false;
    std::string v;
    for (auto i : bad) {
      r.text.push_back(std::string("violates ") + kJacobiEquations[i] + " = 0");
      v += (v.empty() ? "" : "; ") + std::string(kJacobiEquations[i]);
    }
    r.csv.push_back({tuple_str(p), "", "", "", "", v});
  } else if (flat) {
    r.text = {"families: " + famtext, "flat (excluded from the normal forms)"};
    r.csv.push_back({tuple_str(p), famtext, "flat", "", "", ""});
  } else {
    Normalized nf = normalize(p);
    r.doc["canonical"] = normalized_json(nf);
    std::string name = kind_name(nf.kind);
    if (nf.kind == ModelKind::H3 || nf.kind == ModelKind::H5 || nf.kind == ModelKind::H6) name += "^" + rat(nf.beta);
    r.text = {"families: " + famtext, "canonical: " + name + " " + tuple_str(nf.canonical),
              "witness: s=" + rat(nf.s) + " t^2=" + rat(nf.t_squared)};
    r.csv.push_back({tuple_str(p), famtext, name, rat(nf.s), rat(nf.t_squared), ""});
  }
  r.doc["suite"] = {{"passed", r.ok}};
  return r;
}

// ---------------------------------------------------------------------------
// Tables.

inline ModelSpec spec_for(const std::string& model, int n, const Rational& beta = 0) {
  ModelSpec s;
  s.kind = parse_kind(model);
  s.n = n;
  s.beta = beta;
  return s;
}

/// Dimension of the semidirect and reductive models; for n = 2 this is one below d_n.
inline long model_dim(int n) { return 2L * n * n + n + 4; }

inline long expected_dim(const ModelSpec& s) {
  switch (s.kind) {
    case ModelKind::FlatMax:
    case ModelKind::MaxCurved: return dims(s.n).D;
    case ModelKind::TwistedTheta: return model_dim(s.n) - 2;
    default: return model_dim(s.n);
  }
}

inline Result reproduce_normal_forms(int n, const json& expected) {
  Result r;
  json rows = json::array();
  r.text.push_back("normal forms, n=" + std::to_string(n));
  r.csv = {{"model", "beta", "params", "families", "dim_g", "expected_dim", "orbit_ok", "match"}};
  const std::vector<std::pair<Rational, Rational>> orbit{{2, Rational(1, 4)}, {Rational(-1, 3), 9}, {5, 1}};
  for (const auto& row : expected.at("rows")) {
    const std::string model = row.at("model");
    const Rational beta = row.contains("beta") ? Rational::parse(row.at("beta").get<std::string>()) : Rational(0);
    ModelSpec spec = spec_for(model, n, beta);
    BracketParams p = canonical_params(spec.kind, beta);
    json want_params = row.at("params"), want_fam = row.at("families");
    HomogeneousModel m = build_model(spec);
    bool orbit_ok = true;
    for (const auto& [s, t2] : orbit) {
      Normalized nf = normalize(act(p, s, t2));
      orbit_ok = orbit_ok && nf.kind == spec.kind && nf.canonical == p;
    }
    Normalized self = normalize(p);
    const bool idem = self.kind == spec.kind && self.s == Rational(1) && self.t_squared == Rational(1);
    const bool match = params_json(p) == want_params && families_json(p) == want_fam &&
                       static_cast<long>(m.dim()) == model_dim(n) && orbit_ok && idem;
    r.ok = r.ok && match;
    rows.push_back({{"model", model}, {"beta", rat(beta)}, {"params", params_json(p)}, {"family", families_json(p)},
                    {"dim_g", m.dim()}, {"orbit_ok", orbit_ok && idem}, {"match", match}});
    std::string fams;
    for (const auto& f : families_json(p)) fams += (fams.empty() ? "" : " ") + f.get<std::string>();
    r.text.push_back(model + (row.contains("beta") ? "^" + rat(beta) : "") + " " + tuple_str(p) + " families " + fams +
                     " dim g=" + std::to_string(m.dim()) + (match ? " ok" : " MISMATCH"));
    r.csv.push_back({model, rat(beta), tuple_str(p), fams, std::to_string(m.dim()), std::to_string(model_dim(n)),
                     orbit_ok && idem ? "1" : "0", match ? "1" : "0"});
  }
  r.doc = {{"command", "reproduce"}, {"table", "table3"}, {"n", n}, {"dims", dims_json(n)}, {"rows", rows},
           {"suite", {{"passed", r.ok}}}};
  return r;
}

/// Class coefficients of a model family; the H3 and H5 families carry beta as the variable beta2.
struct RowCoefficients {
  ClassCoefficients fixed, adapted;
};

inline RowCoefficients row_coefficients(const EHAnalyzer& an, const std::string& model) {
  const int n = an.n();
  ModelKind kind = parse_kind(model);
  if (kind != ModelKind::H3 && kind != ModelKind::H5) {
    HomogeneousModel m = build_model(spec_for(model, n));
    return {an.coefficients(m), an.adapted_coefficients(m)};
  }
  // the coefficients are linear in the bracket, hence affine in beta
  HomogeneousModel m0 = build_model(spec_for(model, n, 0)), m1 = build_model(spec_for(model, n, 1));
  const Poly b = Poly::var(Var::beta2);
  auto affine = [&](const Poly& f0, const Poly& f1) { return f0 + b * (f1 - f0); };
  ClassCoefficients x0 = an.coefficients(m0), x1 = an.coefficients(m1);
  ClassCoefficients y0 = an.adapted_coefficients(m0), y1 = an.adapted_coefficients(m1);
  return {{affine(x0.f_EH, x1.f_EH), affine(x0.f_KH, x1.f_KH)}, {affine(y0.f_EH, y1.f_EH), affine(y0.f_KH, y1.f_KH)}};
}

inline json ratio_json(const Poly& computed, const Poly& expected) {
  auto q = proportionality(computed, expected);
  return q ? json(rat(*q)) : json(nullptr);
}

inline Result reproduce_class_table(int n, const json& expected) {
  if (n < 3 || n > 5) throw std::invalid_argument("the class table needs n in 3..5");
  Result r;
  EHAnalyzer an(n);
  json rows = json::array();
  r.text.push_back("class coefficients, n=" + std::to_string(n) + ", calibration on " +
                   expected.at("calibration_row").get<std::string>() +
                   (an.calibration_exact() ? " (exact)" : " (not exact: leading coefficients matched)"));
  r.csv = {{"model", "f_EH", "f_KH", "expected_f_EH", "expected_f_KH", "match", "adapted_f_EH", "adapted_f_KH"}};
  r.ok = an.calibration_exact();
  for (const auto& row : expected.at("rows")) {
    const std::string model = row.at("model");
    RowCoefficients c = row_coefficients(an, model);
    const Poly want_eh = parse_poly(row.at("f_EH").get<std::string>()), want_kh = parse_poly(row.at("f_KH").get<std::string>());
    const bool match = c.fixed.f_EH == want_eh && c.fixed.f_KH == want_kh;
    r.ok = r.ok && match;
    rows.push_back({{"model", model},
                    {"f_EH", poly_json(c.fixed.f_EH)},
                    {"f_KH", poly_json(c.fixed.f_KH)},
                    {"expected_f_EH", want_eh.str()},
                    {"expected_f_KH", want_kh.str()},
                    {"ratio_f_EH", ratio_json(c.fixed.f_EH, want_eh)},
                    {"ratio_f_KH", ratio_json(c.fixed.f_KH, want_kh)},
                    {"match", match},
                    {"adapted", {{"f_EH", poly_json(c.adapted.f_EH)}, {"f_KH", poly_json(c.adapted.f_KH)}}}});
    r.text.push_back(model + (match ? "  ok" : "  MISMATCH"));
    r.text.push_back("  f_EH = " + c.fixed.f_EH.str() + "   expected " + want_eh.str());
    r.text.push_back("  f_KH = " + c.fixed.f_KH.str() + "   expected " + want_kh.str());
    r.text.push_back("  adapted: f_EH = " + c.adapted.f_EH.str() + ", f_KH = " + c.adapted.f_KH.str());
    r.csv.push_back({model, c.fixed.f_EH.str(), c.fixed.f_KH.str(), want_eh.str(), want_kh.str(), match ? "1" : "0",
                     c.adapted.f_EH.str(), c.adapted.f_KH.str()});
  }
  const auto& sp = an.split();
  r.doc = {{"command", "reproduce"},
           {"table", "table4"},
           {"n", n},
           {"calibration_exact", an.calibration_exact()},
           {"casimir", {{"one_forms", rat(sp.casimir_one_form)}, {"theta_EH", rat(sp.casimir_EH)}, {"theta_KH", rat(sp.casimir_KH)}}},
           {"rows", rows},
           {"suite", {{"passed", r.ok}}}};
  return r;
}

/// Metric point, with beta for the H3 and H5 families, on a reduction locus.
struct LocusPoint {
  Rational beta, c1, c2;
};

namespace detail {

inline std::array<Rational, kNumVars> point_of(const LocusPoint& q) {
  auto pt = metric_point(q.c1, q.c2);
  pt[static_cast<int>(Var::beta2)] = q.beta;
  return pt;
}

inline bool has_var(const Poly& f, Var v) {
  for (const auto& [m, c] : f.terms())
    if (m.exp[static_cast<int>(v)]) return true;
  return false;
}

/// Positive rational roots of f(x, 1) for f homogeneous in (c1, c2) of degree at most two.
inline std::vector<Rational> ratio_roots(const Poly& f) {
  std::array<Rational, 3> a{};
  for (const auto& [m, c] : f.terms()) {
    const int e = m.exp[static_cast<int>(Var::c1)];
    if (e > 2) throw std::invalid_argument("ratio_roots: degree above two");
    a[e] += c;
  }
  std::vector<Rational> roots;
  if (a[2].is_zero()) {
    if (!a[1].is_zero()) roots.push_back(-a[0] / a[1]);
  } else {
    Rational disc = a[1] * a[1] - Rational(4) * a[2] * a[0], r;
    if (disc.sign() >= 0 && rational_sqrt(disc, r)) {
      roots.push_back((-a[1] + r) / (Rational(2) * a[2]));
      if (!r.is_zero()) roots.push_back((-a[1] - r) / (Rational(2) * a[2]));
    }
  }
  std::vector<Rational> out;
  for (const auto& x : roots)
    if (x.sign() > 0) out.push_back(x);
  return out;
}

}  // namespace detail

/// Points where `zero` vanishes and `nonzero` does not (pass nullopt to require both to vanish).
/// Rows without beta get `count` multiples of each root ratio, rows with beta solve for beta.
inline std::vector<LocusPoint> locus_points(const Poly& zero, const Poly& other, bool other_vanishes, std::size_t count = 3) {
  std::vector<LocusPoint> out;
  auto accept = [&](const LocusPoint& q) {
    const auto pt = detail::point_of(q);
    if (!zero.eval(pt).is_zero()) return;
    if (other.eval(pt).is_zero() != other_vanishes) return;
    out.push_back(q);
  };
  if (detail::has_var(zero, Var::beta2) || detail::has_var(other, Var::beta2)) {
    const Grid candidates{{1, 1}, {3, 1}, {1, 2}, {1, 3}, {2, 1}, {5, 2}, {4, 1}};
    for (const auto& [c1, c2] : candidates) {
      if (out.size() >= count) break;
      auto pt = metric_point(c1, c2);
      pt[static_cast<int>(Var::beta2)] = 0;
      const Rational b = zero.eval(pt);
      pt[static_cast<int>(Var::beta2)] = 1;
      const Rational a = zero.eval(pt) - b;
      if (a.is_zero()) continue;
      accept({-b / a, c1, c2});
    }
    return out;
  }
  for (const auto& r : detail::ratio_roots(zero))
    for (std::size_t k = 1; k <= count; ++k) accept({0, r * Rational(static_cast<long>(k)), Rational(static_cast<long>(k))});
  return out;
}

/// Model name with an optional ":beta" suffix, e.g. "H3:2".
inline ModelSpec spec_from_label(const std::string& label, int n) {
  auto colon = label.find(':');
  if (colon == std::string::npos) return spec_for(label, n);
  return spec_for(label.substr(0, colon), n, Rational::parse(label.substr(colon + 1)));
}

inline bool rule_applies(const json& rule, const ModelSpec& s, const Rational& c1, const Rational& c2) {
  if (parse_kind(rule.at("model").get<std::string>()) != s.kind) return false;
  if (rule.contains("beta") && Rational::parse(rule.at("beta").get<std::string>()) != s.beta) return false;
  const std::string locus = rule.at("locus");
  if (locus == "all") return true;
  return parse_poly(locus).eval(metric_point(c1, c2)).is_zero();
}

inline bool expected_flag(const json& rules, const ModelSpec& s, const Rational& c1, const Rational& c2) {
  for (const auto& rule : rules)
    if (rule_applies(rule, s, c1, c2)) return true;
  return false;
}

inline Result reproduce_riemannian(int n, const Grid& grid, const json& expected) {
  Result r;
  json rows = json::array();
  r.csv = {{"model", "c1", "c2", "einstein", "conformally_flat", "locally_symmetric", "constant_sectional", "match"}};
  r.text.push_back("Riemannian flags, n=" + std::to_string(n) + ", " + std::to_string(grid.size()) + " metric points");
  for (const auto& label : expected.at("models")) {
    ModelSpec spec = spec_from_label(label.get<std::string>(), n);
    HomogeneousModel m = build_model(spec);
    std::size_t einstein = 0, cf = 0, ls = 0, mismatches = 0;
    json points = json::array();
    for (const auto& [c1, c2] : grid) {
      auto flags = classify_riemannian(riemann(reductive_data(m, standard_metric(n, c1, c2))));
      const bool we = expected_flag(expected.at("einstein"), spec, c1, c2);
      const bool wc = expected_flag(expected.at("conformally_flat"), spec, c1, c2);
      const bool wl = expected_flag(expected.at("locally_symmetric"), spec, c1, c2);
      const bool match = flags.einstein.has_value() == we && flags.conformally_flat == wc && flags.locally_symmetric == wl;
      einstein += flags.einstein.has_value();
      cf += flags.conformally_flat;
      ls += flags.locally_symmetric;
      mismatches += !match;
      points.push_back({{"c1", rat(c1)}, {"c2", rat(c2)}, {"flags", flags_json(flags)}, {"match", match}});
      r.csv.push_back({label.get<std::string>(), rat(c1), rat(c2), opt_rat(flags.einstein), flags.conformally_flat ? "1" : "0",
                       flags.locally_symmetric ? "1" : "0", opt_rat(flags.constant_sectional), match ? "1" : "0"});
    }
    r.ok = r.ok && mismatches == 0;
    rows.push_back({{"model", label}, {"points", points}, {"mismatches", mismatches}});
    r.text.push_back(label.get<std::string>() + ": einstein " + std::to_string(einstein) + ", conformally flat " +
                     std::to_string(cf) + ", locally symmetric " + std::to_string(ls) + " of " +
                     std::to_string(grid.size()) + (mismatches ? ", MISMATCHES " + std::to_string(mismatches) : ", ok"));
  }
  r.doc = {{"command", "reproduce"}, {"table", "prop12"}, {"n", n}, {"rows", rows}, {"suite", {{"passed", r.ok}}}};
  return r;
}

/// Samples (c', c) with `on_locus` points on c' = 2c; deterministic for a given seed.
inline std::vector<std::pair<Rational, Rational>> maximal_samples(std::size_t total, std::size_t on_locus, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-12, 12), den(1, 6);
  auto draw = [&] { return Rational(num(rng), den(rng)); };
  std::vector<std::pair<Rational, Rational>> out;
  while (out.size() < on_locus) {
    Rational c = draw();
    if (!c.is_zero()) out.emplace_back(Rational(2) * c, c);
  }
  while (out.size() < total) {
    Rational cp = draw(), c = draw();
    if (cp != Rational(2) * c) out.emplace_back(cp, c);
  }
  return out;
}

inline Result reproduce_maximal(const std::vector<int>& ns, std::size_t samples = 50, std::size_t on_locus = 10) {
  Result r;
  json rows = json::array();
  r.csv = {{"n", "c_prime", "c", "jacobi", "on_locus", "match"}};
  for (int n : ns) {
    std::size_t pass = 0, mism = 0;
    for (const auto& [cp, c] : maximal_samples(samples, on_locus, 7 + static_cast<std::uint64_t>(n))) {
      const bool jac = maximal_jacobi(n, cp, c), locus = cp == Rational(2) * c;
      pass += jac;
      mism += jac != locus;
      r.csv.push_back({std::to_string(n), rat(cp), rat(c), jac ? "1" : "0", locus ? "1" : "0", jac == locus ? "1" : "0"});
    }
    r.ok = r.ok && mism == 0;
    rows.push_back({{"n", n}, {"samples", samples}, {"on_locus", on_locus}, {"jacobi", pass}, {"mismatches", mism}});
    r.text.push_back("H^" + std::to_string(n) + ": Jacobi <=> c'=2c over " + std::to_string(samples) + " samples: " +
                     (mism == 0 ? "ok" : "MISMATCH") + " (" + std::to_string(pass) + " Jacobi)");
  }
  r.doc = {{"command", "reproduce"}, {"table", "maxmodel"}, {"rows", rows}, {"suite", {{"passed", r.ok}}}};
  return r;
}

// ---------------------------------------------------------------------------
// Model dossier.

inline Result model_report(const ModelSpec& spec, const Grid& grid) {
  Result r;
  const int n = spec.n;
  std::optional<TwistResult> twist;
  HomogeneousModel m;
  if (spec.kind == ModelKind::TwistedTheta) {
    twist = build_twisted(spec);
    m = twist->model;
  } else {
    m = build_model(spec);
  }
  json checks = json::object();
  const bool dim_ok = static_cast<long>(m.dim()) == expected_dim(spec);
  checks["dim_g"] = dim_ok;
  r.text.push_back("model " + spec.str());
  r.text.push_back("dim g = " + std::to_string(m.dim()) + " (h " + std::to_string(m.dim_h) + ", m " +
                   std::to_string(m.dim_m) + "), expected " + std::to_string(expected_dim(spec)));

  json family = json::array(), canonical = nullptr, twisted = nullptr;
  if (auto hc = horizontal_coordinates(m.bracket_m, n); hc && m.is_left_invariant() && !twist) {
    family = families_json(*hc);
    if (!(*hc == BracketParams{0, 0, 0, 0, 0})) {
      canonical = normalized_json(normalize(*hc));
      r.text.push_back("bracket " + tuple_str(*hc) + ", canonical " + canonical["model"].get<std::string>());
    }
  }
  if (twist) {
    twisted = {{"centralizer_equivariant", twist->centralizer_equivariant},
               {"full_equivariant", twist->full_equivariant},
               {"arguments_conjugated", twist->arguments_conjugated},
               {"centralizer_dim", twist->centralizer_dim}};
    checks["twisted_equivariance"] = twist->centralizer_equivariant && !twist->full_equivariant;
    r.text.push_back(std::string("equivariance: ") + (twist->full_equivariant ? "h" : "Z_h(I) only") +
                     "; symmetry dimension d_n-2 = " + std::to_string(model_dim(n) - 2));
  }

  checks["omega_frame_independent"] = omega_frame_independent(m, 10, 11);
  {
    auto f = fundamental_form(m.IJK, m.metric);
    CEDifferential d(m.bracket_m);
    checks["omega_invariant"] = is_invariant_form(m.rho, f.Omega);
    checks["d_squared_zero"] = d(d(f.Omega)).is_zero();
  }

  json riem = json::array();
  r.csv = {{"c1", "c2", "einstein", "conformally_flat", "locally_symmetric", "constant_sectional", "rule_class",
            "adapted_class", "identity_class"}};
  std::vector<RiemannianFlags> flags;
  for (const auto& [c1, c2] : grid) {
    flags.push_back(classify_riemannian(riemann(reductive_data(m, standard_metric(n, c1, c2)))));
    riem.push_back({{"c1", rat(c1)}, {"c2", rat(c2)}, {"flags", flags_json(flags.back())}});
  }

  json f_eh = nullptr, f_kh = nullptr, adapted = nullptr, class_points = json::array();
  const bool forms_ok = n >= 3 && !twist;
  bool agree = true;
  std::optional<ClassCoefficients> fixed, adapt;
  if (forms_ok) {
    EHAnalyzer an(n);
    fixed = an.coefficients(m);
    adapt = an.adapted_coefficients(m);
    f_eh = poly_json(fixed->f_EH);
    f_kh = poly_json(fixed->f_KH);
    adapted = {{"f_EH", poly_json(adapt->f_EH)}, {"f_KH", poly_json(adapt->f_KH)}};
    r.text.push_back("f_EH = " + fixed->f_EH.str() + ", f_KH = " + fixed->f_KH.str());
    r.text.push_back("adapted: f_EH = " + adapt->f_EH.str() + ", f_KH = " + adapt->f_KH.str());
  } else {
    r.text.push_back(twist ? "class analysis: isotropy is not h, skipped" : "class analysis: needs n >= 3, skipped");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& [c1, c2] = grid[i];
    const auto& fl = flags[i];
    std::string rule = "-", adap = "-", ident = "-";
    json point = {{"c1", rat(c1)}, {"c2", rat(c2)}};
    if (forms_ok) {
      ClassTests t = xi_and_class_tests(m, c1, c2);
      rule = class_name(class_at(*fixed, c1, c2));
      adap = class_name(class_at(*adapt, c1, c2));
      ident = class_name(identity_class(t));
      agree = agree && adap == ident && t.qkt;
      point["rule_class"] = rule;
      point["adapted_class"] = adap;
      point["identity_class"] = ident;
      point["identities"] = {{"qk", t.qk},
                             {"lcqk", t.lcqk.has_value()},
                             {"kh", t.kh},
                             {"qkt", t.qkt},
                             {"kh_constant", t.kh_lambda ? json(rat(*t.kh_lambda)) : json(nullptr)},
                             {"xi_ratio", t.lcqk_ratio ? json(rat(*t.lcqk_ratio)) : json(nullptr)}};
      class_points.push_back(point);
    }
    r.text.push_back("(" + rat(c1) + ", " + rat(c2) + "): einstein " + opt_rat(fl.einstein) + ", conformally flat " +
                     (fl.conformally_flat ? "yes" : "no") + ", symmetric " + (fl.locally_symmetric ? "yes" : "no") +
                     ", sectional " + opt_rat(fl.constant_sectional) +
                     (forms_ok ? ", class " + ident + " (rule " + rule + ", adapted " + adap + ")" : ""));
    r.csv.push_back({rat(c1), rat(c2), opt_rat(fl.einstein), fl.conformally_flat ? "1" : "0",
                     fl.locally_symmetric ? "1" : "0", opt_rat(fl.constant_sectional), rule, adap, ident});
  }
  if (forms_ok) checks["adapted_matches_identities"] = agree;
  for (const auto& [k, v] : checks.items()) r.ok = r.ok && v.get<bool>();
  r.doc = {{"command", "model-report"},
           {"model", spec.str()},
           {"n", n},
           {"dims", {{"D", dims(n).D}, {"d", dims(n).d}, {"delta", dims(n).delta}, {"g", m.dim()}, {"h", m.dim_h}, {"m", m.dim_m}}},
           {"family", family},
           {"canonical", canonical},
           {"twisted", twisted},
           {"riemannian", riem},
           {"f_EH", f_eh},
           {"f_KH", f_kh},
           {"adapted", adapted},
           {"class_points", class_points},
           {"suite", {{"passed", r.ok}, {"checks", checks}}}};
  r.text.push_back(std::string("suite: ") + (r.ok ? "passed" : "FAILED"));
  return r;
}

// ---------------------------------------------------------------------------

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string render(const Result& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << r.doc.dump(2) << "\n";
  } else if (format == "csv") {
    for (const auto& row : r.csv) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
      os << "\n";
    }
  } else {
    for (const auto& line : r.text) os << line << "\n";
  }
  return os.str();
}

}  // namespace qhlab::report
