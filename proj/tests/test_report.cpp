#include <gtest/gtest.h>

#include <fstream>

#include "qhlab/report.hpp"

using namespace qhlab;
using report::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(QHLAB_DATA_DIR) + "/" + name);
  return json::parse(in);
}

}  // namespace

TEST(Report, InvariantDims) {
  auto r = report::invariant_dims(3);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.doc["horizontal"], 5);
  EXPECT_EQ(r.doc["vertical"], 4);
  EXPECT_THROW(report::invariant_dims(6), std::invalid_argument);
}

TEST(Report, ClassifyBracket) {
  const BracketParams h2p = canonical_params(ModelKind::H2, 0);
  auto h2 = report::classify_bracket(h2p);
  EXPECT_TRUE(h2.ok);
  EXPECT_EQ(h2.doc["canonical"]["model"], "H2");
  EXPECT_EQ(h2.doc["canonical"]["s"], "1");
  auto scaled = report::classify_bracket(act(h2p, 3, 4));
  EXPECT_EQ(scaled.doc["canonical"]["model"], "H2");
  EXPECT_NE(scaled.doc["canonical"]["s"], "1");
  auto flat = report::classify_bracket({0, 0, 0, 0, 0});
  EXPECT_TRUE(flat.ok);
  EXPECT_EQ(flat.text.back(), "flat (excluded from the normal forms)");
  EXPECT_TRUE(flat.doc["canonical"].is_null());
  auto bad = report::classify_bracket({1, 0, 1, 1, 0});
  EXPECT_FALSE(bad.ok);
  ASSERT_FALSE(bad.text.empty());
  EXPECT_EQ(bad.text[0].rfind("violates ", 0), 0u);
  EXPECT_FALSE(bad.doc["violated"].empty());
}

TEST(Report, GridParsing) {
  auto g = report::parse_grid("1,2; 3/2,1");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[1].first, Rational(3, 2));
  EXPECT_THROW(report::parse_grid("1,0"), std::invalid_argument);
  EXPECT_THROW(report::parse_grid("1,2,3"), std::invalid_argument);
  EXPECT_THROW(report::parse_grid("x,1"), std::invalid_argument);
  EXPECT_EQ(report::standard_grid().size(), 16u);
}

TEST(Report, CsvRendering) {
  report::Result r;
  r.csv = {{"a", "b"}, {"x,y", "say \"hi\""}};
  EXPECT_EQ(report::render(r, "csv"), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
  r.text = {"one", "two"};
  EXPECT_EQ(report::render(r, "text"), "one\ntwo\n");
}

TEST(Report, NormalFormTableReproduces) {
  auto data = load("normal_forms.json");
  for (int n : {2, 3}) EXPECT_TRUE(report::reproduce_normal_forms(n, data).ok) << n;
}

TEST(Report, ModelReportKeys) {
  ModelSpec s;
  s.kind = ModelKind::H5;
  s.n = 3;
  s.beta = 1;
  auto r = report::model_report(s, {{1, 1}, {2, 1}});
  for (const char* key : {"model", "n", "dims", "family", "canonical", "twisted", "riemannian", "f_EH", "f_KH", "adapted",
                          "class_points", "suite"})
    EXPECT_TRUE(r.doc.contains(key)) << key;
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.doc["class_points"].size(), 2u);
  EXPECT_TRUE(r.doc["suite"]["checks"]["d_squared_zero"].get<bool>());
}
