// qhlab: build the submaximal quaternionic models and reproduce their invariants.
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qhlab/report.hpp"

#ifndef QHLAB_DATA_DIR
#define QHLAB_DATA_DIR "data"
#endif

namespace {

using qhlab::report::json;

json load_data(const std::string& name) {
  const char* env = std::getenv("QHLAB_DATA_DIR");
  const std::string path = std::string(env ? env : QHLAB_DATA_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file " + path);
  return json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact models of submaximally symmetric almost quaternion-Hermitian spaces"};
  app.require_subcommand(1);
  int n = 3;
  std::string spec_text, grid_text, beta_text, format = "text", out_path;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--out", out_path, "write the report to a file");
  };

  auto* dims_cmd = app.add_subcommand("invariant-dims", "equivariant bracket dimensions and inadmissible isotropies");
  dims_cmd->add_option("--n", n, "quaternionic dimension (2..5)");
  common(dims_cmd);

  std::vector<std::string> params;
  auto* classify = app.add_subcommand("classify-bracket", "family and normal form of (alpha,beta1,beta2,gamma1,gamma2)");
  classify->add_option("params", params, "five rationals")->expected(5);
  classify->add_option("--spec", spec_text, "comma separated tuple instead of positional values");
  common(classify);

  std::string table;
  auto* reproduce = app.add_subcommand("reproduce", "regenerate a table and diff it against the stored values");
  reproduce->add_option("table", table)->required()->check(CLI::IsMember({"table3", "table4", "prop12", "maxmodel"}));
  reproduce->add_option("--n", n, "quaternionic dimension");
  reproduce->add_option("--grid", grid_text, "metric points \"c1,c2;...\"");
  reproduce->add_option("--beta", beta_text, "beta values for H3 and H5 (prop12)");
  common(reproduce);

  auto* report = app.add_subcommand("model-report", "full dossier of one model");
  report->add_option("--spec", spec_text, "model spec, e.g. H3:beta=2:n=3:c1=1:c2=1")->required();
  report->add_option("--grid", grid_text, "metric points \"c1,c2;...\"");
  common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  qhlab::report::Result result;
  try {
    if (n < 2 || n > 5) throw std::invalid_argument("n must be in 2..5");
    if (*dims_cmd) {
      result = qhlab::report::invariant_dims(n);
    } else if (*classify) {
      std::vector<qhlab::Rational> v;
      if (!spec_text.empty()) v = qhlab::report::parse_list(spec_text);
      else
        for (const auto& s : params) v.push_back(qhlab::Rational::parse(s));
      if (v.size() != 5) throw std::invalid_argument("classify-bracket needs five values");
      result = qhlab::report::classify_bracket({v[0], v[1], v[2], v[3], v[4]});
    } else if (*reproduce) {
      if (table == "table3") {
        result = qhlab::report::reproduce_normal_forms(n, load_data("normal_forms.json"));
      } else if (table == "table4") {
        result = qhlab::report::reproduce_class_table(n, load_data("class_coefficients.json"));
      } else if (table == "prop12") {
        auto grid = grid_text.empty() ? qhlab::report::standard_grid() : qhlab::report::parse_grid(grid_text);
        json loci = load_data("riemannian_loci.json");
        if (!beta_text.empty()) {
          // replace the H3/H5 entries by the requested beta values
          json models = json::array();
          for (const auto& m : loci["models"])
            if (m.get<std::string>().find(':') == std::string::npos) models.push_back(m);
          for (const auto& b : qhlab::report::parse_list(beta_text)) {
            models.push_back("H3:" + b.str());
            models.push_back("H5:" + b.str());
          }
          loci["models"] = models;
        }
        result = qhlab::report::reproduce_riemannian(n, grid, loci);
      } else {
        result = qhlab::report::reproduce_maximal({2, 3});
      }
    } else {
      qhlab::ModelSpec spec = qhlab::parse_spec(spec_text);
      qhlab::report::Grid grid = grid_text.empty() ? qhlab::report::Grid{{spec.c1, spec.c2}}
                                                   : qhlab::report::parse_grid(grid_text);
      result = qhlab::report::model_report(spec, grid);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "qhlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qhlab: " << e.what() << "\n";
    return 1;
  }

  const std::string text = qhlab::report::render(result, format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "qhlab: cannot write " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  return result.ok ? 0 : 1;
}
