#pragma once

// Command-line front end. Exit codes: 0 all checks pass, 1 some check failed
// (or a computation raised), 2 usage or parse error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "leray/casebook.hpp"

namespace leray {

namespace detail {

inline std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw InputError(flag + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(flag + ": empty value");
  return out;
}

inline std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_reals(text, "--nodes")) {
    if (v != static_cast<int>(v) || v < 4) throw InputError("--nodes: sizes must be integers >= 4");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline cplx parse_complex(const std::string& text, const std::string& flag) {
  auto v = parse_reals(text, flag);
  if (v.size() > 2) throw InputError(flag + ": expected re[,im]");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical verification of the Leray kernel integral formulas and their worked examples", "leray_cli"};
  app.require_subcommand(1);

  // Shared option storage.
  int n = 1;
  std::string f_text = "1", z_text, a_text = "0", radii_text, nodes_text, format = "json", out_path, exclude_text,
              only_text;
  double eps = 0.5;
  std::optional<double> tol;
  std::uint64_t seed = RunConfig{}.seed;
  int workers = 1, count = 50;
  std::string case_id;
  std::vector<std::string> identity_names;

  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--out", out_path, "write the report to this file instead of stdout");
    cmd->add_option("--seed", seed, "seed for sampled checks");
    cmd->add_option("--workers", workers, "threads for grid evaluation")->check(CLI::PositiveNumber);
  };
  auto add_tol_nodes = [&](CLI::App* cmd) {
    cmd->add_option("--tol", tol, "absolute tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--nodes", nodes_text, "quadrature sizes, comma separated");
  };

  CLI::App* verify = app.add_subcommand("verify", "run one family of checks");
  verify->require_subcommand(1);

  CLI::App* first = verify->add_subcommand("first", "first formula over the sphere cycle M");
  first->add_option("--n", n, "dimension (1 or 2)");
  first->add_option("--f", f_text, "holomorphic test function");
  first->add_option("--z", z_text, "base point re,im[,re,im]");
  first->add_option("--eps", eps, "sphere radius");
  add_tol_nodes(first);
  add_output(first);

  CLI::App* second = verify->add_subcommand("second", "second formula, n = 1");
  second->add_option("--f", f_text, "holomorphic test function of x");
  second->add_option("--z", z_text, "base point re,im");
  second->add_option("--eps", eps, "residue circle radius");
  add_tol_nodes(second);
  add_output(second);

  CLI::App* third = verify->add_subcommand("third", "third formula for Example A or B");
  third->add_option("case", case_id, "A or B")->required()->check(CLI::IsMember({"A", "B"}));
  third->add_option("--a", a_text, "Example A parameter re[,im]");
  third->add_option("--f", f_text, "holomorphic test function of x");
  add_tol_nodes(third);
  add_output(third);

  CLI::App* necessary = verify->add_subcommand("necessary", "obstruction integral for Example D or E");
  necessary->add_option("case", case_id, "D or E")->required()->check(CLI::IsMember({"D", "E"}));
  necessary->add_option("--eps", eps, "torus radius for D");
  necessary->add_option("--radii", radii_text, "r1,r2 for E");
  add_tol_nodes(necessary);
  add_output(necessary);

  CLI::App* identities = verify->add_subcommand("identities", "kernel and example identities");
  identities->add_option("ids", identity_names, "subset of identity groups")
      ->check(CLI::IsMember(identity_ids()));
  add_output(identities);

  CLI::App* fibration = verify->add_subcommand("fibration", "fibration checks for Example C");
  fibration->add_option("--count", count, "sampled base points")->check(CLI::PositiveNumber);
  add_output(fibration);

  CLI::App* transversality = verify->add_subcommand("transversality", "general-position spot checks");
  add_output(transversality);

  CLI::App* suite = app.add_subcommand("suite", "run every acceptance check");
  suite->add_option("--exclude", exclude_text, "comma-separated groups or check-id prefixes to skip");
  suite->add_option("--only", only_text, "comma-separated groups or check-id prefixes to keep");
  add_output(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<CheckReport> reports;
  try {
    auto nodes = [&](std::vector<int> fallback) { return nodes_text.empty() ? fallback : detail::parse_sizes(nodes_text); };
    if (first->parsed()) {
      if (n != 1 && n != 2) throw InputError("--n: only n = 1 and n = 2 are supported");
      std::vector<cplx> z(n, 0.0);
      if (!z_text.empty()) {
        auto v = detail::parse_reals(z_text, "--z");
        if (static_cast<int>(v.size()) != 2 * n) throw InputError("--z: expected " + std::to_string(2 * n) + " numbers");
        for (int k = 0; k < n; ++k) z[k] = {v[2 * k], v[2 * k + 1]};
      }
      auto f = parse_expr(f_text, n);
      auto q = nodes(default_first_quadrature(n).nodes);
      reports.push_back(timed([&] {
        return first_formula(n, f, AffinePoint(z), eps, QuadratureSpec{q}, tol.value_or(n == 1 ? 1e-10 : 1e-6),
                             workers);
      }));
    } else if (second->parsed()) {
      cplx z = z_text.empty() ? cplx{} : detail::parse_complex(z_text, "--z");
      auto f = parse_expr(f_text, 1);
      auto q = nodes({64});
      if (q.size() != 1) throw InputError("--nodes: the second formula takes one size");
      reports.push_back(timed([&] { return second_formula_n1(f, z, eps, q[0], tol.value_or(1e-10)); }));
    } else if (third->parsed()) {
      auto f = parse_expr(f_text, 1);
      cplx a = detail::parse_complex(a_text, "--a");
      auto q = nodes({16});
      if (q.size() != 1) throw InputError("--nodes: the third formula takes one size");
      reports.push_back(timed([&] { return third_formula_case(case_id[0], a, f, q[0], tol.value_or(1e-10)); }));
    } else if (necessary->parsed()) {
      std::vector<double> radii{eps};
      if (case_id == "E") radii = radii_text.empty() ? std::vector<double>{0.5, 0.5} : detail::parse_reals(radii_text, "--radii");
      auto q = nodes({128, 128});
      reports.push_back(timed(
          [&] { return necessary_condition_case(case_id[0], radii, QuadratureSpec{q}, tol.value_or(1e-8), workers); }));
    } else if (identities->parsed()) {
      reports = identity_suite(identity_names, seed);
    } else if (fibration->parsed()) {
      reports.push_back(timed([&] { return fibration_check_c2(seed, count); }));
    } else if (transversality->parsed()) {
      reports = transversality_suite(seed);
    } else if (suite->parsed()) {
      RunConfig cfg;
      cfg.seed = seed;
      cfg.workers = workers;
      cfg.exclude = detail::split_list(exclude_text);
      cfg.only = detail::split_list(only_text);
      cfg.format = format;
      cfg.out_path = out_path;
      reports = full_report(cfg);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << "\n";
    return 1;
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << out_path << "' for writing\n";
      return 2;
    }
  }
  std::ostream& sink = out_path.empty() ? out : file;
  if (format == "json") write_json(sink, reports, seed);
  else if (format == "csv") write_csv(sink, reports);
  else write_table(sink, reports);

  for (const auto& r : reports)
    if (!r.pass) err << "check failed: " << r.id << " (abs_error " << r.abs_error << ", tol " << r.tol << ")\n";
  return all_pass(reports) ? 0 : 1;
}

}  // namespace leray
