#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "leray/cli.hpp"

using namespace leray;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "leray_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("third formula from the command line", "[cli]") {
  auto r = run({"verify", "third", "A", "--a", "0", "--f", "exp(x)"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["all_pass"] == true);
  CHECK(j["checks"][0]["params"]["formula_holds"] == "true");

  auto fails = run({"verify", "third", "A", "--a", "1", "--f", "1"});
  REQUIRE(fails.code == 0);
  CHECK(nlohmann::json::parse(fails.out)["checks"][0]["params"]["formula_holds"] == "false");
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run({"verify", "first", "--n", "3"}).code == 2);
  CHECK(run({"verify", "first", "--f", "x+"}).code == 2);
  CHECK(run({"verify", "second", "--f", "y"}).code == 2);
  CHECK(run({"verify", "first", "--f", "exp(x)+x^2", "--z", "0.3,0.1", "--tol", "1e-30"}).code == 1);
  CHECK(run({"verify", "first", "--tol", "-1"}).code == 2);
  CHECK(run({"verify", "third", "C"}).code == 2);
  CHECK(run({"verify", "first", "--z", "1,2,3"}).code == 2);
  CHECK(run({"verify", "necessary", "E", "--nodes", "3,8"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
  auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("verify") != std::string::npos);
  // f has a pole on the sphere |x| = 0.5.
  CHECK(run({"verify", "first", "--f", "1/(x-0.5)", "--eps", "0.5", "--nodes", "8"}).code == 1);
}

TEST_CASE("csv and table output", "[cli]") {
  auto csv = run({"verify", "necessary", "D", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("id,params,", 0) == 0);
  CHECK(csv.out.find("necessary_D,") != std::string::npos);
  auto table = run({"verify", "second", "--f", "exp(x)", "--z", "0.3", "--format", "table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("output file", "[cli]") {
  const auto path = std::filesystem::temp_directory_path() / "leray_cli_test_out.json";
  std::filesystem::remove(path);
  auto r = run({"suite", "--only", "third", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  auto j = nlohmann::json::parse(in);
  CHECK(j["checks"].size() == 5);
  for (const auto& c : j["checks"]) CHECK(c["id"].get<std::string>().rfind("third_", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("identities and the other verify commands", "[cli]") {
  auto ids = run({"verify", "identities", "scale", "chart_phi"});
  CHECK(ids.code == 0);
  for (const auto& c : nlohmann::json::parse(ids.out)["checks"]) {
    const auto id = c["id"].get<std::string>();
    CHECK((id.rfind("scale", 0) == 0 || id.rfind("chart_phi", 0) == 0));
  }
  CHECK(run({"verify", "identities", "nothing"}).code == 2);
  CHECK(run({"verify", "fibration", "--count", "5"}).code == 0);
  CHECK(run({"verify", "transversality"}).code == 0);
  CHECK(run({"verify", "first", "--n", "2", "--f", "x1^2*x2+3", "--z", "0.2,0,-0.1,0", "--eps", "0.5"}).code == 0);
}
