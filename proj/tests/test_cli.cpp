#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fkde/cli.hpp"

using namespace fkde;
using namespace fkde::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("fkde_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int rc = main_entry(args, o, e);
  if (out) *out = o.str() + e.str();
  return rc;
}

} // namespace

TEST_CASE("parse plan command", "[cli]") {
  const auto cfg = parse_config({"plan", "--alpha", "1", "--a", "0.9", "--b", "0.5"});
  CHECK(cfg.command == Command::plan);
  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.a == 0.9);
  CHECK(cfg.b == 0.5);
  CHECK(cfg.seed == kDefaultSeed);
  CHECK(cfg.out == "plan.json");
}

TEST_CASE("parse clt grid in scientific notation", "[cli]") {
  const auto cfg = parse_config({"clt", "--n-grid", "1e4,1e5,1e6", "--replicates",
                                 "500", "--x", "0.5", "--seed", "42"});
  CHECK(cfg.command == Command::clt);
  CHECK(cfg.n_grid == std::vector<std::size_t>{10000, 100000, 1000000});
  CHECK(cfg.replicates == 500);
  CHECK(cfg.seed == 42);
}

TEST_CASE("usage errors name the offending field", "[cli]") {
  try {
    parse_config({"estimate", "--frontier", "constant:1"});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("--n") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config({"bogus"}), UsageError);
  CHECK_THROWS_AS(parse_config({"plan", "--no-such-flag", "1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"plan", "--kernel", "gaussian"}), UsageError);
  CHECK_THROWS_AS(parse_config({"plan", "--frontier", "cosine:1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"plan", "--frontier", "cosine:0.2,0.3"}), UsageError);
  CHECK_THROWS_AS(parse_config({"clt", "--n-grid", "1e5,1e4"}), UsageError);
  CHECK_THROWS_AS(parse_config({"clt", "--n-grid", "1.5"}), UsageError);
  CHECK_THROWS_AS(parse_config({"sandwich", "--n", "100", "--gamma", "1.5"}), UsageError);
  CHECK_THROWS_AS(parse_config({"plan", "--format", "xml"}), UsageError);
  CHECK_THROWS_AS(parse_config({}), UsageError);
  CHECK(run({"estimate"}) == 2);
}

TEST_CASE("frontier and kernel specs", "[cli]") {
  CHECK(parse_frontier("cosine:1.0,0.3")(0.0) == Catch::Approx(1.3));
  CHECK(parse_frontier("affine:0.5,1")(1.0) == 1.5);
  CHECK(parse_frontier("piecewise-linear:1,2,1")(0.5) == 2.0);
  CHECK(parse_kernel("triangular").family() == KernelFamily::triangular);
}

TEST_CASE("config file supplies defaults, flags override", "[cli]") {
  TempDir tmp;
  const auto cfg_path = tmp.file("run.ini");
  {
    std::ofstream os(cfg_path);
    os << "frontier = \"cosine:1.0,0.3\"\n"
       << "n = 2000\n"
       << "gamma = 0.1\n"
       << "seed = 9\n";
  }
  const auto cfg = parse_config({"sandwich", "--config", cfg_path, "--seed", "11"});
  CHECK(cfg.frontier_spec == "cosine:1.0,0.3");
  CHECK(cfg.n == std::optional<std::size_t>(2000));
  CHECK(cfg.gamma == 0.1);
  CHECK(cfg.seed == 11);
  CHECK_THROWS_AS(parse_config({"plan", "--config", tmp.file("missing.ini")}), UsageError);
}

TEST_CASE("sample writes a CSV inside D", "[cli]") {
  TempDir tmp;
  const auto out = tmp.file("pts.csv");
  std::string msg;
  REQUIRE(run({"sample", "--frontier", "constant:1.0", "--n", "1000", "--seed", "7",
               "--format", "csv", "--out", out},
              &msg) == 0);
  CHECK(msg.find(out) != std::string::npos);
  std::ifstream is(out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y");
  int rows = 0;
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    const double y = std::strtod(line.c_str() + comma + 1, nullptr);
    REQUIRE(y <= 1.0);
    REQUIRE(y >= 0.0);
    ++rows;
  }
  CHECK(rows == 1000);
}

TEST_CASE("sandwich JSON reports zero ordering violations", "[cli]") {
  TempDir tmp;
  const auto out = tmp.file("sw.json");
  REQUIRE(run({"sandwich", "--n", "5000", "--gamma", "0.05", "--replicates", "30",
               "--out", out}) == 0);
  const auto j = Json::parse(slurp(out));
  CHECK(j["command"] == "sandwich");
  CHECK(j["report"]["ordering_violations"] == 0);
  CHECK(j["report"]["lemma2_bound"].get<double>() > 0.0);
}

TEST_CASE("plan JSON carries the checks", "[cli]") {
  TempDir tmp;
  const auto out = tmp.file("plan.json");
  REQUIRE(run({"plan", "--alpha", "1", "--a", "0.9", "--b", "0.5", "--out", out}) == 0);
  const auto j = Json::parse(slurp(out));
  CHECK(j["plan"]["valid"] == true);
  REQUIRE(run({"plan", "--a", "0.8", "--b", "0.3", "--out", out}) == 0);
  CHECK(Json::parse(slurp(out))["plan"]["valid"] == false);
}

TEST_CASE("every command is byte-for-byte reproducible", "[cli][determinism]") {
  TempDir tmp;
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--frontier", "cosine:1,0.3", "--n", "500", "--format", "csv"},
      {"sample", "--process", "poisson", "--n", "500"},
      {"estimate", "--n", "4000", "--grid", "9", "--format", "csv"},
      {"estimate", "--n", "4000", "--k", "200", "--h", "0.1"},
      {"clt", "--n-grid", "2000,4000", "--replicates", "8", "--format", "csv"},
      {"clt", "--n-grid", "2000", "--replicates", "5", "--threads", "2"},
      {"sandwich", "--n", "3000", "--replicates", "10"},
      {"gap-rate", "--n-grid", "1000,3000", "--replicates", "5"},
      {"weight-sum", "--n-grid", "1e3,1e4", "--format", "csv"},
      {"plan"}};
  int idx = 0;
  for (auto args : commands) {
    const auto a = tmp.file("a" + std::to_string(idx));
    const auto b = tmp.file("b" + std::to_string(idx));
    auto args_a = args, args_b = args;
    args_a.insert(args_a.end(), {"--out", a});
    args_b.insert(args_b.end(), {"--out", b});
    INFO(args.front());
    REQUIRE(run(args_a) == 0);
    REQUIRE(run(args_b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
    ++idx;
  }
}

TEST_CASE("clt CSV writes the per-replicate and summary tables", "[cli]") {
  TempDir tmp;
  const auto out = tmp.file("clt.csv");
  REQUIRE(run({"clt", "--n-grid", "2000,4000", "--replicates", "6", "--format", "csv",
               "--out", out}) == 0);
  std::istringstream errors(slurp(out));
  std::string line;
  int rows = -1;
  while (std::getline(errors, line)) ++rows;
  CHECK(rows == 12);
  const auto summary = slurp(tmp.file("clt_summary.csv"));
  CHECK(summary.rfind("n,k,h,scale,replicates,mean,sd,ks_distance,sigma_theory\n", 0) == 0);
}

TEST_CASE("JSON reports write null with a reason for missing statistics", "[cli]") {
  TempDir tmp;
  const auto out = tmp.file("c.json");
  REQUIRE(run({"clt", "--n-grid", "2000", "--replicates", "1", "--out", out}) == 0);
  const auto j = Json::parse(slurp(out));
  CHECK(j["report"]["per_n"][0]["sd"].is_null());
  CHECK(j["report"]["per_n"][0]["sd_reason"].is_string());
}

TEST_CASE("exit codes", "[cli]") {
  TempDir tmp;
  // runtime failure: unwritable path
  std::string msg;
  CHECK(run({"plan", "--out", tmp.file("no/such/dir/plan.json")}, &msg) == 1);
  CHECK(msg.find("no/such/dir") != std::string::npos);
  // invalid parameters discovered at run time
  CHECK(run({"estimate", "--n", "100", "--k", "100", "--out", tmp.file("e.json")}) == 2);
  CHECK(run({"clt", "--a", "0.5", "--out", tmp.file("c.json")}) == 2);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("17-digit formatting round-trips", "[cli][csv][property]") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 20000; ++i) {
    const double v = i % 2 ? u(gen) : std::ldexp(u(gen), static_cast<int>(i % 600) - 300);
    REQUIRE(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(csv_field("cosine:1,0.3") == "\"cosine:1,0.3\"");
  CHECK(csv_field("a\"b") == "\"a\"\"b\"");
  CHECK(csv_field("plain") == "plain");
}
