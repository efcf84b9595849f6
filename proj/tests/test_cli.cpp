#include "cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;
using plhom::cli::run;

namespace {

struct Capture {
  int code = 0;
  std::string out;
};

// Runs the CLI in-process with stdout redirected to a file.
Capture run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"plhom"};
  for (const auto& a : args) argv.push_back(a.c_str());

  const fs::path tmp = fs::temp_directory_path() / "plhom_cli_stdout.txt";
  std::cout.flush();
  std::fflush(stdout);
  const int saved = ::dup(1);
  REQUIRE(saved >= 0);
  FILE* f = std::fopen(tmp.string().c_str(), "w");
  REQUIRE(f != nullptr);
  ::dup2(::fileno(f), 1);
  Capture cap;
  cap.code = run(static_cast<int>(argv.size()), argv.data());
  std::cout.flush();
  std::fflush(stdout);
  ::dup2(saved, 1);
  ::close(saved);
  std::fclose(f);
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  cap.out = ss.str();
  return cap;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strips the runtime_ms column (wall clock, exempt from byte identity).
std::string strip_runtime(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.rfind(',');
    if (pos != std::string::npos && line.rfind("#", 0) != 0)
      line = line.substr(0, pos);
    os << line << '\n';
  }
  return os.str();
}

double value_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli({"no-such-command"}).code == 2);
  CHECK(run_cli({"solve", "--frobnicate"}).code == 2);
  CHECK(run_cli({"solve", "--weight", "no-such-weight"}).code == 2);
  CHECK(run_cli({"solve", "--weight", "piecewise,1"}).code == 2);
  CHECK(run_cli({"solve", "--mode", "sideways"}).code == 2);
  CHECK(run_cli({"figure", "--id", "9"}).code == 2);
  CHECK(run_cli({}).code == 2);
}

TEST_CASE("solver-domain failures exit with 2 on validation, 1 on solver trouble") {
  // eps below the supported range is a validation error
  CHECK(run_cli({"solve", "--eps", "1e-6"}).code == 2);
}

TEST_CASE("solve prints values near the homogenized limit") {
  const auto cap = run_cli({"solve", "--p", "2", "--weight", "two-plus-sin", "--eps",
                            "0.03125", "--k", "1"});
  CHECK(cap.code == 0);
  const double lam = value_after(cap.out, "lambda ");
  const double sq = value_after(cap.out, "sqrt_lambda ");
  CHECK(std::abs(sq - 2.2214) < 0.02);
  CHECK(std::abs(lam - sq * sq) < 1e-9);
}

TEST_CASE("trig table at p = 2 is the standard sine") {
  const auto cap = run_cli({"trig", "--p", "2", "--points", "5"});
  CHECK(cap.code == 0);
  CHECK(std::abs(value_after(cap.out, "pi_p ") - 3.14159265358979) < 1e-12);
  std::istringstream is(cap.out);
  std::string line;
  std::getline(is, line);  // pi_p
  std::getline(is, line);  // header
  CHECK(line == "x,sin_p,cos_p");
  const double expect_sin[5] = {0.0, 1.0, 0.0, -1.0, 0.0};
  for (int i = 0; i < 5; ++i) {
    REQUIRE(std::getline(is, line));
    double x, s, c;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &s, &c) == 3);
    CHECK(std::abs(s - expect_sin[i]) < 1e-9);
  }
}

TEST_CASE("bounds subcommand reproduces the rate constant") {
  const auto cap = run_cli({"bounds", "--p", "2", "--weight", "two-plus-sin", "--eps",
                            "0.1", "--k", "1", "--theorem", "teo1d"});
  CHECK(cap.code == 0);
  CHECK(std::abs(value_after(cap.out, "constant ") - 1.1027) < 1e-3);
}

TEST_CASE("transform subcommand") {
  const auto cap = run_cli({"transform", "--p", "2", "--coefficient", "piecewise,1,4",
                            "--weight", "constant,1", "--eps", "0.125"});
  CHECK(cap.code == 0);
  CHECK(std::abs(value_after(cap.out, "L ") - 0.625) < 1e-9);
  CHECK(std::abs(value_after(cap.out, "a_star ") - 1.6) < 1e-9);
  CHECK(std::abs(value_after(cap.out, "delta ") - 0.125) < 1e-12);
}

TEST_CASE("config round trip reproduces the sweep byte for byte") {
  const fs::path dir = fs::temp_directory_path() / "plhom_cli_roundtrip";
  fs::create_directories(dir);
  const fs::path out1 = dir / "a.csv", out2 = dir / "b.csv", cfg = dir / "cfg.json";

  auto cap1 = run_cli({"sweep-eps", "--p", "2", "--weight", "two-plus-sin", "--eps-list",
                       "0.25,0.125", "--k-list", "1,2", "--out", out1.string(),
                       "--dump-config", cfg.string()});
  CHECK(cap1.code == 0);
  REQUIRE(fs::exists(cfg));

  // re-ingest the dumped config, overriding only the output path
  auto cap2 = run_cli({"sweep-eps", "--config", cfg.string(), "--out", out2.string()});
  CHECK(cap2.code == 0);

  const std::string a = slurp(out1), b = slurp(out2);
  REQUIRE(!a.empty());
  // identical except for the wall-clock runtime column and the echoed output
  // path inside the provenance comment
  auto normalize = [&](std::string s, const std::string& path) {
    const auto pos = s.find(path);
    if (pos != std::string::npos) s.erase(pos, path.size());
    return strip_runtime(s);
  };
  CHECK(normalize(a, out1.string()) == normalize(b, out2.string()));
  fs::remove_all(dir);
}

TEST_CASE("figure subcommand writes only the requested file") {
  const fs::path dir = fs::temp_directory_path() / "plhom_cli_figure";
  fs::create_directories(dir);
  const fs::path out = dir / "fig1.csv";
  std::set<fs::path> before;
  for (const auto& e : fs::directory_iterator(dir)) before.insert(e.path());

  const auto cap = run_cli({"figure", "--id", "1", "--resolution", "12", "--out",
                            out.string()});
  CHECK(cap.code == 0);
  std::set<fs::path> after;
  for (const auto& e : fs::directory_iterator(dir)) after.insert(e.path());
  CHECK(after.size() == before.size() + 1);
  CHECK(after.count(out) == 1);
  const std::string text = slurp(out);
  CHECK(text.find("eps,sqrt_lambda") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("config json round trips through the struct") {
  plhom::cli::RunConfig cfg;
  cfg.subcommand = "sweep-eps";
  cfg.p = 3.0;
  cfg.eps_list = {0.25, 0.125};
  cfg.k_list = {1, 2, 3};
  cfg.weight = "piecewise,1,4";
  const auto text = plhom::cli::to_json(cfg);
  const auto back = plhom::cli::from_json(text);
  CHECK(back.subcommand == cfg.subcommand);
  CHECK(back.p == cfg.p);
  CHECK(back.eps_list == cfg.eps_list);
  CHECK(back.k_list == cfg.k_list);
  CHECK(back.weight == cfg.weight);
  CHECK_THROWS_AS(plhom::cli::from_json("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(plhom::cli::from_json("{\"p\": \"high\"}"), std::invalid_argument);
}
