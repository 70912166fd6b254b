#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using scalefree::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const char* env = std::getenv("SCALEFREE_TEST_TMP");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "scalefree_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// First data row after the header row.
std::string first_data_row(const std::string& text) {
  bool header_seen = false;
  for (const auto& line : lines_of(text)) {
    if (line.empty() || line[0] == '#') continue;
    if (header_seen) return line;
    header_seen = true;
  }
  return {};
}

}  // namespace

TEST_CASE("recursion example") {
  const auto r = invoke({"recursion", "--mode", "zero", "--eta0", "0.5", "--levels", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# subcommand=recursion\n", 0) == 0);
  CHECK(r.out.find("\neta0,tau_minus,tau_plus,t_minus,normalization,parity_violation\n") !=
        std::string::npos);
  // 17 significant digits: mpmath gives 0.5000076295109483482
  CHECK(first_data_row(r.out).rfind("0.5,0.50000762951094835,", 0) == 0);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"recursion", "--probe", "general"}).code == scalefree::cli::kExitParameter);
  CHECK(invoke({"tails", "density", "--eps", "1.5"}).code == scalefree::cli::kExitParameter);
  CHECK(invoke({"logistic", "--nmax", "25"}).code == scalefree::cli::kExitParameter);
  CHECK(invoke({"cascade", "--depth", "abc"}).code == scalefree::cli::kExitParameter);
  CHECK(invoke({"nosuchcommand"}).code == scalefree::cli::kExitParameter);
  CHECK(invoke({"cascade", "--bogus", "1"}).code == scalefree::cli::kExitParameter);

  const auto stencil =
      invoke({"recursion", "--probe", "residual", "--t", "0.00001", "--step", "0.0001"});
  CHECK(stencil.code == scalefree::cli::kExitNumerical);
  CHECK_FALSE(stencil.err.empty());
  CHECK(stencil.out.empty());

  CHECK(invoke({"cascade", "--depth", "3"}).code == scalefree::cli::kExitOk);
  CHECK(invoke({"--help"}).code == scalefree::cli::kExitOk);
}

TEST_CASE("cascade artifact") {
  const auto r = invoke({"cascade", "--depth", "3"});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  CHECK(r.out.find("\n1,1,0.5,") != std::string::npos);
  CHECK(r.out.find("\n3,0.66666666666666663,0.59999999999999998,") != std::string::npos);
  CHECK(lines.back().rfind("# final_abs_error=", 0) == 0);
}

TEST_CASE("output directory and config round trip") {
  const fs::path dir = scratch_dir();
  setenv("SCALEFREE_OUT_DIR", dir.c_str(), 1);
  const fs::path first = dir / "cli_cascade.csv";
  fs::remove(first);
  REQUIRE(invoke({"cascade", "--depth", "12", "--x0", "0.4", "--out", "cli_cascade.csv"}).code ==
          0);
  REQUIRE(fs::exists(first));

  const fs::path second = dir / "cli_cascade_again.csv";
  REQUIRE(invoke({"cascade", "--config", first.string(), "--out", second.string()}).code == 0);
  CHECK(slurp(first) == slurp(second));

  // A flag given on the command line overrides the config value.
  const auto override = invoke({"cascade", "--config", first.string(), "--depth", "5"});
  REQUIRE(override.code == 0);
  CHECK(override.out.find("# depth=5\n") != std::string::npos);
  CHECK(override.out.find("# x0=0.40000000000000002\n") != std::string::npos);
  unsetenv("SCALEFREE_OUT_DIR");
}

TEST_CASE("plain key=value config") {
  const fs::path cfg = scratch_dir() / "plain.cfg";
  {
    std::ofstream f(cfg);
    f << "mode=zero\neta0=0.5\nlevels=3\n";
  }
  const auto r = invoke({"recursion", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(first_data_row(r.out).rfind("0.5,0.50000762951094835,", 0) == 0);

  const auto pairs = scalefree::cli::read_config(cfg.string());
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].first == "mode");
  CHECK(pairs[0].second == "zero");

  CHECK(invoke({"recursion", "--config", (scratch_dir() / "missing.cfg").string()}).code ==
        scalefree::cli::kExitParameter);
}

TEST_CASE("seeded commands are deterministic") {
  const std::vector<std::string> noise{"noise", "gen", "--seed", "42", "--n", "256"};
  CHECK(invoke(noise).out == invoke(noise).out);
  const std::vector<std::string> tails{"tails", "sample", "--n", "500", "--seed", "7"};
  const auto a = invoke(tails);
  REQUIRE(a.code == 0);
  CHECK(a.out == invoke(tails).out);
  CHECK(a.out != invoke({"tails", "sample", "--n", "500", "--seed", "8"}).out);
}

TEST_CASE("validate subcommand") {
  const auto r = invoke({"validate", "--only", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\n4,") != std::string::npos);
  CHECK(r.out.find(",true,") != std::string::npos);
  CHECK(invoke({"validate", "--only", "99"}).code == scalefree::cli::kExitParameter);
}
