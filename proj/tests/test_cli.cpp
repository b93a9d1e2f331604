#include "helpers.hpp"

#include <filesystem>

#include "netkernel/cli.hpp"

using namespace netkernel;

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture_path(const std::string& name) {
  return std::string(NETKERNEL_FIXTURE_DIR) + "/" + name;
}

// scratch file that cleans up after itself
struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content = "") {
    path = fs::temp_directory_path() / ("netkernel_test_" + name);
    if (!content.empty()) {
      std::ofstream f(path);
      f << content;
    }
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
  std::string str() const { return path.string(); }
};

const std::string kReferenceSolution =
    "x 1:1:2 = 29 + -2*x2:5:3 + -8*x3:5:3\n"
    "x 1:1:3 = -25 + 2*x2:5:3 + 8*x3:5:3\n"
    "x 1:2:3 = 35 + -2*x2:5:3 + -8*x3:5:3\n"
    "x 2:2:3 = -9/2 + 1/2*x2:5:3 + 5/2*x3:5:3\n"
    "x 2:2:4 = 19/2 + -1/2*x2:5:3 + -5/2*x3:5:3\n"
    "x 2:3:4 = -19/2 + 3/2*x2:5:3 + 5/2*x3:5:3\n"
    "x 2:4:5 = 1 + 1*x2:5:3\n"
    "x 2:5:3 = 0 + 1*x2:5:3\n"
    "x 3:2:3 = 27/2 + -1/2*x2:5:3 + -5/2*x3:5:3\n"
    "x 3:2:4 = -17/2 + 1/2*x2:5:3 + 5/2*x3:5:3\n"
    "x 3:3:4 = 13/2 + -1/2*x2:5:3 + -3/2*x3:5:3\n"
    "x 3:4:5 = -1 + 1*x3:5:3\n"
    "x 3:5:3 = 0 + 1*x3:5:3\n"
    "free 2:5:3\n"
    "free 3:5:3\n";

} // namespace

TEST_CASE("solve reproduces the reference formulas verbatim") {
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic")});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.empty());
  CHECK(r.out == kReferenceSolution);
}

TEST_CASE("solve --eval appends numeric blocks") {
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic"), "--eval", "2:5:3=0", "3:5:3=0"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("eval 2:5:3=0 3:5:3=0\n") != std::string::npos);
  CHECK(r.out.find("x 1:2:3 = 35\n") != std::string::npos);
  CHECK(r.out.find("x 2:3:4 = -19/2\n") != std::string::npos);
  CHECK(r.out.find("x 2:4:5 = 1\n") != std::string::npos);

  SUBCASE("a second eval point gets its own block") {
    auto r2 = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                   "--cyclic", fixture_path("demo.cyclic"), "--eval", "2:5:3=1", "3:5:3=1",
                   "--eval", "2:5:3=2"});
    CHECK(r2.code == cli::kExitOk);
    CHECK(r2.out.find("eval 2:5:3=1 3:5:3=1\nx 1:1:2 = 19\n") != std::string::npos);
    CHECK(r2.out.find("eval 2:5:3=2\nx 1:1:2 = 25\n") != std::string::npos);
  }
}

TEST_CASE("solve -o writes the solution file") {
  TempFile out("solution.sol");
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic"), "-o", out.str()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  std::ifstream f(out.path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == kReferenceSolution);
}

TEST_CASE("solve exit codes") {
  SUBCASE("missing file is a parse failure") {
    auto r = run({"solve", "/nonexistent/file.net"});
    CHECK(r.code == cli::kExitParse);
    CHECK(r.err.find("cannot read") != std::string::npos);
  }
  SUBCASE("syntax errors are parse failures") {
    TempFile bad("bad.net", "commodity 1\nnode x\n");
    auto r = run({"solve", bad.str()});
    CHECK(r.code == cli::kExitParse);
  }
  SUBCASE("inconsistent balances exit 3") {
    auto text = nktest::fixture_text("demo.net");
    auto pos = text.find("node 1 balance 4");
    text.replace(pos, std::string("node 1 balance 4").size(), "node 1 balance 5");
    TempFile bad("inconsistent.net", text);
    auto r = run({"solve", bad.str()});
    CHECK(r.code == cli::kExitInconsistent);
    CHECK(r.err.find("commodity 1") != std::string::npos);
  }
  SUBCASE("rank deficiency exits 4") {
    auto r = run({"solve", fixture_path("deficient.net")});
    CHECK(r.code == cli::kExitRankDeficient);
  }
  SUBCASE("a singular pinned selection exits 5") {
    TempFile pin("singular.cyclic", "cyclic 1:1:3\ncyclic 1:1:4\n");
    auto r = run({"solve", fixture_path("reselect.net"), "--cyclic", pin.str()});
    CHECK(r.code == cli::kExitSingular);
    CHECK(r.err.find("singular") != std::string::npos);
  }
  SUBCASE("the reselect instance solves without the pin") {
    auto r = run({"solve", fixture_path("reselect.net")});
    CHECK(r.code == cli::kExitOk);
  }
}

TEST_CASE("verify accepts the solved demo and rejects perturbations") {
  TempFile sol("demo.sol", kReferenceSolution);
  auto ok = run({"verify", fixture_path("demo.net"), sol.str()});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("PASS") != std::string::npos);

  SUBCASE("an altered constant fails with the equation named") {
    auto broken = kReferenceSolution;
    auto pos = broken.find("x 1:2:3 = 35");
    broken.replace(pos, std::string("x 1:2:3 = 35").size(), "x 1:2:3 = 36");
    TempFile bad("demo_bad.sol", broken);
    auto r = run({"verify", fixture_path("demo.net"), bad.str()});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.out.find("FAIL") != std::string::npos);
    CHECK(r.out.find("equation") != std::string::npos);
  }
  SUBCASE("numeric solutions check residuals directly") {
    TempFile inst("zero.net",
                  "commodity 1\nnode 1\nnode 2\nnode 3\narc 1 2\narc 2 3\narc 1 3\narc 3 1\n");
    TempFile sol0("zero.sol", "x 1:1:2 = 0\nx 1:2:3 = 0\nx 1:1:3 = 0\nx 1:3:1 = 0\n");
    auto r = run({"verify", inst.str(), sol0.str()});
    CHECK(r.code == cli::kExitOk);

    TempFile sol1("one.sol", "x 1:1:2 = 1\nx 1:2:3 = 0\nx 1:1:3 = 0\nx 1:3:1 = 0\n");
    auto r1 = run({"verify", inst.str(), sol1.str()});
    CHECK(r1.code == cli::kExitFailure);
    CHECK(r1.out.find("balance 1:1") != std::string::npos);
  }
  SUBCASE("malformed solution files are parse failures") {
    TempFile bad("garbage.sol", "x 1:1:2 := 3\n");
    auto r = run({"verify", fixture_path("demo.net"), bad.str()});
    CHECK(r.code == cli::kExitParse);
  }
}

TEST_CASE("gen, solve, verify pipeline through files") {
  TempFile inst("gen.net");
  auto g = run({"gen", "--commodities", "3", "--nodes", "6", "--extra-arcs", "3", "--side", "2",
                "--coupled", "1", "--seed", "7", "-o", inst.str()});
  REQUIRE(g.code == cli::kExitOk);

  TempFile sol("gen.sol");
  auto s = run({"solve", inst.str(), "-o", sol.str()});
  REQUIRE(s.code == cli::kExitOk);

  auto v = run({"verify", inst.str(), sol.str()});
  CHECK(v.code == cli::kExitOk);

  SUBCASE("same seed produces byte-identical instances") {
    auto once = run({"gen", "--seed", "7"});
    auto twice = run({"gen", "--seed", "7"});
    CHECK(once.out == twice.out);
    CHECK_FALSE(once.out.empty());
  }
  SUBCASE("infeasible parameters fail cleanly") {
    auto r = run({"gen", "--commodities", "1", "--coupled", "2"});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.find("infeasible") != std::string::npos);
  }
}

TEST_CASE("gen-solve-verify holds across 100 seeds") {
  TempFile inst("sweep.net"), sol("sweep.sol");
  for (int seed = 1; seed <= 100; ++seed) {
    auto g = run({"gen", "--commodities", std::to_string(2 + seed % 3), "--nodes",
                  std::to_string(5 + seed % 6), "--extra-arcs", "3", "--side",
                  std::to_string(seed % 3), "--coupled", std::to_string(seed % 2), "--seed",
                  std::to_string(seed), "-o", inst.str()});
    REQUIRE_MESSAGE(g.code == cli::kExitOk, "seed " << seed << ": " << g.err);
    auto s = run({"solve", inst.str(), "-o", sol.str()});
    if (s.code == cli::kExitRankDeficient) continue; // documented outcome
    REQUIRE_MESSAGE(s.code == cli::kExitOk, "seed " << seed << ": " << s.err);
    auto v = run({"verify", inst.str(), sol.str()});
    REQUIRE_MESSAGE(v.code == cli::kExitOk, "seed " << seed << ": " << v.out);
  }
}

TEST_CASE("float solutions verify in float mode") {
  TempFile sol("float.sol");
  auto s = run({"solve", fixture_path("demo.net"), "--mode", "float", "-o", sol.str()});
  REQUIRE(s.code == cli::kExitOk);
  auto v = run({"verify", fixture_path("demo.net"), sol.str(), "--mode", "float"});
  CHECK(v.code == cli::kExitOk);
  CHECK(v.out.find("PASS") != std::string::npos);
}

TEST_CASE("dump-tables mirrors the reference tables value-for-value") {
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic"), "--dump-tables"});
  REQUIRE(r.code == cli::kExitOk);

  auto has_row = [&](const std::string& label, const std::vector<std::string>& cells) {
    auto pos = r.out.find(label);
    if (pos == std::string::npos) return false;
    auto eol = r.out.find('\n', pos);
    std::istringstream row(r.out.substr(pos + label.size(), eol - pos - label.size()));
    std::vector<std::string> got;
    std::string tok;
    while (row >> tok) got.push_back(tok);
    return got == cells;
  };

  // characteristic vectors over declaration-ordered arcs
  CHECK(has_row("# delta(2:3)", {"1", "-1", "1"}));                 // commodity 1
  CHECK(has_row("# delta(3:4)", {"1", "-1", "1", "0", "0"}));       // commodity 2
  CHECK(has_row("# delta(5:3)", {"-1", "1", "0", "1", "1"}));       // commodity 2 first
  // cycle determinants and coupling deltas over all non-tree arcs
  CHECK(has_row("# R_1", {"0", "3", "-1", "7", "10"}));
  CHECK(has_row("# R_2", {"1", "7", "-6", "5", "3"}));
  CHECK(has_row("# delta_2:4", {"0", "-1", "1", "-1", "0"}));
}

TEST_CASE("dump-cycles lists members in detour order") {
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic"), "--dump-cycles"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("# cycle 2:3:4: +2:3:4 -2:2:4 +2:2:3\n") != std::string::npos);
  CHECK(r.out.find("# cycle 3:5:3: +3:5:3 +3:3:4 +3:4:5\n") != std::string::npos);
}

TEST_CASE("dump-D prints the small system") {
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic"), "--dump-D"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("# cyclic arcs (t-order): 1:2:3 2:3:4 3:2:3\n") != std::string::npos);
  CHECK(r.out.find("# 0 3 7\n# 1 7 5\n# 0 -1 -1\n") != std::string::npos);
  CHECK(r.out.find("# beta_1 = 66 + 1*x2:5:3 + -10*x3:5:3\n") != std::string::npos);
  CHECK(r.out.find("# 1/2 1 17/2\n# -1/4 0 -7/4\n# 1/4 0 3/4\n") != std::string::npos);
}

TEST_CASE("float mode stays within tolerance of the exact solution") {
  auto r = run({"solve", fixture_path("demo.net"), "--support", fixture_path("demo.support"),
                "--cyclic", fixture_path("demo.cyclic"), "--mode", "float", "--eval", "2:5:3=0",
                "3:5:3=0"});
  REQUIRE(r.code == cli::kExitOk);

  auto value_of = [&](const std::string& arc) {
    auto block = r.out.substr(r.out.find("eval "));
    auto pos = block.find("x " + arc + " = ");
    REQUIRE(pos != std::string::npos);
    return std::stod(block.substr(pos + arc.size() + 5));
  };
  CHECK(value_of("1:2:3") == doctest::Approx(35.0).epsilon(1e-9));
  CHECK(value_of("2:3:4") == doctest::Approx(-9.5).epsilon(1e-9));
  CHECK(value_of("3:2:3") == doctest::Approx(13.5).epsilon(1e-9));
}

TEST_CASE("usage errors and help") {
  auto bad = run({"frobnicate"});
  CHECK(bad.code == cli::kExitParse);

  auto help = run({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("solve") != std::string::npos);
  CHECK(help.out.find("verify") != std::string::npos);
  CHECK(help.out.find("gen") != std::string::npos);
}
