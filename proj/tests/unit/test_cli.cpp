#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dpptest/cli.hpp"
#include "dpptest/io.hpp"

namespace fs = std::filesystem;
using dpptest::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dpptest_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("verify-lemmas passes") {
  const auto dir = scratch("verify");
  const auto r = call({"verify-lemmas", "--trials", "5", "--out", dir.string()});
  CHECK(r.code == 0);
  const auto report = dpptest::io::read_json_file(dir / "report.json");
  CHECK(report["pass"] == true);
  CHECK(fs::exists(dir / "cases.csv"));
  CHECK(slurp(dir / "cases.csv").rfind("# config=", 0) == 0);
}

TEST_CASE("sample then test accepts a DPP") {
  const auto dir = scratch("roundtrip");
  write(dir / "k.json", R"({"n": 3, "entries": [0.5, 0.1, 0.0, 0.1, 0.4, 0.0, 0.0, 0.0, 0.6]})");
  auto s = call({"sample", "--kernel", (dir / "k.json").string(), "--m", "60000", "--seed", "3",
                 "--out", dir.string()});
  REQUIRE(s.code == 0);
  auto t = call({"test", "--samples", (dir / "samples.txt").string(), "--eps", "0.5", "--zeta", "0.25",
                 "--varsigma", "1", "--diagonal-count", "1", "--out", dir.string()});
  INFO(t.err);
  REQUIRE(t.code == 0);
  CHECK(t.out == "accept\n");
  const auto v = dpptest::io::read_json_file(dir / "verdict.json");
  CHECK(v["decision"] == "accept");
  CHECK(v["m"] == 60000);
  CHECK(v["config"]["eps"] == 0.5);
}

TEST_CASE("malformed samples exit with an IO status naming the line") {
  const auto dir = scratch("malformed");
  write(dir / "bad.txt", "# n=3 m=2 seed=1\n1\n2 1\n");
  const auto r = call({"test", "--samples", (dir / "bad.txt").string(), "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("outputs do not depend on the thread count") {
  const auto one = scratch("threads1");
  const auto two = scratch("threads2");
  for (const auto& cmd : {std::string("hardness"), std::string("verify-lemmas")}) {
    REQUIRE(call({cmd, "--trials", "3", "--n", "5", "--threads", "1", "--out", one.string()}).code == 0);
    REQUIRE(call({cmd, "--trials", "3", "--n", "5", "--threads", "2", "--out", two.string()}).code == 0);
  }
  for (const char* name : {"hardness.csv", "report.json", "cases.csv"}) {
    CHECK(slurp(one / name) == slurp(two / name));
  }
}

TEST_CASE("usage and config errors") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"hardness", "--no-such-flag"}).code == 2);
  CHECK(call({"hardness", "--eps-prime", "0.9", "--trials", "1"}).code == 2);
  const auto dir = scratch("config");
  write(dir / "c.json", R"({"bogus": 1})");
  CHECK(call({"hardness", "--config", (dir / "c.json").string()}).code == 2);
  CHECK(call({"hardness", "--config", (dir / "missing.json").string()}).code == 3);
  CHECK(call({"test", "--samples", (dir / "missing.txt").string()}).code == 3);
  CHECK(call({"sample", "--out", dir.string()}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const auto r = call({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("verify-lemmas") != std::string::npos);
}
