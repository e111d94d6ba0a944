#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int rc;
  std::string out, err;
};

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("malle_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const auto err = scratch() / "stderr.txt";
  std::string cmd = std::string(MALLE_CLI_PATH) + " " + args + " 2>" + err.string();
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return {-1, "", ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = ::pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out, slurp(err)};
}

std::vector<std::string> epi_discs(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::vector<std::string> d;
  std::getline(in, line);
  while (std::getline(in, line)) {
    auto a = line.find(','), b = line.find(',', a + 1);
    if (line.substr(a + 1, b - a - 1) == "epi") d.push_back(line.substr(0, a));
  }
  return d;
}

}  // namespace

TEST(Cli, GroupInfo) {
  auto r = run("group info Q8");
  ASSERT_EQ(r.rc, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["group"]["order"], 8);
  EXPECT_EQ(j["group"]["involutions"], 1);
  EXPECT_EQ(j["catalog_hash"], "a286423584f66cde");
  auto l = run("group list");
  EXPECT_NE(l.out.find("Heis27"), std::string::npos);
}

TEST(Cli, ExactMatchesOracle) {
  for (const auto& [g, X] : std::vector<std::pair<std::string, std::string>>{{"C2", "1e5"}, {"V4", "1e5"}, {"C4", "1e5"}, {"C2xC4", "1e7"}}) {
    auto a = scratch() / (g + "_exact.csv"), b = scratch() / (g + "_oracle.csv");
    ASSERT_EQ(run("count --group " + g + " --mode exact --X " + X + " --two-unramified --emit-discs " + a.string()).rc, 0);
    ASSERT_EQ(run("oracle --group " + g + " --X " + X + " --two-unramified --emit-discs " + b.string()).rc, 0);
    auto da = epi_discs(a), db = epi_discs(b);
    EXPECT_FALSE(da.empty()) << g;
    EXPECT_EQ(da, db) << g;
  }
}

TEST(Cli, DeterministicCsv) {
  auto a = scratch() / "d1.csv", b = scratch() / "d2.csv";
  ASSERT_EQ(run("count --group D4 --mode exact --X 1e6 --emit-discs " + a.string()).rc, 0);
  ASSERT_EQ(run("count --group D4 --mode exact --X 1e6 --threads 2 --emit-discs " + b.string()).rc, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_GT(slurp(a).size(), 20u);
}

TEST(Cli, ShardAdditivity) {
  auto full = json::parse(run("count --group C4 --mode exact --X 1e5").out);
  long long lower = 0;
  for (int s = 0; s < 4; ++s) {
    auto r = run("count --group C4 --mode exact --X 1e5 --shards 4 --shard " + std::to_string(s));
    ASSERT_EQ(r.rc, 0) << r.err;
    lower += std::stoll(json::parse(r.out)["report"]["lower"].get<std::string>());
  }
  EXPECT_EQ(std::to_string(lower), full["report"]["lower"].get<std::string>());
}

TEST(Cli, BadCatalogNamesTriple) {
  auto path = scratch() / "bad.json";
  std::ofstream(path) << R"({"groups": [{"name": "B", "l": 2, "r": 2, "cocycles": [[0], [0, 1, 1, 1]]}]})";
  auto r = run("--catalog " + path.string() + " group info B");
  EXPECT_EQ(r.rc, 2);
  auto e = json::parse(r.err);
  EXPECT_EQ(e["error"], "CocycleViolation");
  EXPECT_NE(e["detail"].get<std::string>().find("triple"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  auto r = run("count --group C4 --mode bogus --X 10");
  EXPECT_EQ(r.rc, 2);
  EXPECT_EQ(json::parse(r.err)["error"], "UsageError");
  EXPECT_EQ(run("count --group Nope --mode upper --X 10").rc, 2);
}

TEST(Cli, Analytic) {
  auto r = run("analytic az --z 1 --x 1000");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(r.out.rfind("x,value,prediction,ratio", 0), 0u);
  auto f = run("analytic filter --l 3 --k 2 --a 1,2 --n 6");
  EXPECT_EQ(f.rc, 0) << f.err;
}

TEST(Cli, Selftest) {
  auto r = run("selftest");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["ok"].get<bool>());
}

TEST(Cli, ShippedCatalogFile) {
  auto a = run("--catalog " + std::string(MALLE_SOURCE_DIR) + "/catalog/groups.json group info D4");
  auto b = run("group info D4");
  ASSERT_EQ(a.rc, 0) << a.err;
  EXPECT_EQ(json::parse(a.out)["group"], json::parse(b.out)["group"]);
}
