#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path work = fs::temp_directory_path() / "crystalpr_cli_test";

int run(const std::string& args)
{
  const std::string cmd = std::string(CRYSTALPR_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string dir(const std::string& name)
{
  const auto d = work / name;
  fs::remove_all(d);
  return d.string();
}

}  // namespace

TEST(Cli, ExitCodes)
{
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("gen --N 8 --K 3 --out " + dir("noseed")), 2);
  EXPECT_EQ(run("solve --beta 2.5 --seed 1 --out " + dir("badbeta")), 2);
  EXPECT_EQ(run("transversality --N 5 --K 3 --seed 1 --out " + dir("big_k")), 2);
  EXPECT_EQ(run("stabilizers --N 200 --K 60 --out " + dir("cap")), 3);
  EXPECT_EQ(run("plot --csv /nonexistent.csv"), 2);
}

TEST(Cli, SameSeedSameBytesAcrossThreadCounts)
{
  const auto a = dir("hist1"), b = dir("hist3");
  ASSERT_EQ(run("diffset-hist --N 100 --K 5,10 --trials 300 --seed 4 --threads 1 --out " + a), 0);
  ASSERT_EQ(run("diffset-hist --N 100 --K 5,10 --trials 300 --seed 4 --threads 3 --out " + b), 0);
  for (const auto* f : {"diffset_hist.csv", "diffset_summary.csv", "manifest.json"})
    EXPECT_EQ(slurp(fs::path(a) / f), slurp(fs::path(b) / f)) << f;
}

TEST(Cli, ManifestListsOutputs)
{
  const auto d = dir("gen");
  ASSERT_EQ(run("gen --N 12 --K 3 --seed 2 --out " + d), 0);
  const json m = json::parse(slurp(fs::path(d) / "manifest.json"));
  EXPECT_EQ(m["seed"], 2);
  EXPECT_EQ(m["spec"]["command"], "gen");
  ASSERT_EQ(m["outputs"].size(), 1u);
  EXPECT_EQ(m["outputs"][0]["path"], "instance.json");
  EXPECT_EQ(m["outputs"][0]["sha256"].get<std::string>().size(), 64u);
  const json inst = json::parse(slurp(fs::path(d) / "instance.json"));
  EXPECT_EQ(inst["support"].size(), 3u);
}

TEST(Cli, ConfigFileAndFlagPrecedence)
{
  const auto cfg = work / "cfg.json";
  fs::create_directories(work);
  std::ofstream(cfg) << R"({"N": 8, "K": [3], "trials": 4, "max_iter": 2000})";
  const auto a = dir("cfg_a"), b = dir("cfg_b");
  ASSERT_EQ(run("iteration-study --seed 1 --config " + cfg.string() + " --out " + a), 0);
  ASSERT_EQ(run("iteration-study --seed 1 --config " + cfg.string() + " --trials 2 --out " + b), 0);
  auto rows = [](const std::string& d) {
    std::ifstream in(fs::path(d) / "iteration_counts.csv");
    std::string line;
    int n = 0;
    while (std::getline(in, line)) n += !line.empty() && line[0] != '#';
    return n - 1;
  };
  EXPECT_EQ(rows(a), 4);
  EXPECT_EQ(rows(b), 2);
  std::ofstream(cfg) << R"({"unknown_key": 1})";
  EXPECT_EQ(run("iteration-study --seed 1 --config " + cfg.string() + " --out " + dir("cfg_c")), 2);
}

TEST(Cli, StabilizersCsv)
{
  const auto d = dir("stab");
  ASSERT_EQ(run("stabilizers --N 8 --K 4 --out " + d), 0);
  const auto csv = slurp(fs::path(d) / "stabilizers.csv");
  EXPECT_NE(csv.find("0 1 2 5,0 1 2 3 4,5,4,"), std::string::npos);
  EXPECT_NE(csv.find("0 2 4 6,0 2 4,3,16,"), std::string::npos);
}

TEST(Cli, SolveAndPlot)
{
  const auto d = dir("solve");
  ASSERT_EQ(run("solve --N 20 --K 3 --seed 5 --max-iter 100000 --trajectory 10 --out " + d), 0);
  const json r = json::parse(slurp(fs::path(d) / "result.json"));
  EXPECT_TRUE(r["converged"].get<bool>());
  ASSERT_EQ(run("plot --csv " + (fs::path(d) / "trajectory.csv").string() + " --x iter --y error --log-y"), 0);
  EXPECT_TRUE(fs::exists(fs::path(d) / "trajectory.svg"));
  std::ofstream(work / "empty.csv") << "";
  EXPECT_EQ(run("plot --csv " + (work / "empty.csv").string()), 0);
  std::ofstream(work / "bad.csv") << "a\n1\n";
  EXPECT_EQ(run("plot --csv " + (work / "bad.csv").string()), 2);
}

TEST(Cli, VerifyCommands)
{
  EXPECT_EQ(run("transversality --N 6 --K 3 --field complex --seed 1 --out " + dir("tr")), 0);
  const json t = json::parse(slurp(work / "tr" / "transversality.json"));
  EXPECT_TRUE(t["verdict"].get<bool>());
  EXPECT_EQ(run("uniqueness-sweep --N 7 --K 3 --seed 1 --starts 20 --x-draws 1 --out " + dir("us")), 0);
  EXPECT_TRUE(fs::exists(work / "us" / "sweep.csv"));
  EXPECT_EQ(run("collisions --N 50 --K 3,12 --trials 50 --seed 1 --out " + dir("col")), 0);
  const auto csv = slurp(work / "col" / "collisions.csv");
  EXPECT_NE(csv.find("\n12,0,"), std::string::npos);  // 66 pairs > 25 classes
}
