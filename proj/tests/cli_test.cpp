#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "gtest/gtest.h"
#include "hetero/eval.hpp"
#include "hetero/generators.hpp"
#include "hetero/io.hpp"

namespace hetero {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hetero_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synth_recruiter(const std::string& name, std::size_t n, std::size_t locations) {
    Result r = run({"synth", "--n", std::to_string(n), "--locations", std::to_string(locations), "--out", path(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name + "/graph.edges");
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthRecruiterWritesReloadableFiles) {
  ASSERT_EQ(run({"synth", "--out", path("s")}).code, 0);
  for (const char* f : {"graph.edges", "communities.txt", "expected.txt", "config.toml"}) {
    EXPECT_TRUE(fs::exists(dir_ / "s" / f)) << f;
  }
  RecruiterGraph rg = generate_recruiter_graph(RecruiterParams{});
  std::ifstream edges(dir_ / "s/graph.edges");
  EXPECT_EQ(load_edge_list(edges).graph, rg.graph);
  std::ifstream comms(dir_ / "s/communities.txt");
  CommunityLabels labels = load_communities(comms);
  EXPECT_EQ(labels.count(), 20u);
  std::ifstream expected(dir_ / "s/expected.txt");
  EXPECT_EQ(load_dense(expected), rg.expected);
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(run({"synth", "--n", "150", "--seed", "4", "--out", path("a")}).code, 0);
  ASSERT_EQ(run({"synth", "--n", "150", "--seed", "4", "--out", path("b")}).code, 0);
  for (const char* f : {"graph.edges", "communities.txt", "expected.txt"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, SynthThresholdMatchesGenerator) {
  {
    std::ofstream b(dir_ / "b.txt");
    b << "1 0\n1 1\n0 1\n1 0\n";
    std::ofstream c(dir_ / "c.txt");
    c << "# heterophilous side\n0\n1\n1\n0\n";
  }
  Result r = run({"synth", "--kind", "threshold", "--b", path("b.txt"), "--c", path("c.txt"), "--t", "1", "--out",
                  path("t")});
  ASSERT_EQ(r.code, 0) << r.err;
  Graph expected = generate_threshold_graph(DenseMatrix{{1, 0}, {1, 1}, {0, 1}, {1, 0}},
                                            DenseMatrix{{0}, {1}, {1}, {0}}, 1);
  std::ifstream edges(dir_ / "t/graph.edges");
  EXPECT_EQ(load_edge_list(edges).graph, expected);
  EXPECT_TRUE(fs::exists(dir_ / "t/witness_model.txt"));
}

TEST_F(CliTest, FitSingleEdgeGraph) {
  {
    std::ofstream g(dir_ / "g.edges");
    g << "0 1\n";
  }
  Result r = run({"fit", "--input", path("g.edges"), "--k", "1", "--out", path("f")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream m(dir_ / "f/model.txt");
  EXPECT_LE(load_model(m).k(), 1u);
  for (const char* f : {"lpca.txt", "nonneg_initial.txt", "nonneg_pruned.txt", "nonneg_fitted.txt",
                        "stage_log.csv", "stage_summary.txt", "config.toml"}) {
    EXPECT_TRUE(fs::exists(dir_ / "f" / f)) << f;
  }
}

TEST_F(CliTest, FitStageLogIsMonotoneAndStage3Improves) {
  const std::string edges = synth_recruiter("s", 200, 4);
  ASSERT_EQ(run({"fit", "--input", edges, "--k", "12", "--out", path("f")}).code, 0);
  auto log = lines(slurp(dir_ / "f/stage_log.csv"));
  ASSERT_GT(log.size(), 2u);
  EXPECT_EQ(log[0], "stage,iteration,loss");
  std::map<std::string, std::vector<double>> losses;
  for (std::size_t i = 1; i < log.size(); ++i) {
    auto cells = split_csv(log[i]);
    losses[cells[0]].push_back(std::stod(cells[2]));
  }
  ASSERT_EQ(losses.size(), 2u);
  for (const auto& [stage, h] : losses) {
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]) << stage;
  }
  EXPECT_LT(losses["stage3"].back(), losses["stage3"].front());
}

TEST_F(CliTest, FitConfigEchoReproducesRun) {
  const std::string edges = synth_recruiter("s", 100, 3);
  ASSERT_EQ(run({"fit", "--input", edges, "--k", "4", "--seed", "7", "--reg", "0.3", "--out", path("f1")}).code, 0);
  std::string config = slurp(dir_ / "f1/config.toml");
  EXPECT_NE(config.find("seed=7"), std::string::npos);
  const std::string rewritten = config.substr(0, config.find("out=")) + "out=\"" + path("f2") + "\"\n";
  {
    std::ofstream f(dir_ / "again.toml");
    f << rewritten;
  }
  ASSERT_EQ(run({"--config", path("again.toml"), "fit"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "f1/model.txt"), slurp(dir_ / "f2/model.txt"));
}

TEST_F(CliTest, EvalMatchesLibraryAndSweepsTau) {
  const std::string edges = synth_recruiter("s", 120, 3);
  ASSERT_EQ(run({"fit", "--input", edges, "--k", "6", "--out", path("f")}).code, 0);

  Result plain = run({"eval", "--input", edges, "--model", path("f/model.txt"), "--out", path("e1")});
  ASSERT_EQ(plain.code, 0) << plain.err;
  auto rows = lines(slurp(dir_ / "e1/metrics.csv"));
  ASSERT_EQ(rows.size(), 2u);
  auto cells = split_csv(rows[1]);
  ASSERT_EQ(cells.size(), 12u);
  EXPECT_EQ(cells[6], "");

  std::ifstream g(edges), m(dir_ / "f/model.txt");
  ReconReport expected = recon_report(adjacency_dense(load_edge_list(g).graph), load_model(m));
  EXPECT_EQ(std::stoul(cells[5]), expected.rounded_errors);
  EXPECT_NEAR(std::stod(cells[3]), expected.frob_normalized, 1e-8 * expected.frob_normalized);

  Result swept = run({"eval", "--input", edges, "--model", path("f/model.txt"), "--labels", path("s/communities.txt"),
                      "--tau", "0.3", "0.5", "0.7", "--out", path("e2")});
  ASSERT_EQ(swept.code, 0) << swept.err;
  auto tau_rows = lines(slurp(dir_ / "e2/metrics.csv"));
  ASSERT_EQ(tau_rows.size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NE(split_csv(tau_rows[i])[6], "");
  EXPECT_TRUE(fs::exists(dir_ / "e2/community_report.txt"));
}

TEST_F(CliTest, LinkpredEmitsSeedRowsAndMean) {
  const std::string edges = synth_recruiter("s", 200, 4);
  Result r = run({"linkpred", "--input", edges, "--k", "12", "--seeds", "0", "1", "2", "--out", path("l")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(slurp(dir_ / "l/metrics.csv"));
  ASSERT_EQ(rows.size(), 5u);
  auto mean = split_csv(rows[4]);
  EXPECT_EQ(mean[2], "mean");
  EXPECT_GE(std::stod(mean[6]), std::stod(mean[9]));
  EXPECT_NE(slurp(dir_ / "l/config.toml").find("holdout-frac=0.1"), std::string::npos);
}

TEST_F(CliTest, LinkpredRecordsDegenerateSeedsAndContinues) {
  {
    std::ofstream g(dir_ / "g.edges");
    g << "0 1\n2 3\n4 5\n";
  }
  std::vector<std::string> args{"linkpred", "--input", path("g.edges"), "--k", "2", "--max-iters", "20", "--seeds"};
  std::vector<bool> has_positive;
  Graph g(6, {{0, 1}, {2, 3}, {4, 5}});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    args.push_back(std::to_string(seed));
    HoldoutSplit s = make_holdout(6, 0.1, seed);
    has_positive.push_back(std::any_of(s.held_out.begin(), s.held_out.end(),
                                       [&](const Edge& e) { return g.has_edge(e.first, e.second); }));
  }
  ASSERT_TRUE(std::count(has_positive.begin(), has_positive.end(), false) > 0);
  args.insert(args.end(), {"--out", path("l")});
  Result r = run(args);
  auto rows = lines(slurp(dir_ / "l/metrics.csv"));
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t s = 0; s < 8; ++s) {
    EXPECT_EQ(rows[s + 1].find("error:") == std::string::npos, static_cast<bool>(has_positive[s])) << rows[s + 1];
  }
  const bool any_ok = std::count(has_positive.begin(), has_positive.end(), true) > 0;
  EXPECT_EQ(r.code, any_ok ? 0 : 1);
}

TEST_F(CliTest, SweepRowsAndStableColumns) {
  const std::string edges = synth_recruiter("s", 120, 3);
  std::vector<std::string> args{"sweep", "--input", edges, "--ks", "4", "8", "12", "16", "20", "24",
                                "--max-iters", "50", "--plot", "--out"};
  auto a = args, b = args;
  a.push_back(path("w1"));
  b.push_back(path("w2"));
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const std::string csv = slurp(dir_ / "w1/sweep.csv");
  EXPECT_EQ(csv, slurp(dir_ / "w2/sweep.csv"));
  auto rows = lines(csv);
  ASSERT_EQ(rows.size(), 1u + 3 * 6);
  std::map<std::string, int> per_variant;
  for (std::size_t i = 1; i < rows.size(); ++i) ++per_variant[split_csv(rows[i])[0]];
  for (const char* v : {"full", "homophily-only", "svd"}) EXPECT_EQ(per_variant[v], 6) << v;
  EXPECT_EQ(slurp(dir_ / "w1/sweep.svg").rfind("<svg", 0), 0u);
}

TEST_F(CliTest, FullModelErrorNonIncreasingInK) {
  const std::string edges = synth_recruiter("s", 200, 5);
  Result r = run({"sweep", "--input", edges, "--ks", "4", "8", "12", "16", "20", "--variants", "full", "--seeds", "0",
                  "1", "2", "--out", path("w")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::size_t, std::vector<double>> by_k;
  auto rows = lines(slurp(dir_ / "w/sweep.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto cells = split_csv(rows[i]);
    by_k[std::stoul(cells[1])].push_back(std::stod(cells[3]));
  }
  double prev = 1e300;
  for (auto& [k, v] : by_k) {
    std::sort(v.begin(), v.end());
    EXPECT_LE(v[1], prev * 1.02) << "k=" << k;
    prev = v[1];
  }
}

TEST_F(CliTest, DefaultOutputDirectoryIsTimestamped) {
  const std::string edges = synth_recruiter("s", 50, 2);
  const fs::path cwd = fs::current_path();
  fs::current_path(dir_);
  Result r = run({"fit", "--input", edges, "--k", "2", "--max-iters", "10"});
  fs::current_path(cwd);
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<fs::path> runs;
  for (const auto& e : fs::directory_iterator(dir_ / "runs")) runs.push_back(e.path());
  ASSERT_EQ(runs.size(), 1u);
  const std::string name = runs[0].filename().string();
  EXPECT_EQ(name.rfind("fit-", 0), 0u);
  EXPECT_EQ(name.size(), std::string("fit-YYYYMMDD-HHMMSS").size());
  EXPECT_TRUE(fs::exists(runs[0] / "config.toml"));
}

TEST_F(CliTest, ErrorsAreSingleMachineParsableLines) {
  auto check = [](const Result& r, int code, const std::string& prefix) {
    EXPECT_EQ(r.code, code);
    EXPECT_EQ(r.err.rfind(prefix, 0), 0u) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
  };
  check(run({"fit", "--input", path("missing.edges")}), 1, "error: io: ");
  check(run({"fit"}), 2, "error: usage: ");
  check(run({}), 2, "error: usage: ");
  {
    std::ofstream g(dir_ / "bad.edges");
    g << "0 1\n1 x\n";
  }
  check(run({"fit", "--input", path("bad.edges")}), 1, "error: parse: ");
  {
    std::ofstream g(dir_ / "ok.edges");
    g << "0 1\n";
  }
  check(run({"fit", "--input", path("ok.edges"), "--reg", "-1"}), 1, "error: config: ");
  check(run({"fit", "--input", path("ok.edges"), "--variant", "svd"}), 1, "error: config: ");
  check(run({"eval", "--input", path("ok.edges"), "--model", path("ok.edges")}), 1, "error: parse: ");
}

TEST_F(CliTest, HelpExitsCleanly) {
  Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("linkpred"), std::string::npos);
}

}  // namespace
}  // namespace hetero
