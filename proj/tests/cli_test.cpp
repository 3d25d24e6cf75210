#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "expgap/commands.hpp"
#include "expgap/curves.hpp"
#include "expgap/log_io.hpp"
#include "test_util.hpp"

namespace expgap {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string command = std::string(EXPGAP_CLI) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string config_text(const std::string& env, int size, double slip, int episodes, int eval_every,
                        const std::string& seeds) {
  std::ostringstream c;
  c << "# test run\n[env]\nname = " << env << "\nsize = " << size << "\nstochastic_slip = " << slip
    << "\n\n[agent]\nkind = q_learning\nepsilon_decay_fraction = 0.2\n\n[run]\nn_episodes = " << episodes
    << "\neval_every = " << eval_every << "\nseeds = " << seeds << "\n";
  return c.str();
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Run, OneSeedTenEpisodes) {
  TempDir dir("expgap_cli");
  spit(dir / "c.cfg", config_text("deep_sea", 6, 0.0, 10, 5, "3"));
  const Result r = cli("run --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const fs::path log = dir / "out" / "deep_sea_q_learning_seed3.jsonl";
  const fs::path csv = dir / "out" / "deep_sea_q_learning_seed3.csv";
  ASSERT_TRUE(fs::exists(log));
  ASSERT_TRUE(fs::exists(csv));
  EXPECT_TRUE(fs::exists(dir / "out" / "run.cfg"));
  EXPECT_EQ(count_lines(slurp(log)), 12u);  // 10 training + greedy evals after 5 and 10

  std::ifstream in(csv);
  std::string digest_line, header;
  std::getline(in, digest_line);
  std::getline(in, header);
  EXPECT_EQ(digest_line.rfind("# config_digest=", 0), 0u);
  EXPECT_EQ(header, "global_step,seed,v_learned,v_learned_greedy,v_best_single,v_top5_ever,v_top5_recent,"
                    "v_initial,gap_ever,gap_recent");
  std::ifstream again(csv);
  const auto rows = read_curve_csv(again);
  EXPECT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].global_step, 30u);
  EXPECT_EQ(rows[1].global_step, 60u);
}

TEST(Run, IdenticalConfigIdenticalBytes) {
  TempDir dir("expgap_cli");
  spit(dir / "c.cfg", config_text("key_corridor", 5, 0.0, 200, 20, "0, 1, 2"));
  ASSERT_EQ(cli("run --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "a").string()).code, 0);
  ASSERT_EQ(cli("run --jobs 3 --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "b").string()).code, 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const std::string name = entry.path().filename().string();
    if (name == "run.cfg") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / name)) << name;
    ++compared;
  }
  EXPECT_EQ(compared, 6u);
}

TEST(Analyze, ReproducesRunCurveByteExactly) {
  TempDir dir("expgap_cli");
  spit(dir / "c.cfg", config_text("deep_sea", 8, 0.0, 500, 25, "4, 5"));
  ASSERT_EQ(cli("run --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "o").string()).code, 0);
  for (int seed : {4, 5}) {
    const std::string stem = (dir / "o" / ("deep_sea_q_learning_seed" + std::to_string(seed))).string();
    const Result r = cli("analyze --config " + (dir / "o" / "run.cfg").string() + " --log " + stem + ".jsonl");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(stem + ".csv"));
  }
}

TEST(Analyze, EmptyLogIsAnError) {
  TempDir dir("expgap_cli");
  spit(dir / "empty.jsonl", "");
  EXPECT_EQ(cli("analyze --log " + (dir / "empty.jsonl").string()).code, 2);
  EXPECT_EQ(cli("analyze --log " + (dir / "missing.jsonl").string()).code, 2);
}

TEST(Analyze, ExternalFixture) {
  const fs::path data(EXPGAP_TEST_DATA);
  const Result r = cli("analyze --eval-every 1000000 --log " + (data / "external_trainer.jsonl.gz").string());
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  const auto rows = read_curve_csv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seed, 7);
  EXPECT_NEAR(rows[0].v_best_single, 5.739287, 1e-12);
  EXPECT_NEAR(rows[0].v_top5_ever, 2.637264527160001, 1e-12);
}

TEST(Aggregate, ReportAndBreakdown) {
  TempDir dir("expgap_cli");
  spit(dir / "a.cfg", config_text("deep_sea", 6, 0.0, 200, 50, "0, 1"));
  spit(dir / "b.cfg", config_text("dense_grid", 4, 0.0, 200, 50, "0, 1"));
  ASSERT_EQ(cli("run --config " + (dir / "a.cfg").string() + " --output-dir " + (dir / "a").string()).code, 0);
  ASSERT_EQ(cli("run --config " + (dir / "b.cfg").string() + " --output-dir " + (dir / "b").string()).code, 0);
  const std::string a = (dir / "a" / "deep_sea_q_learning_seed").string();
  const std::string b = (dir / "b" / "dense_grid_q_learning_seed").string();
  const std::string args = "aggregate --task deep_sea=" + a + "0.csv," + a + "1.csv --task dense_grid=" + b +
                           "0.csv," + b + "1.csv --label q --out " + (dir / "breakdown.csv").string() +
                           " --report " + (dir / "report.csv").string();
  ASSERT_EQ(cli(args).code, 0);
  std::ifstream report_in(dir / "report.csv");
  const auto reports = read_report_csv(report_in);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].label, "q");
  EXPECT_LE(reports[0].report.ci_low, reports[0].report.point_estimate);
  EXPECT_LE(reports[0].report.point_estimate, reports[0].report.ci_high);
  EXPECT_EQ(count_lines(slurp(dir / "breakdown.csv")), 5u);
  ASSERT_EQ(cli(args + "x").code, 0);
  EXPECT_EQ(slurp(dir / "report.csv"), slurp(dir / "report.csvx"));
}

TEST(Aggregate, AllInvalidFails) {
  TempDir dir("expgap_cli");
  spit(dir / "flat.csv", "# config_digest=none\n"
                         "global_step,seed,v_learned,v_learned_greedy,v_best_single,v_top5_ever,v_top5_recent,"
                         "v_initial,gap_ever,gap_recent\n10,0,0,0,1,1,1,1,1,1\n");
  EXPECT_EQ(cli("aggregate --task t=" + (dir / "flat.csv").string()).code, 2);
}

TEST(Replay, BestEpisodePasses) {
  TempDir dir("expgap_cli");
  spit(dir / "c.cfg", config_text("mini_invaders", 4, 0.0, 200, 50, "9"));
  ASSERT_EQ(cli("run --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "o").string()).code, 0);
  const std::string log = (dir / "o" / "mini_invaders_q_learning_seed9.jsonl").string();
  const Result r = cli("replay --log " + log + " --config " + (dir / "c.cfg").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("PASS episode=", 0), 0u) << r.out;
  const Result by_id = cli("replay --log " + log + " --episode 17 --env mini_invaders --size 4");
  EXPECT_EQ(by_id.code, 0);
  EXPECT_EQ(by_id.out.rfind("PASS episode=17 ", 0), 0u) << by_id.out;
}

TEST(Replay, CorruptedActionFailsWithStep) {
  TempDir dir("expgap_cli");
  spit(dir / "c.cfg", config_text("deep_sea", 8, 0.0, 100, 50, "2"));
  ASSERT_EQ(cli("run --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "o").string()).code, 0);
  auto episodes = read_log(dir / "o" / "deep_sea_q_learning_seed2.jsonl");
  EpisodeRecord& e = episodes[40];
  e.actions[5] = 1 - e.actions[5];
  write_log_file(episodes, dir / "corrupt.jsonl");
  const Result r = cli("replay --log " + (dir / "corrupt.jsonl").string() + " --episode 40 --env deep_sea --size 8");
  EXPECT_EQ(r.code, 1);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(r.out, m, std::regex(R"(^FAIL episode=40 step=(\d+) DeterminismViolation)")))
      << r.out;
  EXPECT_GE(std::stoi(m[1]), 5);
}

TEST(Replay, StickyRunPrintsSummaryOnly) {
  TempDir dir("expgap_cli");
  spit(dir / "c.cfg", config_text("key_corridor", 5, 0.2, 200, 50, "1"));
  ASSERT_EQ(cli("run --config " + (dir / "c.cfg").string() + " --output-dir " + (dir / "o").string()).code, 0);
  const Result r = cli("replay --log " + (dir / "o" / "key_corridor_q_learning_seed1.jsonl").string() +
                       " --config " + (dir / "c.cfg").string() + " --replays 50");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("SUMMARY episode=", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("replays=50"), std::string::npos);
  EXPECT_EQ(r.out.find("PASS"), std::string::npos);
}

TEST(Plot, GoldenCurveSvg) {
  TempDir dir("expgap_cli");
  const fs::path data(EXPGAP_TEST_DATA);
  ASSERT_EQ(cli("plot --curve " + (data / "golden_curve.csv").string() + " --title 'golden fixture' --out " +
                (dir / "g.svg").string())
                .code,
            0);
  EXPECT_EQ(slurp(dir / "g.svg"), slurp(data / "golden_curve.svg"));
}

TEST(Plot, SingleRowGivesSixPoints) {
  TempDir dir("expgap_cli");
  spit(dir / "one.csv", "# config_digest=none\n"
                        "global_step,seed,v_learned,v_learned_greedy,v_best_single,v_top5_ever,v_top5_recent,"
                        "v_initial,gap_ever,gap_recent\n50,0,0.1,0.2,0.9,0.6,0.5,0,0.5,0.4\n");
  ASSERT_EQ(cli("plot --curve " + (dir / "one.csv").string() + " --out " + (dir / "one.svg").string()).code, 0);
  const std::string svg = slurp(dir / "one.svg");
  EXPECT_EQ(count_of(svg, "<circle"), 6u);
  for (const char* name : {"learned", "learned-greedy", "best-single", "top5-ever", "top5-recent", "initial"}) {
    EXPECT_NE(svg.find(std::string("id=\"series-") + name + "\""), std::string::npos) << name;
    EXPECT_NE(svg.find(std::string(">") + name + "</text>"), std::string::npos) << name;
  }
}

TEST(Plot, AggregateBarsWithWhiskers) {
  TempDir dir("expgap_cli");
  spit(dir / "r.csv", "label,variant,point_estimate,ci_low,ci_high,n_tasks,n_seeds,invalid_tasks\n"
                      "dqn,ever,0.6,0.5,0.7,3,4,\nppo,recent,0.3,0.2,0.45,3,4,flat\n");
  ASSERT_EQ(cli("plot --report " + (dir / "r.csv").string() + " --out " + (dir / "r.svg").string()).code, 0);
  const std::string svg = slurp(dir / "r.svg");
  EXPECT_EQ(count_of(svg, "class=\"bar\""), 2u);
  EXPECT_EQ(count_of(svg, "class=\"whisker\""), 2u);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
}

TEST(Plot, EmptyInputFails) {
  TempDir dir("expgap_cli");
  spit(dir / "none.csv", "# config_digest=none\n"
                         "global_step,seed,v_learned,v_learned_greedy,v_best_single,v_top5_ever,v_top5_recent,"
                         "v_initial,gap_ever,gap_recent\n");
  EXPECT_EQ(cli("plot --curve " + (dir / "none.csv").string() + " --out " + (dir / "x.svg").string()).code, 2);
  EXPECT_FALSE(fs::exists(dir / "x.svg"));
}

TEST(Help, EverySubcommand) {
  for (const char* sub : {"run", "analyze", "aggregate", "replay", "plot"}) {
    const Result r = cli(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  EXPECT_NE(cli("").code, 0);
  EXPECT_NE(cli("frobnicate").code, 0);
}

}  // namespace
}  // namespace expgap
