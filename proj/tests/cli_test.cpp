#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include <sys/wait.h>

#include "fishseg/cli.hpp"
#include "test_support.hpp"

using namespace fishseg;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FISHSEG_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string usage_message(const std::vector<std::string>& args) {
  try {
    parse_cli(args);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "<no error>";
}

void write_inputs(const fs::path& dir, int count) {
  fs::create_directories(dir);
  std::mt19937_64 rng(3);
  for (int i = 0; i < count; ++i) {
    RasterImage img(64, 48, Rgb{30, 90, 140});
    for (int y = 16; y < 32; ++y) {
      for (int x = 20; x < 44; ++x) img(x, y) = Rgb{210, 150, std::uint8_t(50 + 10 * i)};
    }
    write_pnm(dir / ("f" + std::to_string(i) + ".ppm"), img);
  }
}

}  // namespace

TEST(ParseCli, RunDefaults) {
  const CliOptions o = parse_cli({"run", "in", "out", "--k", "8", "--seed", "0"});
  EXPECT_EQ(o.command, Command::run);
  EXPECT_EQ(o.input, "in");
  EXPECT_EQ(o.output, "out");
  PipelineConfig expected;
  expected.output_dir = "out";
  EXPECT_EQ(to_json(o.config), to_json(expected));
  EXPECT_EQ(o.config.output_dir, fs::path("out"));
}

TEST(ParseCli, AllFlags) {
  const CliOptions o = parse_cli(
      {"run", "a", "b", "--k", "4", "--seed", "9", "--restarts", "2", "--resize", "64x32",
       "--clahe-alpha", "40", "--clahe-tiles", "4x2", "--clahe-smax", "3", "--threshold", "fixed:90",
       "--strel", "box:3x3", "--thicken", "2", "--canny-sigma", "1.5", "--canny-low", "10",
       "--canny-high", "30", "--ssim-pair", "gray:enhanced", "--emit-histograms", "--jobs", "2"});
  const PipelineConfig& c = o.config;
  EXPECT_EQ(c.k, 4);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.restarts, 2);
  EXPECT_EQ(c.resize_w, 64);
  EXPECT_EQ(c.resize_h, 32);
  EXPECT_EQ(c.clahe.alpha, 40.0);
  EXPECT_EQ(c.clahe.tiles_x, 4);
  EXPECT_EQ(c.clahe.tiles_y, 2);
  EXPECT_EQ(c.clahe.s_max, 3.0);
  EXPECT_EQ(c.threshold, Threshold::fixed(90));
  EXPECT_EQ(c.strel, "box:3x3");
  EXPECT_EQ(c.thicken_passes, 2);
  EXPECT_EQ(c.canny.sigma, 1.5);
  EXPECT_EQ(c.canny.low, 10.0);
  EXPECT_EQ(c.canny.high, 30.0);
  EXPECT_EQ(c.ssim_pair, SsimPair::gray_vs_enhanced);
  EXPECT_TRUE(c.emit_histograms);
  EXPECT_EQ(c.jobs, 2);
}

TEST(ParseCli, StrictStrelFlag) {
  EXPECT_EQ(parse_cli({"run", "a", "b", "--strict-paper-strel"}).config.strel, "line:1:45");
}

TEST(ParseCli, SweepRange) {
  const CliOptions o = parse_cli({"sweep-k", "in", "out", "--k-range", "2..9"});
  EXPECT_EQ(o.command, Command::sweep_k);
  EXPECT_EQ(o.k_lo, 2);
  EXPECT_EQ(o.k_hi, 9);
  EXPECT_NE(usage_message({"sweep-k", "in", "out", "--k-range", "9..2"}).find("9..2"), std::string::npos);
}

TEST(ParseCli, StageCommand) {
  const CliOptions o = parse_cli({"stage", "clahe", "in.pgm", "out.pgm"});
  EXPECT_EQ(o.command, Command::stage);
  EXPECT_EQ(o.stage, "clahe");
  EXPECT_THROW(parse_cli({"stage", "sharpen", "in.pgm", "out.pgm"}), UsageError);
}

TEST(ParseCli, UsageErrorsNameTheToken) {
  EXPECT_THROW(parse_cli({"run", "a", "b", "--k", "0"}), UsageError);
  EXPECT_NE(usage_message({"run", "a", "b", "--bogus"}).find("--bogus"), std::string::npos);
  EXPECT_NE(usage_message({"run", "a", "b", "--resize", "50by50"}).find("50by50"), std::string::npos);
  EXPECT_NE(usage_message({"run", "a", "b", "--threshold", "mean"}).find("mean"), std::string::npos);
  EXPECT_NE(usage_message({"run", "a", "b", "--ssim-pair", "x:y"}).find("x:y"), std::string::npos);
  EXPECT_THROW(parse_cli({"run", "a"}), UsageError);
  EXPECT_THROW(parse_cli({}), UsageError);
  EXPECT_THROW(parse_cli({"run", "a", "b", "--strel", "disk:3"}), UsageError);
}

TEST(ParseCli, Help) {
  const CliOptions o = parse_cli({"--help"});
  EXPECT_NE(o.help.find("sweep-k"), std::string::npos);
}

TEST(CliProcess, ExitCodes) {
  support::TempDir tmp("cli");
  write_inputs(tmp.path() / "in", 2);
  const std::string in = (tmp.path() / "in").string();
  const std::string out = (tmp.path() / "out").string();
  EXPECT_EQ(run_cli("run " + in + " " + out + " --restarts 1"), 0);
  EXPECT_TRUE(fs::exists(tmp.path() / "out" / "report.json"));
  EXPECT_EQ(run_cli("run " + in + " " + out + " --k 0"), 2);
  EXPECT_EQ(run_cli("run " + (tmp.path() / "missing").string() + " " + out), 2);

  write_text(tmp.path() / "in" / "bad.ppm", "P6 4 4 255\n");
  EXPECT_EQ(run_cli("run " + in + " " + out + " --restarts 1"), 1);
  EXPECT_TRUE(fs::exists(tmp.path() / "out" / "f0" / "edges.pnm"));
}

TEST(CliProcess, SweepEmitsOneRowPerK) {
  support::TempDir tmp("cli_sweep");
  write_inputs(tmp.path() / "in", 1);
  const std::string out = (tmp.path() / "out").string();
  EXPECT_EQ(run_cli("sweep-k " + (tmp.path() / "in").string() + " " + out + " --k-range 2..9 --restarts 1"), 0);
  const std::string csv = support::slurp(tmp.path() / "out" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  for (int k = 2; k <= 9; ++k) EXPECT_TRUE(fs::exists(tmp.path() / "out" / ("k" + std::to_string(k)) / "report.json"));
}

TEST(CliProcess, StageWritesFile) {
  support::TempDir tmp("cli_stage");
  write_inputs(tmp.path() / "in", 1);
  const fs::path src = tmp.path() / "in" / "f0.ppm";
  EXPECT_EQ(run_cli("stage canny " + src.string() + " " + (tmp.path() / "e.pgm").string()), 0);
  const auto edges = std::get<GrayImage>(read_pnm(tmp.path() / "e.pgm"));
  EXPECT_EQ(edges.width(), 64);
  EXPECT_EQ(run_cli("stage histogram " + src.string() + " " + (tmp.path() / "h.csv").string()), 0);
  EXPECT_TRUE(support::slurp(tmp.path() / "h.csv").starts_with("level,count,normalized\n"));
}
