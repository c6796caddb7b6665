#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "pnal/experiment.hpp"
#include "pnal/scene_io.hpp"

using namespace pnal;
namespace fs = std::filesystem;

#ifndef PNAL_CLI_PATH
#error "PNAL_CLI_PATH must point at the command line binary"
#endif

namespace {

// Tiny benchmark so every command finishes in well under a second.
const char* kSmallConfig = R"({
  "seed": 3,
  "benchmark": {"train_scenes": 2, "test_scenes": 1, "structure_density": 8, "object_density": 30},
  "noise": {"kind": "symmetric", "tau": 0.6},
  "pnal": {"epochs_total": 6, "e_warmup": 4, "q": 4, "sample_n": 64},
  "model": {"hidden": 12}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PNAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  ExperimentConfig c = parse_config(kSmallConfig);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.benchmark.train_scenes, 2);
  EXPECT_EQ(c.pnal.epochs_total, 6);
  EXPECT_EQ(c.hidden, 12);
  EXPECT_EQ(c.method, Method::PNAL);
  const ExperimentConfig again = parse_config(dump_config(c));
  EXPECT_EQ(dump_config(again), dump_config(c));
}

TEST(Config, DefaultsFollowReferenceSchedule) {
  const ExperimentConfig c = parse_config(R"({"seed": 0})");
  EXPECT_EQ(c.pnal.epochs_total, 30);
  EXPECT_EQ(c.pnal.e_warmup, 5);
  EXPECT_EQ(c.pnal.e_clean(), 25);
  EXPECT_EQ(c.pnal.q, 4);
  EXPECT_EQ(c.pnal.gamma, 4.0);
  EXPECT_EQ(c.clustering.eps, 0.018);
  EXPECT_EQ(c.pnal.block_size, 1.0);
  EXPECT_EQ(c.pnal.stride, 0.5);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{"), Error);
  EXPECT_THROW(parse_config(R"({"seed": 1, "bogus": 2})"), Error);
  EXPECT_THROW(parse_config(R"({"seed": 1, "pnal": {"sigmaa": 0.5}})"), Error);
  EXPECT_THROW(parse_config(R"({"seed": 1, "noise": {"tau": 1.5}})"), Error);
  EXPECT_THROW(parse_config(R"({"seed": 1, "method": "adam"})"), Error);
  EXPECT_THROW(parse_config(R"({"method": "ce"})"), Error);
  EXPECT_THROW(load_config("/nonexistent/config.json"), MissingInput);
}

TEST(Config, SeedStreams) {
  ExperimentConfig c = parse_config(R"({"seed": 9})");
  EXPECT_NE(c.noise_seed(), c.train_seed());
  EXPECT_NE(c.benchmark_seed(), c.init_seed());
  c = parse_config(R"({"seed": 9, "noise": {"seed": 123}, "pnal": {"seed": 456}})");
  EXPECT_EQ(c.noise_seed(), 123u);
  EXPECT_EQ(c.train_seed(), 456u);
  EXPECT_EQ(c.trainer_options().pnal.seed, 456u);
}

TEST(Config, BaselinesSkipCleaning) {
  ExperimentConfig c = parse_config(R"({"seed": 1, "method": "ce"})");
  EXPECT_EQ(c.trainer_options().pnal.e_warmup, c.pnal.epochs_total);
}

TEST(Pipeline, GenNoiseTrainEvalReport) {
  const fs::path dir = testing_helpers::temp_dir("pipeline");
  ExperimentConfig c = parse_config(kSmallConfig);
  c.out_dir = dir / "data";
  cmd_gen_data(c);
  const auto scenes = list_scenes(c.out_dir);
  ASSERT_EQ(scenes.size(), 3u);
  const std::string first = slurp(c.out_dir / scenes[0].path);
  cmd_gen_data(c);
  EXPECT_EQ(slurp(c.out_dir / scenes[0].path), first);
  EXPECT_EQ(list_scenes(c.out_dir).size(), 3u);  // manifest entries replaced, not duplicated

  c.data_dir = c.out_dir;
  c.out_dir = dir / "noisy";
  const NoiseStats st = cmd_inject_noise(c);
  EXPECT_GT(st.instance_rate, 0.2);
  EXPECT_TRUE(fs::exists(c.out_dir / "noise_summary.jsonl"));

  c.labels_dir = c.out_dir;
  c.out_dir = dir / "pnal";
  c.snapshot_labels = true;
  const TrainingResult r = cmd_train(c);
  EXPECT_TRUE(fs::exists(c.out_dir / "model.ckpt"));
  EXPECT_EQ(read_metrics_csv(c.out_dir / "metrics.csv"), r.log);
  EXPECT_TRUE(fs::exists(c.out_dir / "snapshots" / "epoch_006" / "labels" / "train" / "scene_000.lbls"));

  const EvalReport ev = cmd_eval(c, c.out_dir / "model.ckpt", "train");
  const EpochReport& last_train = r.log[r.log.size() - 2];
  ASSERT_EQ(last_train.split, "train");
  EXPECT_NEAR(ev.metrics.oa, last_train.oa, 1e-9);
  EXPECT_NEAR(ev.metrics.miou, last_train.miou, 1e-9);

  ExperimentConfig ce = c;
  ce.method = Method::CE;
  ce.snapshot_labels = false;
  ce.out_dir = dir / "ce";
  cmd_train(ce);

  ExperimentConfig rep = c;
  rep.out_dir = dir / "report";
  const std::string table = cmd_report(
      rep, {"ce=" + (dir / "ce" / "metrics.csv").string(), "pnal=" + (dir / "pnal" / "metrics.csv").string()});
  EXPECT_NE(table.find("test_oa_delta"), std::string::npos);
  EXPECT_NE(table.find("\nce,"), std::string::npos);
  EXPECT_NE(table.find("\npnal,"), std::string::npos);
  std::ifstream curve(rep.out_dir / "curve_pnal.csv");
  std::string line;
  std::getline(curve, line);
  double prev = -1;
  while (std::getline(curve, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 6u);
    const double frac = std::stod(cells[4]);
    EXPECT_GE(frac, prev);
    prev = frac;
  }
  EXPECT_THROW(cmd_report(rep, {}), Error);
}

TEST(Pipeline, CleanLabelsWhenTauZero) {
  const fs::path dir = testing_helpers::temp_dir("tau0");
  ExperimentConfig c = parse_config(kSmallConfig);
  c.noise.tau = 0.0;
  c.out_dir = dir / "data";
  cmd_gen_data(c);
  c.data_dir = c.out_dir;
  c.out_dir = dir / "noisy";
  cmd_inject_noise(c);
  for (const auto& e : list_scenes(c.data_dir)) {
    if (e.split != "train") continue;
    const Scene s = read_scene(c.data_dir / e.path);
    EXPECT_EQ(read_labels(s, label_path(c.out_dir, e)).labels(), s.gt_labels());
  }
}

TEST(Pipeline, AsymmetricSummaryConcentratesOnPairs) {
  const fs::path dir = testing_helpers::temp_dir("asym");
  ExperimentConfig c = parse_config(R"({
    "seed": 4,
    "benchmark": {"train_scenes": 6, "test_scenes": 1, "structure_density": 5, "object_density": 20},
    "noise": {"kind": "asymmetric", "tau": 0.3, "tau_pair": 0.5, "pairs": [[3, 4]]}
  })");
  c.out_dir = dir / "data";
  cmd_gen_data(c);
  c.data_dir = c.out_dir;
  c.out_dir = dir / "noisy";
  const NoiseStats st = cmd_inject_noise(c);
  EXPECT_GT(st.confusion(3, 4), 0);
  EXPECT_GT(st.confusion(4, 3), 0);
  for (int t : {0, 1, 2, 5}) {
    EXPECT_EQ(st.confusion(3, t), 0);
    EXPECT_EQ(st.confusion(4, t), 0);
  }
}

TEST(Cli, ExitCodesAndDeterminism) {
  const fs::path dir = testing_helpers::temp_dir("cli");
  const fs::path cfg = write_config(dir, kSmallConfig);
  const std::string base = "--config " + cfg.string();
  EXPECT_EQ(run_cli("gen-data " + base + " --out " + (dir / "data").string()), 0);
  EXPECT_EQ(run_cli("inject-noise " + base + " --data " + (dir / "data").string() + " --out " + (dir / "noisy").string()), 0);
  for (const char* run : {"a", "b"}) {
    EXPECT_EQ(run_cli("train " + base + " --data " + (dir / "data").string() + " --labels " + (dir / "noisy").string() +
                      " --out " + (dir / run).string()),
              0);
  }
  EXPECT_EQ(slurp(dir / "a" / "metrics.csv"), slurp(dir / "b" / "metrics.csv"));
  EXPECT_EQ(run_cli("eval " + base + " --data " + (dir / "data").string() + " --checkpoint " +
                    (dir / "a" / "model.ckpt").string() + " --out " + (dir / "eval").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "eval" / "eval.json"));

  EXPECT_EQ(run_cli("eval " + base + " --data " + (dir / "data").string() + " --checkpoint " +
                    (dir / "missing.ckpt").string()),
            2);
  EXPECT_EQ(run_cli("train " + base + " --data " + (dir / "nowhere").string()), 2);
  EXPECT_EQ(run_cli("train --config " + (dir / "nope.json").string()), 2);
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"seed": 1, "noise": {"tau": 2}})";
  EXPECT_EQ(run_cli("gen-data --config " + bad.string()), 1);
  EXPECT_EQ(run_cli("train --seed 1 --method adam --data " + (dir / "data").string()), 1);
}
