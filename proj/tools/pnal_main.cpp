// Command line front end: gen-data, inject-noise, train, eval, report.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnal/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string out;
  std::string data;
  std::string labels;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)");
  cmd->add_option("--seed", f.seed, "experiment seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory");
}

pnal::ExperimentConfig resolve(const CommonFlags& f) {
  pnal::ExperimentConfig c;
  if (!f.config.empty()) {
    c = pnal::load_config(f.config);
  } else if (!f.seed) {
    throw pnal::Error("either --config or --seed is required");
  }
  if (f.seed) c.seed = *f.seed;
  if (!f.method.empty()) c.method = pnal::parse_method(f.method);
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.data.empty()) c.data_dir = f.data;
  if (!f.labels.empty()) c.labels_dir = f.labels;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise-adaptive point cloud segmentation"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string checkpoint;
  std::string split = "test";
  std::vector<std::string> inputs;

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic benchmark");
  add_common(gen, flags);

  auto* noise = app.add_subcommand("inject-noise", "write noisy training labels");
  add_common(noise, flags);
  noise->add_option("--data", flags.data, "directory written by gen-data");

  auto* train = app.add_subcommand("train", "train a model on (noisy) labels");
  add_common(train, flags);
  train->add_option("--method", flags.method, "ce | gce | sce | pnal");
  train->add_option("--data", flags.data, "directory written by gen-data");
  train->add_option("--labels", flags.labels, "directory written by inject-noise (default: clean labels)");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, flags);
  eval->add_option("--data", flags.data, "directory written by gen-data");
  eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  eval->add_option("--split", split, "train | test")->check(CLI::IsMember({"train", "test"}));

  auto* report = app.add_subcommand("report", "summarise metrics CSVs");
  add_common(report, flags);
  report->add_option("inputs", inputs, "metrics CSVs, optionally as name=path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*report && flags.config.empty() && !flags.seed) flags.seed = 0;
    const pnal::ExperimentConfig config = resolve(flags);
    if (*gen) {
      pnal::cmd_gen_data(config);
      std::cout << "wrote benchmark to " << config.out_dir.string() << '\n';
    } else if (*noise) {
      const auto stats = pnal::cmd_inject_noise(config);
      std::cout << "instance noise rate " << stats.instance_rate << ", point noise rate " << stats.point_rate << '\n';
    } else if (*train) {
      const auto result = pnal::cmd_train(config);
      for (const auto& r : result.log) {
        if (r.epoch == config.pnal.epochs_total) {
          std::cout << r.split << " oa " << r.oa << " miou " << r.miou << '\n';
        }
      }
    } else if (*eval) {
      const auto rep = pnal::cmd_eval(config, checkpoint, split);
      std::cout << split << " oa " << rep.metrics.oa << " miou " << rep.metrics.miou << '\n';
    } else if (*report) {
      std::cout << pnal::cmd_report(config, inputs);
    }
  } catch (const pnal::MissingInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
