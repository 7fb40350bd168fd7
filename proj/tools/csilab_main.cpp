// csilab generate|train|evaluate|rate --config <json> [--checkpoint <path>] [--out <dir>] [--seed <u64>]
//
// Progress goes to stderr. On failure a single line
//   csilab: error: <command>: <message>
// is printed to stderr and the exit code is 1 (2 for usage errors).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "csilab/experiments.hpp"

namespace ex = csilab::experiments;

namespace {

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised CSI denoising and feedback simulator"};
  app.require_subcommand(1, 1);

  std::string config_path, checkpoint, out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  for (const char* name : {"generate", "train", "evaluate", "rate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--checkpoint", checkpoint, "model checkpoint (train: resume/write, evaluate/rate: read)");
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "master seed (overrides master_seed)");
    sub->add_flag("--quiet,-q", quiet, "suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "csilab: error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    ex::ExperimentConfig cfg = ex::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.master_seed = *seed;
    cfg.validate();

    ex::Logger log;
    if (!quiet) log = [](const std::string& msg) { std::cerr << msg << std::endl; };
    std::optional<std::filesystem::path> ckpt;
    if (!checkpoint.empty()) ckpt = checkpoint;

    if (cmd == "generate") {
      ex::cmd_generate(cfg, log);
    } else if (cmd == "train") {
      ex::cmd_train(cfg, ckpt, log);
    } else if (cmd == "evaluate") {
      ex::cmd_evaluate(cfg, ckpt, log);
    } else {
      ex::cmd_rate(cfg, ckpt, log);
    }
  } catch (const std::exception& e) {
    std::cerr << "csilab: error: " << cmd << ": " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
