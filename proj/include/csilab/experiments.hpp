#pragma once

// Orchestration behind the csilab CLI: generate -> train -> evaluate -> rate.
//
// Output tree under output_dir, one subdirectory per SNR tag ("snr_10",
// "snr_m5" for -5 dB):
//   data/<tag>/     train.csids val.csids test.csids dataset.json
//   models/<tag>/   checkpoint.ckpt training_log.csv
//   eval/<tag>/     summary.csv samples/*.csv cdf/*.csv *.svg
//   rate/<tag>/     rate_curves.csv curves/*.csv rate.svg

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csilab/channel_sim.hpp"
#include "csilab/dataset.hpp"
#include "csilab/metrics.hpp"
#include "csilab/nn/autoencoder.hpp"

namespace csilab::experiments {

struct ExperimentConfig {
  channel::ScenarioConfig scenario = channel::ScenarioConfig::desk();
  dataset::SplitSizes splits{4000, 500, 500};
  std::vector<double> snr_db{10.0, 0.0};
  std::uint64_t master_seed = 1;

  int codeword_dim = 32;
  std::vector<int> filters{8, 16, 32, 64, 128};
  nn::TrainConfig train;

  /// 0 stands for the unquantized codeword.
  std::vector<int> quantizer_bits{0, 8, 7};
  /// Subset of {"AE", "IDFT", "noisy"}; "noisy" reports the unprocessed input.
  std::vector<std::string> methods{"AE", "IDFT"};
  /// Delay taps kept by the IDFT baseline; 0 matches the AE feedback budget.
  int idft_taps = 0;
  /// DL gaps to evaluate (subset of scenario.dl_gaps_hz); empty means all.
  std::vector<double> eval_dl_gaps_hz;

  /// SNR whose dataset and checkpoint feed the rate sweep.
  double rate_snr_db = 10.0;
  metrics::RateConfig rate;

  std::filesystem::path output_dir = "out";

  /// Throws csilab::Error naming the offending field.
  void validate() const;

  bool uses(const std::string& method) const;
  /// Budget-matched default: d_z real numbers = 2 * N_a * k.
  int resolved_idft_taps() const;
  std::vector<int> evaluated_dl_indices() const;

  static ExperimentConfig desk();
  static ExperimentConfig paper();
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string snr_tag(double snr_db);
/// "UL" or "DL+120MHz".
std::string frequency_label(const channel::ScenarioConfig& s, int dl_index);

std::filesystem::path data_dir(const ExperimentConfig& c, double snr_db);
std::filesystem::path model_dir(const ExperimentConfig& c, double snr_db);
std::filesystem::path default_checkpoint(const ExperimentConfig& c, double snr_db);
std::filesystem::path eval_dir(const ExperimentConfig& c, double snr_db);
std::filesystem::path rate_dir(const ExperimentConfig& c, double snr_db);

using Logger = std::function<void(const std::string&)>;

struct GenerateResult {
  double snr_db = 0.0;
  std::filesystem::path dir;
  bool regenerated = false;
};

/// True when dir holds a manifest for exactly this scenario, split sizes,
/// SNR and seed, and every split file matches its recorded CRC32.
bool dataset_up_to_date(const ExperimentConfig& c, double snr_db);

std::vector<GenerateResult> cmd_generate(const ExperimentConfig& c, const Logger& log = {});

struct TrainResult {
  double snr_db = 0.0;
  std::filesystem::path checkpoint;
  nn::TrainReport report;
};

/// Trains one model per SNR on the noisy UL train split. With a checkpoint
/// path, training covers only the SNR recorded in (or, for a new file,
/// uniquely implied by) it; an existing file is resumed and overwritten.
std::vector<TrainResult> cmd_train(const ExperimentConfig& c, const std::optional<std::filesystem::path>& checkpoint,
                                   const Logger& log = {});

struct EvaluateResult {
  double snr_db = 0.0;
  int idft_taps = 0;
  std::vector<metrics::MetricReport> reports;

  const metrics::MetricReport& find(const std::string& method, const std::string& frequency) const;
};

std::vector<EvaluateResult> cmd_evaluate(const ExperimentConfig& c,
                                         const std::optional<std::filesystem::path>& checkpoint,
                                         const Logger& log = {});

struct RateResult {
  double snr_db = 0.0;
  std::vector<metrics::RateCurve> curves;

  const metrics::RateCurve& find(const std::string& method, const std::string& frequency) const;
};

RateResult cmd_rate(const ExperimentConfig& c, const std::optional<std::filesystem::path>& checkpoint,
                    const Logger& log = {});

/// AE method label for a quantizer setting: "AE" or "AE-8bit".
std::string ae_label(int bits);

}  // namespace csilab::experiments
