#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csilab/dataset.hpp"
#include "csilab/nn/network.hpp"

namespace csilab::nn {

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  int max_epochs = 500;
  /// Stop after this many epochs without validation improvement (0 disables).
  int patience = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

/// Records which data a model has been fitted on.
struct Provenance {
  std::vector<std::string> splits_used;  // e.g. "ul_train", "ul_val"
  bool ul_only() const;
};

/// Encoder f_theta and decoder g_phi with optimizer state.
class Autoencoder {
 public:
  Autoencoder(ModelSpec encoder_spec, ModelSpec decoder_spec);
  /// Standard pair from build_encoder / build_decoder.
  static Autoencoder build(int n_antennas, int n_subcarriers, int codeword_dim,
                           const std::vector<int>& filters = kDefaultFilters);

  Network<float>& encoder() { return encoder_; }
  Network<float>& decoder() { return decoder_; }
  const Network<float>& encoder() const { return encoder_; }
  const Network<float>& decoder() const { return decoder_; }
  const ModelSpec& encoder_spec() const { return encoder_.spec(); }
  const ModelSpec& decoder_spec() const { return decoder_.spec(); }

  void init(std::uint64_t seed);

  /// Weights, running statistics and Adam moments in a fixed order.
  std::vector<ParamRef<float>> all_arrays();
  /// Weights and running statistics; the optimizer state is left alone, so
  /// restoring the best epoch keeps Adam moments consistent with the step.
  std::vector<Mat<float>> snapshot();
  void restore(const std::vector<Mat<float>>& snap);

  /// Adam moments, one per trainable parameter (encoder first).
  std::vector<Mat<float>>& adam_m() { return adam_m_; }
  std::vector<Mat<float>>& adam_v() { return adam_v_; }

  std::int64_t step = 0;
  int epochs_done = 0;
  Provenance provenance;

 private:
  std::vector<ParamRef<float>> trainable();
  Network<float> encoder_;
  Network<float> decoder_;
  std::vector<Mat<float>> adam_m_, adam_v_;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double wall_time_s = 0.0;
};

struct TrainReport {
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  bool diverged = false;
  std::string diagnostic;
};

/// Mean per-sample squared Frobenius reconstruction error in inference mode.
double evaluate_loss(const Autoencoder& model, const dataset::UlNoisyView& data, int chunk = 256);

/// Minimizes the reconstruction loss of the noisy UL samples with Adam.
/// Row 0 of the log holds the losses before the first update. On return the
/// model holds the best-validation weights. A non-finite loss stops training,
/// restores the last best weights and sets diverged. on_epoch, when set, sees
/// every log row as it is produced.
TrainReport train(Autoencoder& model, const dataset::UlNoisyView& train_data, const dataset::UlNoisyView& val_data,
                  const TrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch = {});

void write_training_log(const std::vector<EpochLog>& log, const std::filesystem::path& path);

/// Checkpoint container:
///   "CSICKPT1" | u64 header length | JSON header
///   | per array: u16 name length, name, u32 rows, u32 cols, rows*cols f32 (column-major)
/// All integers and floats are little-endian. The JSON header holds both
/// model specs, the step counter, the provenance and the array index.
void save_checkpoint(Autoencoder& model, const std::filesystem::path& path, const nlohmann::json& extra = {});

/// Loads a checkpoint, rebuilding the networks from the stored specs.
Autoencoder load_checkpoint(const std::filesystem::path& path);

/// Loads a checkpoint and fails unless its specs equal the expected ones.
Autoencoder load_checkpoint(const std::filesystem::path& path, const ModelSpec& expected_encoder,
                            const ModelSpec& expected_decoder);

nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

}  // namespace csilab::nn
