#pragma once

// CSIDS1 dataset container.
//
// Layout (all little-endian):
//   "CSIDS1" | version u16 | N_a u32 | N_c u32 | n_freqs u32 | f64 x n_freqs
//   | n_samples u64 | snr_db f64 | master_seed u64
// then, per sample, interleaved (re, im) f32 row-major matrices in the order
//   H_UL, Y_UL, then for every DL gap: H_DL, Y_DL.
//
// A generated dataset is a directory holding one container per split
// (train.csids, val.csids, test.csids) plus dataset.json with the scenario
// and per-file CRC32s.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "csilab/channel_sim.hpp"

namespace csilab::dataset {

inline constexpr char kMagic[6] = {'C', 'S', 'I', 'D', 'S', '1'};
inline constexpr std::uint16_t kVersion = 1;

enum class Split { kTrain, kVal, kTest };

std::string split_name(Split s);
std::filesystem::path split_path(const std::filesystem::path& dir, Split s);

struct Header {
  std::uint32_t n_antennas = 0;
  std::uint32_t n_subcarriers = 0;
  std::vector<double> frequencies_hz;  // UL first
  std::uint64_t n_samples = 0;
  double snr_db = 0.0;
  std::uint64_t master_seed = 0;

  std::size_t n_dl() const { return frequencies_hz.empty() ? 0 : frequencies_hz.size() - 1; }
  std::size_t matrices_per_sample() const { return 2 * frequencies_hz.size(); }
  std::size_t matrix_bytes() const { return std::size_t{n_antennas} * n_subcarriers * 8; }
  std::size_t sample_bytes() const { return matrices_per_sample() * matrix_bytes(); }
};

/// Appends samples to a container; the header is written on construction.
class Writer {
 public:
  Writer(const std::filesystem::path& path, const Header& header);
  void write(const channel::ChannelSample& sample);
  /// Flushes and verifies that exactly header.n_samples were written.
  void close();

 private:
  std::filesystem::path path_;
  Header header_;
  std::ofstream out_;
  std::uint64_t written_ = 0;
};

/// Random-access reader over one split container.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  const Header& header() const { return header_; }
  std::size_t size() const { return header_.n_samples; }

  channel::ChannelSample read(std::size_t index);
  /// Reads a single matrix. slot 0 = H_UL, 1 = Y_UL, 2 + 2g = H_DL[g], 3 + 2g = Y_DL[g].
  CMatrix read_matrix(std::size_t index, std::size_t slot);

 private:
  std::filesystem::path path_;
  Header header_;
  std::ifstream in_;
  std::uint64_t data_offset_ = 0;
};

/// Noisy UL observations of one split. This is the only view the trainer
/// accepts, so no DL array can reach training.
class UlNoisyView {
 public:
  static UlNoisyView load(const std::filesystem::path& split_file);
  explicit UlNoisyView(std::vector<CMatrix> y) : y_(std::move(y)) {}

  std::size_t size() const { return y_.size(); }
  const CMatrix& operator[](std::size_t i) const { return y_[i]; }
  const std::vector<CMatrix>& samples() const { return y_; }

 private:
  std::vector<CMatrix> y_;
};

/// Which stored matrix an evaluation pulls for every sample of a split.
struct FrequencySelector {
  /// -1 selects UL; g >= 0 selects DL gap g.
  int dl_index = -1;
  std::string label() const;
};

struct EvalPairs {
  std::vector<CMatrix> truth;
  std::vector<CMatrix> noisy;
};

EvalPairs load_pairs(const std::filesystem::path& split_file, FrequencySelector freq);

struct SplitSizes {
  std::uint64_t train = 0;
  std::uint64_t val = 0;
  std::uint64_t test = 0;
};

Header read_header(std::istream& in, const std::string& what);

/// Writes train/val/test containers and dataset.json into dir.
/// Sample i of the whole dataset uses generate_sample(..., master_seed, i);
/// train holds indices [0, n_train), val the next n_val, test the rest.
void generate_dataset(const channel::ScenarioConfig& scenario, const SplitSizes& sizes, double snr_db,
                      std::uint64_t master_seed, const std::filesystem::path& dir);

std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace csilab::dataset
