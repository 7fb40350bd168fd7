#pragma once

// Synthetic geometric multipath generator for FDD massive-MIMO CSI.
//
// One PathSet (gains, delays, departure angles) describes a user location.
// Every carrier frequency of that user (UL and each DL gap) is synthesized
// from the same PathSet, so UL and DL channels follow one propagation
// scenario while differing entrywise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csilab/common.hpp"

namespace csilab::channel {

struct ScenarioConfig {
  int n_antennas_h = 8;
  int n_antennas_v = 8;
  int n_subcarriers = 160;
  double bandwidth_hz = 8e6;
  double f_ul_hz = 2.5e9;
  std::vector<double> dl_gaps_hz{120e6, 480e6};
  int n_paths = 58;
  double cell_radius_m = 150.0;
  double min_distance_m = 10.0;
  double bs_height_m = 10.0;
  double ue_height_m = 1.5;
  double downtilt_deg = 6.0;
  double antenna_spacing_wavelengths = 0.5;
  /// Number of leading delay taps (of 1/bandwidth each) that hold the
  /// channel energy. 0 selects the default n_subcarriers / 8.
  int taps_active = 0;
  /// Decay constant of the exponential power-delay profile in taps.
  /// 0 selects taps_active / 4.
  double delay_decay_taps = 0.0;
  /// Standard deviation of per-path azimuth/elevation scatter around the
  /// line-of-sight direction.
  double azimuth_spread_deg = 10.0;
  double elevation_spread_deg = 3.0;
  /// Paths are grouped into this many clusters (path l joins cluster
  /// l mod n_clusters). Cluster delays and angles follow the profiles above;
  /// paths scatter around their cluster by the intra-cluster spreads.
  /// 0 makes every path its own cluster.
  int n_clusters = 6;
  double intra_cluster_delay_taps = 0.1;
  double intra_cluster_angle_deg = 2.0;

  int n_antennas() const { return n_antennas_h * n_antennas_v; }
  int active_taps() const { return taps_active > 0 ? taps_active : std::max(1, n_subcarriers / 8); }
  double decay_taps() const { return delay_decay_taps > 0.0 ? delay_decay_taps : active_taps() / 4.0; }
  double max_delay_s() const { return active_taps() / bandwidth_hz; }
  double subcarrier_spacing_hz() const { return bandwidth_hz / n_subcarriers; }
  /// Center frequencies in storage order: UL first, then one per DL gap.
  std::vector<double> center_frequencies() const;

  /// Throws csilab::Error naming the violated constraint.
  void validate() const;

  /// 8x8 UPA, 160 subcarriers, L = 58.
  static ScenarioConfig paper();
  /// 4x4 UPA, 32 subcarriers.
  static ScenarioConfig desk();
};

void to_json(nlohmann::json& j, const ScenarioConfig& s);
void from_json(const nlohmann::json& j, ScenarioConfig& s);

struct Path {
  std::complex<double> gain;
  double delay_s = 0.0;
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;
};

using PathSet = std::vector<Path>;

struct ChannelSample {
  CMatrix h_ul;
  CMatrix y_ul;
  std::vector<CMatrix> h_dl;  // one per DL gap
  std::vector<CMatrix> y_dl;
  std::uint64_t seed = 0;
};

PathSet sample_path_set(std::mt19937_64& rng, const ScenarioConfig& scenario);

/// Phase-only UPA response, element (p, q) flattened row-major (p * V + q).
CVectorD upa_steering_vector(double azimuth_rad, double elevation_rad, const ScenarioConfig& scenario,
                             double f_hz);

/// H[a, c] = sum_l g_l s_l(f_c)[a] exp(-j 2 pi f_c tau_l), f_c on a centered grid.
CMatrixD synthesize_channel(const PathSet& paths, const ScenarioConfig& scenario, double f_center_hz);

/// Scales h to squared Frobenius norm N_a * N_c. Throws on a zero matrix.
CMatrixD normalize_path_gain(const CMatrixD& h);

/// Adds circularly-symmetric complex Gaussian noise of variance sigma2 per entry.
CMatrixD add_noise(const CMatrixD& h, double sigma2, std::mt19937_64& rng);

inline double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

/// Generates one sample deterministically from (scenario, snr, master seed, global index).
/// Channels and noise come from separate seed streams, so the true channels do
/// not depend on snr_db.
ChannelSample generate_sample(const ScenarioConfig& scenario, double snr_db, std::uint64_t master_seed,
                              std::uint64_t index);

}  // namespace csilab::channel
