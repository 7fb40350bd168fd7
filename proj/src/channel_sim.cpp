#include "csilab/channel_sim.hpp"

#include <sstream>

namespace csilab::channel {

namespace {

constexpr double kDeg = kPi / 180.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("invalid scenario: " + what);
}

}  // namespace

std::vector<double> ScenarioConfig::center_frequencies() const {
  std::vector<double> f{f_ul_hz};
  for (double gap : dl_gaps_hz) f.push_back(f_ul_hz + gap);
  return f;
}

void ScenarioConfig::validate() const {
  require(n_antennas_h > 0 && n_antennas_v > 0, "n_antennas_h * n_antennas_v must be > 0");
  require(n_subcarriers > 0, "n_subcarriers must be > 0");
  require(n_paths >= 1, "n_paths must be >= 1");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(f_ul_hz > bandwidth_hz / 2, "f_ul_hz must exceed half the bandwidth");
  for (double gap : dl_gaps_hz) require(gap > 0.0, "every dl_gap must be > 0");
  require(cell_radius_m > min_distance_m && min_distance_m >= 0.0, "cell_radius_m must exceed min_distance_m");
  require(antenna_spacing_wavelengths > 0.0, "antenna_spacing_wavelengths must be > 0");
  require(taps_active >= 0 && active_taps() <= n_subcarriers, "taps_active must be in [0, n_subcarriers]");
  require(delay_decay_taps >= 0.0, "delay_decay_taps must be >= 0");
  require(azimuth_spread_deg >= 0.0 && elevation_spread_deg >= 0.0, "angular spreads must be >= 0");
  require(n_clusters >= 0, "n_clusters must be >= 0");
  require(intra_cluster_delay_taps >= 0.0 && intra_cluster_angle_deg >= 0.0, "intra-cluster spreads must be >= 0");
}

ScenarioConfig ScenarioConfig::paper() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::desk() {
  ScenarioConfig s;
  s.n_antennas_h = 4;
  s.n_antennas_v = 4;
  s.n_subcarriers = 32;
  return s;
}

void to_json(nlohmann::json& j, const ScenarioConfig& s) {
  j = nlohmann::json{{"n_antennas_h", s.n_antennas_h},
                     {"n_antennas_v", s.n_antennas_v},
                     {"n_subcarriers", s.n_subcarriers},
                     {"bandwidth_hz", s.bandwidth_hz},
                     {"f_ul_hz", s.f_ul_hz},
                     {"dl_gaps_hz", s.dl_gaps_hz},
                     {"n_paths", s.n_paths},
                     {"cell_radius_m", s.cell_radius_m},
                     {"min_distance_m", s.min_distance_m},
                     {"bs_height_m", s.bs_height_m},
                     {"ue_height_m", s.ue_height_m},
                     {"downtilt_deg", s.downtilt_deg},
                     {"antenna_spacing_wavelengths", s.antenna_spacing_wavelengths},
                     {"taps_active", s.taps_active},
                     {"delay_decay_taps", s.delay_decay_taps},
                     {"azimuth_spread_deg", s.azimuth_spread_deg},
                     {"elevation_spread_deg", s.elevation_spread_deg},
                     {"n_clusters", s.n_clusters},
                     {"intra_cluster_delay_taps", s.intra_cluster_delay_taps},
                     {"intra_cluster_angle_deg", s.intra_cluster_angle_deg}};
}

void from_json(const nlohmann::json& j, ScenarioConfig& s) {
  ScenarioConfig d;
  s.n_antennas_h = j.value("n_antennas_h", d.n_antennas_h);
  s.n_antennas_v = j.value("n_antennas_v", d.n_antennas_v);
  s.n_subcarriers = j.value("n_subcarriers", d.n_subcarriers);
  s.bandwidth_hz = j.value("bandwidth_hz", d.bandwidth_hz);
  s.f_ul_hz = j.value("f_ul_hz", d.f_ul_hz);
  s.dl_gaps_hz = j.value("dl_gaps_hz", d.dl_gaps_hz);
  s.n_paths = j.value("n_paths", d.n_paths);
  s.cell_radius_m = j.value("cell_radius_m", d.cell_radius_m);
  s.min_distance_m = j.value("min_distance_m", d.min_distance_m);
  s.bs_height_m = j.value("bs_height_m", d.bs_height_m);
  s.ue_height_m = j.value("ue_height_m", d.ue_height_m);
  s.downtilt_deg = j.value("downtilt_deg", d.downtilt_deg);
  s.antenna_spacing_wavelengths = j.value("antenna_spacing_wavelengths", d.antenna_spacing_wavelengths);
  s.taps_active = j.value("taps_active", d.taps_active);
  s.delay_decay_taps = j.value("delay_decay_taps", d.delay_decay_taps);
  s.azimuth_spread_deg = j.value("azimuth_spread_deg", d.azimuth_spread_deg);
  s.elevation_spread_deg = j.value("elevation_spread_deg", d.elevation_spread_deg);
  s.n_clusters = j.value("n_clusters", d.n_clusters);
  s.intra_cluster_delay_taps = j.value("intra_cluster_delay_taps", d.intra_cluster_delay_taps);
  s.intra_cluster_angle_deg = j.value("intra_cluster_angle_deg", d.intra_cluster_angle_deg);
}

PathSet sample_path_set(std::mt19937_64& rng, const ScenarioConfig& scenario) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Uniform position in the annulus [min_distance, radius].
  const double r_min2 = scenario.min_distance_m * scenario.min_distance_m;
  const double r_max2 = scenario.cell_radius_m * scenario.cell_radius_m;
  const double dist = std::sqrt(r_min2 + unit(rng) * (r_max2 - r_min2));
  const double los_azimuth = (2.0 * unit(rng) - 1.0) * kPi;
  const double los_elevation = -std::atan2(scenario.bs_height_m - scenario.ue_height_m, dist);

  const double max_delay = scenario.max_delay_s();
  const double decay_s = scenario.decay_taps() / scenario.bandwidth_hz;
  const double tilt = -scenario.downtilt_deg * kDeg;
  std::exponential_distribution<double> delay_law(1.0 / decay_s);

  const int n_clusters = scenario.n_clusters > 0 ? std::min(scenario.n_clusters, scenario.n_paths) : scenario.n_paths;
  const double intra_delay = scenario.intra_cluster_delay_taps / scenario.bandwidth_hz;
  const double intra_angle = scenario.intra_cluster_angle_deg * kDeg;
  const bool clustered = n_clusters < scenario.n_paths;

  struct Cluster {
    double delay, azimuth, elevation, power;
  };
  std::vector<Cluster> clusters(static_cast<std::size_t>(n_clusters));
  PathSet paths(static_cast<std::size_t>(scenario.n_paths));
  double total_power = 0.0;
  do {
    for (auto& c : clusters) {
      do {
        c.delay = delay_law(rng);
      } while (c.delay >= max_delay);
      c.azimuth = los_azimuth + scenario.azimuth_spread_deg * kDeg * normal(rng);
      c.elevation = los_elevation + scenario.elevation_spread_deg * kDeg * normal(rng);
      c.power = std::exp(-c.delay / decay_s) / n_clusters;
    }
    total_power = 0.0;
    for (std::size_t l = 0; l < paths.size(); ++l) {
      const Cluster& c = clusters[l % clusters.size()];
      const std::size_t r = l % clusters.size();
      const std::size_t members = (paths.size() - r + clusters.size() - 1) / clusters.size();
      Path& p = paths[l];
      if (clustered) {
        p.delay_s = std::min(c.delay + intra_delay * unit(rng), std::nextafter(max_delay, 0.0));
        p.azimuth_rad = c.azimuth + intra_angle * normal(rng);
        p.elevation_rad = std::clamp(c.elevation + intra_angle * normal(rng), -kPi / 2, kPi / 2);
      } else {
        p.delay_s = c.delay;
        p.azimuth_rad = c.azimuth;
        p.elevation_rad = std::clamp(c.elevation, -kPi / 2, kPi / 2);
      }
      // Cosine elevation pattern steered toward the ground.
      const double taper = std::max(std::cos(p.elevation_rad - tilt), 0.0);
      const double amp = taper * std::sqrt(c.power / static_cast<double>(members) / 2.0);
      p.gain = {amp * normal(rng), amp * normal(rng)};
      total_power += std::norm(p.gain);
    }
  } while (total_power == 0.0);
  return paths;
}

CVectorD upa_steering_vector(double azimuth_rad, double elevation_rad, const ScenarioConfig& scenario,
                             double f_hz) {
  if (!(f_hz > 0.0)) throw Error("upa_steering_vector: f_hz must be > 0");
  const int n_h = scenario.n_antennas_h;
  const int n_v = scenario.n_antennas_v;
  const double scale = 2.0 * kPi * scenario.antenna_spacing_wavelengths * (f_hz / scenario.f_ul_hz);
  const double u = std::sin(azimuth_rad) * std::cos(elevation_rad);
  const double v = std::sin(elevation_rad);
  CVectorD s(n_h * n_v);
  for (int p = 0; p < n_h; ++p) {
    for (int q = 0; q < n_v; ++q) {
      s(p * n_v + q) = std::polar(1.0, scale * (p * u + q * v));
    }
  }
  return s;
}

CMatrixD synthesize_channel(const PathSet& paths, const ScenarioConfig& scenario, double f_center_hz) {
  const int n_a = scenario.n_antennas();
  const int n_c = scenario.n_subcarriers;
  const double df = scenario.subcarrier_spacing_hz();
  CMatrixD h = CMatrixD::Zero(n_a, n_c);
  for (int c = 0; c < n_c; ++c) {
    const double f = f_center_hz + (c - n_c / 2) * df;
    for (const auto& p : paths) {
      // Reduce f * tau modulo 1 before forming the phase.
      const double cycles = f * p.delay_s;
      const double frac = cycles - std::floor(cycles);
      const std::complex<double> coeff = p.gain * std::polar(1.0, -2.0 * kPi * frac);
      h.col(c) += coeff * upa_steering_vector(p.azimuth_rad, p.elevation_rad, scenario, f);
    }
  }
  return h;
}

CMatrixD normalize_path_gain(const CMatrixD& h) {
  const double norm = h.norm();
  if (!(norm > 0.0)) throw Error("degenerate channel: zero Frobenius norm");
  return h * (std::sqrt(static_cast<double>(h.size())) / norm);
}

CMatrixD add_noise(const CMatrixD& h, double sigma2, std::mt19937_64& rng) {
  if (sigma2 < 0.0) throw Error("add_noise: sigma2 must be >= 0");
  if (sigma2 == 0.0) return h;
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));
  CMatrixD y = h;
  // Fixed draw order: column-major, real then imaginary.
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    y(i) += std::complex<double>(re, im);
  }
  return y;
}

ChannelSample generate_sample(const ScenarioConfig& scenario, double snr_db, std::uint64_t master_seed,
                              std::uint64_t index) {
  ChannelSample sample;
  sample.seed = derive_seed(master_seed, index, 0);
  std::mt19937_64 geo_rng(sample.seed);
  std::mt19937_64 noise_rng(derive_seed(master_seed, index, 1));
  const double sigma2 = snr_db_to_sigma2(snr_db);

  const auto freqs = scenario.center_frequencies();
  for (int attempt = 0;; ++attempt) {
    const PathSet paths = sample_path_set(geo_rng, scenario);
    std::vector<CMatrixD> h;
    bool degenerate = false;
    for (double f : freqs) {
      CMatrixD raw = synthesize_channel(paths, scenario, f);
      if (!(raw.norm() > 0.0)) {
        degenerate = true;
        break;
      }
      h.push_back(normalize_path_gain(raw));
    }
    if (degenerate) {
      if (attempt > 100) throw Error("generate_sample: could not draw a non-degenerate channel");
      continue;
    }
    sample.h_ul = h[0].cast<std::complex<float>>();
    sample.y_ul = add_noise(h[0], sigma2, noise_rng).cast<std::complex<float>>();
    for (std::size_t g = 1; g < h.size(); ++g) {
      sample.h_dl.push_back(h[g].cast<std::complex<float>>());
      sample.y_dl.push_back(add_noise(h[g], sigma2, noise_rng).cast<std::complex<float>>());
    }
    return sample;
  }
}

}  // namespace csilab::channel
