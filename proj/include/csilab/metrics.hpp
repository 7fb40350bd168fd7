#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "csilab/common.hpp"

namespace csilab::metrics {

/// ||h_hat - h||_F^2 / ||h||_F^2. Throws on a zero true channel or shape mismatch.
double nmse(const CMatrix& h_hat, const CMatrix& h);

/// Mean over subcarrier columns of |h_hat_n^H h_n| / (||h_hat_n|| ||h_n||).
/// Columns where either vector is zero are skipped and counted in
/// *degenerate; if every column is skipped the result is 0.
double cosine_similarity(const CMatrix& h_hat, const CMatrix& h, std::size_t* degenerate = nullptr);

struct CdfPoint {
  double value;
  double fraction;
};

/// Right-continuous empirical CDF: one point per distinct value, fraction = #{v <= value} / n.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

/// Evaluates the empirical CDF of values at x.
double cdf_at(const std::vector<double>& values, double x);

/// Linear-interpolation quantile (position p * (n - 1) in sorted order).
double quantile(std::vector<double> values, double p);

struct BoxStats {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;  // smallest value >= q1 - 1.5 IQR
  double whisker_hi = 0.0;  // largest value <= q3 + 1.5 IQR
};

BoxStats box_stats(const std::vector<double>& values);

struct MetricReport {
  std::string method;     // "AE", "AE-8bit", "IDFT", "noisy", ...
  std::string frequency;  // "UL", "DL-120MHz", ...
  double snr_db = 0.0;
  bool dl_training_free = true;
  std::vector<double> nmse;
  std::vector<double> rho;
  std::size_t degenerate_columns = 0;

  double mean_nmse() const;
  double mean_rho() const;
  BoxStats nmse_box() const { return box_stats(nmse); }
  BoxStats rho_box() const { return box_stats(rho); }
};

MetricReport evaluate(const std::vector<CMatrix>& estimates, const std::vector<CMatrix>& truth, std::string method,
                      std::string frequency, double snr_db);

/// Per-sample CSV: sample,nmse,rho.
void write_report_csv(const MetricReport& r, const std::filesystem::path& path);
/// Summary CSV, one row per report:
/// method,frequency,snr_db,n,mean_nmse,mean_rho,nmse_median,nmse_q1,nmse_q3,nmse_whisker_lo,nmse_whisker_hi,
/// rho_median,rho_q1,rho_q3,rho_whisker_lo,rho_whisker_hi,dl_training_free
void write_summary_csv(const std::vector<MetricReport>& reports, const std::filesystem::path& path);
/// Two-column CSV: value,fraction.
void write_cdf_csv(const std::vector<CdfPoint>& cdf, const std::filesystem::path& path);

struct RateConfig {
  std::vector<double> tx_power_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
  int n_users = 8;
  int n_draws = 100;
  std::uint64_t seed = 0;
  /// Subcarriers evaluated per draw; 0 means all.
  int max_carriers = 0;
};

struct RateCurve {
  std::string method;
  std::string frequency;
  int n_users = 0;
  std::vector<double> tx_power_db;
  std::vector<double> rate_bpcu;  // average per-user rate
  std::size_t redraws = 0;        // user sets replaced due to rank deficiency
};

/// Fixed user-set schedule: n_draws sets of n_users distinct sample indices.
std::vector<std::vector<std::size_t>> draw_user_sets(std::size_t n_samples, int n_users, int n_draws,
                                                     std::uint64_t seed);

/// Average per-user rate of zero-forcing precoding designed on the estimated
/// channels and evaluated on the true ones, receiver noise power 1 and equal
/// power P / K per user:
///   R = (1/K) sum_k log2(1 + |h_k^H w_k|^2 P/K / (1 + sum_{j != k} |h_k^H w_j|^2 P/K)).
/// Averaged over carriers and the draw schedule, which is shared by every
/// power point.
RateCurve zf_per_user_rate(const std::vector<CMatrix>& truth, const std::vector<CMatrix>& estimates,
                           const RateConfig& cfg, std::string method, std::string frequency);

/// Unit-norm ZF precoder columns for the estimated user matrix (N_a x K).
/// Returns false if the user matrix is rank deficient.
bool zf_precoder(const CMatrixD& h_est, CMatrixD& w);

/// CSV: method,frequency,tx_power_db,rate_bpcu
void write_rate_csv(const std::vector<RateCurve>& curves, const std::filesystem::path& path);

}  // namespace csilab::metrics
