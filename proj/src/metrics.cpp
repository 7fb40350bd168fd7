#include "csilab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace csilab::metrics {

namespace fs = std::filesystem;

namespace {

void check_shapes(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::ofstream open_csv(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path.string() + ".tmp", std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.precision(10);
  return out;
}

void commit_csv(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError(path.string() + ": write failed");
  fs::rename(path.string() + ".tmp", path);
}

}  // namespace

double nmse(const CMatrix& h_hat, const CMatrix& h) {
  check_shapes(h_hat, h, "nmse");
  const double den = h.cast<std::complex<double>>().squaredNorm();
  if (!(den > 0.0)) throw Error("nmse: true channel is zero");
  return (h_hat.cast<std::complex<double>>() - h.cast<std::complex<double>>()).squaredNorm() / den;
}

double cosine_similarity(const CMatrix& h_hat, const CMatrix& h, std::size_t* degenerate) {
  check_shapes(h_hat, h, "cosine_similarity");
  double sum = 0.0;
  std::size_t used = 0;
  for (Eigen::Index n = 0; n < h.cols(); ++n) {
    const CVectorD a = h_hat.col(n).cast<std::complex<double>>();
    const CVectorD b = h.col(n).cast<std::complex<double>>();
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) {
      if (degenerate) ++*degenerate;
      continue;
    }
    sum += std::abs(a.dot(b)) / (na * nb);  // dot conjugates its first argument
    ++used;
  }
  return used ? sum / static_cast<double>(used) : 0.0;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw Error("empirical_cdf: empty input");
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double cdf_at(const std::vector<double>& values, double x) {
  if (values.empty()) throw Error("cdf_at: empty input");
  const auto count = std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; });
  return static_cast<double>(count) / static_cast<double>(values.size());
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BoxStats box_stats(const std::vector<double>& values) {
  if (values.empty()) throw Error("box_stats: empty input");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  BoxStats s;
  s.median = quantile(sorted, 0.5);
  s.q1 = quantile(sorted, 0.25);
  s.q3 = quantile(sorted, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = *std::lower_bound(sorted.begin(), sorted.end(), lo_fence);
  s.whisker_hi = *(std::upper_bound(sorted.begin(), sorted.end(), hi_fence) - 1);
  return s;
}

double MetricReport::mean_nmse() const { return mean(nmse); }
double MetricReport::mean_rho() const { return mean(rho); }

MetricReport evaluate(const std::vector<CMatrix>& estimates, const std::vector<CMatrix>& truth, std::string method,
                      std::string frequency, double snr_db) {
  if (estimates.size() != truth.size()) throw ShapeError("evaluate: estimate and truth counts differ");
  MetricReport r;
  r.method = std::move(method);
  r.frequency = std::move(frequency);
  r.snr_db = snr_db;
  r.nmse.reserve(truth.size());
  r.rho.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    r.nmse.push_back(nmse(estimates[i], truth[i]));
    r.rho.push_back(cosine_similarity(estimates[i], truth[i], &r.degenerate_columns));
  }
  return r;
}

void write_report_csv(const MetricReport& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "sample,nmse,rho\n";
  for (std::size_t i = 0; i < r.nmse.size(); ++i) out << i << "," << r.nmse[i] << "," << r.rho[i] << "\n";
  commit_csv(out, path);
}

void write_summary_csv(const std::vector<MetricReport>& reports, const fs::path& path) {
  auto out = open_csv(path);
  out << "method,frequency,snr_db,n,mean_nmse,mean_rho,nmse_median,nmse_q1,nmse_q3,nmse_whisker_lo,"
         "nmse_whisker_hi,rho_median,rho_q1,rho_q3,rho_whisker_lo,rho_whisker_hi,dl_training_free\n";
  for (const auto& r : reports) {
    const auto e = r.nmse_box();
    const auto p = r.rho_box();
    out << r.method << "," << r.frequency << "," << r.snr_db << "," << r.nmse.size() << "," << r.mean_nmse() << ","
        << r.mean_rho() << "," << e.median << "," << e.q1 << "," << e.q3 << "," << e.whisker_lo << ","
        << e.whisker_hi << "," << p.median << "," << p.q1 << "," << p.q3 << "," << p.whisker_lo << ","
        << p.whisker_hi << "," << (r.dl_training_free ? 1 : 0) << "\n";
  }
  commit_csv(out, path);
}

void write_cdf_csv(const std::vector<CdfPoint>& cdf, const fs::path& path) {
  auto out = open_csv(path);
  out << "value,fraction\n";
  for (const auto& p : cdf) out << p.value << "," << p.fraction << "\n";
  commit_csv(out, path);
}

std::vector<std::vector<std::size_t>> draw_user_sets(std::size_t n_samples, int n_users, int n_draws,
                                                     std::uint64_t seed) {
  if (n_users < 1 || static_cast<std::size_t>(n_users) > n_samples)
    throw Error("draw_user_sets: need at least n_users samples");
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> pool(n_samples);
  for (int d = 0; d < n_draws; ++d) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(d), 2));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n_users entries are a uniform draw without replacement.
    for (int k = 0; k < n_users; ++k) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), n_samples - 1);
      std::swap(pool[static_cast<std::size_t>(k)], pool[pick(rng)]);
    }
    sets.emplace_back(pool.begin(), pool.begin() + n_users);
  }
  return sets;
}

bool zf_precoder(const CMatrixD& h_est, CMatrixD& w) {
  const Eigen::Index k = h_est.cols();
  if (k > h_est.rows()) return false;
  // W = H (H^H H)^{-1}, the pseudo-inverse of H^H.
  const CMatrixD gram = h_est.adjoint() * h_est;
  Eigen::JacobiSVD<CMatrixD> svd(gram);
  const auto& sv = svd.singularValues();
  if (!(sv(k - 1) > 1e-10 * sv(0))) return false;
  w = h_est * gram.ldlt().solve(CMatrixD::Identity(k, k));
  for (Eigen::Index j = 0; j < k; ++j) {
    const double n = w.col(j).norm();
    if (!(n > 0.0)) return false;
    w.col(j) /= n;
  }
  return true;
}

RateCurve zf_per_user_rate(const std::vector<CMatrix>& truth, const std::vector<CMatrix>& estimates,
                           const RateConfig& cfg, std::string method, std::string frequency) {
  if (truth.size() != estimates.size()) throw ShapeError("zf_per_user_rate: truth and estimate counts differ");
  if (truth.empty()) throw Error("zf_per_user_rate: no samples");
  if (cfg.n_draws < 1) throw Error("zf_per_user_rate: n_draws must be >= 1");
  const int k_users = cfg.n_users;
  const Eigen::Index n_a = truth.front().rows();
  const Eigen::Index n_c = truth.front().cols();
  if (k_users > n_a) throw Error("zf_per_user_rate: more users than antennas");
  const Eigen::Index carriers = cfg.max_carriers > 0 ? std::min<Eigen::Index>(cfg.max_carriers, n_c) : n_c;

  RateCurve curve;
  curve.method = std::move(method);
  curve.frequency = std::move(frequency);
  curve.n_users = k_users;
  curve.tx_power_db = cfg.tx_power_db;
  std::vector<double> sum(cfg.tx_power_db.size(), 0.0);
  std::vector<double> power(cfg.tx_power_db.size());
  for (std::size_t p = 0; p < power.size(); ++p) power[p] = std::pow(10.0, cfg.tx_power_db[p] / 10.0);

  auto schedule = draw_user_sets(truth.size(), k_users, cfg.n_draws, cfg.seed);
  CMatrixD h_true(n_a, k_users), h_est(n_a, k_users), w;
  std::vector<CMatrixD> gains(static_cast<std::size_t>(carriers));
  for (int d = 0; d < cfg.n_draws; ++d) {
    auto users = schedule[static_cast<std::size_t>(d)];
    for (int attempt = 0;; ++attempt) {
      bool ok = true;
      for (Eigen::Index n = 0; n < carriers && ok; ++n) {
        for (int k = 0; k < k_users; ++k) {
          h_true.col(k) = truth[users[static_cast<std::size_t>(k)]].col(n).cast<std::complex<double>>();
          h_est.col(k) = estimates[users[static_cast<std::size_t>(k)]].col(n).cast<std::complex<double>>();
        }
        ok = zf_precoder(h_est, w);
        if (ok) gains[static_cast<std::size_t>(n)] = (h_true.adjoint() * w).cwiseAbs2();
      }
      if (ok) break;
      if (attempt >= 100) throw Error("zf_per_user_rate: " + curve.method + " " + curve.frequency +
                                     ": could not draw a full-rank user set of estimates");
      ++curve.redraws;
      users = draw_user_sets(truth.size(), k_users, 1,
                             derive_seed(cfg.seed, static_cast<std::uint64_t>(d), 3 + static_cast<std::uint64_t>(attempt)))
                  .front();
    }
    for (std::size_t p = 0; p < power.size(); ++p) {
      const double per_user = power[p] / k_users;
      double acc = 0.0;
      for (const auto& g : gains) {
        for (int k = 0; k < k_users; ++k) {
          const double signal = g(k, k).real() * per_user;
          const double interference = (g.row(k).real().sum() - g(k, k).real()) * per_user;
          acc += std::log2(1.0 + signal / (1.0 + interference));
        }
      }
      sum[p] += acc / (static_cast<double>(k_users) * static_cast<double>(carriers));
    }
  }
  for (double s : sum) curve.rate_bpcu.push_back(s / cfg.n_draws);
  return curve;
}

void write_rate_csv(const std::vector<RateCurve>& curves, const fs::path& path) {
  auto out = open_csv(path);
  out << "method,frequency,tx_power_db,rate_bpcu\n";
  for (const auto& c : curves)
    for (std::size_t p = 0; p < c.tx_power_db.size(); ++p)
      out << c.method << "," << c.frequency << "," << c.tx_power_db[p] << "," << c.rate_bpcu[p] << "\n";
  commit_csv(out, path);
}

}  // namespace csilab::metrics
