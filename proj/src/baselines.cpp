#include "csilab/baselines.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace csilab::baselines {

CMatrixD to_delay_domain(const CMatrixD& y) {
  const Eigen::Index n = y.cols();
  if (n == 0) throw Error("to_delay_domain: no subcarriers");
  if (n == 1) return y;  // kissfft does not handle length 1
  const double scale = std::sqrt(static_cast<double>(n));
  Eigen::FFT<double> fft;
  CMatrixD out(y.rows(), n);
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n)), res;
  for (Eigen::Index a = 0; a < y.rows(); ++a) {
    for (Eigen::Index c = 0; c < n; ++c) in[static_cast<std::size_t>(c)] = y(a, c);
    // Eigen's inverse transform carries the 1/N factor.
    fft.inv(res, in);
    for (Eigen::Index m = 0; m < n; ++m) out(a, m) = res[static_cast<std::size_t>(m)] * scale;
  }
  return out;
}

CMatrixD from_delay_domain(const CMatrixD& d) {
  const Eigen::Index n = d.cols();
  if (n == 0) throw Error("from_delay_domain: no subcarriers");
  if (n == 1) return d;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::FFT<double> fft;
  CMatrixD out(d.rows(), n);
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n)), res;
  for (Eigen::Index a = 0; a < d.rows(); ++a) {
    for (Eigen::Index m = 0; m < n; ++m) in[static_cast<std::size_t>(m)] = d(a, m);
    fft.fwd(res, in);
    for (Eigen::Index c = 0; c < n; ++c) out(a, c) = res[static_cast<std::size_t>(c)] * scale;
  }
  return out;
}

DelayDomainCoeffs idft_compress(const CMatrixD& y, int k) {
  if (k < 1 || k > y.cols()) throw Error("idft_compress: k must lie in [1, N_c]");
  return {to_delay_domain(y).leftCols(k), static_cast<int>(y.cols())};
}

CMatrixD idft_reconstruct(const DelayDomainCoeffs& c) {
  if (c.coeffs.cols() > c.n_subcarriers) throw Error("idft_reconstruct: more taps than subcarriers");
  CMatrixD padded = CMatrixD::Zero(c.coeffs.rows(), c.n_subcarriers);
  padded.leftCols(c.coeffs.cols()) = c.coeffs;
  return from_delay_domain(padded);
}

CMatrix idft_feedback(const CMatrix& y, int k) {
  return idft_reconstruct(idft_compress(y.cast<std::complex<double>>(), k)).cast<std::complex<float>>();
}

}  // namespace csilab::baselines
