#include <doctest.h>

#include "csilab/baselines.hpp"
#include "support.hpp"

using namespace csilab;
using namespace csilab::baselines;

namespace {

// Unitary inverse DFT along rows by direct summation.
CMatrixD direct_idft(const CMatrixD& y) {
  const auto n = y.cols();
  CMatrixD out(y.rows(), n);
  for (Eigen::Index a = 0; a < y.rows(); ++a)
    for (Eigen::Index m = 0; m < n; ++m) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index c = 0; c < n; ++c)
        acc += y(a, c) * std::polar(1.0, 2.0 * kPi * static_cast<double>(c * m) / static_cast<double>(n));
      out(a, m) = acc / std::sqrt(static_cast<double>(n));
    }
  return out;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("delay transform matches direct summation") {
    for (int n : {1, 2, 5, 8, 12, 16}) {
      const CMatrixD y = testing::random_cmatrixd(3, n, static_cast<std::uint64_t>(n));
      const CMatrixD fast = to_delay_domain(y);
      const CMatrixD slow = direct_idft(y);
      CAPTURE(n);
      CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK((from_delay_domain(fast) - y).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK(fast.norm() == doctest::Approx(y.norm()).epsilon(1e-12));
    }
  }

  TEST_CASE("compression keeps the leading taps") {
    const CMatrixD y = testing::random_cmatrixd(4, 16, 3);
    const auto c = idft_compress(y, 2);
    CHECK(c.coeffs.rows() == 4);
    CHECK(c.coeffs.cols() == 2);
    CHECK(c.n_subcarriers == 16);
    CHECK(c.real_count() == 16);
    CHECK((c.coeffs - direct_idft(y).leftCols(2)).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("reconstruction is an orthogonal projection") {
    const CMatrixD y = testing::random_cmatrixd(4, 16, 4);
    const CMatrixD once = idft_reconstruct(idft_compress(y, 3));
    const CMatrixD twice = idft_reconstruct(idft_compress(once, 3));
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-9);
    // residual is orthogonal to the kept subspace
    const std::complex<double> inner = (y - once).cwiseProduct(once.conjugate()).sum();
    CHECK(std::abs(inner) < 1e-9 * y.squaredNorm());
    CHECK((idft_reconstruct(idft_compress(y, 16)) - y).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("delay-sparse channel is recovered exactly") {
    CMatrixD d = CMatrixD::Zero(4, 16);
    d.leftCols(2) = testing::random_cmatrixd(4, 2, 5);
    const CMatrixD y = from_delay_domain(d);
    CHECK((idft_reconstruct(idft_compress(y, 2)) - y).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("single-precision wrapper") {
    const CMatrix y = testing::random_cmatrix(4, 8, 6);
    const CMatrix r = idft_feedback(y, 1);
    const CMatrixD ref = idft_reconstruct(idft_compress(y.cast<std::complex<double>>(), 1));
    CHECK((r.cast<std::complex<double>>() - ref).cwiseAbs().maxCoeff() < 1e-5);
  }

  TEST_CASE("invalid tap counts") {
    const CMatrixD y = testing::random_cmatrixd(2, 8, 1);
    CHECK_THROWS_AS(idft_compress(y, 0), Error);
    CHECK_THROWS_AS(idft_compress(y, 9), Error);
    CHECK_THROWS_AS(to_delay_domain(CMatrixD(2, 0)), Error);
  }
}
