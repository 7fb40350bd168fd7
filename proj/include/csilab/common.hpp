#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace csilab {

/// Complex channel matrix, rows = antennas, columns = subcarriers.
using CMatrix = Eigen::Matrix<std::complex<float>, Eigen::Dynamic, Eigen::Dynamic>;
using CMatrixD = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
using CVectorD = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input violates an operation's shape or range contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Raised on file access or container format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

/// splitmix64 finalizer; used to derive independent per-sample seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  return mix_seed(mix_seed(master ^ mix_seed(index)) + stream);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace csilab
