#pragma once

// Forward/backward execution of a ModelSpec.
//
// Activations are column-major matrices. A spatial tensor batch of shape
// (B, H, W, C) is stored as C x (B*H*W), one column per pixel with the
// channel vector contiguous; a flat batch is F x B. Flattening a spatial
// batch is therefore a free reshape with features in (h, w, c) order.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csilab/common.hpp"
#include "csilab/nn/model_spec.hpp"

namespace csilab::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

enum class Mode { kTrain, kInfer };

/// Named parameter or buffer with its gradient (gradient is null for buffers).
template <typename T>
struct ParamRef {
  std::string name;
  Mat<T>* value = nullptr;
  Mat<T>* grad = nullptr;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Mat<T> forward(const Mat<T>& x, int batch, Mode mode) = 0;
  /// Inference-mode forward without caching; safe for concurrent callers.
  virtual Mat<T> infer(const Mat<T>& x, int batch) const = 0;
  /// Returns the input gradient; parameter gradients are accumulated.
  virtual Mat<T> backward(const Mat<T>& dy) = 0;
  virtual void params(const std::string& /*prefix*/, std::vector<ParamRef<T>>& /*out*/) {}
  virtual void buffers(const std::string& /*prefix*/, std::vector<ParamRef<T>>& /*out*/) {}
  virtual void init(std::mt19937_64& /*rng*/) {}
};

struct BatchNormOptions {
  double momentum = 0.99;
  double epsilon = 1e-3;
};

template <typename T>
class Network {
 public:
  explicit Network(ModelSpec spec, BatchNormOptions bn = {});
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const ModelSpec& spec() const { return spec_; }

  /// x must hold spec().input_shape() per sample (rows*cols = size * batch).
  Mat<T> forward(const Mat<T>& x, int batch, Mode mode);
  Mat<T> backward(const Mat<T>& dy);
  /// Inference-mode forward that leaves the network untouched.
  Mat<T> infer(const Mat<T>& x, int batch) const;

  void init(std::mt19937_64& rng);
  void zero_grad();

  /// Trainable parameters, names "<layer index>.<kernel|bias|gamma|beta>".
  std::vector<ParamRef<T>> params();
  /// Non-trainable batch-norm running statistics.
  std::vector<ParamRef<T>> buffers();

 private:
  void check_input(std::size_t layer, const Mat<T>& x, int batch) const;

  ModelSpec spec_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

extern template class Network<float>;
extern template class Network<double>;

/// Packs complex N_a x N_c matrices into an input batch: H = antennas,
/// W = subcarriers, channel 0 = real part, channel 1 = imaginary part.
template <typename T>
Mat<T> complex_to_real_batch(const std::vector<const CMatrix*>& batch);

/// Inverse of complex_to_real_batch for sample b.
template <typename T>
CMatrix real_batch_to_complex(const Mat<T>& x, int batch, int b, int n_antennas, int n_subcarriers);

/// Single-matrix convenience forms (N_a x N_c x 2 tensor as a 2 x (N_a*N_c) matrix).
Mat<float> complex_to_real_tensor(const CMatrix& h);
CMatrix real_tensor_to_complex(const Mat<float>& x, int n_antennas, int n_subcarriers);

/// Mean over the batch of the squared Frobenius norm of (reconstruction - target).
template <typename T>
T reconstruction_loss(const Mat<T>& reconstruction, const Mat<T>& target, int batch);

/// d(loss)/d(reconstruction).
template <typename T>
Mat<T> reconstruction_loss_grad(const Mat<T>& reconstruction, const Mat<T>& target, int batch);

}  // namespace csilab::nn
