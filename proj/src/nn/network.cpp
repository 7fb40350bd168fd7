#include "csilab/nn/network.hpp"

#include <cmath>

namespace csilab::nn {

namespace {

// 3x3 window, padding 1, stride s between a "big" tensor (C x H x W) and a
// "small" one of spatial size ((H - 1) / s + 1) x ((W - 1) / s + 1).
// im2col gathers big-tensor patches, one column per small-tensor pixel, with
// rows ordered (kh, kw, channel). col2im is its adjoint.
struct Window {
  int channels;
  int big_h, big_w;
  int small_h, small_w;
  int stride;

  template <typename T>
  Mat<T> im2col(const Mat<T>& big, int batch) const {
    const int k = kKernel * kKernel * channels;
    Mat<T> cols(k, static_cast<Eigen::Index>(batch) * small_h * small_w);
    const T* src = big.data();
    T* dst = cols.data();
    for (int b = 0; b < batch; ++b) {
      for (int oh = 0; oh < small_h; ++oh) {
        for (int ow = 0; ow < small_w; ++ow) {
          for (int kh = 0; kh < kKernel; ++kh) {
            const int ih = oh * stride + kh - 1;
            for (int kw = 0; kw < kKernel; ++kw) {
              const int iw = ow * stride + kw - 1;
              if (ih < 0 || ih >= big_h || iw < 0 || iw >= big_w) {
                std::fill(dst, dst + channels, T(0));
              } else {
                const T* p = src + ((static_cast<std::ptrdiff_t>(b) * big_h + ih) * big_w + iw) * channels;
                std::copy(p, p + channels, dst);
              }
              dst += channels;
            }
          }
        }
      }
    }
    return cols;
  }

  template <typename T>
  Mat<T> col2im(const Mat<T>& cols, int batch) const {
    Mat<T> big = Mat<T>::Zero(channels, static_cast<Eigen::Index>(batch) * big_h * big_w);
    const T* src = cols.data();
    T* dst = big.data();
    for (int b = 0; b < batch; ++b) {
      for (int oh = 0; oh < small_h; ++oh) {
        for (int ow = 0; ow < small_w; ++ow) {
          for (int kh = 0; kh < kKernel; ++kh) {
            const int ih = oh * stride + kh - 1;
            for (int kw = 0; kw < kKernel; ++kw) {
              const int iw = ow * stride + kw - 1;
              if (ih >= 0 && ih < big_h && iw >= 0 && iw < big_w) {
                T* p = dst + ((static_cast<std::ptrdiff_t>(b) * big_h + ih) * big_w + iw) * channels;
                for (int c = 0; c < channels; ++c) p[c] += src[c];
              }
              src += channels;
            }
          }
        }
      }
    }
    return big;
  }
};

template <typename T>
void uniform_fill(Mat<T>& m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = static_cast<T>(u(rng));
}

// Strided convolution, big input -> small output.
template <typename T>
class Conv final : public Layer<T> {
 public:
  explicit Conv(const LayerSpec& s)
      : win_{s.in.c, s.in.h, s.in.w, s.out.h, s.out.w, 2},
        kernel_(Mat<T>::Zero(s.out.c, kKernel * kKernel * s.in.c)),
        bias_(Mat<T>::Zero(s.out.c, 1)),
        dkernel_(Mat<T>::Zero(kernel_.rows(), kernel_.cols())),
        dbias_(Mat<T>::Zero(s.out.c, 1)) {}

  Mat<T> forward(const Mat<T>& x, int batch, Mode) override {
    batch_ = batch;
    cols_ = win_.im2col(x, batch);
    Mat<T> y = kernel_ * cols_;
    y.colwise() += bias_.col(0);
    return y;
  }

  Mat<T> infer(const Mat<T>& x, int batch) const override {
    Mat<T> y = kernel_ * win_.im2col(x, batch);
    y.colwise() += bias_.col(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy) override {
    dkernel_.noalias() += dy * cols_.transpose();
    dbias_ += dy.rowwise().sum();
    return win_.col2im<T>(kernel_.transpose() * dy, batch_);
  }

  void params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + "kernel", &kernel_, &dkernel_});
    out.push_back({p + "bias", &bias_, &dbias_});
  }

  void init(std::mt19937_64& rng) override {
    uniform_fill(kernel_, std::sqrt(6.0 / kernel_.cols()), rng);
    bias_.setZero();
  }

 private:
  Window win_;
  Mat<T> kernel_, bias_, dkernel_, dbias_;
  Mat<T> cols_;
  int batch_ = 0;
};

// Transposed convolution, small input -> big output; the exact adjoint of a
// Conv with the same window plus a per-output-channel bias.
template <typename T>
class ConvTranspose final : public Layer<T> {
 public:
  ConvTranspose(const LayerSpec& s, int stride)
      : win_{s.out.c, s.out.h, s.out.w, s.in.h, s.in.w, stride},
        kernel_(Mat<T>::Zero(s.in.c, kKernel * kKernel * s.out.c)),
        bias_(Mat<T>::Zero(s.out.c, 1)),
        dkernel_(Mat<T>::Zero(kernel_.rows(), kernel_.cols())),
        dbias_(Mat<T>::Zero(s.out.c, 1)) {
    if ((s.out.h - 1) / stride + 1 != s.in.h || (s.out.w - 1) / stride + 1 != s.in.w)
      throw ShapeError("transposed conv: output " + s.out.str() + " is not reachable from input " + s.in.str());
  }

  Mat<T> forward(const Mat<T>& x, int batch, Mode) override {
    batch_ = batch;
    x_ = x;
    return infer(x, batch);
  }

  Mat<T> infer(const Mat<T>& x, int batch) const override {
    Mat<T> y = win_.col2im<T>(kernel_.transpose() * x, batch);
    y.colwise() += bias_.col(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy) override {
    const Mat<T> dcols = win_.im2col(dy, batch_);
    dkernel_.noalias() += x_ * dcols.transpose();
    dbias_ += dy.rowwise().sum();
    return kernel_ * dcols;
  }

  void params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + "kernel", &kernel_, &dkernel_});
    out.push_back({p + "bias", &bias_, &dbias_});
  }

  void init(std::mt19937_64& rng) override {
    const double fan_in = static_cast<double>(kernel_.rows()) * kKernel * kKernel / (win_.stride * win_.stride);
    uniform_fill(kernel_, std::sqrt(6.0 / fan_in), rng);
    bias_.setZero();
  }

 private:
  Window win_;
  Mat<T> kernel_, bias_, dkernel_, dbias_;
  Mat<T> x_;
  int batch_ = 0;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  explicit Dense(const LayerSpec& s)
      : kernel_(Mat<T>::Zero(s.out.size(), s.in.size())),
        bias_(Mat<T>::Zero(s.out.size(), 1)),
        dkernel_(Mat<T>::Zero(kernel_.rows(), kernel_.cols())),
        dbias_(Mat<T>::Zero(s.out.size(), 1)) {}

  Mat<T> forward(const Mat<T>& x, int batch, Mode) override {
    x_ = x;
    return infer(x, batch);
  }

  Mat<T> infer(const Mat<T>& x, int) const override {
    Mat<T> y = kernel_ * x;
    y.colwise() += bias_.col(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy) override {
    dkernel_.noalias() += dy * x_.transpose();
    dbias_ += dy.rowwise().sum();
    return kernel_.transpose() * dy;
  }

  void params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + "kernel", &kernel_, &dkernel_});
    out.push_back({p + "bias", &bias_, &dbias_});
  }

  void init(std::mt19937_64& rng) override {
    uniform_fill(kernel_, std::sqrt(3.0 / kernel_.cols()), rng);
    bias_.setZero();
  }

 private:
  Mat<T> kernel_, bias_, dkernel_, dbias_;
  Mat<T> x_;
};

// Per-channel standardization over (batch, h, w).
template <typename T>
class BatchNorm final : public Layer<T> {
 public:
  BatchNorm(const LayerSpec& s, BatchNormOptions opt)
      : opt_(opt),
        gamma_(Mat<T>::Ones(s.out.c, 1)),
        beta_(Mat<T>::Zero(s.out.c, 1)),
        dgamma_(Mat<T>::Zero(s.out.c, 1)),
        dbeta_(Mat<T>::Zero(s.out.c, 1)),
        running_mean_(Mat<T>::Zero(s.out.c, 1)),
        running_var_(Mat<T>::Ones(s.out.c, 1)) {}

  Mat<T> forward(const Mat<T>& x, int, Mode mode) override {
    mode_ = mode;
    const T eps = static_cast<T>(opt_.epsilon);
    if (mode == Mode::kInfer) {
      inv_std_ = (running_var_.array() + eps).rsqrt().matrix();
      return infer(x, 0);
    }
    const Mat<T> mean = x.rowwise().mean();
    Mat<T> centered = x.colwise() - mean.col(0);
    const Mat<T> var = centered.array().square().rowwise().mean().matrix();
    inv_std_ = (var.array() + eps).rsqrt().matrix();
    xhat_ = (centered.array().colwise() * inv_std_.col(0).array()).matrix();
    const T m = static_cast<T>(opt_.momentum);
    running_mean_ = m * running_mean_ + (T(1) - m) * mean;
    running_var_ = m * running_var_ + (T(1) - m) * var;
    return ((xhat_.array().colwise() * gamma_.col(0).array()).colwise() + beta_.col(0).array()).matrix();
  }

  Mat<T> infer(const Mat<T>& x, int) const override {
    const auto inv_std = (running_var_.array() + static_cast<T>(opt_.epsilon)).rsqrt();
    const auto scale = (gamma_.col(0).array() * inv_std).eval();
    const auto shift = (beta_.col(0).array() - running_mean_.col(0).array() * scale).eval();
    return ((x.array().colwise() * scale).colwise() + shift).matrix();
  }

  Mat<T> backward(const Mat<T>& dy) override {
    if (mode_ == Mode::kInfer) {
      // Running statistics are constants here; xhat was not cached.
      dbeta_ += dy.rowwise().sum();
      return (dy.array().colwise() * (gamma_.col(0).array() * inv_std_.col(0).array())).matrix();
    }
    const T n = static_cast<T>(dy.cols());
    dgamma_ += (dy.array() * xhat_.array()).rowwise().sum().matrix();
    dbeta_ += dy.rowwise().sum();
    const Mat<T> dxhat = (dy.array().colwise() * gamma_.col(0).array()).matrix();
    const Mat<T> sum_dxhat = dxhat.rowwise().sum();
    const Mat<T> sum_dxhat_xhat = (dxhat.array() * xhat_.array()).rowwise().sum().matrix();
    Mat<T> dx = (n * dxhat).colwise() - sum_dxhat.col(0);
    dx -= (xhat_.array().colwise() * sum_dxhat_xhat.col(0).array()).matrix();
    return (dx.array().colwise() * (inv_std_.col(0).array() / n)).matrix();
  }

  void params(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + "gamma", &gamma_, &dgamma_});
    out.push_back({p + "beta", &beta_, &dbeta_});
  }

  void buffers(const std::string& p, std::vector<ParamRef<T>>& out) override {
    out.push_back({p + "running_mean", &running_mean_, nullptr});
    out.push_back({p + "running_var", &running_var_, nullptr});
  }

  void init(std::mt19937_64&) override {
    gamma_.setOnes();
    beta_.setZero();
    running_mean_.setZero();
    running_var_.setOnes();
  }

 private:
  BatchNormOptions opt_;
  Mat<T> gamma_, beta_, dgamma_, dbeta_;
  Mat<T> running_mean_, running_var_;
  Mat<T> xhat_, inv_std_;
  Mode mode_ = Mode::kTrain;
};

template <typename T>
class Relu final : public Layer<T> {
 public:
  Mat<T> forward(const Mat<T>& x, int, Mode) override {
    y_ = x.cwiseMax(T(0));
    return y_;
  }
  Mat<T> infer(const Mat<T>& x, int) const override { return x.cwiseMax(T(0)); }
  Mat<T> backward(const Mat<T>& dy) override {
    return (y_.array() > T(0)).select(dy, Mat<T>::Zero(dy.rows(), dy.cols()));
  }

 private:
  Mat<T> y_;
};

template <typename T>
class Tanh final : public Layer<T> {
 public:
  Mat<T> forward(const Mat<T>& x, int, Mode) override {
    y_ = x.array().tanh().matrix();
    return y_;
  }
  Mat<T> infer(const Mat<T>& x, int) const override { return x.array().tanh().matrix(); }
  Mat<T> backward(const Mat<T>& dy) override { return (dy.array() * (T(1) - y_.array().square())).matrix(); }

 private:
  Mat<T> y_;
};

// Flatten and reshape only reinterpret the column-major buffer.
template <typename T>
class Reinterpret final : public Layer<T> {
 public:
  Reinterpret(Eigen::Index rows_in, Eigen::Index rows_out) : rows_in_(rows_in), rows_out_(rows_out) {}
  Mat<T> forward(const Mat<T>& x, int batch, Mode) override { return infer(x, batch); }
  Mat<T> infer(const Mat<T>& x, int) const override {
    return Eigen::Map<const Mat<T>>(x.data(), rows_out_, x.size() / rows_out_);
  }
  Mat<T> backward(const Mat<T>& dy) override {
    return Eigen::Map<const Mat<T>>(dy.data(), rows_in_, dy.size() / rows_in_);
  }

 private:
  Eigen::Index rows_in_, rows_out_;
};

// Rows of the activation matrix for a shape.
Eigen::Index activation_rows(const Shape& s) { return s.c; }

Eigen::Index activation_cols(const Shape& s, int batch) {
  return s.flat ? batch : static_cast<Eigen::Index>(batch) * s.h * s.w;
}

}  // namespace

template <typename T>
Network<T>::Network(ModelSpec spec, BatchNormOptions bn) : spec_(std::move(spec)) {
  for (const auto& l : spec_.layers) {
    switch (l.kind) {
      case LayerKind::kConvStride2:
        layers_.push_back(std::make_unique<Conv<T>>(l));
        break;
      case LayerKind::kConvTransposeStride2:
        layers_.push_back(std::make_unique<ConvTranspose<T>>(l, 2));
        break;
      case LayerKind::kConvUnitStride:
        layers_.push_back(std::make_unique<ConvTranspose<T>>(l, 1));
        break;
      case LayerKind::kBatchNorm:
        layers_.push_back(std::make_unique<BatchNorm<T>>(l, bn));
        break;
      case LayerKind::kRelu:
        layers_.push_back(std::make_unique<Relu<T>>());
        break;
      case LayerKind::kTanh:
        layers_.push_back(std::make_unique<Tanh<T>>());
        break;
      case LayerKind::kFlatten:
      case LayerKind::kReshape:
        layers_.push_back(std::make_unique<Reinterpret<T>>(activation_rows(l.in), activation_rows(l.out)));
        break;
      case LayerKind::kDense:
        layers_.push_back(std::make_unique<Dense<T>>(l));
        break;
    }
  }
}

template <typename T>
void Network<T>::check_input(std::size_t i, const Mat<T>& x, int batch) const {
  if (batch < 1) throw ShapeError("forward: batch must be >= 1");
  const Shape& in = spec_.layers[i].in;
  if (x.rows() != activation_rows(in) || x.cols() != activation_cols(in, batch)) {
    throw ShapeError("layer " + std::to_string(i) + " (" + to_string(spec_.layers[i].kind) + "): expected " +
                     std::to_string(activation_rows(in)) + " x " + std::to_string(activation_cols(in, batch)) +
                     " activation (" + in.str() + " per sample, batch " + std::to_string(batch) + "), got " +
                     std::to_string(x.rows()) + " x " + std::to_string(x.cols()));
  }
}

template <typename T>
Mat<T> Network<T>::forward(const Mat<T>& x, int batch, Mode mode) {
  check_input(0, x, batch);
  Mat<T> cur = layers_[0]->forward(x, batch, mode);
  for (std::size_t i = 1; i < layers_.size(); ++i) cur = layers_[i]->forward(cur, batch, mode);
  return cur;
}

template <typename T>
Mat<T> Network<T>::infer(const Mat<T>& x, int batch) const {
  check_input(0, x, batch);
  Mat<T> cur = layers_[0]->infer(x, batch);
  for (std::size_t i = 1; i < layers_.size(); ++i) cur = layers_[i]->infer(cur, batch);
  return cur;
}

template <typename T>
Mat<T> Network<T>::backward(const Mat<T>& dy) {
  Mat<T> cur = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
  return cur;
}

template <typename T>
void Network<T>::init(std::mt19937_64& rng) {
  for (auto& l : layers_) l->init(rng);
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto& p : params()) p.grad->setZero();
}

template <typename T>
std::vector<ParamRef<T>> Network<T>::params() {
  std::vector<ParamRef<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->params(std::to_string(i) + ".", out);
  return out;
}

template <typename T>
std::vector<ParamRef<T>> Network<T>::buffers() {
  std::vector<ParamRef<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->buffers(std::to_string(i) + ".", out);
  return out;
}

template class Network<float>;
template class Network<double>;

template <typename T>
Mat<T> complex_to_real_batch(const std::vector<const CMatrix*>& batch) {
  if (batch.empty()) throw ShapeError("complex_to_real_batch: empty batch");
  const Eigen::Index rows = batch.front()->rows();
  const Eigen::Index cols = batch.front()->cols();
  Mat<T> x(2, static_cast<Eigen::Index>(batch.size()) * rows * cols);
  Eigen::Index k = 0;
  for (const CMatrix* h : batch) {
    if (h->rows() != rows || h->cols() != cols) throw ShapeError("complex_to_real_batch: mixed matrix shapes");
    for (Eigen::Index a = 0; a < rows; ++a) {
      for (Eigen::Index c = 0; c < cols; ++c, ++k) {
        x(0, k) = static_cast<T>((*h)(a, c).real());
        x(1, k) = static_cast<T>((*h)(a, c).imag());
      }
    }
  }
  return x;
}

template <typename T>
CMatrix real_batch_to_complex(const Mat<T>& x, int batch, int b, int n_antennas, int n_subcarriers) {
  const Eigen::Index per = static_cast<Eigen::Index>(n_antennas) * n_subcarriers;
  if (x.rows() != 2 || x.cols() != per * batch || b < 0 || b >= batch)
    throw ShapeError("real_batch_to_complex: expected 2 x " + std::to_string(per * batch) + " activation");
  CMatrix h(n_antennas, n_subcarriers);
  Eigen::Index k = per * b;
  for (int a = 0; a < n_antennas; ++a)
    for (int c = 0; c < n_subcarriers; ++c, ++k)
      h(a, c) = {static_cast<float>(x(0, k)), static_cast<float>(x(1, k))};
  return h;
}

template Mat<float> complex_to_real_batch<float>(const std::vector<const CMatrix*>&);
template Mat<double> complex_to_real_batch<double>(const std::vector<const CMatrix*>&);
template CMatrix real_batch_to_complex<float>(const Mat<float>&, int, int, int, int);
template CMatrix real_batch_to_complex<double>(const Mat<double>&, int, int, int, int);

Mat<float> complex_to_real_tensor(const CMatrix& h) { return complex_to_real_batch<float>({&h}); }

CMatrix real_tensor_to_complex(const Mat<float>& x, int n_antennas, int n_subcarriers) {
  return real_batch_to_complex<float>(x, 1, 0, n_antennas, n_subcarriers);
}

template <typename T>
T reconstruction_loss(const Mat<T>& reconstruction, const Mat<T>& target, int batch) {
  if (reconstruction.rows() != target.rows() || reconstruction.cols() != target.cols())
    throw ShapeError("reconstruction_loss: shape mismatch");
  return (reconstruction - target).squaredNorm() / static_cast<T>(batch);
}

template <typename T>
Mat<T> reconstruction_loss_grad(const Mat<T>& reconstruction, const Mat<T>& target, int batch) {
  return (reconstruction - target) * (T(2) / static_cast<T>(batch));
}

template float reconstruction_loss<float>(const Mat<float>&, const Mat<float>&, int);
template double reconstruction_loss<double>(const Mat<double>&, const Mat<double>&, int);
template Mat<float> reconstruction_loss_grad<float>(const Mat<float>&, const Mat<float>&, int);
template Mat<double> reconstruction_loss_grad<double>(const Mat<double>&, const Mat<double>&, int);

}  // namespace csilab::nn
