#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace csilab::nn {

enum class LayerKind {
  kConvStride2,
  kConvTransposeStride2,
  /// Unit-stride transposed convolution (the decoder's output layer).
  kConvUnitStride,
  kBatchNorm,
  kRelu,
  kTanh,
  kFlatten,
  kReshape,
  kDense,
};

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

/// Height x width x channels; a flat vector is stored as 1 x 1 x n with flat = true.
struct Shape {
  int h = 1;
  int w = 1;
  int c = 1;
  bool flat = false;

  static Shape vec(int n) { return {1, 1, n, true}; }
  std::int64_t size() const { return std::int64_t{h} * w * c; }
  std::string str() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline constexpr int kKernel = 3;

struct LayerSpec {
  LayerKind kind;
  Shape in;
  Shape out;
  /// Output channels (convs) or units (dense); 0 for parameter-free layers.
  int units = 0;

  std::int64_t parameter_count() const;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

enum class ModelRole { kEncoder, kDecoder };

struct ModelSpec {
  ModelRole role = ModelRole::kEncoder;
  int n_antennas = 0;
  int n_subcarriers = 0;
  int codeword_dim = 0;
  std::vector<int> filters;
  std::vector<LayerSpec> layers;

  Shape input_shape() const { return layers.front().in; }
  Shape output_shape() const { return layers.back().out; }
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline const std::vector<int> kDefaultFilters{8, 16, 32, 64, 128};

/// Input n_a x n_c x 2, five (conv stride 2, batch norm, relu) blocks,
/// flatten, dense to d_z, tanh. Spatial dims halve with ceiling division.
ModelSpec build_encoder(int n_antennas, int n_subcarriers, int codeword_dim,
                        const std::vector<int>& filters = kDefaultFilters);

/// Mirror of build_encoder: dense to the flattened bottleneck, reshape, five
/// (transposed conv stride 2, batch norm, relu) blocks with reversed filter
/// counts, then a unit-stride transposed conv to 2 channels with no activation.
/// Every transposed conv reproduces the input shape of the matching encoder conv.
ModelSpec build_decoder(int n_antennas, int n_subcarriers, int codeword_dim,
                        const std::vector<int>& filters = kDefaultFilters);

struct ParameterCount {
  std::vector<std::int64_t> per_layer;  // aligned with ModelSpec::layers
  std::int64_t total = 0;      // includes batch-norm moving statistics
  std::int64_t trainable = 0;
};

ParameterCount count_parameters(const ModelSpec& spec);

/// (n_a * n_c * 2) / d_z.
double compression_factor(int n_antennas, int n_subcarriers, int codeword_dim);

/// Serializes the builder arguments plus the layer table. from_json rebuilds
/// the spec from the builder arguments and rejects a mismatching layer table.
nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

/// Human-readable table in the layout "layer type | output shape | #params".
std::string summary(const ModelSpec& spec);

}  // namespace csilab::nn
