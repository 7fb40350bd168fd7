#pragma once

// Deployed feedback path: encoder inference on the terminal side, uniform
// scalar quantization of the codeword, decoder inference at the base station.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csilab/common.hpp"
#include "csilab/nn/autoencoder.hpp"

namespace csilab::codec {

struct Codeword {
  std::vector<float> values;  // every entry in [-1, 1]
  std::string source;         // frequency tag, e.g. "UL" or "DL0"
};

struct QuantizedCodeword {
  std::vector<std::uint32_t> indices;  // each in [0, 2^bits - 1]
  int bits = 8;

  std::size_t payload_bits() const { return indices.size() * static_cast<std::size_t>(bits); }
};

inline constexpr int kMaxBits = 16;

/// Mid-rise uniform quantizer on [-1, 1]: step 2 / 2^b,
/// index = clamp(floor((v + 1) / step), 0, 2^b - 1). Out-of-range inputs are
/// clamped and counted in *clamped when given.
QuantizedCodeword quantize(const Codeword& z, int bits, std::size_t* clamped = nullptr);

/// Reconstruction level -1 + (index + 0.5) * step.
Codeword dequantize(const QuantizedCodeword& q);

/// Wire format: d_z u16 (big-endian) | bits u8 | indices packed MSB-first,
/// big-endian, zero-padded to a whole byte.
std::vector<std::uint8_t> pack(const QuantizedCodeword& q);
QuantizedCodeword unpack(std::span<const std::uint8_t> bytes);

struct RoundTrip {
  CMatrix h_hat;
  std::size_t payload_bits = 0;
};

/// Holds a trained autoencoder and runs it in inference mode only. All
/// methods are const and safe to call concurrently.
class FeedbackCodec {
 public:
  /// Refuses models whose provenance records any non-UL training split.
  explicit FeedbackCodec(nn::Autoencoder model);
  static FeedbackCodec from_checkpoint(const std::filesystem::path& path);

  int codeword_dim() const { return model_.encoder_spec().codeword_dim; }
  int n_antennas() const { return model_.encoder_spec().n_antennas; }
  int n_subcarriers() const { return model_.encoder_spec().n_subcarriers; }
  const nn::Autoencoder& model() const { return model_; }

  Codeword encode(const CMatrix& y, std::string source = "") const;
  CMatrix decode(const Codeword& z) const;

  /// encode -> (quantize -> dequantize when bits is set) -> decode.
  RoundTrip feedback_roundtrip(const CMatrix& y, std::optional<int> bits = std::nullopt) const;

  /// Batched forms; chunked to bound memory.
  std::vector<Codeword> encode_batch(const std::vector<CMatrix>& ys, const std::string& source = "") const;
  std::vector<CMatrix> decode_batch(const std::vector<Codeword>& zs) const;
  std::vector<CMatrix> roundtrip_batch(const std::vector<CMatrix>& ys, std::optional<int> bits = std::nullopt) const;

 private:
  nn::Autoencoder model_;
};

}  // namespace csilab::codec
