#include "csilab/codec.hpp"

#include <algorithm>
#include <cmath>

namespace csilab::codec {

namespace {

constexpr std::size_t kChunk = 256;

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits) throw Error("quantizer bits must lie in [1, 16], got " + std::to_string(bits));
}

}  // namespace

QuantizedCodeword quantize(const Codeword& z, int bits, std::size_t* clamped) {
  check_bits(bits);
  const std::uint32_t levels = 1u << bits;
  const double step = 2.0 / levels;
  QuantizedCodeword q;
  q.bits = bits;
  q.indices.reserve(z.values.size());
  for (float v : z.values) {
    double x = v;
    if (!(x >= -1.0 && x <= 1.0)) {
      if (clamped) ++*clamped;
      x = std::isnan(x) ? 0.0 : std::clamp(x, -1.0, 1.0);
    }
    const auto idx = static_cast<std::int64_t>(std::floor((x + 1.0) / step));
    q.indices.push_back(static_cast<std::uint32_t>(std::clamp<std::int64_t>(idx, 0, levels - 1)));
  }
  return q;
}

Codeword dequantize(const QuantizedCodeword& q) {
  check_bits(q.bits);
  const std::uint32_t levels = 1u << q.bits;
  const double step = 2.0 / levels;
  Codeword z;
  z.values.reserve(q.indices.size());
  for (std::uint32_t idx : q.indices) {
    if (idx >= levels) throw Error("dequantize: index " + std::to_string(idx) + " exceeds " + std::to_string(q.bits) + "-bit range");
    z.values.push_back(static_cast<float>(-1.0 + (idx + 0.5) * step));
  }
  return z;
}

std::vector<std::uint8_t> pack(const QuantizedCodeword& q) {
  check_bits(q.bits);
  if (q.indices.size() > 0xFFFF) throw Error("pack: codeword longer than 65535 entries");
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(q.indices.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(q.indices.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(q.bits));
  std::uint32_t acc = 0;
  int filled = 0;
  for (std::uint32_t idx : q.indices) {
    if (idx >> q.bits) throw Error("pack: index exceeds bit width");
    for (int b = q.bits - 1; b >= 0; --b) {
      acc = (acc << 1) | ((idx >> b) & 1u);
      if (++filled == 8) {
        out.push_back(static_cast<std::uint8_t>(acc));
        acc = 0;
        filled = 0;
      }
    }
  }
  if (filled > 0) out.push_back(static_cast<std::uint8_t>(acc << (8 - filled)));
  return out;
}

QuantizedCodeword unpack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 3) throw Error("unpack: buffer shorter than the 3-byte header");
  const std::size_t d_z = (std::size_t{bytes[0]} << 8) | bytes[1];
  QuantizedCodeword q;
  q.bits = bytes[2];
  check_bits(q.bits);
  const std::size_t payload_bytes = (d_z * static_cast<std::size_t>(q.bits) + 7) / 8;
  if (bytes.size() != 3 + payload_bytes)
    throw Error("unpack: expected " + std::to_string(3 + payload_bytes) + " bytes, got " + std::to_string(bytes.size()));
  std::size_t bit = 0;
  q.indices.reserve(d_z);
  for (std::size_t i = 0; i < d_z; ++i) {
    std::uint32_t idx = 0;
    for (int b = 0; b < q.bits; ++b, ++bit) {
      const std::uint8_t byte = bytes[3 + bit / 8];
      idx = (idx << 1) | ((byte >> (7 - bit % 8)) & 1u);
    }
    q.indices.push_back(idx);
  }
  return q;
}

FeedbackCodec::FeedbackCodec(nn::Autoencoder model) : model_(std::move(model)) {
  if (!model_.provenance.ul_only()) {
    std::string used;
    for (const auto& s : model_.provenance.splits_used) used += (used.empty() ? "" : ",") + s;
    throw Error("codec: refusing a model whose training used non-UL data (" + used + ")");
  }
}

FeedbackCodec FeedbackCodec::from_checkpoint(const std::filesystem::path& path) {
  return FeedbackCodec(nn::load_checkpoint(path));
}

std::vector<Codeword> FeedbackCodec::encode_batch(const std::vector<CMatrix>& ys, const std::string& source) const {
  std::vector<Codeword> out;
  out.reserve(ys.size());
  std::vector<const CMatrix*> ptrs;
  for (std::size_t start = 0; start < ys.size(); start += kChunk) {
    const std::size_t end = std::min(ys.size(), start + kChunk);
    ptrs.clear();
    for (std::size_t i = start; i < end; ++i) {
      if (ys[i].rows() != n_antennas() || ys[i].cols() != n_subcarriers())
        throw ShapeError("encode: expected " + std::to_string(n_antennas()) + " x " + std::to_string(n_subcarriers()) +
                         " channel, got " + std::to_string(ys[i].rows()) + " x " + std::to_string(ys[i].cols()));
      ptrs.push_back(&ys[i]);
    }
    const int b = static_cast<int>(ptrs.size());
    const nn::Mat<float> z = model_.encoder().infer(nn::complex_to_real_batch<float>(ptrs), b);
    for (int k = 0; k < b; ++k) out.push_back({std::vector<float>(z.col(k).begin(), z.col(k).end()), source});
  }
  return out;
}

std::vector<CMatrix> FeedbackCodec::decode_batch(const std::vector<Codeword>& zs) const {
  std::vector<CMatrix> out;
  out.reserve(zs.size());
  const int d_z = codeword_dim();
  for (std::size_t start = 0; start < zs.size(); start += kChunk) {
    const std::size_t end = std::min(zs.size(), start + kChunk);
    const int b = static_cast<int>(end - start);
    nn::Mat<float> z(d_z, b);
    for (int k = 0; k < b; ++k) {
      const auto& v = zs[start + static_cast<std::size_t>(k)].values;
      if (static_cast<int>(v.size()) != d_z)
        throw ShapeError("decode: codeword length " + std::to_string(v.size()) + ", expected " + std::to_string(d_z));
      std::copy(v.begin(), v.end(), z.col(k).begin());
    }
    const nn::Mat<float> x = model_.decoder().infer(z, b);
    for (int k = 0; k < b; ++k) out.push_back(nn::real_batch_to_complex<float>(x, b, k, n_antennas(), n_subcarriers()));
  }
  return out;
}

Codeword FeedbackCodec::encode(const CMatrix& y, std::string source) const {
  return encode_batch({y}, source).front();
}

CMatrix FeedbackCodec::decode(const Codeword& z) const { return decode_batch({z}).front(); }

std::vector<CMatrix> FeedbackCodec::roundtrip_batch(const std::vector<CMatrix>& ys, std::optional<int> bits) const {
  auto zs = encode_batch(ys);
  if (bits)
    for (auto& z : zs) z = dequantize(quantize(z, *bits));
  return decode_batch(zs);
}

RoundTrip FeedbackCodec::feedback_roundtrip(const CMatrix& y, std::optional<int> bits) const {
  Codeword z = encode(y);
  std::size_t payload = z.values.size() * 32;
  if (bits) {
    const auto q = quantize(z, *bits);
    payload = q.payload_bits();
    z = dequantize(q);
  }
  return {decode(z), payload};
}

}  // namespace csilab::codec
