#include <doctest.h>

#include "csilab/common.hpp"
#include "csilab/nn/model_spec.hpp"

using namespace csilab;
using namespace csilab::nn;

namespace {

struct Row {
  LayerKind kind;
  Shape out;
  std::int64_t params;
};

// Expected layers at N_a = 64, N_c = 160, d_z = 256.
const std::vector<Row> kEncoderTable{
    {LayerKind::kConvStride2, {32, 80, 8}, 152},     {LayerKind::kBatchNorm, {32, 80, 8}, 32},
    {LayerKind::kRelu, {32, 80, 8}, 0},              {LayerKind::kConvStride2, {16, 40, 16}, 1168},
    {LayerKind::kBatchNorm, {16, 40, 16}, 64},       {LayerKind::kRelu, {16, 40, 16}, 0},
    {LayerKind::kConvStride2, {8, 20, 32}, 4640},    {LayerKind::kBatchNorm, {8, 20, 32}, 128},
    {LayerKind::kRelu, {8, 20, 32}, 0},              {LayerKind::kConvStride2, {4, 10, 64}, 18496},
    {LayerKind::kBatchNorm, {4, 10, 64}, 256},       {LayerKind::kRelu, {4, 10, 64}, 0},
    {LayerKind::kConvStride2, {2, 5, 128}, 73856},   {LayerKind::kBatchNorm, {2, 5, 128}, 512},
    {LayerKind::kRelu, {2, 5, 128}, 0},              {LayerKind::kFlatten, Shape::vec(1280), 0},
    {LayerKind::kDense, Shape::vec(256), 327936},    {LayerKind::kTanh, Shape::vec(256), 0},
};

const std::vector<Row> kDecoderTable{
    {LayerKind::kDense, Shape::vec(1280), 328960},            {LayerKind::kReshape, {2, 5, 128}, 0},
    {LayerKind::kConvTransposeStride2, {4, 10, 128}, 147584}, {LayerKind::kBatchNorm, {4, 10, 128}, 512},
    {LayerKind::kRelu, {4, 10, 128}, 0},                      {LayerKind::kConvTransposeStride2, {8, 20, 64}, 73792},
    {LayerKind::kBatchNorm, {8, 20, 64}, 256},                {LayerKind::kRelu, {8, 20, 64}, 0},
    {LayerKind::kConvTransposeStride2, {16, 40, 32}, 18464},  {LayerKind::kBatchNorm, {16, 40, 32}, 128},
    {LayerKind::kRelu, {16, 40, 32}, 0},                      {LayerKind::kConvTransposeStride2, {32, 80, 16}, 4624},
    {LayerKind::kBatchNorm, {32, 80, 16}, 64},                {LayerKind::kRelu, {32, 80, 16}, 0},
    {LayerKind::kConvTransposeStride2, {64, 160, 8}, 1160},   {LayerKind::kBatchNorm, {64, 160, 8}, 32},
    {LayerKind::kRelu, {64, 160, 8}, 0},                      {LayerKind::kConvUnitStride, {64, 160, 2}, 146},
};

void check_table(const ModelSpec& spec, const std::vector<Row>& table) {
  REQUIRE(spec.layers.size() == table.size());
  const auto counts = count_parameters(spec);
  for (std::size_t i = 0; i < table.size(); ++i) {
    CAPTURE(i);
    CHECK(spec.layers[i].kind == table[i].kind);
    CHECK(spec.layers[i].out == table[i].out);
    CHECK(counts.per_layer[i] == table[i].params);
    if (i > 0) CHECK(spec.layers[i].in == spec.layers[i - 1].out);
  }
}

}  // namespace

TEST_SUITE("model_spec") {
  TEST_CASE("full-size encoder layer table") {
    const auto enc = build_encoder(64, 160, 256);
    CHECK(enc.input_shape() == Shape{64, 160, 2});
    check_table(enc, kEncoderTable);
    CHECK(count_parameters(enc).total == 427240);
  }

  TEST_CASE("full-size decoder layer table") {
    const auto dec = build_decoder(64, 160, 256);
    CHECK(dec.input_shape() == Shape::vec(256));
    check_table(dec, kDecoderTable);
    CHECK(count_parameters(dec).total == 575722);
  }

  TEST_CASE("compression factor") {
    CHECK(compression_factor(64, 160, 256) == 80.0);
    CHECK(compression_factor(16, 32, 32) == 32.0);
  }

  TEST_CASE("desk dimensions build with ceiling halving") {
    const auto enc = build_encoder(16, 32, 32);
    CHECK(enc.layers[0].out == Shape{8, 16, 8});
    CHECK(enc.layers[12].out == Shape{1, 1, 128});
    CHECK(enc.layers[15].out == Shape::vec(128));
    CHECK(enc.output_shape() == Shape::vec(32));
    const auto dec = build_decoder(16, 32, 32);
    CHECK(dec.output_shape() == Shape{16, 32, 2});
    CHECK(dec.layers[1].out == Shape{1, 1, 128});
  }

  TEST_CASE("odd dimensions mirror exactly") {
    const auto enc = build_encoder(6, 10, 4, {2, 2, 2, 2, 2});
    const auto dec = build_decoder(6, 10, 4, {2, 2, 2, 2, 2});
    CHECK(enc.layers[0].out == Shape{3, 5, 2});
    CHECK(enc.layers[3].out == Shape{2, 3, 2});
    CHECK(dec.output_shape() == Shape{6, 10, 2});
    // Each transposed conv returns to the input shape of its encoder partner.
    CHECK(dec.layers[14].out.h == 6);
    CHECK(dec.layers[11].out == Shape{3, 5, 2});
  }

  TEST_CASE("invalid builder arguments") {
    CHECK_THROWS_AS(build_encoder(0, 32, 32), ShapeError);
    CHECK_THROWS_AS(build_encoder(16, 32, 0), ShapeError);
    CHECK_THROWS_AS(build_encoder(16, 32, 32, {8, 16, 32}), ShapeError);
    CHECK_THROWS_AS(build_decoder(16, -1, 32), ShapeError);
  }

  TEST_CASE("JSON round trip and mismatch rejection") {
    const auto enc = build_encoder(16, 32, 32);
    const auto j = to_json(enc);
    CHECK(model_spec_from_json(j) == enc);
    auto bad = j;
    bad["layers"][0]["units"] = 9;
    CHECK_THROWS_AS(model_spec_from_json(bad), Error);
  }

  TEST_CASE("layer names") {
    for (auto k : {LayerKind::kConvStride2, LayerKind::kConvTransposeStride2, LayerKind::kConvUnitStride,
                   LayerKind::kBatchNorm, LayerKind::kRelu, LayerKind::kTanh, LayerKind::kFlatten, LayerKind::kReshape,
                   LayerKind::kDense})
      CHECK(layer_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(layer_kind_from_string("pool"), Error);
  }

  TEST_CASE("summary lists totals") {
    const std::string s = summary(build_encoder(64, 160, 256));
    CHECK(s.find("427240") != std::string::npos);
  }
}
