#include <doctest.h>

#include <cmath>
#include <limits>

#include "csilab/nn/autoencoder.hpp"
#include "support.hpp"

using namespace csilab;
using namespace csilab::nn;

namespace {

const std::vector<int> kTinyFilters{2, 2, 2, 2, 2};

Autoencoder tiny_model(std::uint64_t seed = 1) {
  auto m = Autoencoder::build(8, 8, 4, kTinyFilters);
  m.init(seed);
  return m;
}

dataset::UlNoisyView random_view(std::size_t n, std::uint64_t seed) {
  std::vector<CMatrix> y;
  for (std::size_t i = 0; i < n; ++i) y.push_back(testing::random_cmatrix(8, 8, seed + i));
  return dataset::UlNoisyView(std::move(y));
}

TrainConfig quick_config(int epochs) {
  TrainConfig c;
  c.batch_size = 8;
  c.max_epochs = epochs;
  c.patience = 0;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_SUITE("autoencoder") {
  TEST_CASE("training lowers the loss and records UL-only provenance") {
    auto model = tiny_model();
    const auto train_data = random_view(40, 100), val_data = random_view(10, 900);
    std::vector<EpochLog> seen;
    const auto report = train(model, train_data, val_data, quick_config(6), [&](const EpochLog& e) { seen.push_back(e); });
    REQUIRE(report.log.size() == 7);
    CHECK(seen.size() == 7);
    CHECK(report.log[0].epoch == 0);
    // row 0 is an inference-mode pass; later rows average batch-norm train mode
    CHECK(report.log.back().train_loss < report.log[1].train_loss);
    CHECK_FALSE(report.diverged);
    CHECK(model.epochs_done == 6);
    CHECK(model.step == 6 * 5);
    CHECK(model.provenance.ul_only());
    CHECK(model.provenance.splits_used == std::vector<std::string>{"ul_train", "ul_val"});
    // the returned weights are the best-validation ones
    CHECK(evaluate_loss(model, val_data) == doctest::Approx(report.best_val_loss).epsilon(1e-6));
  }

  TEST_CASE("training is reproducible under a fixed seed") {
    auto a = tiny_model(3), b = tiny_model(3);
    const auto d = random_view(20, 1), v = random_view(4, 50);
    train(a, d, v, quick_config(2));
    train(b, d, v, quick_config(2));
    const auto sa = a.snapshot(), sb = b.snapshot();
    REQUIRE(sa.size() == sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);
  }

  TEST_CASE("early stopping with patience") {
    auto model = tiny_model();
    auto cfg = quick_config(200);
    cfg.patience = 2;
    cfg.learning_rate = 0.05;
    const auto report = train(model, random_view(16, 1), random_view(4, 2), cfg);
    CHECK(report.log.size() < 201);
    CHECK(report.best_epoch <= model.epochs_done);
  }

  TEST_CASE("non-finite loss aborts and restores the best weights") {
    auto model = tiny_model();
    std::vector<CMatrix> y;
    for (int i = 0; i < 16; ++i) y.push_back(testing::random_cmatrix(8, 8, static_cast<std::uint64_t>(i)));
    const auto before = model.snapshot();
    y[3](0, 0) = {std::numeric_limits<float>::quiet_NaN(), 0.0f};
    const auto report = train(model, dataset::UlNoisyView(y), random_view(4, 70), quick_config(3));
    CHECK(report.diverged);
    CHECK(report.diagnostic.find("non-finite") != std::string::npos);
    const auto after = model.snapshot();
    for (std::size_t i = 0; i < after.size(); ++i) CHECK(after[i].allFinite());
    CHECK(after[0] == before[0]);
  }

  TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.batch_size = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.learning_rate = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.beta2 = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    const nlohmann::json j = TrainConfig{};
    CHECK(j.get<TrainConfig>().batch_size == 64);
    CHECK(j["epsilon"] == 1e-7);
  }

  TEST_CASE("empty splits are rejected") {
    auto model = tiny_model();
    CHECK_THROWS_AS(train(model, dataset::UlNoisyView({}), random_view(2, 1), quick_config(1)), Error);
  }

  TEST_CASE("checkpoint round trip is exact") {
    testing::TempDir tmp("ckpt_roundtrip");
    auto model = tiny_model();
    train(model, random_view(16, 1), random_view(4, 2), quick_config(2));
    save_checkpoint(model, tmp / "m.ckpt", {{"note", "x"}});

    auto loaded = load_checkpoint(tmp / "m.ckpt");
    CHECK(loaded.step == model.step);
    CHECK(loaded.epochs_done == model.epochs_done);
    CHECK(loaded.provenance.splits_used == model.provenance.splits_used);
    CHECK(loaded.encoder_spec() == model.encoder_spec());
    const auto a = model.snapshot(), b = loaded.snapshot();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    const CMatrix y = testing::random_cmatrix(8, 8, 77);
    const auto x = complex_to_real_batch<float>({&y});
    CHECK(model.decoder().infer(model.encoder().infer(x, 1), 1) == loaded.decoder().infer(loaded.encoder().infer(x, 1), 1));
    CHECK(read_checkpoint_header(tmp / "m.ckpt")["extra"]["note"] == "x");
  }

  TEST_CASE("checkpoint loading fails loudly") {
    testing::TempDir tmp("ckpt_errors");
    auto model = tiny_model();
    save_checkpoint(model, tmp / "m.ckpt");

    CHECK_THROWS_AS(load_checkpoint(tmp / "m.ckpt", build_encoder(8, 8, 8, kTinyFilters), build_decoder(8, 8, 8, kTinyFilters)),
                    Error);
    CHECK_NOTHROW(load_checkpoint(tmp / "m.ckpt", build_encoder(8, 8, 4, kTinyFilters), build_decoder(8, 8, 4, kTinyFilters)));
    CHECK_THROWS_AS(load_checkpoint(tmp / "nope.ckpt"), IoError);

    std::string bytes = testing::slurp(tmp / "m.ckpt");
    std::ofstream(tmp / "bad.ckpt", std::ios::binary) << "XX" << bytes.substr(2);
    CHECK_THROWS_AS(load_checkpoint(tmp / "bad.ckpt"), IoError);
    std::ofstream(tmp / "short.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 9);
    CHECK_THROWS_AS(load_checkpoint(tmp / "short.ckpt"), IoError);
  }

  TEST_CASE("resume continues the step counter and optimizer state") {
    testing::TempDir tmp("ckpt_resume");
    const auto d = random_view(16, 1), v = random_view(4, 2);
    auto model = tiny_model();
    train(model, d, v, quick_config(1));
    const auto steps = model.step;
    save_checkpoint(model, tmp / "m.ckpt");
    auto resumed = load_checkpoint(tmp / "m.ckpt");
    train(resumed, d, v, quick_config(1));
    CHECK(resumed.step == 2 * steps);
    CHECK(resumed.epochs_done == 2);
    CHECK(resumed.adam_m().front().norm() > 0.0f);
  }

  TEST_CASE("training log CSV") {
    testing::TempDir tmp("trainlog");
    write_training_log({{0, 2.0, 3.0, 0.0}, {1, 1.5, 2.5, 0.25}}, tmp / "log.csv");
    const std::string s = testing::slurp(tmp / "log.csv");
    CHECK(s.rfind("epoch,train_loss,val_loss,wall_time_s\n", 0) == 0);
    CHECK(s.find("1,1.5,2.5,0.25") != std::string::npos);
  }
}
