#include "csilab/nn/autoencoder.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace csilab::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace fs = std::filesystem;

void TrainConfig::validate() const {
  // Batch statistics need at least two samples.
  if (batch_size < 2) throw Error("train config: batch_size must be >= 2");
  if (!(learning_rate > 0.0)) throw Error("train config: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw Error("train config: beta1 and beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw Error("train config: epsilon must be > 0");
  if (max_epochs < 0) throw Error("train config: max_epochs must be >= 0");
  if (patience < 0) throw Error("train config: patience must be >= 0");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"batch_size", c.batch_size}, {"learning_rate", c.learning_rate}, {"beta1", c.beta1},
       {"beta2", c.beta2},           {"epsilon", c.epsilon},             {"max_epochs", c.max_epochs},
       {"patience", c.patience},     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.beta1 = j.value("beta1", d.beta1);
  c.beta2 = j.value("beta2", d.beta2);
  c.epsilon = j.value("epsilon", d.epsilon);
  c.max_epochs = j.value("max_epochs", d.max_epochs);
  c.patience = j.value("patience", d.patience);
  c.seed = j.value("seed", d.seed);
}

bool Provenance::ul_only() const {
  return std::all_of(splits_used.begin(), splits_used.end(),
                     [](const std::string& s) { return s.rfind("ul_", 0) == 0; });
}

Autoencoder::Autoencoder(ModelSpec encoder_spec, ModelSpec decoder_spec)
    : encoder_(std::move(encoder_spec)), decoder_(std::move(decoder_spec)) {
  if (encoder_.spec().role != ModelRole::kEncoder || decoder_.spec().role != ModelRole::kDecoder)
    throw Error("autoencoder: spec roles must be (encoder, decoder)");
  if (encoder_.spec().output_shape() != decoder_.spec().input_shape())
    throw ShapeError("autoencoder: encoder output " + encoder_.spec().output_shape().str() +
                     " does not match decoder input " + decoder_.spec().input_shape().str());
  if (encoder_.spec().input_shape() != decoder_.spec().output_shape())
    throw ShapeError("autoencoder: decoder output does not reproduce the encoder input shape");
  for (const auto& p : trainable()) {
    adam_m_.push_back(Mat<float>::Zero(p.value->rows(), p.value->cols()));
    adam_v_.push_back(Mat<float>::Zero(p.value->rows(), p.value->cols()));
  }
}

Autoencoder Autoencoder::build(int n_antennas, int n_subcarriers, int codeword_dim, const std::vector<int>& filters) {
  return Autoencoder(build_encoder(n_antennas, n_subcarriers, codeword_dim, filters),
                     build_decoder(n_antennas, n_subcarriers, codeword_dim, filters));
}

void Autoencoder::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  encoder_.init(rng);
  decoder_.init(rng);
  for (auto& m : adam_m_) m.setZero();
  for (auto& v : adam_v_) v.setZero();
  step = 0;
  epochs_done = 0;
}

std::vector<ParamRef<float>> Autoencoder::trainable() {
  std::vector<ParamRef<float>> out;
  for (auto p : encoder_.params()) {
    p.name = "encoder." + p.name;
    out.push_back(p);
  }
  for (auto p : decoder_.params()) {
    p.name = "decoder." + p.name;
    out.push_back(p);
  }
  return out;
}

std::vector<ParamRef<float>> Autoencoder::all_arrays() {
  std::vector<ParamRef<float>> out = trainable();
  const std::size_t n = out.size();
  for (auto p : encoder_.buffers()) {
    p.name = "encoder." + p.name;
    out.push_back(p);
  }
  for (auto p : decoder_.buffers()) {
    p.name = "decoder." + p.name;
    out.push_back(p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"adam_m." + out[i].name, &adam_m_[i], nullptr});
    out.push_back({"adam_v." + out[i].name, &adam_v_[i], nullptr});
  }
  return out;
}

std::vector<Mat<float>> Autoencoder::snapshot() {
  std::vector<Mat<float>> snap;
  for (const auto& p : all_arrays())
    if (p.name.rfind("adam_", 0) != 0) snap.push_back(*p.value);
  return snap;
}

void Autoencoder::restore(const std::vector<Mat<float>>& snap) {
  std::size_t i = 0;
  for (const auto& p : all_arrays()) {
    if (p.name.rfind("adam_", 0) == 0) continue;
    if (i >= snap.size()) throw Error("autoencoder: snapshot does not match the model");
    *p.value = snap[i++];
  }
  if (i != snap.size()) throw Error("autoencoder: snapshot does not match the model");
}

double evaluate_loss(const Autoencoder& model, const dataset::UlNoisyView& data, int chunk) {
  if (data.size() == 0) throw Error("evaluate_loss: empty data");
  double total = 0.0;
  std::vector<const CMatrix*> ptrs;
  for (std::size_t start = 0; start < data.size(); start += static_cast<std::size_t>(chunk)) {
    const std::size_t end = std::min(data.size(), start + static_cast<std::size_t>(chunk));
    ptrs.clear();
    for (std::size_t i = start; i < end; ++i) ptrs.push_back(&data[i]);
    const int b = static_cast<int>(ptrs.size());
    const Mat<float> x = complex_to_real_batch<float>(ptrs);
    const Mat<float> r = model.decoder().infer(model.encoder().infer(x, b), b);
    total += static_cast<double>((r - x).cast<double>().squaredNorm());
  }
  return total / static_cast<double>(data.size());
}

namespace {

void adam_update(std::vector<ParamRef<float>>& params, std::vector<Mat<float>>& m, std::vector<Mat<float>>& v,
                 std::int64_t step, const TrainConfig& cfg) {
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const auto lr = static_cast<float>(cfg.learning_rate * std::sqrt(1.0 - std::pow(b2, static_cast<double>(step))) /
                                     (1.0 - std::pow(b1, static_cast<double>(step))));
  const auto eps = static_cast<float>(cfg.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Mat<float>& g = *params[i].grad;
    m[i] = static_cast<float>(b1) * m[i] + static_cast<float>(1.0 - b1) * g;
    v[i] = static_cast<float>(b2) * v[i] + static_cast<float>(1.0 - b2) * g.cwiseAbs2();
    params[i].value->array() -= lr * m[i].array() / (v[i].array().sqrt() + eps);
  }
}

}  // namespace

TrainReport train(Autoencoder& model, const dataset::UlNoisyView& train_data, const dataset::UlNoisyView& val_data,
                  const TrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  if (train_data.size() == 0) throw Error("train: empty training split");
  if (val_data.size() == 0) throw Error("train: empty validation split");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  TrainReport report;
  auto params = model.all_arrays();
  std::vector<ParamRef<float>> trainable;
  for (const auto& p : params)
    if (p.grad) trainable.push_back(p);

  const double initial_val = evaluate_loss(model, val_data);
  report.log.push_back({model.epochs_done, evaluate_loss(model, train_data), initial_val, elapsed()});
  if (on_epoch) on_epoch(report.log.back());
  report.best_val_loss = initial_val;
  report.best_epoch = model.epochs_done;
  auto best = model.snapshot();
  if (cfg.max_epochs == 0) return report;

  for (const char* s : {"ul_train", "ul_val"})
    if (std::find(model.provenance.splits_used.begin(), model.provenance.splits_used.end(), s) ==
        model.provenance.splits_used.end())
      model.provenance.splits_used.emplace_back(s);

  std::mt19937_64 rng(mix_seed(cfg.seed + static_cast<std::uint64_t>(model.epochs_done)));
  std::vector<std::size_t> order(train_data.size());
  std::vector<const CMatrix*> ptrs;
  int stale = 0;

  for (int e = 0; e < cfg.max_epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      // A single-sample tail batch has zero batch variance; skip it.
      if (end - start < 2 && order.size() >= 2) continue;
      ptrs.clear();
      for (std::size_t i = start; i < end; ++i) ptrs.push_back(&train_data[order[i]]);
      const int b = static_cast<int>(ptrs.size());

      const Mat<float> x = complex_to_real_batch<float>(ptrs);
      const Mat<float> z = model.encoder().forward(x, b, Mode::kTrain);
      const Mat<float> r = model.decoder().forward(z, b, Mode::kTrain);
      const float loss = reconstruction_loss<float>(r, x, b);
      if (!std::isfinite(loss)) {
        model.restore(best);
        report.diverged = true;
        report.diagnostic = "non-finite training loss at epoch " + std::to_string(model.epochs_done + 1) +
                            ", step " + std::to_string(model.step + 1) + "; restored epoch " +
                            std::to_string(report.best_epoch) + " weights";
        return report;
      }
      loss_sum += static_cast<double>(loss) * b;
      seen += static_cast<std::size_t>(b);

      model.encoder().zero_grad();
      model.decoder().zero_grad();
      const Mat<float> dz = model.decoder().backward(reconstruction_loss_grad<float>(r, x, b));
      model.encoder().backward(dz);
      ++model.step;
      adam_update(trainable, model.adam_m(), model.adam_v(), model.step, cfg);
    }
    ++model.epochs_done;
    const double val = evaluate_loss(model, val_data);
    report.log.push_back({model.epochs_done, loss_sum / static_cast<double>(std::max<std::size_t>(seen, 1)), val,
                          elapsed()});
    if (on_epoch) on_epoch(report.log.back());
    if (!std::isfinite(val)) {
      model.restore(best);
      report.diverged = true;
      report.diagnostic = "non-finite validation loss at epoch " + std::to_string(model.epochs_done) +
                          "; restored epoch " + std::to_string(report.best_epoch) + " weights";
      return report;
    }
    if (val < report.best_val_loss) {
      report.best_val_loss = val;
      report.best_epoch = model.epochs_done;
      best = model.snapshot();
      stale = 0;
    } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }
  // Keep the step counter of the full run while restoring the best weights.
  const auto step = model.step;
  const auto epochs = model.epochs_done;
  model.restore(best);
  model.step = step;
  model.epochs_done = epochs;
  return report;
}

void write_training_log(const std::vector<EpochLog>& log, const fs::path& path) {
  std::ofstream out(path.string() + ".tmp", std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << "epoch,train_loss,val_loss,wall_time_s\n";
  out.precision(9);
  for (const auto& e : log) out << e.epoch << "," << e.train_loss << "," << e.val_loss << "," << e.wall_time_s << "\n";
  out.close();
  if (!out) throw IoError(path.string() + ": write failed");
  fs::rename(path.string() + ".tmp", path);
}

namespace {

constexpr char kCkptMagic[8] = {'C', 'S', 'I', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError(what + ": truncated checkpoint");
  return v;
}

nlohmann::json read_header(std::istream& in, const std::string& what) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCkptMagic, 8) != 0) throw IoError(what + ": not a CSICKPT1 checkpoint");
  const auto len = get<std::uint64_t>(in, what);
  if (len > (std::uint64_t{1} << 30)) throw IoError(what + ": implausible header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw IoError(what + ": truncated checkpoint header");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(what + ": malformed checkpoint header: " + e.what());
  }
}

}  // namespace

void save_checkpoint(Autoencoder& model, const fs::path& path, const nlohmann::json& extra) {
  auto arrays = model.all_arrays();
  nlohmann::json header;
  header["format"] = "CSICKPT1";
  header["encoder"] = to_json(model.encoder_spec());
  header["decoder"] = to_json(model.decoder_spec());
  header["step"] = model.step;
  header["epochs_done"] = model.epochs_done;
  header["provenance"] = {{"splits_used", model.provenance.splits_used},
                          {"ul_only", model.provenance.ul_only()}};
  nlohmann::json index = nlohmann::json::array();
  for (const auto& a : arrays) index.push_back({{"name", a.name}, {"rows", a.value->rows()}, {"cols", a.value->cols()}});
  header["arrays"] = index;
  if (!extra.is_null()) header["extra"] = extra;
  const std::string text = header.dump();

  const fs::path tmp = path.string() + ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(kCkptMagic, 8);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& a : arrays) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(a.name.size()));
    out.write(a.name.data(), static_cast<std::streamsize>(a.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.value->rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(a.value->cols()));
    out.write(reinterpret_cast<const char*>(a.value->data()),
              static_cast<std::streamsize>(a.value->size() * sizeof(float)));
  }
  out.close();
  if (!out) throw IoError(path.string() + ": write failed");
  fs::rename(tmp, path);
}

nlohmann::json read_checkpoint_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open checkpoint");
  return read_header(in, path.string());
}

Autoencoder load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open checkpoint");
  const auto header = read_header(in, path.string());
  Autoencoder model(model_spec_from_json(header.at("encoder")), model_spec_from_json(header.at("decoder")));
  auto arrays = model.all_arrays();
  if (header.at("arrays").size() != arrays.size())
    throw IoError(path.string() + ": array count does not match the stored model spec");
  for (auto& a : arrays) {
    const auto name_len = get<std::uint16_t>(in, path.string());
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto rows = get<std::uint32_t>(in, path.string());
    const auto cols = get<std::uint32_t>(in, path.string());
    if (name != a.name || rows != a.value->rows() || cols != a.value->cols())
      throw IoError(path.string() + ": array '" + name + "' (" + std::to_string(rows) + " x " + std::to_string(cols) +
                    ") does not match expected '" + a.name + "' (" + std::to_string(a.value->rows()) + " x " +
                    std::to_string(a.value->cols()) + ")");
    in.read(reinterpret_cast<char*>(a.value->data()), static_cast<std::streamsize>(a.value->size() * sizeof(float)));
    if (!in) throw IoError(path.string() + ": truncated array '" + name + "'");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes after arrays");
  model.step = header.at("step").get<std::int64_t>();
  model.epochs_done = header.at("epochs_done").get<int>();
  model.provenance.splits_used = header.at("provenance").at("splits_used").get<std::vector<std::string>>();
  return model;
}

Autoencoder load_checkpoint(const fs::path& path, const ModelSpec& expected_encoder,
                            const ModelSpec& expected_decoder) {
  Autoencoder model = load_checkpoint(path);
  if (!(model.encoder_spec() == expected_encoder))
    throw Error(path.string() + ": encoder spec mismatch (checkpoint " +
                to_json(model.encoder_spec()).dump() + ")");
  if (!(model.decoder_spec() == expected_decoder))
    throw Error(path.string() + ": decoder spec mismatch (checkpoint " +
                to_json(model.decoder_spec()).dump() + ")");
  return model;
}

}  // namespace csilab::nn
