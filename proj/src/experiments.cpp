#include "csilab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "csilab/baselines.hpp"
#include "csilab/codec.hpp"
#include "csilab/plot.hpp"

namespace csilab::experiments {

namespace fs = std::filesystem;

namespace {

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string file_stem(const std::string& method, const std::string& frequency) {
  std::string s = method + "_" + frequency;
  for (char& ch : s)
    if (ch == '+') ch = 'p';
  return s;
}

void write_json_atomic(const nlohmann::json& j, const fs::path& path) {
  fs::create_directories(path.parent_path());
  {
    std::ofstream out(path.string() + ".tmp", std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError(path.string() + ": write failed");
  }
  fs::rename(path.string() + ".tmp", path);
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw IoError("missing " + what + ": " + p.string());
}

std::uint64_t train_seed(const ExperimentConfig& c, std::size_t snr_index) {
  return c.train.seed != 0 ? c.train.seed : derive_seed(c.master_seed, snr_index, 100);
}

/// SNR a checkpoint belongs to: its recorded tag if present, else the
/// config's only SNR.
double checkpoint_snr(const ExperimentConfig& c, const fs::path& ckpt) {
  if (fs::exists(ckpt)) {
    const auto header = nn::read_checkpoint_header(ckpt);
    if (header.contains("extra") && header["extra"].contains("snr_db")) {
      const double snr = header["extra"]["snr_db"].get<double>();
      if (std::find(c.snr_db.begin(), c.snr_db.end(), snr) == c.snr_db.end())
        throw Error(ckpt.string() + ": checkpoint trained at " + fmt(snr) + " dB, which is not in snr_db");
      return snr;
    }
  }
  if (c.snr_db.size() != 1)
    throw Error(ckpt.string() + ": cannot tell which snr_db entry this checkpoint belongs to; list a single snr_db");
  return c.snr_db.front();
}

codec::FeedbackCodec load_codec(const ExperimentConfig& c, const fs::path& ckpt) {
  require_file(ckpt, "checkpoint");
  const int n_a = c.scenario.n_antennas();
  const int n_c = c.scenario.n_subcarriers;
  return codec::FeedbackCodec(nn::load_checkpoint(ckpt, nn::build_encoder(n_a, n_c, c.codeword_dim, c.filters),
                                                  nn::build_decoder(n_a, n_c, c.codeword_dim, c.filters)));
}

std::vector<CMatrix> idft_batch(const std::vector<CMatrix>& ys, int k) {
  std::vector<CMatrix> out;
  out.reserve(ys.size());
  for (const auto& y : ys) out.push_back(baselines::idft_feedback(y, k));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  scenario.validate();
  train.validate();
  if (splits.train < 2 || splits.val < 1 || splits.test < 1)
    throw Error("config: splits need train >= 2, val >= 1, test >= 1");
  if (snr_db.empty()) throw Error("config: snr_db must list at least one value");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw Error("config: snr_db entries must be finite");
  if (codeword_dim < 1) throw Error("config: codeword_dim must be >= 1");
  if (methods.empty()) throw Error("config: methods must be nonempty");
  for (const auto& m : methods)
    if (m != "AE" && m != "IDFT" && m != "noisy") throw Error("config: unknown method '" + m + "'");
  for (int b : quantizer_bits)
    if (b != 0 && (b < 1 || b > codec::kMaxBits))
      throw Error("config: quantizer_bits entries must be 0 (unquantized) or in [1, 16]");
  if (idft_taps < 0 || idft_taps > scenario.n_subcarriers)
    throw Error("config: idft_taps must lie in [0, n_subcarriers]");
  for (double g : eval_dl_gaps_hz)
    if (std::find(scenario.dl_gaps_hz.begin(), scenario.dl_gaps_hz.end(), g) == scenario.dl_gaps_hz.end())
      throw Error("config: eval_dl_gaps_hz entry " + fmt(g) + " is not a scenario DL gap");
  if (rate.n_users < 1 || rate.n_users > scenario.n_antennas())
    throw Error("config: rate.n_users must lie in [1, N_a]");
  if (static_cast<std::uint64_t>(rate.n_users) > splits.test)
    throw Error("config: rate.n_users exceeds the test split size");
  if (rate.n_draws < 1) throw Error("config: rate.n_draws must be >= 1");
  if (rate.tx_power_db.empty()) throw Error("config: rate.tx_power_db must be nonempty");
  // Shape errors surface here rather than after data generation.
  nn::build_encoder(scenario.n_antennas(), scenario.n_subcarriers, codeword_dim, filters);
}

bool ExperimentConfig::uses(const std::string& method) const {
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

int ExperimentConfig::resolved_idft_taps() const {
  if (idft_taps > 0) return idft_taps;
  return std::clamp(codeword_dim / (2 * scenario.n_antennas()), 1, scenario.n_subcarriers);
}

std::vector<int> ExperimentConfig::evaluated_dl_indices() const {
  std::vector<int> out;
  for (std::size_t g = 0; g < scenario.dl_gaps_hz.size(); ++g)
    if (eval_dl_gaps_hz.empty() || std::find(eval_dl_gaps_hz.begin(), eval_dl_gaps_hz.end(),
                                             scenario.dl_gaps_hz[g]) != eval_dl_gaps_hz.end())
      out.push_back(static_cast<int>(g));
  return out;
}

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  // Same user-to-antenna load as 8 users on 64 antennas. Many draws keep the
  // Monte Carlo error well below the rate cost of 7/8-bit quantization.
  c.rate.n_users = 2;
  c.rate.n_draws = 10000;
  return c;
}

ExperimentConfig ExperimentConfig::paper() {
  ExperimentConfig c;
  c.scenario = channel::ScenarioConfig::paper();
  c.splits = {48000, 6000, 6000};
  c.codeword_dim = 256;
  c.rate.n_users = 8;
  c.rate.n_draws = 100;
  return c;
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"scenario", c.scenario},
                     {"splits", {{"train", c.splits.train}, {"val", c.splits.val}, {"test", c.splits.test}}},
                     {"snr_db", c.snr_db},
                     {"master_seed", c.master_seed},
                     {"codeword_dim", c.codeword_dim},
                     {"filters", c.filters},
                     {"train", c.train},
                     {"quantizer_bits", c.quantizer_bits},
                     {"methods", c.methods},
                     {"idft_taps", c.idft_taps},
                     {"eval_dl_gaps_hz", c.eval_dl_gaps_hz},
                     {"rate",
                      {{"snr_db", c.rate_snr_db},
                       {"tx_power_db", c.rate.tx_power_db},
                       {"n_users", c.rate.n_users},
                       {"n_draws", c.rate.n_draws},
                       {"seed", c.rate.seed},
                       {"max_carriers", c.rate.max_carriers}}},
                     {"output_dir", c.output_dir.string()}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  static const char* const kKeys[] = {"profile", "scenario", "splits",         "snr_db",          "master_seed",
                                      "codeword_dim", "filters", "train",      "quantizer_bits",  "methods",
                                      "idft_taps",    "eval_dl_gaps_hz", "rate", "output_dir"};
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; }) == std::end(kKeys))
      throw Error("config: unknown key '" + key + "'");

  const std::string profile = j.value("profile", std::string("desk"));
  if (profile == "desk")
    c = ExperimentConfig::desk();
  else if (profile == "paper")
    c = ExperimentConfig::paper();
  else
    throw Error("config: profile must be 'desk' or 'paper'");

  if (j.contains("scenario")) {
    // Scenario keys override the profile's scenario field by field.
    nlohmann::json s = c.scenario;
    s.merge_patch(j["scenario"]);
    c.scenario = s.get<channel::ScenarioConfig>();
  }
  if (j.contains("splits")) {
    const auto& s = j["splits"];
    c.splits.train = s.value("train", c.splits.train);
    c.splits.val = s.value("val", c.splits.val);
    c.splits.test = s.value("test", c.splits.test);
  }
  c.snr_db = j.value("snr_db", c.snr_db);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.codeword_dim = j.value("codeword_dim", c.codeword_dim);
  c.filters = j.value("filters", c.filters);
  if (j.contains("train")) {
    nlohmann::json t = c.train;
    t.merge_patch(j["train"]);
    c.train = t.get<nn::TrainConfig>();
  }
  c.quantizer_bits = j.value("quantizer_bits", c.quantizer_bits);
  c.methods = j.value("methods", c.methods);
  c.idft_taps = j.value("idft_taps", c.idft_taps);
  c.eval_dl_gaps_hz = j.value("eval_dl_gaps_hz", c.eval_dl_gaps_hz);
  if (j.contains("rate")) {
    const auto& r = j["rate"];
    c.rate_snr_db = r.value("snr_db", c.rate_snr_db);
    c.rate.tx_power_db = r.value("tx_power_db", c.rate.tx_power_db);
    c.rate.n_users = r.value("n_users", c.rate.n_users);
    c.rate.n_draws = r.value("n_draws", c.rate.n_draws);
    c.rate.seed = r.value("seed", c.rate.seed);
    c.rate.max_carriers = r.value("max_carriers", c.rate.max_carriers);
  }
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": invalid JSON: " + e.what());
  }
  ExperimentConfig c;
  try {
    c = j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return c;
}

// ---------------------------------------------------------------- layout

std::string snr_tag(double snr_db) {
  std::string s = fmt(snr_db);
  for (char& ch : s) {
    if (ch == '-') ch = 'm';
    if (ch == '.') ch = 'p';
  }
  return "snr_" + s;
}

std::string frequency_label(const channel::ScenarioConfig& s, int dl_index) {
  if (dl_index < 0) return "UL";
  return "DL+" + fmt(s.dl_gaps_hz.at(static_cast<std::size_t>(dl_index)) / 1e6) + "MHz";
}

fs::path data_dir(const ExperimentConfig& c, double snr) { return c.output_dir / "data" / snr_tag(snr); }
fs::path model_dir(const ExperimentConfig& c, double snr) { return c.output_dir / "models" / snr_tag(snr); }
fs::path default_checkpoint(const ExperimentConfig& c, double snr) { return model_dir(c, snr) / "checkpoint.ckpt"; }
fs::path eval_dir(const ExperimentConfig& c, double snr) { return c.output_dir / "eval" / snr_tag(snr); }
fs::path rate_dir(const ExperimentConfig& c, double snr) { return c.output_dir / "rate" / snr_tag(snr); }

std::string ae_label(int bits) { return bits == 0 ? "AE" : "AE-" + std::to_string(bits) + "bit"; }

// ---------------------------------------------------------------- generate

bool dataset_up_to_date(const ExperimentConfig& c, double snr) {
  const fs::path dir = data_dir(c, snr);
  std::ifstream in(dir / "dataset.json");
  if (!in) return false;
  nlohmann::json m;
  try {
    in >> m;
    if (m.at("scenario") != nlohmann::json(c.scenario)) return false;
    if (m.at("snr_db").get<double>() != snr || m.at("master_seed").get<std::uint64_t>() != c.master_seed) return false;
    const std::pair<dataset::Split, std::uint64_t> splits[] = {{dataset::Split::kTrain, c.splits.train},
                                                               {dataset::Split::kVal, c.splits.val},
                                                               {dataset::Split::kTest, c.splits.test}};
    for (const auto& [split, n] : splits) {
      const auto& e = m.at("splits").at(dataset::split_name(split));
      const fs::path p = dataset::split_path(dir, split);
      if (e.at("n_samples").get<std::uint64_t>() != n || !fs::exists(p)) return false;
      if (e.at("crc32").get<std::uint32_t>() != dataset::file_crc32(p)) return false;
    }
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  return true;
}

std::vector<GenerateResult> cmd_generate(const ExperimentConfig& c, const Logger& log) {
  c.validate();
  std::vector<GenerateResult> out;
  for (double snr : c.snr_db) {
    GenerateResult r{snr, data_dir(c, snr), false};
    if (dataset_up_to_date(c, snr)) {
      say(log, "generate " + snr_tag(snr) + ": up to date (" + r.dir.string() + ")");
    } else {
      say(log, "generate " + snr_tag(snr) + ": writing " +
                   std::to_string(c.splits.train + c.splits.val + c.splits.test) + " samples to " + r.dir.string());
      dataset::generate_dataset(c.scenario, c.splits, snr, c.master_seed, r.dir);
      r.regenerated = true;
    }
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- train

std::vector<TrainResult> cmd_train(const ExperimentConfig& c, const std::optional<fs::path>& checkpoint,
                                   const Logger& log) {
  c.validate();
  std::vector<double> snrs = c.snr_db;
  if (checkpoint) snrs = {checkpoint_snr(c, *checkpoint)};

  std::vector<TrainResult> out;
  for (double snr : snrs) {
    const std::size_t snr_index =
        static_cast<std::size_t>(std::find(c.snr_db.begin(), c.snr_db.end(), snr) - c.snr_db.begin());
    const fs::path dir = data_dir(c, snr);
    for (auto split : {dataset::Split::kTrain, dataset::Split::kVal})
      require_file(dataset::split_path(dir, split), "dataset split (run generate first)");

    const fs::path ckpt = checkpoint ? *checkpoint : default_checkpoint(c, snr);
    const int n_a = c.scenario.n_antennas();
    const int n_c = c.scenario.n_subcarriers;
    nn::Autoencoder model = [&] {
      if (checkpoint && fs::exists(ckpt)) {
        say(log, "train " + snr_tag(snr) + ": resuming " + ckpt.string());
        return nn::load_checkpoint(ckpt, nn::build_encoder(n_a, n_c, c.codeword_dim, c.filters),
                                   nn::build_decoder(n_a, n_c, c.codeword_dim, c.filters));
      }
      auto m = nn::Autoencoder::build(n_a, n_c, c.codeword_dim, c.filters);
      m.init(train_seed(c, snr_index));
      return m;
    }();

    const auto train_view = dataset::UlNoisyView::load(dataset::split_path(dir, dataset::Split::kTrain));
    const auto val_view = dataset::UlNoisyView::load(dataset::split_path(dir, dataset::Split::kVal));
    nn::TrainConfig cfg = c.train;
    cfg.seed = train_seed(c, snr_index);

    const std::string tag = snr_tag(snr);
    auto report = nn::train(model, train_view, val_view, cfg, [&](const nn::EpochLog& e) {
      say(log, "train " + tag + ": epoch " + std::to_string(e.epoch) + " train_loss " + fmt(e.train_loss) +
                   " val_loss " + fmt(e.val_loss) + " t " + fmt(e.wall_time_s, 4) + "s");
    });

    nlohmann::json extra{{"snr_db", snr},
                         {"train", cfg},
                         {"best_epoch", report.best_epoch},
                         {"best_val_loss", report.best_val_loss},
                         {"dataset_master_seed", c.master_seed}};
    if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
    nn::save_checkpoint(model, ckpt, extra);
    const fs::path log_path =
        checkpoint ? fs::path(ckpt.string() + ".log.csv") : model_dir(c, snr) / "training_log.csv";
    nn::write_training_log(report.log, log_path);
    if (report.diverged) throw Error("train " + tag + ": " + report.diagnostic + "; checkpoint " + ckpt.string());
    say(log, "train " + tag + ": best epoch " + std::to_string(report.best_epoch) + " val_loss " +
                 fmt(report.best_val_loss) + " -> " + ckpt.string());
    out.push_back({snr, ckpt, std::move(report)});
  }
  return out;
}

// ---------------------------------------------------------------- evaluate

const metrics::MetricReport& EvaluateResult::find(const std::string& method, const std::string& frequency) const {
  for (const auto& r : reports)
    if (r.method == method && r.frequency == frequency) return r;
  throw Error("no report for " + method + " at " + frequency);
}

std::vector<EvaluateResult> cmd_evaluate(const ExperimentConfig& c, const std::optional<fs::path>& checkpoint,
                                         const Logger& log) {
  c.validate();
  std::vector<double> snrs = c.snr_db;
  if (checkpoint && c.uses("AE")) snrs = {checkpoint_snr(c, *checkpoint)};

  std::vector<int> freqs{-1};
  for (int g : c.evaluated_dl_indices()) freqs.push_back(g);

  std::vector<EvaluateResult> out;
  for (double snr : snrs) {
    const std::string tag = snr_tag(snr);
    const fs::path test_file = dataset::split_path(data_dir(c, snr), dataset::Split::kTest);
    require_file(test_file, "dataset split (run generate first)");

    std::optional<codec::FeedbackCodec> ae;
    if (c.uses("AE")) ae.emplace(load_codec(c, checkpoint ? *checkpoint : default_checkpoint(c, snr)));

    EvaluateResult res{snr, c.resolved_idft_taps(), {}};
    for (int g : freqs) {
      const std::string freq = frequency_label(c.scenario, g);
      const auto pairs = dataset::load_pairs(test_file, {g});
      auto add = [&](const std::vector<CMatrix>& est, const std::string& method) {
        auto r = metrics::evaluate(est, pairs.truth, method, freq, snr);
        say(log, "evaluate " + tag + ": " + method + " " + freq + " mean_nmse " + fmt(r.mean_nmse()) + " mean_rho " +
                     fmt(r.mean_rho()));
        res.reports.push_back(std::move(r));
      };
      if (ae) {
        // Encode once; every quantizer setting reuses the same codewords.
        const auto zs = ae->encode_batch(pairs.noisy, freq);
        for (int bits : c.quantizer_bits) {
          if (bits == 0) {
            add(ae->decode_batch(zs), ae_label(bits));
          } else {
            std::vector<codec::Codeword> zq;
            zq.reserve(zs.size());
            for (const auto& z : zs) zq.push_back(codec::dequantize(codec::quantize(z, bits)));
            add(ae->decode_batch(zq), ae_label(bits));
          }
        }
      }
      if (c.uses("IDFT")) add(idft_batch(pairs.noisy, res.idft_taps), "IDFT");
      if (c.uses("noisy")) add(pairs.noisy, "noisy");
    }

    const fs::path dir = eval_dir(c, snr);
    metrics::write_summary_csv(res.reports, dir / "summary.csv");
    std::vector<plot::Series> nmse_cdfs, rho_cdfs;
    std::vector<plot::Box> nmse_boxes, rho_boxes;
    for (const auto& r : res.reports) {
      const std::string stem = file_stem(r.method, r.frequency);
      metrics::write_report_csv(r, dir / "samples" / (stem + ".csv"));
      const auto nc = metrics::empirical_cdf(r.nmse);
      const auto rc = metrics::empirical_cdf(r.rho);
      metrics::write_cdf_csv(nc, dir / "cdf" / ("nmse_" + stem + ".csv"));
      metrics::write_cdf_csv(rc, dir / "cdf" / ("rho_" + stem + ".csv"));
      const std::string label = r.method + " " + r.frequency;
      nmse_cdfs.push_back(plot::cdf_series(label, nc));
      rho_cdfs.push_back(plot::cdf_series(label, rc));
      nmse_boxes.push_back({label, r.nmse_box()});
      rho_boxes.push_back({label, r.rho_box()});
    }
    const std::string title = " at SNR " + fmt(snr) + " dB";
    plot::line_chart(dir / "nmse_cdf.svg", {"NMSE CDF" + title, "NMSE", "CDF", true}, nmse_cdfs);
    plot::line_chart(dir / "rho_cdf.svg", {"Cosine similarity CDF" + title, "rho", "CDF", false}, rho_cdfs);
    plot::box_chart(dir / "nmse_box.svg", {"NMSE" + title, "", "NMSE", false}, nmse_boxes);
    plot::box_chart(dir / "rho_box.svg", {"Cosine similarity" + title, "", "rho", false}, rho_boxes);

    nlohmann::json meta{{"snr_db", snr},
                        {"idft_taps", res.idft_taps},
                        {"test_file", test_file.filename().string()},
                        {"test_crc32", dataset::file_crc32(test_file)},
                        {"dl_training_free", true}};
    if (ae) meta["checkpoint_provenance"] = ae->model().provenance.splits_used;
    write_json_atomic(meta, dir / "evaluate.json");
    out.push_back(std::move(res));
  }
  return out;
}

// ---------------------------------------------------------------- rate

const metrics::RateCurve& RateResult::find(const std::string& method, const std::string& frequency) const {
  for (const auto& r : curves)
    if (r.method == method && r.frequency == frequency) return r;
  throw Error("no rate curve for " + method + " at " + frequency);
}

RateResult cmd_rate(const ExperimentConfig& c, const std::optional<fs::path>& checkpoint, const Logger& log) {
  c.validate();
  const double snr = checkpoint && c.uses("AE") ? checkpoint_snr(c, *checkpoint) : c.rate_snr_db;
  const std::string tag = snr_tag(snr);
  const fs::path test_file = dataset::split_path(data_dir(c, snr), dataset::Split::kTest);
  require_file(test_file, "dataset split (run generate first)");

  std::optional<codec::FeedbackCodec> ae;
  if (c.uses("AE")) ae.emplace(load_codec(c, checkpoint ? *checkpoint : default_checkpoint(c, snr)));

  metrics::RateConfig rc = c.rate;
  if (rc.seed == 0) rc.seed = derive_seed(c.master_seed, 0, 200);

  const auto dl = c.evaluated_dl_indices();
  if (dl.empty()) throw Error("rate: the scenario has no DL gap to evaluate");
  RateResult res{snr, {}};
  for (int g : dl) {
    const std::string freq = frequency_label(c.scenario, g);
    const auto pairs = dataset::load_pairs(test_file, {g});
    auto add = [&](const std::vector<CMatrix>& est, const std::string& method) {
      auto curve = metrics::zf_per_user_rate(pairs.truth, est, rc, method, freq);
      say(log, "rate " + tag + ": " + method + " " + freq + " at " + fmt(curve.tx_power_db.back()) + " dB: " +
                   fmt(curve.rate_bpcu.back()) + " bpcu");
      res.curves.push_back(std::move(curve));
    };
    add(pairs.truth, "Perfect");
    if (ae) {
      const auto zs = ae->encode_batch(pairs.noisy, freq);
      for (int bits : c.quantizer_bits) {
        std::vector<codec::Codeword> zq = zs;
        if (bits != 0)
          for (auto& z : zq) z = codec::dequantize(codec::quantize(z, bits));
        add(ae->decode_batch(zq), ae_label(bits));
      }
    }
    if (c.uses("IDFT")) add(idft_batch(pairs.noisy, c.resolved_idft_taps()), "IDFT");
  }

  const fs::path dir = rate_dir(c, snr);
  metrics::write_rate_csv(res.curves, dir / "rate_curves.csv");
  std::vector<plot::Series> series;
  for (const auto& curve : res.curves) {
    metrics::write_rate_csv({curve}, dir / "curves" / (file_stem(curve.method, curve.frequency) + ".csv"));
    series.push_back({curve.method + " " + curve.frequency, curve.tx_power_db, curve.rate_bpcu,
                      curve.frequency != frequency_label(c.scenario, dl.front())});
  }
  plot::line_chart(dir / "rate.svg",
                   {"ZF per-user rate, " + std::to_string(rc.n_users) + " users, SNR " + fmt(snr) + " dB",
                    "Average TX power [dB]", "Per-user rate [bpcu]", false},
                   series);
  return res;
}

}  // namespace csilab::experiments
