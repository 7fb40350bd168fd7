// End-to-end acceptance run at desk scale. Prints one PASS/FAIL line per
// criterion and exits nonzero if any criterion fails.
//
//   csilab_acceptance --config configs/desk.json --work <dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "csilab/baselines.hpp"
#include "csilab/codec.hpp"
#include "csilab/experiments.hpp"
#include "csilab/metrics.hpp"
#include "csilab/nn/network.hpp"

using namespace csilab;
namespace ex = csilab::experiments;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Outcome> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << detail << std::endl;
}

std::string num(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Files under dir, relative path -> contents.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

// ------------------------------------------------------------- criterion 1, 2

void architecture() {
  struct Row {
    std::string shape;
    std::int64_t params;
  };
  const std::vector<Row> enc_table{{"32x80x8", 152},  {"32x80x8", 32},   {"32x80x8", 0},     {"16x40x16", 1168},
                                   {"16x40x16", 64},  {"16x40x16", 0},   {"8x20x32", 4640},  {"8x20x32", 128},
                                   {"8x20x32", 0},    {"4x10x64", 18496}, {"4x10x64", 256},  {"4x10x64", 0},
                                   {"2x5x128", 73856}, {"2x5x128", 512}, {"2x5x128", 0},     {"1280", 0},
                                   {"256", 327936},   {"256", 0}};
  const std::vector<Row> dec_table{{"1280", 328960},    {"2x5x128", 0},      {"4x10x128", 147584}, {"4x10x128", 512},
                                   {"4x10x128", 0},     {"8x20x64", 73792},  {"8x20x64", 256},     {"8x20x64", 0},
                                   {"16x40x32", 18464}, {"16x40x32", 128},   {"16x40x32", 0},      {"32x80x16", 4624},
                                   {"32x80x16", 64},    {"32x80x16", 0},     {"64x160x8", 1160},   {"64x160x8", 32},
                                   {"64x160x8", 0},     {"64x160x2", 146}};
  auto shape_str = [](const nn::Shape& s) {
    return s.flat ? std::to_string(s.c) : std::to_string(s.h) + "x" + std::to_string(s.w) + "x" + std::to_string(s.c);
  };
  int mismatches = 0;
  auto check = [&](const nn::ModelSpec& spec, const std::vector<Row>& table) {
    const auto counts = nn::count_parameters(spec);
    if (spec.layers.size() != table.size()) return ++mismatches, counts.total;
    for (std::size_t i = 0; i < table.size(); ++i)
      if (shape_str(spec.layers[i].out) != table[i].shape || counts.per_layer[i] != table[i].params) ++mismatches;
    return counts.total;
  };
  const auto enc_total = check(nn::build_encoder(64, 160, 256), enc_table);
  const auto dec_total = check(nn::build_decoder(64, 160, 256), dec_table);
  report(1, "architecture fidelity",
         mismatches == 0 && enc_total == 427240 && dec_total == 575722,
         "encoder total " + std::to_string(enc_total) + " (427240), decoder total " + std::to_string(dec_total) +
             " (575722), per-layer mismatches " + std::to_string(mismatches));

  codec::Codeword z;
  z.values.assign(256, 0.0f);
  const double factor = nn::compression_factor(64, 160, 256);
  const auto b8 = codec::quantize(z, 8).payload_bits();
  const auto b7 = codec::quantize(z, 7).payload_bits();
  report(2, "compression accounting", factor == 80.0 && b8 == 2048 && b7 == 1792,
         "factor " + num(factor) + " (80), payload b=8 " + std::to_string(b8) + " (2048), b=7 " + std::to_string(b7) +
             " (1792)");
}

// ------------------------------------------------------------- criterion 8

void oracles() {
  std::vector<std::string> failed;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);

  // DFT vs direct summation
  double dft_err = 0.0;
  for (int nc = 1; nc <= 16; ++nc) {
    CMatrixD y(3, nc);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = {n01(rng), n01(rng)};
    const CMatrixD fast = baselines::to_delay_domain(y);
    for (int a = 0; a < 3; ++a)
      for (int m = 0; m < nc; ++m) {
        std::complex<double> acc = 0.0;
        for (int c = 0; c < nc; ++c) acc += y(a, c) * std::polar(1.0, 2.0 * kPi * c * m / nc);
        dft_err = std::max(dft_err, std::abs(acc / std::sqrt(double(nc)) - fast(a, m)));
      }
    dft_err = std::max(dft_err, (baselines::from_delay_domain(fast) - y).cwiseAbs().maxCoeff());
  }
  if (!(dft_err <= 1e-6)) failed.push_back("dft " + num(dft_err));

  // loss vs scalar re-implementation
  {
    const int batch = 3, na = 4, nc = 6;
    std::vector<CMatrix> r(batch), t(batch);
    std::vector<const CMatrix*> pr, pt;
    double expect = 0.0;
    for (int b = 0; b < batch; ++b) {
      r[b].resize(na, nc);
      t[b].resize(na, nc);
      for (Eigen::Index i = 0; i < r[b].size(); ++i) {
        r[b](i) = {float(n01(rng)), float(n01(rng))};
        t[b](i) = {float(n01(rng)), float(n01(rng))};
        const double dr = double(r[b](i).real()) - t[b](i).real(), di = double(r[b](i).imag()) - t[b](i).imag();
        expect += dr * dr + di * di;
      }
      pr.push_back(&r[b]);
      pt.push_back(&t[b]);
    }
    expect /= batch;
    const double got = nn::reconstruction_loss<double>(nn::complex_to_real_batch<double>(pr),
                                                       nn::complex_to_real_batch<double>(pt), batch);
    if (!(std::abs(got - expect) <= 1e-6 * expect)) failed.push_back("loss");
  }

  // quantizer bound, exhaustive for b <= 4 on a 1e-3 grid
  for (int b = 1; b <= 4; ++b)
    for (int i = -1000; i <= 1000; ++i) {
      const float v = float(i * 1e-3);
      const float q = codec::dequantize(codec::quantize({{v}, ""}, b)).values[0];
      if (!(std::abs(double(v) - q) <= std::ldexp(1.0, -b) + 1e-7)) {
        failed.push_back("quantizer b=" + std::to_string(b));
        break;
      }
    }

  // metric identities
  {
    CMatrix h(4, 6);
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = {float(n01(rng)), float(n01(rng))};
    const bool ok = metrics::nmse(h, h) == 0.0 && std::abs(metrics::nmse(CMatrix::Zero(4, 6), h) - 1.0) < 1e-12 &&
                    std::abs(metrics::cosine_similarity(std::complex<float>(0.4f, -1.3f) * h, h) - 1.0) < 1e-6;
    if (!ok) failed.push_back("metrics");
  }

  // gradient check on the tiny model
  double worst_rel = 0.0;
  {
    const std::vector<int> filters{2, 2, 2, 2, 2};
    nn::Network<double> enc(nn::build_encoder(8, 8, 4, filters)), dec(nn::build_decoder(8, 8, 4, filters));
    std::mt19937_64 init(2024);
    enc.init(init);
    dec.init(init);
    const int batch = 4;
    nn::Mat<double> x(2, batch * 64);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n01(rng);
    auto loss = [&] {
      return nn::reconstruction_loss<double>(
          dec.forward(enc.forward(x, batch, nn::Mode::kTrain), batch, nn::Mode::kTrain), x, batch);
    };
    enc.zero_grad();
    dec.zero_grad();
    const auto rec = dec.forward(enc.forward(x, batch, nn::Mode::kTrain), batch, nn::Mode::kTrain);
    enc.backward(dec.backward(nn::reconstruction_loss_grad<double>(rec, x, batch)));
    const double h = 1e-6;
    for (auto* net : {&enc, &dec})
      for (auto& p : net->params()) {
        nn::Mat<double> g(p.value->rows(), p.value->cols());
        for (Eigen::Index i = 0; i < p.value->size(); ++i) {
          double& w = p.value->data()[i];
          const double s = w;
          w = s + h;
          const double up = loss();
          w = s - h;
          const double down = loss();
          w = s;
          g(i) = (up - down) / (2 * h);
        }
        // zero-gradient biases ahead of a batch norm: absolute round-off check
        const double err = (g - *p.grad).norm(), scale = std::max(g.norm(), p.grad->norm());
        worst_rel = std::max(worst_rel, scale < 1e-6 ? (err < 1e-6 ? 0.0 : 1.0) : err / scale);
      }
  }
  if (!(worst_rel < 1e-4)) failed.push_back("gradient " + num(worst_rel));

  std::string detail = "dft max err " + num(dft_err, 3) + " (<=1e-6), gradient worst rel err " + num(worst_rel, 3) +
                       " (<1e-4), loss/quantizer/metric identities ";
  detail += failed.empty() ? "ok" : "failed:";
  for (const auto& f : failed) detail += " " + f;
  report(8, "oracle equivalence suite", failed.empty(), detail);
}

// ------------------------------------------------------------- pipeline criteria

void pipeline(ex::ExperimentConfig cfg, bool reuse) {
  const ex::Logger log = [](const std::string& m) { std::cerr << "  " << m << "\n"; };
  for (double snr : {10.0, 0.0})
    if (std::find(cfg.snr_db.begin(), cfg.snr_db.end(), snr) == cfg.snr_db.end())
      throw Error("config must list snr_db 10 and 0");
  cfg.methods = {"AE", "IDFT", "noisy"};
  cfg.quantizer_bits = {0, 8, 7};
  cfg.rate_snr_db = 10.0;
  if (cfg.scenario.dl_gaps_hz.empty()) throw Error("config needs at least one DL gap");

  ex::cmd_generate(cfg, log);
  std::map<double, double> minutes;
  for (double snr : cfg.snr_db) {
    if (reuse && fs::exists(ex::default_checkpoint(cfg, snr))) continue;
    fs::remove(ex::default_checkpoint(cfg, snr));
    auto one = cfg;
    one.snr_db = {snr};
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = ex::cmd_train(one, std::nullopt, [&](const std::string& m) {
      if (m.find(": epoch") == std::string::npos) log(m);
    });
    minutes[snr] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    std::cerr << "  trained " << ex::snr_tag(snr) << " in " << num(minutes[snr], 3) << " min, best epoch "
              << res.front().report.best_epoch << "\n";
  }

  const auto evals = ex::cmd_evaluate(cfg, std::nullopt, log);
  auto at = [&](double snr) -> const ex::EvaluateResult& {
    for (const auto& e : evals)
      if (e.snr_db == snr) return e;
    throw Error("no evaluation at " + num(snr) + " dB");
  };
  const auto& e10 = at(10.0);
  const auto& e0 = at(0.0);
  std::vector<std::string> dl_labels;
  for (int g : cfg.evaluated_dl_indices()) dl_labels.push_back(ex::frequency_label(cfg.scenario, g));
  const std::string dl120 = ex::frequency_label(cfg.scenario, 0);

  // 3
  {
    const double ul = e10.find("AE", "UL").mean_nmse();
    const double noisy = e10.find("noisy", "UL").mean_nmse();
    std::string t = minutes.count(10.0) ? ", training " + num(minutes[10.0], 3) + " min (<= 30)" : "";
    const bool fast = !minutes.count(10.0) || minutes[10.0] <= 30.0;
    report(3, "unsupervised denoising", ul < 0.1 && fast,
           "SNR 10 dB UL test mean NMSE " + num(ul) + " (< 0.1; noisy input " + num(noisy) + ")" + t);
  }

  // 4
  {
    const auto& ul = e10.find("AE", "UL");
    const auto& d = e10.find("AE", dl120);
    const double ratio = d.mean_nmse() / ul.mean_nmse();
    const double rho_ratio = d.mean_rho() / ul.mean_rho();
    report(4, "UL to DL generalization", ratio <= 2.0 && rho_ratio >= 0.9,
           dl120 + " mean NMSE " + num(d.mean_nmse()) + " = " + num(ratio, 3) + "x UL (<= 2), mean rho " +
               num(d.mean_rho()) + " = " + num(rho_ratio, 3) + "x UL (>= 0.9); zero DL training samples");
  }

  // 5
  {
    bool ok = true;
    std::string detail = "SNR 0 dB median NMSE";
    for (const auto& f : dl_labels) {
      const double ae = e0.find("AE", f).nmse_box().median;
      const double idft = e0.find("IDFT", f).nmse_box().median;
      ok = ok && ae * 2.0 <= idft;
      detail += " " + f + ": AE " + num(ae) + " vs IDFT " + num(idft) + " (factor " + num(idft / ae, 3) + ", >= 2);";
    }
    detail += " IDFT keeps " + std::to_string(e0.idft_taps) + " taps";
    report(5, "baseline dominance", ok, detail);
  }

  // 6
  {
    bool ok = true;
    double worst8 = 0.0, worst7 = 0.0;
    for (const auto* e : {&e10, &e0})
      for (const std::string& f : [&] {
             auto v = dl_labels;
             v.insert(v.begin(), "UL");
             return v;
           }()) {
        const double base = e->find("AE", f).mean_nmse();
        const double q8 = e->find("AE-8bit", f).mean_nmse();
        const double q7 = e->find("AE-7bit", f).mean_nmse();
        const double idft = e->find("IDFT", f).mean_nmse();
        worst8 = std::max(worst8, std::abs(q8 - base) / base);
        worst7 = std::max(worst7, std::abs(q7 - base) / base);
        ok = ok && std::abs(q8 - base) <= 0.10 * base && std::abs(q7 - base) <= 0.25 * base && q8 < idft && q7 < idft;
      }
    report(6, "quantization robustness", ok,
           "worst relative change b=8 " + num(100 * worst8, 3) + "% (<= 10%), b=7 " + num(100 * worst7, 3) +
               "% (<= 25%), both below IDFT at every frequency and SNR");
  }

  // 7
  {
    const auto rate = ex::cmd_rate(cfg, std::nullopt, log);
    bool ok = true;
    std::string detail;
    for (const auto& f : dl_labels) {
      const auto& perfect = rate.find("Perfect", f);
      const auto& ae = rate.find("AE", f);
      const auto& q8 = rate.find("AE-8bit", f);
      const auto& q7 = rate.find("AE-7bit", f);
      const auto& idft = rate.find("IDFT", f);
      const auto& p = perfect.tx_power_db;
      bool order = true, above = true;
      for (std::size_t i = 0; i < p.size(); ++i) {
        order = order && perfect.rate_bpcu[i] >= ae.rate_bpcu[i] && ae.rate_bpcu[i] >= q8.rate_bpcu[i] &&
                q8.rate_bpcu[i] >= q7.rate_bpcu[i] && q7.rate_bpcu[i] >= 0.0;
        if (p[i] >= 10.0) above = above && q7.rate_bpcu[i] > idft.rate_bpcu[i];
      }
      auto slope = [&](const metrics::RateCurve& c) {
        std::size_t i25 = p.size(), i30 = p.size();
        for (std::size_t i = 0; i < p.size(); ++i) {
          if (p[i] == 25.0) i25 = i;
          if (p[i] == 30.0) i30 = i;
        }
        if (i25 == p.size() || i30 == p.size()) throw Error("power grid must contain 25 and 30 dB");
        return (c.rate_bpcu[i30] - c.rate_bpcu[i25]) / 5.0;
      };
      const bool saturates = slope(idft) < 0.5 * slope(perfect);
      ok = ok && order && above && saturates;
      detail += f + ": ordering " + (order ? "ok" : "violated") + ", AE family above IDFT at P>=10 " +
                (above ? "ok" : "violated") + ", 25-30 dB slope IDFT " + num(slope(idft), 3) + " vs Perfect " +
                num(slope(perfect), 3) + " bpcu/dB; at 30 dB Perfect " + num(perfect.rate_bpcu.back()) + " AE " +
                num(ae.rate_bpcu.back()) + " AE-8 " + num(q8.rate_bpcu.back()) + " AE-7 " +
                num(q7.rate_bpcu.back()) + " IDFT " + num(idft.rate_bpcu.back()) + "; ";
    }
    detail += std::to_string(cfg.rate.n_draws) + " draws";
    report(7, "rate-curve shape", ok && cfg.rate.n_draws >= 100, detail);
  }

  // 9
  {
    auto copy = cfg;
    copy.output_dir = cfg.output_dir.parent_path() / "determinism";
    fs::remove_all(copy.output_dir);
    copy.snr_db = {10.0};
    ex::cmd_generate(copy);
    const bool gen_same = tree(ex::data_dir(copy, 10.0)) == tree(ex::data_dir(cfg, 10.0));

    const auto first = tree(ex::eval_dir(cfg, 10.0));
    auto again = cfg;
    again.snr_db = {10.0};
    ex::cmd_evaluate(again, std::nullopt);
    const auto second = tree(ex::eval_dir(cfg, 10.0));
    const bool eval_same = first == second;
    report(9, "determinism", gen_same && eval_same,
           std::string("regenerated dataset ") + (gen_same ? "byte-identical" : "DIFFERS") + ", re-evaluation of " +
               std::to_string(second.size()) + " output files " + (eval_same ? "byte-identical" : "DIFFERS"));
    fs::remove_all(copy.output_dir);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csilab acceptance run"};
  std::string config_path, work_dir = "acceptance_work";
  bool reuse = false;
  app.add_option("--config", config_path, "desk-scale experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--work", work_dir, "scratch directory");
  app.add_flag("--reuse", reuse, "reuse existing checkpoints in the work directory");
  CLI11_PARSE(app, argc, argv);

  architecture();
  oracles();
  try {
    ex::ExperimentConfig cfg = ex::load_config(config_path);
    cfg.output_dir = fs::path(work_dir) / "run";
    cfg.validate();
    pipeline(cfg, reuse);
  } catch (const std::exception& e) {
    std::cout << "FAIL pipeline aborted: " << e.what() << std::endl;
  }

  int failed = 0;
  for (const auto& r : g_results) failed += r.pass ? 0 : 1;
  const bool complete = g_results.size() == 9;
  std::cout << (failed == 0 && complete ? "ALL PASS" : "NOT ALL PASS") << ": " << g_results.size() - failed << " of 9 criteria passed"
            << std::endl;
  return failed == 0 && complete ? 0 : 1;
}
