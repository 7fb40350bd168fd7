// Python bindings. Matrices cross as numpy complex64 arrays (antennas x
// subcarriers); configs cross as JSON text and are parsed on the C++ side.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "csilab/baselines.hpp"
#include "csilab/channel_sim.hpp"
#include "csilab/codec.hpp"
#include "csilab/experiments.hpp"
#include "csilab/metrics.hpp"
#include "csilab/nn/model_spec.hpp"

namespace py = pybind11;
using namespace csilab;
namespace ex = csilab::experiments;

namespace {

channel::ScenarioConfig scenario_from(const std::string& profile, const std::string& overrides) {
  nlohmann::json j;
  if (profile == "desk")
    j = channel::ScenarioConfig::desk();
  else if (profile == "paper")
    j = channel::ScenarioConfig::paper();
  else
    throw Error("unknown scenario profile '" + profile + "'");
  if (!overrides.empty()) j.merge_patch(nlohmann::json::parse(overrides));
  auto s = j.get<channel::ScenarioConfig>();
  s.validate();
  return s;
}

ex::ExperimentConfig experiment_from(const std::string& text, const std::optional<std::string>& out,
                                     std::optional<std::uint64_t> seed) {
  auto c = nlohmann::json::parse(text).get<ex::ExperimentConfig>();
  if (out) c.output_dir = *out;
  if (seed) c.master_seed = *seed;
  c.validate();
  return c;
}

py::dict counts_dict(const nn::ModelSpec& spec) {
  const auto c = nn::count_parameters(spec);
  py::dict d;
  d["per_layer"] = c.per_layer;
  d["total"] = c.total;
  d["trainable"] = c.trainable;
  return d;
}

py::dict report_dict(const metrics::MetricReport& r) {
  py::dict d;
  d["method"] = r.method;
  d["frequency"] = r.frequency;
  d["snr_db"] = r.snr_db;
  d["nmse"] = r.nmse;
  d["rho"] = r.rho;
  d["mean_nmse"] = r.mean_nmse();
  d["mean_rho"] = r.mean_rho();
  return d;
}

ex::Logger py_logger(const std::optional<std::function<void(const std::string&)>>& cb) {
  if (!cb) return {};
  return [f = *cb](const std::string& m) {
    py::gil_scoped_acquire gil;
    f(m);
  };
}

}  // namespace

PYBIND11_MODULE(_csilab, m) {
  m.doc() = "csilab core bindings";

  // Registered base first: translators run most-recent first.
  auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());

  // channel
  m.def("scenario_json", [](const std::string& profile, const std::string& overrides) {
    return nlohmann::json(scenario_from(profile, overrides)).dump();
  }, py::arg("profile") = "desk", py::arg("overrides") = "");
  m.def("generate_sample", [](const std::string& profile, const std::string& overrides, double snr_db,
                              std::uint64_t master_seed, std::uint64_t index) {
    const auto s = channel::generate_sample(scenario_from(profile, overrides), snr_db, master_seed, index);
    py::dict d;
    d["h_ul"] = s.h_ul;
    d["y_ul"] = s.y_ul;
    d["h_dl"] = s.h_dl;
    d["y_dl"] = s.y_dl;
    d["seed"] = s.seed;
    return d;
  }, py::arg("profile"), py::arg("overrides"), py::arg("snr_db"), py::arg("master_seed"), py::arg("index"));

  // model
  m.def("encoder_parameters", [](int na, int nc, int dz, std::vector<int> filters) {
    return counts_dict(nn::build_encoder(na, nc, dz, filters));
  }, py::arg("n_antennas"), py::arg("n_subcarriers"), py::arg("codeword_dim"),
     py::arg("filters") = nn::kDefaultFilters);
  m.def("decoder_parameters", [](int na, int nc, int dz, std::vector<int> filters) {
    return counts_dict(nn::build_decoder(na, nc, dz, filters));
  }, py::arg("n_antennas"), py::arg("n_subcarriers"), py::arg("codeword_dim"),
     py::arg("filters") = nn::kDefaultFilters);
  m.def("compression_factor", &nn::compression_factor);

  // codec
  m.def("quantize", [](std::vector<float> z, int bits) {
    std::size_t clamped = 0;
    auto q = codec::quantize({std::move(z), ""}, bits, &clamped);
    return py::make_tuple(q.indices, clamped);
  }, py::arg("z"), py::arg("bits"));
  m.def("dequantize", [](std::vector<std::uint32_t> idx, int bits) {
    return codec::dequantize({std::move(idx), bits}).values;
  }, py::arg("indices"), py::arg("bits"));
  m.def("pack", [](std::vector<std::uint32_t> idx, int bits) {
    const auto b = codec::pack({std::move(idx), bits});
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
  }, py::arg("indices"), py::arg("bits"));
  m.def("unpack", [](const py::bytes& data) {
    const std::string s = data;
    const auto q = codec::unpack({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    return py::make_tuple(q.indices, q.bits);
  });

  py::class_<codec::FeedbackCodec>(m, "FeedbackCodec")
      .def_static("from_checkpoint", &codec::FeedbackCodec::from_checkpoint)
      .def_property_readonly("codeword_dim", &codec::FeedbackCodec::codeword_dim)
      .def_property_readonly("n_antennas", &codec::FeedbackCodec::n_antennas)
      .def_property_readonly("n_subcarriers", &codec::FeedbackCodec::n_subcarriers)
      .def("encode", [](const codec::FeedbackCodec& c, const CMatrix& y) { return c.encode(y).values; })
      .def("decode", [](const codec::FeedbackCodec& c, std::vector<float> z) { return c.decode({std::move(z), ""}); })
      .def("roundtrip", [](const codec::FeedbackCodec& c, const CMatrix& y, std::optional<int> bits) {
        const auto r = c.feedback_roundtrip(y, bits);
        return py::make_tuple(r.h_hat, r.payload_bits);
      }, py::arg("y"), py::arg("bits") = py::none());

  // baseline and metrics
  m.def("idft_feedback", &baselines::idft_feedback, py::arg("y"), py::arg("k"));
  m.def("nmse", [](const CMatrix& h_hat, const CMatrix& h) { return metrics::nmse(h_hat, h); });
  m.def("cosine_similarity", [](const CMatrix& h_hat, const CMatrix& h) { return metrics::cosine_similarity(h_hat, h); });
  m.def("zf_rate", [](const std::vector<CMatrix>& truth, const std::vector<CMatrix>& est, std::vector<double> power,
                      int n_users, int n_draws, std::uint64_t seed) {
    metrics::RateConfig cfg;
    cfg.tx_power_db = std::move(power);
    cfg.n_users = n_users;
    cfg.n_draws = n_draws;
    cfg.seed = seed;
    return metrics::zf_per_user_rate(truth, est, cfg, "", "").rate_bpcu;
  }, py::arg("truth"), py::arg("estimates"), py::arg("tx_power_db"), py::arg("n_users"), py::arg("n_draws"),
     py::arg("seed") = 0);

  // experiment commands
  m.def("config_json", [](const std::string& text) {
    return nlohmann::json(nlohmann::json::parse(text).get<ex::ExperimentConfig>()).dump();
  });
  m.def("generate", [](const std::string& cfg, std::optional<std::string> out, std::optional<std::uint64_t> seed,
                       std::optional<std::function<void(const std::string&)>> log) {
    const auto c = experiment_from(cfg, out, seed);
    py::gil_scoped_release nogil;
    std::vector<std::string> dirs;
    for (const auto& r : ex::cmd_generate(c, py_logger(log))) dirs.push_back(r.dir.string());
    return dirs;
  }, py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), py::arg("log") = py::none());
  m.def("train", [](const std::string& cfg, std::optional<std::string> ckpt, std::optional<std::string> out,
                    std::optional<std::uint64_t> seed, std::optional<std::function<void(const std::string&)>> log) {
    const auto c = experiment_from(cfg, out, seed);
    std::optional<std::filesystem::path> p;
    if (ckpt) p = *ckpt;
    py::gil_scoped_release nogil;
    std::vector<std::string> paths;
    for (const auto& r : ex::cmd_train(c, p, py_logger(log))) paths.push_back(r.checkpoint.string());
    return paths;
  }, py::arg("config"), py::arg("checkpoint") = py::none(), py::arg("out") = py::none(), py::arg("seed") = py::none(),
     py::arg("log") = py::none());
  m.def("evaluate", [](const std::string& cfg, std::optional<std::string> ckpt, std::optional<std::string> out,
                       std::optional<std::uint64_t> seed, std::optional<std::function<void(const std::string&)>> log) {
    const auto c = experiment_from(cfg, out, seed);
    std::optional<std::filesystem::path> p;
    if (ckpt) p = *ckpt;
    std::vector<ex::EvaluateResult> res;
    {
      py::gil_scoped_release nogil;
      res = ex::cmd_evaluate(c, p, py_logger(log));
    }
    py::list out_list;
    for (const auto& e : res)
      for (const auto& r : e.reports) out_list.append(report_dict(r));
    return out_list;
  }, py::arg("config"), py::arg("checkpoint") = py::none(), py::arg("out") = py::none(), py::arg("seed") = py::none(),
     py::arg("log") = py::none());
  m.def("rate", [](const std::string& cfg, std::optional<std::string> ckpt, std::optional<std::string> out,
                   std::optional<std::uint64_t> seed, std::optional<std::function<void(const std::string&)>> log) {
    const auto c = experiment_from(cfg, out, seed);
    std::optional<std::filesystem::path> p;
    if (ckpt) p = *ckpt;
    ex::RateResult res;
    {
      py::gil_scoped_release nogil;
      res = ex::cmd_rate(c, p, py_logger(log));
    }
    py::list curves;
    for (const auto& r : res.curves) {
      py::dict d;
      d["method"] = r.method;
      d["frequency"] = r.frequency;
      d["tx_power_db"] = r.tx_power_db;
      d["rate_bpcu"] = r.rate_bpcu;
      curves.append(d);
    }
    return curves;
  }, py::arg("config"), py::arg("checkpoint") = py::none(), py::arg("out") = py::none(), py::arg("seed") = py::none(),
     py::arg("log") = py::none());
}
