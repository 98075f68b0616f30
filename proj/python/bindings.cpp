// Python bindings for the core operations: feature extraction, EM sequence
// proposal, switched affinity, agglomeration and the evaluation metrics.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "terrain/clustering.hpp"
#include "terrain/encoder.hpp"
#include "terrain/eval.hpp"
#include "terrain/mfcc.hpp"
#include "terrain/pipeline.hpp"
#include "terrain/synthgen.hpp"

namespace py = pybind11;

namespace {

std::vector<terrain::Vec> to_rows(const py::array_t<double, py::array::c_style>& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  const auto r = arr.unchecked<2>();
  std::vector<terrain::Vec> rows(static_cast<std::size_t>(r.shape(0)),
                                 terrain::Vec(static_cast<std::size_t>(r.shape(1))));
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t j = 0; j < r.shape(1); ++j)
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r(i, j);
  return rows;
}

py::array_t<double> from_rows(const std::vector<terrain::Vec>& rows) {
  const py::ssize_t n = static_cast<py::ssize_t>(rows.size());
  const py::ssize_t d = n ? static_cast<py::ssize_t>(rows[0].size()) : 0;
  py::array_t<double> out({n, d});
  auto w = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t j = 0; j < d; ++j)
      w(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

terrain::Vec to_vec(const py::array_t<double, py::array::c_style>& arr) {
  if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
  const auto r = arr.unchecked<1>();
  terrain::Vec v(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) v[static_cast<std::size_t>(i)] = r(i);
  return v;
}

}  // namespace

PYBIND11_MODULE(terrain_discovery, m) {
  m.doc() = "Self-supervised terrain type discovery: MFCC features, EM sequence "
            "proposal, switched audio/visual affinity, agglomerative clustering";

  py::class_<terrain::MfccConfig>(m, "MfccConfig")
      .def(py::init<>())
      .def_readwrite("n_coeffs", &terrain::MfccConfig::n_coeffs)
      .def_readwrite("fft_size", &terrain::MfccConfig::fft_size)
      .def_readwrite("n_mel_filters", &terrain::MfccConfig::n_mel_filters)
      .def_readwrite("preemphasis", &terrain::MfccConfig::preemphasis)
      .def_readwrite("log_floor", &terrain::MfccConfig::log_floor);

  m.def(
      "compute_mfcc",
      [](const py::array_t<double, py::array::c_style>& window, double sample_rate,
         const terrain::MfccConfig& cfg) {
        const terrain::Vec c = terrain::compute_mfcc(to_vec(window), sample_rate, cfg);
        return py::array_t<double>(static_cast<py::ssize_t>(c.size()), c.data());
      },
      py::arg("window"), py::arg("sample_rate"), py::arg("config") = terrain::MfccConfig{});

  py::class_<terrain::GmmModel>(m, "GmmModel")
      .def_property_readonly("weights",
                             [](const terrain::GmmModel& g) { return g.weights; })
      .def_property_readonly("means",
                             [](const terrain::GmmModel& g) {
                               std::vector<terrain::Vec> rows(g.n_components);
                               for (std::size_t k = 0; k < g.n_components; ++k)
                                 rows[k].assign(g.means.row(k), g.means.row(k) + g.dim);
                               return from_rows(rows);
                             })
      .def_property_readonly("log_likelihood_history",
                             [](const terrain::GmmModel& g) { return g.log_likelihood_history; });

  m.def(
      "em_fit",
      [](const py::array_t<double, py::array::c_style>& features, std::size_t k,
         std::uint64_t seed, std::size_t max_iter, double tol) {
        return terrain::em_fit(to_rows(features), k, seed, max_iter, tol);
      },
      py::arg("features"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iter") = 100,
      py::arg("tol") = 1e-6);

  m.def("em_assign",
        [](const terrain::GmmModel& model, const py::array_t<double, py::array::c_style>& x) {
          return terrain::em_assign(model, to_rows(x));
        });

  m.def("detect_sequences", [](const std::vector<int>& labels) {
    const auto seqs = terrain::detect_sequences(labels);
    py::list out;
    for (const auto& s : seqs)
      out.append(py::make_tuple(s.start_frame, s.end_frame, s.em_label));
    return out;
  });

  m.def(
      "switched_affinity",
      [](const py::array_t<double, py::array::c_style>& audio_means,
         const py::array_t<double, py::array::c_style>& visual_means, const std::string& mode) {
        const auto a = to_rows(audio_means);
        const auto v = to_rows(visual_means);
        if (a.size() != v.size())
          throw std::invalid_argument("audio/visual sequence counts differ");
        std::vector<terrain::SequenceFeatures> feats(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) feats[i] = {a[i], v[i]};
        const terrain::AffinityMatrix aff =
            terrain::sequence_affinity_mode(feats, terrain::switch_mode_from_name(mode));
        py::array_t<double> out({static_cast<py::ssize_t>(aff.n), static_cast<py::ssize_t>(aff.n)});
        auto w = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < aff.n; ++i)
          for (std::size_t j = 0; j < aff.n; ++j)
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = aff.at(i, j);
        return out;
      },
      py::arg("audio_means"), py::arg("visual_means"), py::arg("mode") = "switched");

  m.def(
      "agglomerate",
      [](const py::array_t<double, py::array::c_style>& affinity, std::size_t target_k,
         const std::string& linkage) {
        if (affinity.ndim() != 2 || affinity.shape(0) != affinity.shape(1))
          throw std::invalid_argument("affinity must be square");
        terrain::AffinityMatrix aff(static_cast<std::size_t>(affinity.shape(0)));
        const auto r = affinity.unchecked<2>();
        for (std::size_t i = 0; i < aff.n; ++i)
          for (std::size_t j = 0; j < aff.n; ++j)
            aff.at(i, j) = r(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
        return terrain::agglomerate(aff, target_k, terrain::linkage_from_name(linkage));
      },
      py::arg("affinity"), py::arg("target_k"), py::arg("linkage") = "average");

  m.def("nmi", &terrain::nmi, py::arg("pred"), py::arg("truth"));

  m.def(
      "classification_report",
      [](const std::vector<int>& pred, const std::vector<int>& truth,
         const std::vector<std::string>& names) {
        const auto rep = terrain::classification_report(pred, truth, names);
        py::dict out;
        out["accuracy"] = rep.accuracy;
        out["weighted_precision"] = rep.weighted_precision;
        out["weighted_recall"] = rep.weighted_recall;
        out["weighted_f1"] = rep.weighted_f1;
        py::list classes;
        for (const auto& c : rep.classes) {
          py::dict cd;
          cd["name"] = c.name;
          cd["support"] = c.support;
          cd["precision"] = c.precision;
          cd["recall"] = c.recall;
          cd["f1"] = c.f1;
          cd["degenerate"] = c.degenerate;
          classes.append(cd);
        }
        out["classes"] = classes;
        return out;
      },
      py::arg("pred"), py::arg("truth"), py::arg("class_names") = std::vector<std::string>{});

  m.def(
      "standardize",
      [](const py::array_t<double, py::array::c_style>& x) {
        return from_rows(terrain::standardize_latents(to_rows(x)));
      },
      py::arg("latents"));

  m.def(
      "pca_fit_encode",
      [](const py::array_t<double, py::array::c_style>& x, std::size_t latent_dim,
         std::uint64_t seed) {
        const auto rows = to_rows(x);
        terrain::Encoder enc;
        enc.kind = terrain::EncoderKindTag::Pca;
        enc.pca = terrain::pca_fit(rows, latent_dim, seed);
        return from_rows(terrain::encode_all(enc, rows));
      },
      py::arg("data"), py::arg("latent_dim"), py::arg("seed") = 0);

  // End-to-end smoke path: synthesize one scene, run the pipeline in the
  // requested mode, return (pred, gt, nmi).
  m.def(
      "run_demo_scene",
      [](std::uint64_t seed, const std::string& mode, std::size_t frames_per_segment) {
        terrain::SceneSpec spec;
        spec.name = "pydemo";
        spec.seed = seed;
        spec.sample_rate = 2000.0;
        spec.window_seconds = 0.25;
        spec.segments = {{0, frames_per_segment}, {1, frames_per_segment}};
        terrain::TerrainSignature a, b;
        a.audio.center_hz = 170.0;
        a.audio.bandwidth_hz = 45.0;
        a.visual = {0.25, 0.4, 0.8, 0.1};
        b.audio.center_hz = 640.0;
        b.audio.bandwidth_hz = 160.0;
        b.visual = {0.8, 0.65, 0.2, 0.1};
        spec.terrains = {a, b};

        const terrain::SceneData data = terrain::generate_scene(spec);
        terrain::PipelineConfig cfg;
        cfg.target_k = 2;
        cfg.window_seconds = spec.window_seconds;
        cfg.mfcc.fft_size = 0;
        cfg.pca_max_fit_frames = 128;
        cfg.mode = terrain::switch_mode_from_name(mode);
        cfg.seed = seed;

        const terrain::PipelineResult res = terrain::run_pipeline(data.stream, cfg);
        const auto& gt = *data.stream.gt_labels();
        py::dict out;
        out["pred"] = res.labels.labels;
        out["gt"] = gt;
        out["nmi"] = terrain::nmi(res.labels.labels, gt);
        out["n_clusters"] = res.labels.n_clusters;
        return out;
      },
      py::arg("seed") = 7, py::arg("mode") = "switched", py::arg("frames_per_segment") = 200);
}
