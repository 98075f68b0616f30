// Batch front door: synth / extract / train-encoder / cluster / evaluate /
// suite subcommands over the manifest + config file formats.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "terrain/config.hpp"
#include "terrain/eval.hpp"
#include "terrain/mfcc.hpp"
#include "terrain/pipeline.hpp"
#include "terrain/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

terrain::PipelineConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return terrain::PipelineConfig{};
  return terrain::parse_config(config_path);
}

void write_matrix_csv(const std::string& path, const std::vector<terrain::Vec>& rows,
                      const std::string& prefix) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  if (!rows.empty()) {
    os << "frame";
    for (std::size_t d = 0; d < rows[0].size(); ++d) os << "," << prefix << d;
    os << "\n";
  }
  char buf[40];
  for (std::size_t t = 0; t < rows.size(); ++t) {
    os << t;
    for (double v : rows[t]) {
      std::snprintf(buf, sizeof(buf), ",%.12g", v);
      os << buf;
    }
    os << "\n";
  }
}

json sequences_json(const std::vector<terrain::Sequence>& seqs,
                    const std::vector<int>& seq_labels) {
  json arr = json::array();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    json s;
    s["id"] = seqs[i].id;
    s["start_frame"] = seqs[i].start_frame;
    s["end_frame"] = seqs[i].end_frame;
    s["em_label"] = seqs[i].em_label;
    s["cluster_label"] = seq_labels.empty() ? -1 : seq_labels[i];
    arr.push_back(s);
  }
  return arr;
}

int cmd_synth(const std::string& out, std::uint64_t seed, int suite_index, std::size_t terrains,
              std::size_t frames, double occlusion_rate, double grain_shift_rate,
              const std::string& name) {
  terrain::SceneSpec spec;
  if (suite_index >= 0) {
    const auto specs = terrain::standard_suite(seed);
    if (static_cast<std::size_t>(suite_index) >= specs.size())
      throw std::runtime_error("suite index out of range (0..19)");
    spec = specs[static_cast<std::size_t>(suite_index)];
  } else {
    // Small demo scene: well-separated bands and colors.
    if (terrains < 2 || terrains > 4) throw std::runtime_error("--terrains must be 2..4");
    const double centers[4] = {150.0, 290.0, 540.0, 950.0};
    const double colors[4][3] = {
        {0.25, 0.4, 0.75}, {0.75, 0.35, 0.3}, {0.35, 0.7, 0.35}, {0.8, 0.75, 0.35}};
    spec.name = name;
    spec.seed = seed;
    spec.sample_rate = 2000.0;
    spec.window_seconds = 0.25;
    spec.occlusion_rate = occlusion_rate;
    spec.grain_shift_rate = grain_shift_rate;
    for (std::size_t t = 0; t < terrains; ++t) {
      terrain::TerrainSignature sig;
      sig.audio.center_hz = centers[t];
      sig.audio.bandwidth_hz = centers[t] * 0.25;
      sig.visual = {colors[t][0], colors[t][1], colors[t][2], 0.1};
      spec.terrains.push_back(sig);
    }
    const std::size_t n_segments = std::max<std::size_t>(terrains, 3);
    for (std::size_t s = 0; s < n_segments; ++s)
      spec.segments.emplace_back(static_cast<int>(s % terrains),
                                 std::max<std::size_t>(frames / n_segments, 1));
  }
  const std::string manifest = terrain::write_scene(spec, out);
  std::cout << "wrote " << manifest << " (" << spec.total_frames() << " frames)\n";
  return 0;
}

int cmd_extract(const std::string& manifest_path, const std::string& config_path,
                const std::string& out) {
  const terrain::PipelineConfig cfg = load_config(config_path);
  const terrain::RunManifest manifest = terrain::load_manifest(manifest_path);
  const terrain::FrameStream stream = terrain::align_streams(manifest, cfg.window_seconds);
  const terrain::PipelineStages stages = terrain::compute_stages(stream, cfg);

  fs::create_directories(out);
  write_matrix_csv((fs::path(out) / "mfcc.csv").string(), stages.mfcc, "c");
  write_matrix_csv((fs::path(out) / "audio_latents.csv").string(), stages.audio_latents, "z");
  write_matrix_csv((fs::path(out) / "visual_latents.csv").string(), stages.visual_latents, "z");
  terrain::save_encoder(stages.audio_encoder, (fs::path(out) / "audio_encoder.bin").string());
  terrain::save_encoder(stages.visual_encoder, (fs::path(out) / "visual_encoder.bin").string());
  std::cout << "wrote feature dumps for " << stream.frame_count() << " frames to " << out << "\n";
  return 0;
}

int cmd_train_encoder(const std::string& manifest_path, const std::string& config_path,
                      const std::string& out, const std::string& modality) {
  const terrain::PipelineConfig cfg = load_config(config_path);
  const terrain::RunManifest manifest = terrain::load_manifest(manifest_path);
  const terrain::FrameStream stream = terrain::align_streams(manifest, cfg.window_seconds);
  fs::create_directories(out);

  if (modality == "audio" || modality == "both") {
    auto mfcc = terrain::mfcc_stream(stream, cfg.mfcc);
    if (mfcc.size() >= 2) mfcc = terrain::standardize_latents(mfcc);
    const terrain::Encoder enc = terrain::fit_audio_encoder(mfcc, cfg);
    terrain::save_encoder(enc, (fs::path(out) / "audio_encoder.bin").string());
    std::cout << "wrote audio encoder (" << cfg.audio.kind << ")\n";
  }
  if (modality == "visual" || modality == "both") {
    std::vector<terrain::Vec> feats;
    feats.reserve(stream.frame_count());
    for (std::size_t t = 0; t < stream.frame_count(); ++t)
      feats.push_back(terrain::image_preprocess(stream.image(t)));
    const terrain::Encoder enc = terrain::fit_visual_encoder(feats, cfg);
    terrain::save_encoder(enc, (fs::path(out) / "visual_encoder.bin").string());
    std::cout << "wrote visual encoder (" << cfg.visual.kind << ")\n";
  }
  return 0;
}

int cmd_cluster(const std::string& manifest_path, const std::string& config_path,
                const std::string& out, const std::string& mode_override, bool dump) {
  terrain::PipelineConfig cfg = load_config(config_path);
  if (!mode_override.empty()) cfg.mode = terrain::switch_mode_from_name(mode_override);

  const terrain::RunManifest manifest = terrain::load_manifest(manifest_path);
  const terrain::FrameStream stream = terrain::align_streams(manifest, cfg.window_seconds);
  const terrain::PipelineStages stages = terrain::compute_stages(stream, cfg);
  const terrain::PipelineResult res = terrain::finish_mode(stages, cfg.mode, cfg);

  fs::create_directories(out);
  terrain::export_pseudo_labels(res.labels.labels.size(), res.labels.labels,
                                (fs::path(out) / "labels.csv").string());
  {
    std::ofstream os(fs::path(out) / "sequences.json");
    os << sequences_json(stages.sequences, res.seq_labels).dump(2) << "\n";
  }
  if (dump) {
    json debug;
    debug["audio_latents"] = stages.audio_latents;
    debug["visual_latents"] = stages.visual_latents;
    debug["em_labels"] = stages.em_labels;
    debug["sequences"] = sequences_json(stages.sequences, res.seq_labels);
    json aff = json::array();
    for (std::size_t i = 0; i < res.affinity.n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < res.affinity.n; ++j) row.push_back(res.affinity.at(i, j));
      aff.push_back(row);
    }
    debug["affinity"] = aff;
    std::ofstream os(fs::path(out) / "debug.json");
    os << debug.dump(2) << "\n";
  }
  std::cout << "clustered " << stream.frame_count() << " frames into " << res.labels.n_clusters
            << " clusters (" << terrain::switch_mode_name(cfg.mode) << ", "
            << stages.sequences.size() << " sequences)\n";
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& out) {
  const std::vector<int> pred = terrain::read_labels_csv(pred_path);
  const std::vector<int> truth = terrain::read_labels_csv(truth_path);
  const double score = terrain::nmi(pred, truth);
  const terrain::ClassificationReport rep = terrain::classification_report(pred, truth);

  json j;
  j["nmi"] = score;
  j["accuracy"] = rep.accuracy;
  j["weighted_precision"] = rep.weighted_precision;
  j["weighted_recall"] = rep.weighted_recall;
  j["weighted_f1"] = rep.weighted_f1;
  j["cluster_to_class"] = rep.cluster_to_class;
  json classes = json::array();
  for (const auto& c : rep.classes) {
    json cj;
    cj["name"] = c.name;
    cj["support"] = c.support;
    cj["precision"] = c.precision;
    cj["recall"] = c.recall;
    cj["f1"] = c.f1;
    cj["degenerate"] = c.degenerate;
    classes.push_back(cj);
  }
  j["classes"] = classes;

  fs::create_directories(out);
  {
    std::ofstream os(fs::path(out) / "report.json");
    os << j.dump(2) << "\n";
  }
  {
    std::ofstream os(fs::path(out) / "report.txt");
    os << rep.to_text();
  }
  std::printf("nmi %.6f  accuracy %.6f\n", score, rep.accuracy);
  return 0;
}

int cmd_suite(const std::string& out, std::uint64_t seed, const std::string& config_path) {
  const terrain::PipelineConfig cfg = load_config(config_path);
  const terrain::SuiteResult result = terrain::run_suite(out, seed, cfg);
  std::cout << terrain::summary_tsv(result);
  std::cout << "elapsed " << result.elapsed_seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised terrain type discovery from audio-visual streams"};
  app.require_subcommand(1);

  std::string manifest_path, config_path, out = ".", mode, pred_path, truth_path;
  std::string modality = "both", scene_name = "demo";
  std::uint64_t seed = 42;
  int suite_index = -1;
  std::size_t terrains = 2, frames = 240;
  double occlusion_rate = 0.0, grain_shift_rate = 0.0;
  bool dump = false;

  auto* synth = app.add_subcommand("synth", "generate a synthetic scene as WAV+PNG+CSV+manifest");
  synth->add_option("--out", out, "output directory")->required();
  synth->add_option("--seed", seed, "root seed");
  synth->add_option("--suite-index", suite_index, "emit scene N of the 20-scene standard suite");
  synth->add_option("--terrains", terrains, "terrain count for the demo scene");
  synth->add_option("--frames", frames, "frame count for the demo scene");
  synth->add_option("--occlusion-rate", occlusion_rate, "visual occlusion event rate");
  synth->add_option("--grain-shift-rate", grain_shift_rate, "audio grain shift rate");
  synth->add_option("--name", scene_name, "scene name");

  auto* extract = app.add_subcommand("extract", "write MFCC and latent dumps for a run");
  extract->add_option("--manifest", manifest_path, "manifest JSON")->required();
  extract->add_option("--config", config_path, "pipeline config file");
  extract->add_option("--out", out, "output directory")->required();

  auto* train = app.add_subcommand("train-encoder", "fit/train per-modality encoders");
  train->add_option("--manifest", manifest_path, "manifest JSON")->required();
  train->add_option("--config", config_path, "pipeline config file");
  train->add_option("--out", out, "output directory")->required();
  train->add_option("--modality", modality, "audio | visual | both");

  auto* cluster = app.add_subcommand("cluster", "run the full pipeline, write pseudo labels");
  cluster->add_option("--manifest", manifest_path, "manifest JSON")->required();
  cluster->add_option("--config", config_path, "pipeline config file");
  cluster->add_option("--out", out, "output directory")->required();
  cluster->add_option("--mode", mode, "switched | audio_only | visual_only | concat");
  cluster->add_flag("--dump", dump, "write intermediate artifacts as debug.json");

  auto* evaluate = app.add_subcommand("evaluate", "score predicted labels against ground truth");
  evaluate->add_option("--pred", pred_path, "predicted labels CSV")->required();
  evaluate->add_option("--truth", truth_path, "ground-truth labels CSV")->required();
  evaluate->add_option("--out", out, "output directory")->required();

  auto* suite = app.add_subcommand("suite", "run the 20-scene standard suite in all modes");
  suite->add_option("--out", out, "output directory")->required();
  suite->add_option("--seed", seed, "root seed");
  suite->add_option("--config", config_path, "pipeline config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(out, seed, suite_index, terrains, frames, occlusion_rate,
                       grain_shift_rate, scene_name);
    if (extract->parsed()) return cmd_extract(manifest_path, config_path, out);
    if (train->parsed()) return cmd_train_encoder(manifest_path, config_path, out, modality);
    if (cluster->parsed()) return cmd_cluster(manifest_path, config_path, out, mode, dump);
    if (evaluate->parsed()) return cmd_evaluate(pred_path, truth_path, out);
    if (suite->parsed()) return cmd_suite(out, seed, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
