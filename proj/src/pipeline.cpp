#include "terrain/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "terrain/eval.hpp"
#include "terrain/mfcc.hpp"
#include "terrain/rng.hpp"
#include "terrain/synthgen.hpp"

namespace fs = std::filesystem;

namespace terrain {

namespace {

// Deterministic every-k-th subsample for encoder fitting.
std::vector<Vec> subsample(const std::vector<Vec>& data, std::size_t max_count) {
  if (max_count == 0 || data.size() <= max_count) return data;
  std::vector<Vec> out;
  out.reserve(max_count);
  for (std::size_t i = 0; i < max_count; ++i)
    out.push_back(data[i * data.size() / max_count]);
  return out;
}

Encoder fit_encoder(const std::vector<Vec>& features, const EncoderConfig& ecfg,
                    const PipelineConfig& cfg, const char* tag) {
  if (!ecfg.load_path.empty()) {
    Encoder enc = load_encoder(ecfg.load_path);
    if (enc.input_dim() != features[0].size())
      throw std::runtime_error("loaded encoder input dim " + std::to_string(enc.input_dim()) +
                               " does not match features (" +
                               std::to_string(features[0].size()) + "): " + ecfg.load_path);
    return enc;
  }
  Encoder enc;
  enc.seed = Rng(cfg.seed).derive(tag).next_u64();
  const std::vector<Vec> fit_data = subsample(features, cfg.pca_max_fit_frames);
  if (ecfg.kind == "pca") {
    enc.kind = EncoderKindTag::Pca;
    PcaFitOptions opts;
    opts.power_iterations = cfg.pca_iterations;
    enc.pca = pca_fit(fit_data, ecfg.latent_dim, enc.seed, opts);
  } else {
    enc.kind = EncoderKindTag::Vae;
    VaeTrainOptions opts;
    opts.steps = ecfg.train_steps;
    opts.step_size = ecfg.step_size;
    opts.batch_size = ecfg.batch_size;
    enc.vae = vae_train(features, features[0].size(), ecfg.hidden_dim, ecfg.latent_dim, opts,
                        enc.seed);
  }
  return enc;
}

}  // namespace

Encoder fit_audio_encoder(const std::vector<Vec>& mfcc, const PipelineConfig& cfg) {
  if (mfcc.empty()) throw std::invalid_argument("fit_audio_encoder: no features");
  return fit_encoder(mfcc, cfg.audio, cfg, "audio_encoder");
}

Encoder fit_visual_encoder(const std::vector<Vec>& image_features, const PipelineConfig& cfg) {
  if (image_features.empty()) throw std::invalid_argument("fit_visual_encoder: no features");
  return fit_encoder(image_features, cfg.visual, cfg, "visual_encoder");
}

PipelineStages compute_stages(const FrameStream& stream, const PipelineConfig& cfg) {
  if (stream.frame_count() == 0) throw std::invalid_argument("pipeline: empty stream");

  PipelineStages st;
  st.n_frames = stream.frame_count();

  // Audio descriptors. MFCCs are centered and brought to a unit overall
  // scale before encoding; one shared factor (not per-coefficient) keeps the
  // coefficients' relative magnitudes intact for both encoder kinds.
  st.mfcc = mfcc_stream(stream, cfg.mfcc);
  const std::vector<Vec> mfcc_in =
      st.mfcc.size() >= 2 ? normalize_latents(st.mfcc, Normalization::TotalVariance) : st.mfcc;

  // Image descriptors get the same centering and shared scale as the MFCCs.
  std::vector<Vec> image_features;
  image_features.reserve(st.n_frames);
  for (std::size_t t = 0; t < st.n_frames; ++t)
    image_features.push_back(image_preprocess(stream.image(t)));
  const std::vector<Vec> image_in =
      image_features.size() >= 2 ? normalize_latents(image_features, Normalization::TotalVariance)
                                 : image_features;

  st.audio_encoder = fit_audio_encoder(mfcc_in, cfg);
  st.visual_encoder = fit_visual_encoder(image_in, cfg);

  st.audio_latents = encode_all(st.audio_encoder, mfcc_in);
  st.visual_latents = encode_all(st.visual_encoder, image_in);
  if (st.n_frames >= 2) {
    st.audio_latents = normalize_latents(st.audio_latents, cfg.standardize);
    st.visual_latents = normalize_latents(st.visual_latents, cfg.standardize);
  }

  // Sequence proposal clusters the audio latents (the modality that tracks
  // terrain changes frame to frame).
  const std::size_t k_em = std::min(cfg.effective_k_em(), st.n_frames);
  const std::uint64_t em_seed = Rng(cfg.seed).derive("em").next_u64();
  const GmmModel gmm = em_fit(st.audio_latents, k_em, em_seed, cfg.em_max_iter, cfg.em_tol);
  st.em_labels = em_assign(gmm, st.audio_latents);

  st.sequences = detect_sequences(st.em_labels);
  st.seq_features = average_sequence_features(st.sequences, st.audio_latents, st.visual_latents);
  return st;
}

PipelineResult finish_mode(const PipelineStages& stages, SwitchMode mode,
                           const PipelineConfig& cfg) {
  PipelineResult res;
  const std::size_t n_seq = stages.sequences.size();
  if (n_seq == 1) {
    // Degenerate run: nothing to agglomerate.
    res.seq_labels = {0};
    res.labels = propagate_labels(stages.sequences, res.seq_labels, stages.n_frames);
    return res;
  }
  res.affinity = sequence_affinity_mode(stages.seq_features, mode);
  const std::size_t target = std::min(cfg.target_k, n_seq);
  res.seq_labels = agglomerate(res.affinity, target, cfg.linkage);
  res.labels = propagate_labels(stages.sequences, res.seq_labels, stages.n_frames);
  return res;
}

PipelineResult run_pipeline(const FrameStream& stream, const PipelineConfig& cfg) {
  const PipelineStages stages = compute_stages(stream, cfg);
  return finish_mode(stages, cfg.mode, cfg);
}

SuiteResult run_suite(const std::string& out_dir, std::uint64_t seed,
                      const PipelineConfig& base) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SceneSpec> specs = standard_suite(seed);

  fs::create_directories(fs::path(out_dir) / "labels");
  std::ostringstream log;

  const SwitchMode modes[] = {SwitchMode::Switched, SwitchMode::AudioOnly,
                              SwitchMode::VisualOnly, SwitchMode::Concat};

  SuiteResult result;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SceneSpec& spec = specs[i];
    const auto scene_t0 = std::chrono::steady_clock::now();

    PipelineConfig cfg = base;
    cfg.seed = seed;
    cfg.target_k = spec.n_terrains();
    cfg.k_em = 0;  // 2x the terrain count
    cfg.window_seconds = spec.window_seconds;
    cfg.mfcc.fft_size = 0;  // sized to the desk-scale windows

    const SceneData scene = generate_scene(spec);
    const PipelineStages stages = compute_stages(scene.stream, cfg);

    SuiteSceneResult scene_result;
    scene_result.name = spec.name;
    scene_result.n_frames = scene.stream.frame_count();
    scene_result.n_terrains = spec.n_terrains();

    char fname[128];
    std::snprintf(fname, sizeof(fname), "scene%02zu_gt.csv", i);
    export_pseudo_labels(scene.stream.frame_count(), *scene.stream.gt_labels(),
                         (fs::path(out_dir) / "labels" / fname).string());

    for (SwitchMode mode : modes) {
      const PipelineResult res = finish_mode(stages, mode, cfg);
      scene_result.nmi[mode] = nmi(res.labels.labels, *scene.stream.gt_labels());
      std::snprintf(fname, sizeof(fname), "scene%02zu_%s.csv", i, switch_mode_name(mode).c_str());
      export_pseudo_labels(res.labels.labels.size(), res.labels.labels,
                           (fs::path(out_dir) / "labels" / fname).string());
    }
    result.scenes.push_back(scene_result);

    const double scene_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - scene_t0).count();
    log << spec.name << ": " << scene.stream.frame_count() << " frames, " << scene_secs
        << " s\n";
  }

  for (SwitchMode mode : modes) {
    double acc = 0.0;
    for (const auto& s : result.scenes) acc += s.nmi.at(mode);
    result.mean_nmi[mode] = acc / static_cast<double>(result.scenes.size());
  }
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  {
    std::ofstream os(fs::path(out_dir) / "summary.tsv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write suite summary");
    os << summary_tsv(result);
  }
  {
    // Timings live here, outside the byte-compared outputs.
    std::ofstream os(fs::path(out_dir) / "run.log");
    os << log.str() << "total: " << result.elapsed_seconds << " s\n";
  }
  return result;
}

std::string summary_tsv(const SuiteResult& result) {
  const SwitchMode modes[] = {SwitchMode::Switched, SwitchMode::AudioOnly,
                              SwitchMode::VisualOnly, SwitchMode::Concat};
  std::ostringstream os;
  os << "scene\tframes\tterrains";
  for (SwitchMode m : modes) os << "\tnmi_" << switch_mode_name(m);
  os << "\n";
  char buf[64];
  for (const auto& s : result.scenes) {
    os << s.name << "\t" << s.n_frames << "\t" << s.n_terrains;
    for (SwitchMode m : modes) {
      std::snprintf(buf, sizeof(buf), "\t%.6f", s.nmi.at(m));
      os << buf;
    }
    os << "\n";
  }
  os << "mean\t\t";
  for (SwitchMode m : modes) {
    std::snprintf(buf, sizeof(buf), "\t%.6f", result.mean_nmi.at(m));
    os << buf;
  }
  os << "\n";
  return os.str();
}

}  // namespace terrain
