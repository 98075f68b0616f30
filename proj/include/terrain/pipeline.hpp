#pragma once

#include <map>
#include <string>
#include <vector>

#include "terrain/clustering.hpp"
#include "terrain/config.hpp"
#include "terrain/encoder.hpp"
#include "terrain/ingest.hpp"

namespace terrain {

// Everything up to (and excluding) the affinity: shared by all switching
// modes, so baseline comparisons re-run only the cheap tail.
struct PipelineStages {
  std::vector<Vec> mfcc;
  std::vector<Vec> audio_latents;   // standardized when the config says so
  std::vector<Vec> visual_latents;
  Encoder audio_encoder;
  Encoder visual_encoder;
  std::vector<int> em_labels;
  std::vector<Sequence> sequences;
  std::vector<SequenceFeatures> seq_features;
  std::size_t n_frames = 0;
};

struct PipelineResult {
  AffinityMatrix affinity;
  std::vector<int> seq_labels;
  PseudoLabeling labels;
};

PipelineStages compute_stages(const FrameStream& stream, const PipelineConfig& cfg);

// Affinity (per mode) -> agglomeration -> frame label feedback.
PipelineResult finish_mode(const PipelineStages& stages, SwitchMode mode,
                           const PipelineConfig& cfg);

// The full composition for the configured mode.
PipelineResult run_pipeline(const FrameStream& stream, const PipelineConfig& cfg);

// Fits (or trains) the per-modality encoder on the run's own descriptors.
Encoder fit_audio_encoder(const std::vector<Vec>& mfcc, const PipelineConfig& cfg);
Encoder fit_visual_encoder(const std::vector<Vec>& image_features, const PipelineConfig& cfg);

struct SuiteSceneResult {
  std::string name;
  std::size_t n_frames = 0;
  std::size_t n_terrains = 0;
  std::map<SwitchMode, double> nmi;
};

struct SuiteResult {
  std::vector<SuiteSceneResult> scenes;
  std::map<SwitchMode, double> mean_nmi;
  double elapsed_seconds = 0.0;
};

// Runs the 20-scene standard suite end to end in every switching mode,
// writing per-scene label CSVs and a summary TSV under out_dir. Timings go
// to a sidecar log so the comparable outputs stay byte-stable.
SuiteResult run_suite(const std::string& out_dir, std::uint64_t seed, const PipelineConfig& base);

std::string summary_tsv(const SuiteResult& result);

}  // namespace terrain
