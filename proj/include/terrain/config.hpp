#pragma once

#include <cstdint>
#include <string>

#include "terrain/clustering.hpp"
#include "terrain/encoder.hpp"
#include "terrain/mfcc.hpp"

namespace terrain {

struct EncoderConfig {
  std::string kind = "pca";  // pca | vae
  std::size_t latent_dim = 8;
  std::size_t hidden_dim = 64;
  std::size_t train_steps = 400;
  double step_size = 1e-3;
  std::size_t batch_size = 16;
  std::string load_path;  // reuse a saved encoder instead of fitting

  bool operator==(const EncoderConfig&) const = default;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  SwitchMode mode = SwitchMode::Switched;
  std::size_t k_em = 0;  // 0 = 2 * target_k
  std::size_t target_k = 2;
  double window_seconds = 2.8;
  Normalization standardize = Normalization::TotalVariance;
  Linkage linkage = Linkage::Average;
  std::string out_dir = ".";

  MfccConfig mfcc;
  EncoderConfig audio;
  EncoderConfig visual{"pca", 16};
  std::size_t pca_max_fit_frames = 256;
  std::size_t pca_iterations = 20;
  std::size_t em_max_iter = 100;
  double em_tol = 1e-6;

  std::size_t effective_k_em() const { return k_em == 0 ? 2 * target_k : k_em; }

  bool operator==(const PipelineConfig&) const = default;
};

// The config file is flat `key = value` text with dotted section prefixes
// and '#' comments. Missing keys take defaults; unknown keys are rejected.
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig parse_config(const std::string& path);
std::string serialize_config(const PipelineConfig& cfg);

}  // namespace terrain
