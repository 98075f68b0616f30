#include <doctest.h>

#include "terrain/config.hpp"

TEST_SUITE_BEGIN("config");

TEST_CASE("empty config gives the documented defaults") {
  const terrain::PipelineConfig cfg = terrain::parse_config_text("");
  CHECK(cfg == terrain::PipelineConfig{});
  CHECK(cfg.seed == 42);
  CHECK(cfg.mode == terrain::SwitchMode::Switched);
  CHECK(cfg.k_em == 0);
  CHECK(cfg.effective_k_em() == 2 * cfg.target_k);
  CHECK(cfg.window_seconds == 2.8);
  CHECK(cfg.mfcc.n_coeffs == 26);
  CHECK(cfg.mfcc.fft_size == 65536);
  CHECK(cfg.mfcc.n_mel_filters == 26);
  CHECK(cfg.mfcc.preemphasis == 0.97);
  CHECK(cfg.audio.latent_dim == 8);
  CHECK(cfg.visual.latent_dim == 16);
  CHECK(cfg.audio.hidden_dim == 64);
  CHECK(cfg.standardize == terrain::Normalization::TotalVariance);
  CHECK(cfg.linkage == terrain::Linkage::Average);
}

TEST_CASE("keys parse with comments and whitespace") {
  const auto cfg = terrain::parse_config_text(
      "# pipeline\n"
      "seed = 7\n"
      "mode = concat   # baseline\n"
      "target_k = 3\n"
      "k_em = 9\n"
      "encoder.audio.kind = vae\n"
      "encoder.visual.latent_dim = 5\n"
      "mfcc.window = hann\n"
      "standardize = per_dim\n"
      "linkage = complete\n");
  CHECK(cfg.seed == 7);
  CHECK(cfg.mode == terrain::SwitchMode::Concat);
  CHECK(cfg.target_k == 3);
  CHECK(cfg.k_em == 9);
  CHECK(cfg.audio.kind == "vae");
  CHECK(cfg.visual.latent_dim == 5);
  CHECK(cfg.mfcc.window_fn == terrain::Taper::Hann);
  CHECK(cfg.standardize == terrain::Normalization::PerDim);
  CHECK(cfg.linkage == terrain::Linkage::Complete);
}

TEST_CASE("invalid values are rejected") {
  CHECK_THROWS(terrain::parse_config_text("k_em = -1\n"));
  CHECK_THROWS(terrain::parse_config_text("target_k = 0\n"));
  CHECK_THROWS(terrain::parse_config_text("bogus_key = 1\n"));
  CHECK_THROWS(terrain::parse_config_text("mode = sideways\n"));
  CHECK_THROWS(terrain::parse_config_text("seed = abc\n"));
  CHECK_THROWS(terrain::parse_config_text("standardize = yes\n"));
  CHECK_THROWS(terrain::parse_config_text("standardize = true\n"));
  CHECK_THROWS(terrain::parse_config_text("mfcc.fft_size = 1000\n"));  // not a power of two
  CHECK_THROWS(terrain::parse_config_text("mfcc.n_coeffs = 30\n"));    // > filters
  CHECK_THROWS(terrain::parse_config_text("window_seconds = 0\n"));
  CHECK_THROWS(terrain::parse_config_text("no equals sign\n"));
  CHECK_THROWS(terrain::parse_config_text("encoder.audio.kind = cnn\n"));
}

TEST_CASE("serialize/parse round-trip is stable") {
  terrain::PipelineConfig cfg;
  cfg.seed = 123456789;
  cfg.mode = terrain::SwitchMode::VisualOnly;
  cfg.target_k = 4;
  cfg.window_seconds = 1.75;
  cfg.mfcc.preemphasis = 0.95;
  cfg.mfcc.fft_size = 8192;
  cfg.audio.kind = "vae";
  cfg.audio.step_size = 2.5e-4;
  cfg.visual.latent_dim = 12;
  cfg.visual.load_path = "enc/visual_encoder.bin";
  cfg.em_tol = 1e-7;
  cfg.out_dir = "runs/exp1";

  const std::string text = terrain::serialize_config(cfg);
  const terrain::PipelineConfig back = terrain::parse_config_text(text);
  CHECK(back == cfg);
  CHECK(terrain::serialize_config(back) == text);
}

TEST_SUITE_END();
