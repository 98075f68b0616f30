#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "terrain/ingest.hpp"
#include "terrain/linalg.hpp"

namespace terrain {

// Center crop to square -> bilinear resize to 128x128 -> 4x4 mean pooling to
// 32x32 -> flat 3072-vector in [0, 1] (row-major, RGB interleaved).
Vec image_preprocess(const Image& image);

constexpr std::size_t kImageFeatureDim = 32 * 32 * 3;

// Fully connected VAE: x -> tanh hidden -> (mu, logvar); z -> tanh hidden
// -> reconstruction. Heads and output are linear.
struct VaeParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t latent_dim = 0;

  Mat enc_w1, enc_w_mu, enc_w_lv;  // hidden x in, latent x hidden, latent x hidden
  Vec enc_b1, enc_b_mu, enc_b_lv;
  Mat dec_w1, dec_w_out;  // hidden x latent, in x hidden
  Vec dec_b1, dec_b_out;

  std::size_t param_count() const;
  Vec flatten() const;
  static VaeParams unflatten(const Vec& flat, std::size_t input_dim, std::size_t hidden_dim,
                             std::size_t latent_dim);
};

// Seeded uniform(+-1/sqrt(fan_in)) initialization.
VaeParams vae_init(std::size_t input_dim, std::size_t hidden_dim, std::size_t latent_dim,
                   std::uint64_t seed);

// Mean over the batch of squared reconstruction error plus the closed-form
// KL to the standard normal prior; the gradient comes from hand-derived
// backpropagation through the reparameterized sample mu + exp(logvar/2) * eps.
double vae_loss_and_grad(const VaeParams& params, const std::vector<Vec>& batch,
                         const std::vector<Vec>& noise, VaeParams* grad);

// KL(q || N(0, I)) of a diagonal Gaussian posterior; >= 0, zero iff
// mu = 0 and logvar = 0.
double gaussian_kl(const Vec& mu, const Vec& logvar);

struct VaeTrainOptions {
  std::size_t steps = 400;
  double step_size = 1e-3;
  std::size_t batch_size = 16;
};

// Plain seeded SGD on the ELBO; deterministic for fixed inputs. Throws with
// the offending step index if the loss turns non-finite.
VaeParams vae_train(const std::vector<Vec>& data, std::size_t input_dim, std::size_t hidden_dim,
                    std::size_t latent_dim, const VaeTrainOptions& opts, std::uint64_t seed);

struct PcaBasis {
  Vec mean;        // d
  Mat components;  // k x d, orthonormal rows
  Vec explained;   // eigenvalues, descending
};

struct PcaFitOptions {
  // Above this input dimension the fit switches from an exact Jacobi
  // eigen-decomposition to seeded orthogonal iteration.
  std::size_t exact_dim_limit = 64;
  std::size_t power_iterations = 20;
};

PcaBasis pca_fit(const std::vector<Vec>& data, std::size_t latent_dim, std::uint64_t seed,
                 const PcaFitOptions& opts = {});

enum class EncoderKindTag { Vae, Pca };

// A trained per-modality encoder; encoding is deterministic for both kinds
// (the VAE path returns the posterior mean, never a sample).
struct Encoder {
  EncoderKindTag kind = EncoderKindTag::Pca;
  VaeParams vae;
  PcaBasis pca;
  std::uint64_t seed = 0;

  std::size_t input_dim() const;
  std::size_t latent_dim() const;
};

Vec encode(const Encoder& enc, const Vec& x);
std::vector<Vec> encode_all(const Encoder& enc, const std::vector<Vec>& xs);

// Per-dimension zero mean, unit variance over the run. Dimensions with
// variance below 1e-12 are centered but left unscaled.
std::vector<Vec> standardize_latents(const std::vector<Vec>& latents);

// How a latent space is made comparable across modalities before the
// min-distance switching. PerDim forces unit variance everywhere (amplifying
// noise dimensions); TotalVariance centers and applies one shared scale so
// the encoder's signal/noise structure survives.
enum class Normalization { TotalVariance, PerDim, None };

Normalization normalization_from_name(const std::string& name);
std::string normalization_name(Normalization n);

std::vector<Vec> normalize_latents(const std::vector<Vec>& latents, Normalization mode);

// Flat binary file with a JSON first line describing kind/dims/seed,
// followed by little-endian float64 parameters.
void save_encoder(const Encoder& enc, const std::string& path);
Encoder load_encoder(const std::string& path);

}  // namespace terrain
