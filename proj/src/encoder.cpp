#include "terrain/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "terrain/rng.hpp"

namespace terrain {

namespace {

// Bilinear sample with pixel centers at integer + 0.5.
double bilinear(const Image& img, double sy, double sx, std::size_t c) {
  const double fy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
  const double fx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
  const std::size_t y0 = static_cast<std::size_t>(fy);
  const std::size_t x0 = static_cast<std::size_t>(fx);
  const std::size_t y1 = std::min(y0 + 1, img.height - 1);
  const std::size_t x1 = std::min(x0 + 1, img.width - 1);
  const double wy = fy - static_cast<double>(y0);
  const double wx = fx - static_cast<double>(x0);
  const double v00 = img.value(y0, x0, c), v01 = img.value(y0, x1, c);
  const double v10 = img.value(y1, x0, c), v11 = img.value(y1, x1, c);
  return (1.0 - wy) * ((1.0 - wx) * v00 + wx * v01) + wy * ((1.0 - wx) * v10 + wx * v11);
}

void accumulate_outer(Mat& grad, const Vec& dy, const double* x) {
  for (std::size_t r = 0; r < grad.rows; ++r) {
    double* gr = grad.row(r);
    const double d = dy[r];
    for (std::size_t c = 0; c < grad.cols; ++c) gr[c] += d * x[c];
  }
}

void add_scaled(Vec& acc, const Vec& v, double s) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * v[i];
}

}  // namespace

Vec image_preprocess(const Image& image) {
  if (image.height < 128 || image.width < 128)
    throw std::invalid_argument("image_preprocess: image smaller than 128x128");

  // Center crop to square.
  const std::size_t side = std::min(image.height, image.width);
  const std::size_t oy = (image.height - side) / 2;
  const std::size_t ox = (image.width - side) / 2;

  // Resize crop to 128x128 (bilinear), skipped when already 128.
  constexpr std::size_t R = 128;
  std::vector<double> resized(R * R * 3);
  if (side == R) {
    for (std::size_t y = 0; y < R; ++y)
      for (std::size_t x = 0; x < R; ++x)
        for (std::size_t c = 0; c < 3; ++c)
          resized[(y * R + x) * 3 + c] = image.value(oy + y, ox + x, c);
  } else {
    const double scale = static_cast<double>(side) / static_cast<double>(R);
    for (std::size_t y = 0; y < R; ++y) {
      const double sy = (static_cast<double>(y) + 0.5) * scale - 0.5 + static_cast<double>(oy);
      for (std::size_t x = 0; x < R; ++x) {
        const double sx = (static_cast<double>(x) + 0.5) * scale - 0.5 + static_cast<double>(ox);
        for (std::size_t c = 0; c < 3; ++c) resized[(y * R + x) * 3 + c] = bilinear(image, sy, sx, c);
      }
    }
  }

  // 4x4 mean pooling down to 32x32.
  constexpr std::size_t P = 32;
  Vec out(P * P * 3, 0.0);
  for (std::size_t y = 0; y < R; ++y)
    for (std::size_t x = 0; x < R; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        out[((y / 4) * P + (x / 4)) * 3 + c] += resized[(y * R + x) * 3 + c];
  for (double& v : out) v /= 16.0;
  return out;
}

std::size_t VaeParams::param_count() const {
  return enc_w1.a.size() + enc_b1.size() + enc_w_mu.a.size() + enc_b_mu.size() +
         enc_w_lv.a.size() + enc_b_lv.size() + dec_w1.a.size() + dec_b1.size() +
         dec_w_out.a.size() + dec_b_out.size();
}

Vec VaeParams::flatten() const {
  Vec flat;
  flat.reserve(param_count());
  auto push_mat = [&](const Mat& m) { flat.insert(flat.end(), m.a.begin(), m.a.end()); };
  auto push_vec = [&](const Vec& v) { flat.insert(flat.end(), v.begin(), v.end()); };
  push_mat(enc_w1);
  push_vec(enc_b1);
  push_mat(enc_w_mu);
  push_vec(enc_b_mu);
  push_mat(enc_w_lv);
  push_vec(enc_b_lv);
  push_mat(dec_w1);
  push_vec(dec_b1);
  push_mat(dec_w_out);
  push_vec(dec_b_out);
  return flat;
}

VaeParams VaeParams::unflatten(const Vec& flat, std::size_t input_dim, std::size_t hidden_dim,
                               std::size_t latent_dim) {
  VaeParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.latent_dim = latent_dim;
  p.enc_w1 = Mat(hidden_dim, input_dim);
  p.enc_b1.assign(hidden_dim, 0.0);
  p.enc_w_mu = Mat(latent_dim, hidden_dim);
  p.enc_b_mu.assign(latent_dim, 0.0);
  p.enc_w_lv = Mat(latent_dim, hidden_dim);
  p.enc_b_lv.assign(latent_dim, 0.0);
  p.dec_w1 = Mat(hidden_dim, latent_dim);
  p.dec_b1.assign(hidden_dim, 0.0);
  p.dec_w_out = Mat(input_dim, hidden_dim);
  p.dec_b_out.assign(input_dim, 0.0);
  if (flat.size() != p.param_count()) throw std::invalid_argument("vae: parameter count mismatch");
  std::size_t pos = 0;
  auto take_mat = [&](Mat& m) {
    std::copy(flat.begin() + pos, flat.begin() + pos + m.a.size(), m.a.begin());
    pos += m.a.size();
  };
  auto take_vec = [&](Vec& v) {
    std::copy(flat.begin() + pos, flat.begin() + pos + v.size(), v.begin());
    pos += v.size();
  };
  take_mat(p.enc_w1);
  take_vec(p.enc_b1);
  take_mat(p.enc_w_mu);
  take_vec(p.enc_b_mu);
  take_mat(p.enc_w_lv);
  take_vec(p.enc_b_lv);
  take_mat(p.dec_w1);
  take_vec(p.dec_b1);
  take_mat(p.dec_w_out);
  take_vec(p.dec_b_out);
  return p;
}

VaeParams vae_init(std::size_t input_dim, std::size_t hidden_dim, std::size_t latent_dim,
                   std::uint64_t seed) {
  VaeParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.latent_dim = latent_dim;
  Rng rng(seed);
  auto init_mat = [&](Mat& m, std::size_t rows, std::size_t cols, std::size_t fan_in) {
    m = Mat(rows, cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : m.a) v = rng.uniform(-bound, bound);
  };
  init_mat(p.enc_w1, hidden_dim, input_dim, input_dim);
  p.enc_b1.assign(hidden_dim, 0.0);
  init_mat(p.enc_w_mu, latent_dim, hidden_dim, hidden_dim);
  p.enc_b_mu.assign(latent_dim, 0.0);
  init_mat(p.enc_w_lv, latent_dim, hidden_dim, hidden_dim);
  p.enc_b_lv.assign(latent_dim, 0.0);
  init_mat(p.dec_w1, hidden_dim, latent_dim, latent_dim);
  p.dec_b1.assign(hidden_dim, 0.0);
  init_mat(p.dec_w_out, input_dim, hidden_dim, hidden_dim);
  p.dec_b_out.assign(input_dim, 0.0);
  return p;
}

double gaussian_kl(const Vec& mu, const Vec& logvar) {
  if (mu.size() != logvar.size()) throw std::invalid_argument("gaussian_kl: dim mismatch");
  double kl = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    kl += -0.5 * (1.0 + logvar[j] - mu[j] * mu[j] - std::exp(logvar[j]));
  return kl;
}

double vae_loss_and_grad(const VaeParams& params, const std::vector<Vec>& batch,
                         const std::vector<Vec>& noise, VaeParams* grad) {
  if (batch.empty()) throw std::invalid_argument("vae loss: empty batch");
  if (noise.size() != batch.size()) throw std::invalid_argument("vae loss: noise shape mismatch");
  const std::size_t in = params.input_dim, hid = params.hidden_dim, lat = params.latent_dim;
  for (const Vec& x : batch)
    if (x.size() != in) throw std::invalid_argument("vae loss: input dim mismatch");
  for (const Vec& e : noise)
    if (e.size() != lat) throw std::invalid_argument("vae loss: noise dim mismatch");

  VaeParams g;
  if (grad) {
    g = VaeParams::unflatten(Vec(params.param_count(), 0.0), in, hid, lat);
  }

  Vec a1(hid), h1(hid), mu(lat), lv(lat), z(lat), a2(hid), h2(hid), xhat(in);
  Vec dxhat(in), dh2(hid), da2(hid), dz(lat), dmu(lat), dlv(lat), dh1(hid), da1(hid);

  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Vec& x = batch[b];
    const Vec& eps = noise[b];

    mat_vec(params.enc_w1, x.data(), a1.data());
    for (std::size_t i = 0; i < hid; ++i) h1[i] = std::tanh(a1[i] + params.enc_b1[i]);
    mat_vec(params.enc_w_mu, h1.data(), mu.data());
    mat_vec(params.enc_w_lv, h1.data(), lv.data());
    for (std::size_t j = 0; j < lat; ++j) {
      mu[j] += params.enc_b_mu[j];
      lv[j] += params.enc_b_lv[j];
      z[j] = mu[j] + std::exp(0.5 * lv[j]) * eps[j];
    }
    mat_vec(params.dec_w1, z.data(), a2.data());
    for (std::size_t i = 0; i < hid; ++i) h2[i] = std::tanh(a2[i] + params.dec_b1[i]);
    mat_vec(params.dec_w_out, h2.data(), xhat.data());

    double recon = 0.0;
    for (std::size_t d = 0; d < in; ++d) {
      xhat[d] += params.dec_b_out[d];
      const double diff = xhat[d] - x[d];
      recon += diff * diff;
    }
    loss += recon + gaussian_kl(mu, lv);

    if (!grad) continue;

    for (std::size_t d = 0; d < in; ++d) dxhat[d] = 2.0 * (xhat[d] - x[d]);
    accumulate_outer(g.dec_w_out, dxhat, h2.data());
    add_scaled(g.dec_b_out, dxhat, 1.0);
    mat_tvec(params.dec_w_out, dxhat.data(), dh2.data());
    for (std::size_t i = 0; i < hid; ++i) da2[i] = dh2[i] * (1.0 - h2[i] * h2[i]);
    accumulate_outer(g.dec_w1, da2, z.data());
    add_scaled(g.dec_b1, da2, 1.0);
    mat_tvec(params.dec_w1, da2.data(), dz.data());
    for (std::size_t j = 0; j < lat; ++j) {
      dmu[j] = dz[j] + mu[j];
      dlv[j] = dz[j] * eps[j] * 0.5 * std::exp(0.5 * lv[j]) + 0.5 * (std::exp(lv[j]) - 1.0);
    }
    accumulate_outer(g.enc_w_mu, dmu, h1.data());
    add_scaled(g.enc_b_mu, dmu, 1.0);
    accumulate_outer(g.enc_w_lv, dlv, h1.data());
    add_scaled(g.enc_b_lv, dlv, 1.0);
    mat_tvec(params.enc_w_mu, dmu.data(), dh1.data());
    {
      Vec tmp(hid);
      mat_tvec(params.enc_w_lv, dlv.data(), tmp.data());
      for (std::size_t i = 0; i < hid; ++i) dh1[i] += tmp[i];
    }
    for (std::size_t i = 0; i < hid; ++i) da1[i] = dh1[i] * (1.0 - h1[i] * h1[i]);
    accumulate_outer(g.enc_w1, da1, x.data());
    add_scaled(g.enc_b1, da1, 1.0);
  }

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  if (grad) {
    Vec flat = g.flatten();
    for (double& v : flat) v *= inv_b;
    *grad = VaeParams::unflatten(flat, in, hid, lat);
  }
  return loss * inv_b;
}

VaeParams vae_train(const std::vector<Vec>& data, std::size_t input_dim, std::size_t hidden_dim,
                    std::size_t latent_dim, const VaeTrainOptions& opts, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("vae_train: empty data");
  for (const Vec& x : data)
    if (x.size() != input_dim) throw std::invalid_argument("vae_train: input dim mismatch");

  VaeParams params = vae_init(input_dim, hidden_dim, latent_dim, seed);
  Rng rng = Rng(seed).derive("vae_train");

  const std::size_t batch_size = std::min(opts.batch_size, data.size());
  std::vector<Vec> batch(batch_size), noise(batch_size, Vec(latent_dim));
  VaeParams grad;
  for (std::size_t step = 0; step < opts.steps; ++step) {
    for (std::size_t b = 0; b < batch_size; ++b) {
      batch[b] = data[rng.uniform_int(data.size())];
      for (std::size_t j = 0; j < latent_dim; ++j) noise[b][j] = rng.normal();
    }
    const double loss = vae_loss_and_grad(params, batch, noise, &grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("vae_train: loss diverged at step " + std::to_string(step));
    Vec p = params.flatten();
    const Vec gflat = grad.flatten();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= opts.step_size * gflat[i];
    params = VaeParams::unflatten(p, input_dim, hidden_dim, latent_dim);
  }
  return params;
}

PcaBasis pca_fit(const std::vector<Vec>& data, std::size_t latent_dim, std::uint64_t seed,
                 const PcaFitOptions& opts) {
  if (data.empty()) throw std::invalid_argument("pca_fit: empty data");
  const std::size_t n = data.size();
  const std::size_t d = data[0].size();
  if (latent_dim == 0 || latent_dim > d) throw std::invalid_argument("pca_fit: bad latent_dim");
  for (const Vec& x : data)
    if (x.size() != d) throw std::invalid_argument("pca_fit: dim mismatch");

  PcaBasis basis;
  basis.mean.assign(d, 0.0);
  for (const Vec& x : data)
    for (std::size_t i = 0; i < d; ++i) basis.mean[i] += x[i];
  for (double& v : basis.mean) v /= static_cast<double>(n);

  if (d <= opts.exact_dim_limit) {
    Mat cov(d, d);
    for (const Vec& x : data) {
      Vec c(d);
      for (std::size_t i = 0; i < d; ++i) c[i] = x[i] - basis.mean[i];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) cov(i, j) += c[i] * c[j];
    }
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        cov(i, j) /= static_cast<double>(n);
        cov(j, i) = cov(i, j);
      }
    Vec values;
    Mat vectors;
    jacobi_eigen_symmetric(cov, values, vectors);
    basis.components = Mat(latent_dim, d);
    basis.explained.assign(latent_dim, 0.0);
    for (std::size_t k = 0; k < latent_dim; ++k) {
      basis.explained[k] = values[k];
      for (std::size_t c = 0; c < d; ++c) basis.components(k, c) = vectors(k, c);
    }
    return basis;
  }

  // High-dimensional path: seeded orthogonal iteration against the implicit
  // covariance (never materialized), refined by a small Rayleigh-Ritz step.
  Rng rng = Rng(seed).derive("pca_fit");
  const std::size_t k = latent_dim;
  Mat q(k, d);
  for (double& v : q.a) v = rng.normal();
  orthonormalize_rows(q);

  Mat y(k, n), z(k, d);
  std::vector<Vec> centered(n, Vec(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centered[i][j] = data[i][j] - basis.mean[j];

  for (std::size_t it = 0; it < opts.power_iterations; ++it) {
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t i = 0; i < n; ++i) y(r, i) = dot(q.row(r), centered[i].data(), d);
    std::fill(z.a.begin(), z.a.end(), 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      double* zr = z.row(r);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = y(r, i) / static_cast<double>(n);
        const double* ci = centered[i].data();
        for (std::size_t j = 0; j < d; ++j) zr[j] += w * ci[j];
      }
    }
    q = z;
    orthonormalize_rows(q);
  }

  // Rayleigh-Ritz: diagonalize the projected covariance to settle rotation
  // within the subspace and recover eigenvalues.
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t i = 0; i < n; ++i) y(r, i) = dot(q.row(r), centered[i].data(), d);
  Mat small(k, k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t s = r; s < k; ++s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += y(r, i) * y(s, i);
      small(r, s) = acc / static_cast<double>(n);
      small(s, r) = small(r, s);
    }
  Vec values;
  Mat rot;
  jacobi_eigen_symmetric(small, values, rot);

  basis.components = Mat(k, d);
  basis.explained = values;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t s = 0; s < k; ++s) acc += rot(r, s) * q(s, j);
      basis.components(r, j) = acc;
    }
  orthonormalize_rows(basis.components);
  // Deterministic sign: largest-magnitude entry positive.
  for (std::size_t r = 0; r < k; ++r) {
    double* row = basis.components.row(r);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::fabs(row[j]) > std::fabs(row[arg])) arg = j;
    if (row[arg] < 0.0)
      for (std::size_t j = 0; j < d; ++j) row[j] = -row[j];
  }
  return basis;
}

std::size_t Encoder::input_dim() const {
  return kind == EncoderKindTag::Vae ? vae.input_dim : pca.components.cols;
}

std::size_t Encoder::latent_dim() const {
  return kind == EncoderKindTag::Vae ? vae.latent_dim : pca.components.rows;
}

Vec encode(const Encoder& enc, const Vec& x) {
  if (x.size() != enc.input_dim()) throw std::invalid_argument("encode: input dim mismatch");
  if (enc.kind == EncoderKindTag::Pca) {
    Vec centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) centered[i] = x[i] - enc.pca.mean[i];
    Vec out(enc.pca.components.rows);
    mat_vec(enc.pca.components, centered.data(), out.data());
    return out;
  }
  // Posterior mean; no sampling at inference.
  const VaeParams& p = enc.vae;
  Vec h1(p.hidden_dim), mu(p.latent_dim);
  mat_vec(p.enc_w1, x.data(), h1.data());
  for (std::size_t i = 0; i < p.hidden_dim; ++i) h1[i] = std::tanh(h1[i] + p.enc_b1[i]);
  mat_vec(p.enc_w_mu, h1.data(), mu.data());
  for (std::size_t j = 0; j < p.latent_dim; ++j) mu[j] += p.enc_b_mu[j];
  return mu;
}

std::vector<Vec> encode_all(const Encoder& enc, const std::vector<Vec>& xs) {
  std::vector<Vec> out;
  out.reserve(xs.size());
  for (const Vec& x : xs) out.push_back(encode(enc, x));
  return out;
}

std::vector<Vec> standardize_latents(const std::vector<Vec>& latents) {
  if (latents.size() < 2)
    throw std::invalid_argument("standardize_latents: need at least 2 vectors");
  const std::size_t d = latents[0].size();
  for (const Vec& v : latents)
    if (v.size() != d) throw std::invalid_argument("standardize_latents: dim mismatch");

  Vec mean(d, 0.0), var(d, 0.0);
  for (const Vec& v : latents)
    for (std::size_t i = 0; i < d; ++i) mean[i] += v[i];
  for (double& m : mean) m /= static_cast<double>(latents.size());
  for (const Vec& v : latents)
    for (std::size_t i = 0; i < d; ++i) {
      const double c = v[i] - mean[i];
      var[i] += c * c;
    }
  for (double& v : var) v /= static_cast<double>(latents.size());

  std::vector<Vec> out(latents.size(), Vec(d));
  for (std::size_t i = 0; i < latents.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = latents[i][j] - mean[j];
      out[i][j] = (var[j] < 1e-12) ? c : c / std::sqrt(var[j]);
    }
  return out;
}

Normalization normalization_from_name(const std::string& name) {
  if (name == "total_variance") return Normalization::TotalVariance;
  if (name == "per_dim") return Normalization::PerDim;
  if (name == "none") return Normalization::None;
  throw std::invalid_argument("unknown normalization: " + name);
}

std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::TotalVariance: return "total_variance";
    case Normalization::PerDim: return "per_dim";
    case Normalization::None: return "none";
  }
  return "total_variance";
}

std::vector<Vec> normalize_latents(const std::vector<Vec>& latents, Normalization mode) {
  if (mode == Normalization::None) return latents;
  if (mode == Normalization::PerDim) return standardize_latents(latents);
  if (latents.size() < 2) throw std::invalid_argument("normalize_latents: need at least 2 vectors");

  const std::size_t d = latents[0].size();
  Vec mean(d, 0.0);
  for (const Vec& v : latents)
    for (std::size_t i = 0; i < d; ++i) mean[i] += v[i];
  for (double& m : mean) m /= static_cast<double>(latents.size());

  double total_var = 0.0;
  for (const Vec& v : latents)
    for (std::size_t i = 0; i < d; ++i) {
      const double c = v[i] - mean[i];
      total_var += c * c;
    }
  total_var /= static_cast<double>(latents.size());
  const double scale =
      total_var < 1e-12 ? 1.0 : 1.0 / std::sqrt(total_var / static_cast<double>(d));

  std::vector<Vec> out(latents.size(), Vec(d));
  for (std::size_t i = 0; i < latents.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) out[i][j] = (latents[i][j] - mean[j]) * scale;
  return out;
}

void save_encoder(const Encoder& enc, const std::string& path) {
  nlohmann::json header;
  Vec params;
  if (enc.kind == EncoderKindTag::Vae) {
    header["kind"] = "vae";
    header["input_dim"] = enc.vae.input_dim;
    header["hidden_dim"] = enc.vae.hidden_dim;
    header["latent_dim"] = enc.vae.latent_dim;
    params = enc.vae.flatten();
  } else {
    header["kind"] = "pca";
    header["input_dim"] = enc.pca.components.cols;
    header["latent_dim"] = enc.pca.components.rows;
    params = enc.pca.mean;
    params.insert(params.end(), enc.pca.components.a.begin(), enc.pca.components.a.end());
    params.insert(params.end(), enc.pca.explained.begin(), enc.pca.explained.end());
  }
  header["seed"] = enc.seed;
  header["param_count"] = params.size();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write encoder file: " + path);
  os << header.dump() << "\n";
  os.write(reinterpret_cast<const char*>(params.data()),
           static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!os) throw std::runtime_error("short write: " + path);
}

Encoder load_encoder(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open encoder file: " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("encoder file missing header: " + path);
  const nlohmann::json header = nlohmann::json::parse(line);

  const std::size_t count = header.at("param_count").get<std::size_t>();
  Vec params(count);
  is.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw std::runtime_error("encoder file truncated: " + path);

  Encoder enc;
  enc.seed = header.value("seed", std::uint64_t{0});
  const std::string kind = header.at("kind").get<std::string>();
  if (kind == "vae") {
    enc.kind = EncoderKindTag::Vae;
    enc.vae = VaeParams::unflatten(params, header.at("input_dim").get<std::size_t>(),
                                   header.at("hidden_dim").get<std::size_t>(),
                                   header.at("latent_dim").get<std::size_t>());
  } else if (kind == "pca") {
    enc.kind = EncoderKindTag::Pca;
    const std::size_t d = header.at("input_dim").get<std::size_t>();
    const std::size_t k = header.at("latent_dim").get<std::size_t>();
    if (count != d + k * d + k) throw std::runtime_error("pca encoder file has bad param count");
    enc.pca.mean.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    enc.pca.components = Mat(k, d);
    std::copy(params.begin() + static_cast<std::ptrdiff_t>(d),
              params.begin() + static_cast<std::ptrdiff_t>(d + k * d),
              enc.pca.components.a.begin());
    enc.pca.explained.assign(params.begin() + static_cast<std::ptrdiff_t>(d + k * d),
                             params.end());
  } else {
    throw std::runtime_error("unknown encoder kind: " + kind);
  }
  return enc;
}

}  // namespace terrain
