#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "terrain/encoder.hpp"
#include "terrain/rng.hpp"

using terrain::Image;
using terrain::Vec;

namespace {

struct LossContext {
  std::size_t in, hid, lat;
  const std::vector<Vec>* batch;
  const std::vector<Vec>* noise;
};

double loss_of_flat(const std::vector<double>& flat, void* raw) {
  const auto* ctx = static_cast<const LossContext*>(raw);
  const terrain::VaeParams p = terrain::VaeParams::unflatten(flat, ctx->in, ctx->hid, ctx->lat);
  return terrain::vae_loss_and_grad(p, *ctx->batch, *ctx->noise, nullptr);
}

double gradient_check_error(std::uint64_t seed) {
  const std::size_t in = 4, hid = 3, lat = 2, batch_n = 3;
  terrain::Rng rng(seed);
  terrain::VaeParams params = terrain::vae_init(in, hid, lat, rng.next_u64());
  // Perturb biases too so no gradient component sits at an init-zero point.
  Vec flat = params.flatten();
  for (double& v : flat) v += 0.05 * rng.normal();
  params = terrain::VaeParams::unflatten(flat, in, hid, lat);

  std::vector<Vec> batch(batch_n, Vec(in)), noise(batch_n, Vec(lat));
  for (auto& x : batch)
    for (double& v : x) v = rng.normal();
  for (auto& e : noise)
    for (double& v : e) v = rng.normal();

  terrain::VaeParams grad;
  terrain::vae_loss_and_grad(params, batch, noise, &grad);
  const Vec analytic = grad.flatten();

  LossContext ctx{in, hid, lat, &batch, &noise};
  const Vec numeric = oracle::finite_difference_gradient(flat, &loss_of_flat, &ctx, 1e-5);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    num += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    den += numeric[i] * numeric[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

Image constant_image(std::size_t w, std::size_t h, std::uint8_t value) {
  Image img(w, h);
  for (auto& v : img.rgb) v = value;
  return img;
}

}  // namespace

TEST_SUITE_BEGIN("encoder");

TEST_CASE("image_preprocess keeps constants and flattens to 3072") {
  const Vec out = terrain::image_preprocess(constant_image(128, 128, 102));
  REQUIRE(out.size() == terrain::kImageFeatureDim);
  for (double v : out) CHECK(v == doctest::Approx(102.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("image_preprocess crops the center square of a wide image") {
  // 512 wide, 256 tall: center 256x256 is bright, margins dark.
  Image img(512, 256);
  for (std::size_t y = 0; y < 256; ++y)
    for (std::size_t x = 0; x < 512; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        img.at(y, x, c) = (x >= 128 && x < 384) ? 200 : 10;
  const Vec out = terrain::image_preprocess(img);
  for (double v : out) CHECK(v == doctest::Approx(200.0 / 255.0).epsilon(1e-9));
}

TEST_CASE("image_preprocess pools a period-8 checkerboard to gray") {
  Image img(256, 256);
  for (std::size_t y = 0; y < 256; ++y)
    for (std::size_t x = 0; x < 256; ++x) {
      const bool on = ((x / 4) + (y / 4)) % 2 == 0;
      for (std::size_t c = 0; c < 3; ++c) img.at(y, x, c) = on ? 255 : 0;
    }
  const Vec out = terrain::image_preprocess(img);
  for (double v : out) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("image_preprocess rejects small images") {
  CHECK_THROWS(terrain::image_preprocess(constant_image(100, 100, 0)));
  CHECK_THROWS(terrain::image_preprocess(constant_image(127, 128, 0)));
}

TEST_CASE("kl closed form") {
  CHECK(terrain::gaussian_kl({0.0}, {0.0}) == 0.0);
  CHECK(terrain::gaussian_kl({1.0}, {0.0}) == doctest::Approx(0.5));
  terrain::Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    Vec mu(3), lv(3);
    for (double& v : mu) v = rng.normal();
    for (double& v : lv) v = rng.normal();
    CHECK(terrain::gaussian_kl(mu, lv) >= 0.0);
  }
}

TEST_CASE("vae gradient matches central finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double err = gradient_check_error(seed);
    CAPTURE(seed);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("vae loss rejects mismatched shapes") {
  const terrain::VaeParams p = terrain::vae_init(4, 3, 2, 1);
  const std::vector<Vec> batch{Vec(4, 0.1)};
  CHECK_THROWS(terrain::vae_loss_and_grad(p, {}, {}, nullptr));
  CHECK_THROWS(terrain::vae_loss_and_grad(p, batch, {}, nullptr));                  // noise count
  CHECK_THROWS(terrain::vae_loss_and_grad(p, batch, {Vec(3, 0.0)}, nullptr));       // noise dim
  CHECK_THROWS(terrain::vae_loss_and_grad(p, {Vec(5, 0.0)}, {Vec(2, 0.0)}, nullptr));  // input dim
}

TEST_CASE("vae_train learns to reconstruct a repeated vector") {
  terrain::Rng rng(7);
  Vec x(6);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  const std::vector<Vec> data(200, x);

  const terrain::VaeParams init = terrain::vae_init(6, 8, 2, 99);
  terrain::VaeTrainOptions opts;
  opts.steps = 300;
  opts.step_size = 5e-3;
  terrain::VaeParams trained = terrain::vae_train(data, 6, 8, 2, opts, 99);

  // Fixed evaluation batch, zero noise: compare losses before and after.
  const std::vector<Vec> eval_batch(4, x);
  const std::vector<Vec> zero_noise(4, Vec(2, 0.0));
  const double before = terrain::vae_loss_and_grad(init, eval_batch, zero_noise, nullptr);
  const double after = terrain::vae_loss_and_grad(trained, eval_batch, zero_noise, nullptr);
  CHECK(after < before);
}

TEST_CASE("vae_train is deterministic and steps=0 returns the init") {
  terrain::Rng rng(9);
  std::vector<Vec> data(40, Vec(5));
  for (auto& d : data)
    for (double& v : d) v = rng.normal();

  terrain::VaeTrainOptions opts;
  opts.steps = 50;
  const auto a = terrain::vae_train(data, 5, 6, 2, opts, 1234);
  const auto b = terrain::vae_train(data, 5, 6, 2, opts, 1234);
  CHECK(a.flatten() == b.flatten());

  opts.steps = 0;
  const auto zero = terrain::vae_train(data, 5, 6, 2, opts, 77);
  CHECK(zero.flatten() == terrain::vae_init(5, 6, 2, 77).flatten());
}

TEST_CASE("encode is deterministic and vae encoding uses the posterior mean") {
  terrain::Rng rng(11);
  terrain::Encoder enc;
  enc.kind = terrain::EncoderKindTag::Vae;
  enc.vae = terrain::vae_init(4, 5, 2, 3);
  Vec x(4);
  for (double& v : x) v = rng.normal();
  CHECK(terrain::encode(enc, x) == terrain::encode(enc, x));
  CHECK_THROWS(terrain::encode(enc, Vec(3, 0.0)));
}

TEST_CASE("pca with an identity basis truncates") {
  terrain::Encoder enc;
  enc.kind = terrain::EncoderKindTag::Pca;
  enc.pca.mean = Vec(4, 0.0);
  enc.pca.components = terrain::Mat(2, 4);
  enc.pca.components(0, 0) = 1.0;
  enc.pca.components(1, 1) = 1.0;
  const Vec z = terrain::encode(enc, {3.0, -2.0, 5.0, 7.0});
  CHECK(z == Vec{3.0, -2.0});
}

TEST_CASE("pca recovers a 1-d line through the origin") {
  terrain::Rng rng(13);
  std::vector<Vec> data;
  Vec ts;
  for (int i = 0; i < 200; ++i) {
    const double t = rng.normal();
    ts.push_back(t);
    data.push_back({3.0 / 5.0 * t, 4.0 / 5.0 * t});
  }
  const terrain::PcaBasis basis = terrain::pca_fit(data, 1, 0);

  // Eigendecomposition oracle on the 2x2 covariance: eigenvalues are var(t)
  // and 0, the top eigenvector is (0.6, 0.8) up to sign.
  double mean_t = 0.0;
  for (double t : ts) mean_t += t / ts.size();
  double var_t = 0.0;
  for (double t : ts) var_t += (t - mean_t) * (t - mean_t) / ts.size();
  CHECK(basis.explained[0] == doctest::Approx(var_t).epsilon(1e-9));
  CHECK(std::fabs(basis.components(0, 0)) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(std::fabs(basis.components(0, 1)) == doctest::Approx(0.8).epsilon(1e-9));

  terrain::Encoder enc;
  enc.kind = terrain::EncoderKindTag::Pca;
  enc.pca = basis;
  for (int i = 0; i < 5; ++i) {
    const double got = terrain::encode(enc, data[static_cast<std::size_t>(i)])[0];
    CHECK(std::fabs(std::fabs(got) - std::fabs(ts[static_cast<std::size_t>(i)] - mean_t)) < 1e-9);
  }
}

TEST_CASE("pca reconstruction error is non-increasing in latent_dim") {
  terrain::Rng rng(17);
  std::vector<Vec> data(30, Vec(6));
  for (auto& d : data)
    for (std::size_t j = 0; j < 6; ++j) d[j] = rng.normal() * (1.0 + static_cast<double>(j));

  auto recon_error = [&](const terrain::PcaBasis& basis) {
    double err = 0.0;
    for (const auto& x : data) {
      Vec centered(6), z(basis.components.rows), back(6, 0.0);
      for (std::size_t j = 0; j < 6; ++j) centered[j] = x[j] - basis.mean[j];
      terrain::mat_vec(basis.components, centered.data(), z.data());
      terrain::mat_tvec(basis.components, z.data(), back.data());
      for (std::size_t j = 0; j < 6; ++j) err += (centered[j] - back[j]) * (centered[j] - back[j]);
    }
    return err;
  };

  double prev = 1e300;
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto basis = terrain::pca_fit(data, k, 5);
    // Orthonormal within 1e-8.
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        const double want = (a == b) ? 1.0 : 0.0;
        CHECK(std::fabs(terrain::dot(basis.components.row(a), basis.components.row(b), 6) - want) <
              1e-8);
      }
    const double err = recon_error(basis);
    CHECK(err <= prev + 1e-9);
    prev = err;
  }
}

TEST_CASE("pca power-iteration path agrees with the exact path") {
  terrain::Rng rng(19);
  std::vector<Vec> data(60, Vec(10));
  for (auto& d : data)
    for (std::size_t j = 0; j < 10; ++j) d[j] = rng.normal() * (j < 2 ? 4.0 : 0.5);

  const terrain::PcaBasis exact = terrain::pca_fit(data, 3, 7);
  terrain::PcaFitOptions force_power;
  force_power.exact_dim_limit = 4;  // 10-dim input takes the iterative path
  force_power.power_iterations = 60;
  const terrain::PcaBasis power = terrain::pca_fit(data, 3, 7, force_power);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(power.explained[k] == doctest::Approx(exact.explained[k]).epsilon(1e-6));
    // Same subspace: projections agree up to sign.
    double dot_abs = std::fabs(
        terrain::dot(power.components.row(k), exact.components.row(k), 10));
    CHECK(dot_abs == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("standardize_latents") {
  const auto out = terrain::standardize_latents({{0.0}, {2.0}});
  CHECK(out[0][0] == doctest::Approx(-1.0));
  CHECK(out[1][0] == doctest::Approx(1.0));

  // Constant dimension is centered, not scaled.
  const auto c = terrain::standardize_latents({{5.0, 1.0}, {5.0, 3.0}});
  CHECK(c[0][0] == 0.0);
  CHECK(c[1][0] == 0.0);

  CHECK_THROWS(terrain::standardize_latents({{1.0}}));

  terrain::Rng rng(23);
  std::vector<Vec> data(100, Vec(4));
  for (auto& d : data)
    for (double& v : d) v = 3.0 * rng.normal() + 1.0;
  const auto s = terrain::standardize_latents(data);
  for (std::size_t j = 0; j < 4; ++j) {
    double mean = 0.0, var = 0.0;
    for (const auto& v : s) mean += v[j] / 100.0;
    for (const auto& v : s) var += (v[j] - mean) * (v[j] - mean) / 100.0;
    CHECK(std::fabs(mean) < 1e-9);
    CHECK(std::fabs(var - 1.0) < 1e-9);
  }
}

TEST_CASE("encoder files round-trip exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "terrain_encoder_test";
  std::filesystem::create_directories(dir);

  terrain::Encoder vae;
  vae.kind = terrain::EncoderKindTag::Vae;
  vae.vae = terrain::vae_init(5, 4, 2, 42);
  vae.seed = 42;
  const std::string vae_path = (dir / "vae.bin").string();
  terrain::save_encoder(vae, vae_path);
  const terrain::Encoder vae_back = terrain::load_encoder(vae_path);
  CHECK(vae_back.kind == terrain::EncoderKindTag::Vae);
  CHECK(vae_back.vae.flatten() == vae.vae.flatten());
  CHECK(vae_back.seed == 42);

  terrain::Rng rng(29);
  std::vector<Vec> data(20, Vec(6));
  for (auto& d : data)
    for (double& v : d) v = rng.normal();
  terrain::Encoder pca;
  pca.kind = terrain::EncoderKindTag::Pca;
  pca.pca = terrain::pca_fit(data, 3, 1);
  const std::string pca_path = (dir / "pca.bin").string();
  terrain::save_encoder(pca, pca_path);
  const terrain::Encoder pca_back = terrain::load_encoder(pca_path);
  CHECK(pca_back.pca.mean == pca.pca.mean);
  CHECK(pca_back.pca.components.a == pca.pca.components.a);
  CHECK(pca_back.pca.explained == pca.pca.explained);

  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
