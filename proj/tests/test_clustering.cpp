#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "terrain/clustering.hpp"
#include "terrain/rng.hpp"

using terrain::AffinityMatrix;
using terrain::GmmModel;
using terrain::Sequence;
using terrain::SequenceFeatures;
using terrain::Vec;

namespace {

std::vector<Vec> random_points(std::size_t n, std::size_t d, terrain::Rng& rng, double spread) {
  std::vector<Vec> pts(n, Vec(d));
  for (auto& p : pts)
    for (double& v : p) v = spread * rng.normal();
  return pts;
}

}  // namespace

TEST_SUITE_BEGIN("clustering");

TEST_CASE("em with one component recovers sample moments") {
  terrain::Rng rng(3);
  const auto pts = random_points(50, 3, rng, 2.0);
  const GmmModel m = terrain::em_fit(pts, 1, 99);
  Vec mean(3, 0.0), var(3, 0.0);
  for (const auto& p : pts)
    for (std::size_t d = 0; d < 3; ++d) mean[d] += p[d] / 50.0;
  for (const auto& p : pts)
    for (std::size_t d = 0; d < 3; ++d) var[d] += (p[d] - mean[d]) * (p[d] - mean[d]) / 50.0;
  for (std::size_t d = 0; d < 3; ++d) {
    CHECK(m.means(0, d) == doctest::Approx(mean[d]).epsilon(1e-9));
    CHECK(m.variances(0, d) == doctest::Approx(std::max(var[d], 1e-6)).epsilon(1e-9));
  }
  CHECK(m.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("em separates two far 1-d clusters") {
  terrain::Rng rng(5);
  std::vector<Vec> pts;
  Vec truth_a, truth_b;
  for (int i = 0; i < 100; ++i) {
    const double a = rng.normal();
    const double b = 100.0 + rng.normal();
    pts.push_back({a});
    pts.push_back({b});
    truth_a.push_back(a);
    truth_b.push_back(b);
  }
  const GmmModel m = terrain::em_fit(pts, 2, 42);
  double lo = m.means(0, 0), hi = m.means(1, 0);
  if (lo > hi) std::swap(lo, hi);

  // Ground-truth-partition sample means are the oracle.
  const double mean_a = std::accumulate(truth_a.begin(), truth_a.end(), 0.0) / 100.0;
  const double mean_b = std::accumulate(truth_b.begin(), truth_b.end(), 0.0) / 100.0;
  CHECK(std::fabs(lo - mean_a) < 0.2);
  CHECK(std::fabs(hi - mean_b) < 0.2);
  CHECK(std::fabs(lo - 0.0) < 1.0);
  CHECK(std::fabs(hi - 100.0) < 1.0);
}

TEST_CASE("em is deterministic for a fixed seed") {
  terrain::Rng rng(7);
  const auto pts = random_points(80, 4, rng, 1.5);
  const GmmModel a = terrain::em_fit(pts, 3, 1234);
  const GmmModel b = terrain::em_fit(pts, 3, 1234);
  CHECK(a.weights == b.weights);
  CHECK(a.means.a == b.means.a);
  CHECK(a.variances.a == b.variances.a);
}

TEST_CASE("em log-likelihood is non-decreasing and responsibilities normalize") {
  terrain::Rng rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    auto pts = random_points(60, 2 + rep % 3, rng, 1.0);
    // Spread clusters a little so the fit moves.
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i][0] += (i % 3) * 4.0;
    const GmmModel m = terrain::em_fit(pts, 3, rep);
    for (std::size_t i = 1; i < m.log_likelihood_history.size(); ++i)
      CHECK(m.log_likelihood_history[i] >= m.log_likelihood_history[i - 1] - 1e-9);
    const terrain::Mat resp = terrain::em_responsibilities(m, pts);
    for (std::size_t i = 0; i < resp.rows; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < resp.cols; ++k) s += resp(i, k);
      CHECK(std::fabs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("em rejects bad inputs") {
  terrain::Rng rng(1);
  const auto pts = random_points(5, 2, rng, 1.0);
  CHECK_THROWS(terrain::em_fit(pts, 6, 0));  // K > samples
  CHECK_THROWS(terrain::em_fit(pts, 0, 0));
  auto bad = pts;
  bad[2][1] = std::nan("");
  CHECK_THROWS(terrain::em_fit(bad, 2, 0));
}

TEST_CASE("em_assign picks the component a point sits on and breaks ties low") {
  GmmModel m;
  m.n_components = 2;
  m.dim = 1;
  m.weights = {0.5, 0.5};
  m.means = terrain::Mat(2, 1);
  m.means(0, 0) = -1.0;
  m.means(1, 0) = 1.0;
  m.variances = terrain::Mat(2, 1, 1.0);

  CHECK(terrain::em_assign(m, {{-1.0}}) == std::vector<int>{0});
  CHECK(terrain::em_assign(m, {{1.0}}) == std::vector<int>{1});
  // Exactly equidistant between identical components: label 0.
  CHECK(terrain::em_assign(m, {{0.0}}) == std::vector<int>{0});
}

TEST_CASE("em_assign matches the direct density oracle") {
  terrain::Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    auto pts = random_points(40, 2, rng, 1.0);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i][1] += (i % 2) * 3.0;
    const GmmModel m = terrain::em_fit(pts, 2 + rep % 2, rep * 7 + 1);
    const auto probe = random_points(30, 2, rng, 2.0);
    CHECK(terrain::em_assign(m, probe) == oracle::density_argmax(m, probe));
  }
}

TEST_CASE("detect_sequences splits exactly at label changes") {
  const auto seqs = terrain::detect_sequences({0, 0, 1, 1, 2});
  REQUIRE(seqs.size() == 3);
  CHECK(seqs[0].start_frame == 0);
  CHECK(seqs[0].end_frame == 2);
  CHECK(seqs[1].start_frame == 2);
  CHECK(seqs[1].end_frame == 4);
  CHECK(seqs[2].start_frame == 4);
  CHECK(seqs[2].end_frame == 5);
  CHECK(seqs[0].em_label == 0);
  CHECK(seqs[2].em_label == 2);

  const auto single = terrain::detect_sequences({7});
  REQUIRE(single.size() == 1);
  CHECK(single[0].start_frame == 0);
  CHECK(single[0].end_frame == 1);

  CHECK(terrain::detect_sequences({0, 1, 0, 1}).size() == 4);
  CHECK_THROWS(terrain::detect_sequences({}));
}

TEST_CASE("detect_sequences tiles the stream and matches the run-length scanner") {
  terrain::Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> labels(1 + rng.uniform_int(40));
    for (int& l : labels) l = static_cast<int>(rng.uniform_int(4));
    const auto seqs = terrain::detect_sequences(labels);
    const auto want = oracle::runlength_sequences(labels);
    REQUIRE(seqs.size() == want.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      CHECK(seqs[i].start_frame == want[i].start_frame);
      CHECK(seqs[i].end_frame == want[i].end_frame);
      CHECK(seqs[i].em_label == want[i].em_label);
      CHECK(seqs[i].start_frame == cursor);  // exact tiling
      cursor = seqs[i].end_frame;
      if (i > 0) CHECK(seqs[i].em_label != seqs[i - 1].em_label);
    }
    CHECK(cursor == labels.size());
  }
}

TEST_CASE("sequence boundaries depend only on label changes, not label values") {
  terrain::Rng rng(29);
  std::vector<int> labels(60);
  for (int& l : labels) l = static_cast<int>(rng.uniform_int(3));
  const int perm[3] = {2, 0, 1};
  std::vector<int> renamed(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) renamed[i] = perm[labels[i]];
  const auto a = terrain::detect_sequences(labels);
  const auto b = terrain::detect_sequences(renamed);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].start_frame == b[i].start_frame);
    CHECK(a[i].end_frame == b[i].end_frame);
  }
}

TEST_CASE("average_sequence_features") {
  const std::vector<Sequence> seqs = {{0, 0, 2, 0}, {1, 2, 3, 1}};
  const std::vector<Vec> audio = {{0.0}, {2.0}, {5.0}};
  const std::vector<Vec> visual = {{1.0, 1.0}, {1.0, 1.0}, {0.0, 4.0}};
  const auto feats = terrain::average_sequence_features(seqs, audio, visual);
  REQUIRE(feats.size() == 2);
  CHECK(feats[0].audio_mean[0] == doctest::Approx(1.0));
  CHECK(feats[0].visual_mean == Vec{1.0, 1.0});
  CHECK(feats[1].audio_mean[0] == doctest::Approx(5.0));

  // Random sequence against the brute-force sum.
  terrain::Rng rng(31);
  std::vector<Vec> a5, v5;
  for (int i = 0; i < 5; ++i) {
    a5.push_back({rng.normal(), rng.normal()});
    v5.push_back({rng.normal()});
  }
  const std::vector<Sequence> one = {{0, 0, 5, 0}};
  const auto f = terrain::average_sequence_features(one, a5, v5);
  for (std::size_t d = 0; d < 2; ++d) {
    double s = 0.0;
    for (const auto& x : a5) s += x[d];
    CHECK(std::fabs(f[0].audio_mean[d] - s / 5.0) < 1e-12);
  }

  // Out of range.
  const std::vector<Sequence> over = {{0, 0, 9, 0}};
  CHECK_THROWS(terrain::average_sequence_features(over, a5, v5));
}

TEST_CASE("sequence affinity takes the per-pair modality minimum") {
  std::vector<SequenceFeatures> feats(2);
  feats[0].audio_mean = {0.0, 0.0};
  feats[0].visual_mean = {0.0};
  feats[1].audio_mean = {3.0, 4.0};  // audio distance 5
  feats[1].visual_mean = {2.0};      // visual distance 2
  const AffinityMatrix aff = terrain::sequence_affinity(feats);
  CHECK(aff.at(0, 1) == doctest::Approx(2.0));
  CHECK(aff.at(1, 0) == doctest::Approx(2.0));
  CHECK(aff.at(0, 0) == 0.0);
  CHECK(aff.at(1, 1) == 0.0);

  feats[1] = feats[0];
  CHECK(terrain::sequence_affinity(feats).at(0, 1) == 0.0);
}

TEST_CASE("sequence affinity matches brute-force recomputation and the min contract") {
  terrain::Rng rng(37);
  std::vector<SequenceFeatures> feats(6);
  for (auto& f : feats) {
    f.audio_mean = {rng.normal(), rng.normal(), rng.normal()};
    f.visual_mean = {rng.normal(), rng.normal()};
  }
  const AffinityMatrix aff = terrain::sequence_affinity(feats);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(aff.at(i, i) == 0.0);
    for (std::size_t j = 0; j < 6; ++j) {
      const double da = terrain::euclidean(feats[i].audio_mean, feats[j].audio_mean);
      const double dv = terrain::euclidean(feats[i].visual_mean, feats[j].visual_mean);
      CHECK(aff.at(i, j) == aff.at(j, i));
      CHECK(aff.at(i, j) <= da);
      CHECK(aff.at(i, j) <= dv);
      CHECK(aff.at(i, j) == doctest::Approx(std::min(da, dv)).epsilon(1e-15));
    }
  }

  // Baseline modes.
  const AffinityMatrix audio = terrain::sequence_affinity_mode(feats, terrain::SwitchMode::AudioOnly);
  const AffinityMatrix concat = terrain::sequence_affinity_mode(feats, terrain::SwitchMode::Concat);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const double da = terrain::euclidean(feats[i].audio_mean, feats[j].audio_mean);
      const double dv = terrain::euclidean(feats[i].visual_mean, feats[j].visual_mean);
      CHECK(audio.at(i, j) == doctest::Approx(da).epsilon(1e-15));
      CHECK(concat.at(i, j) == doctest::Approx(std::sqrt(da * da + dv * dv)).epsilon(1e-15));
    }

  CHECK_THROWS(terrain::sequence_affinity({feats[0]}));  // need >= 2
}

TEST_CASE("agglomerate endpoints: target_k = n and target_k = 1") {
  terrain::Rng rng(41);
  AffinityMatrix aff(5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) {
      aff.at(i, j) = 1.0 + rng.uniform();
      aff.at(j, i) = aff.at(i, j);
    }
  CHECK(terrain::agglomerate(aff, 5) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(terrain::agglomerate(aff, 1) == std::vector<int>(5, 0));
  CHECK_THROWS(terrain::agglomerate(aff, 0));
  CHECK_THROWS(terrain::agglomerate(aff, 6));
}

TEST_CASE("agglomerate merge trace matches the naive linkage oracle") {
  terrain::Rng rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 4 + rng.uniform_int(5);
    AffinityMatrix aff(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        aff.at(i, j) = rng.uniform(0.1, 10.0);
        aff.at(j, i) = aff.at(i, j);
      }
    const std::size_t target = 1 + rng.uniform_int(n);
    std::vector<std::pair<std::size_t, std::size_t>> got_trace, want_trace;
    const auto got = terrain::agglomerate(aff, target, terrain::Linkage::Average, &got_trace);
    const auto want = oracle::naive_agglomerate(aff, target, terrain::Linkage::Average, &want_trace);
    CHECK(got == want);
    CHECK(got_trace == want_trace);
  }
}

TEST_CASE("agglomerate levels nest like a dendrogram") {
  terrain::Rng rng(47);
  AffinityMatrix aff(8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j) {
      aff.at(i, j) = rng.uniform(0.5, 4.0);
      aff.at(j, i) = aff.at(i, j);
    }
  for (std::size_t k = 8; k > 1; --k) {
    const auto fine = terrain::agglomerate(aff, k);
    const auto coarse = terrain::agglomerate(aff, k - 1);
    // Each coarse cluster is a union of fine clusters, and exactly one pair
    // of fine clusters fused.
    std::set<std::pair<int, int>> pairs;
    for (std::size_t s = 0; s < 8; ++s) pairs.insert({coarse[s], fine[s]});
    CHECK(pairs.size() == k);  // k fine clusters distributed over k-1 coarse
    std::set<int> fine_ids(fine.begin(), fine.end());
    std::set<int> coarse_ids(coarse.begin(), coarse.end());
    CHECK(fine_ids.size() == k);
    CHECK(coarse_ids.size() == k - 1);
  }
}

TEST_CASE("propagate_labels feeds sequence labels back to frames") {
  const std::vector<Sequence> seqs = {{0, 0, 2, 0}, {1, 2, 3, 1}};
  const auto out = terrain::propagate_labels(seqs, {4, 2}, 3);
  CHECK(out.labels == std::vector<int>{4, 4, 2});
  CHECK(out.n_clusters == 5);

  const std::vector<Sequence> single = {{0, 0, 4, 0}};
  CHECK(terrain::propagate_labels(single, {0}, 4).labels == std::vector<int>(4, 0));

  CHECK_THROWS(terrain::propagate_labels(seqs, {1}, 3));    // label count
  CHECK_THROWS(terrain::propagate_labels(seqs, {0, 1}, 9)); // coverage gap
}

TEST_SUITE_END();
