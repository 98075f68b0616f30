#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "terrain/mfcc.hpp"
#include "terrain/synthgen.hpp"

namespace {

terrain::SceneSpec two_terrain_spec(std::uint64_t seed, double occlusion, double grain) {
  terrain::SceneSpec spec;
  spec.name = "unit";
  spec.seed = seed;
  spec.sample_rate = 2000.0;
  spec.window_seconds = 0.7;
  spec.occlusion_rate = occlusion;
  spec.grain_shift_rate = grain;
  spec.segments = {{0, 60}, {1, 60}};
  terrain::TerrainSignature a, b;
  a.audio.center_hz = 180.0;
  a.audio.bandwidth_hz = 50.0;
  a.visual = {0.2, 0.4, 0.8, 0.1};
  b.audio.center_hz = 620.0;
  b.audio.bandwidth_hz = 150.0;
  b.visual = {0.8, 0.7, 0.2, 0.1};
  spec.terrains = {a, b};
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("synthgen");

TEST_CASE("segment script becomes the ground-truth label runs") {
  terrain::SceneSpec spec = two_terrain_spec(1, 0.0, 0.0);
  spec.segments = {{0, 5}, {1, 7}, {0, 4}};
  const terrain::SceneData data = terrain::generate_scene(spec);
  const auto& gt = *data.stream.gt_labels();
  REQUIRE(gt.size() == 16);
  const auto runs = oracle::runlength_sequences(gt);
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].length() == 5);
  CHECK(runs[1].length() == 7);
  CHECK(runs[2].length() == 4);
  CHECK(runs[0].em_label == 0);
  CHECK(runs[1].em_label == 1);
}

TEST_CASE("generation is deterministic in the seed") {
  const terrain::SceneSpec spec = two_terrain_spec(77, 0.05, 0.02);
  const terrain::SceneData a = terrain::generate_scene(spec);
  const terrain::SceneData b = terrain::generate_scene(spec);
  CHECK(a.stream.audio() == b.stream.audio());
  CHECK(a.stream.image(10).rgb == b.stream.image(10).rgb);
  CHECK(*a.stream.gt_labels() == *b.stream.gt_labels());

  terrain::SceneSpec other = spec;
  other.seed = 78;
  const terrain::SceneData c = terrain::generate_scene(other);
  CHECK(a.stream.audio() != c.stream.audio());
}

TEST_CASE("clean terrains separate in MFCC space") {
  const terrain::SceneSpec spec = two_terrain_spec(3, 0.0, 0.0);
  const terrain::SceneData data = terrain::generate_scene(spec);
  terrain::MfccConfig cfg;
  cfg.fft_size = 0;
  const auto feats = terrain::mfcc_stream(data.stream, cfg);
  CHECK(oracle::silhouette(feats, *data.stream.gt_labels()) > 0.0);
}

TEST_CASE("scene validation") {
  terrain::SceneSpec spec = two_terrain_spec(1, 0.0, 0.0);
  spec.segments.clear();
  CHECK_THROWS(terrain::generate_scene(spec));
  spec = two_terrain_spec(1, 0.0, 0.0);
  spec.segments[0].second = 0;
  CHECK_THROWS(terrain::generate_scene(spec));
  spec = two_terrain_spec(1, 0.0, 0.0);
  spec.segments[0].first = 9;
  CHECK_THROWS(terrain::generate_scene(spec));
  spec = two_terrain_spec(1, 0.0, 0.0);
  spec.occlusion_rate = 1.5;
  CHECK_THROWS(terrain::generate_scene(spec));
}

TEST_CASE("standard suite structure") {
  const auto specs = terrain::standard_suite(0);
  REQUIRE(specs.size() == 20);
  std::size_t visual_dominant = 0;
  for (const auto& s : specs) {
    const std::size_t frames = s.total_frames();
    CHECK(frames >= 600);
    CHECK(frames <= 2000);
    CHECK(s.n_terrains() >= 2);
    CHECK(s.n_terrains() <= 4);
    // Every terrain appears.
    std::set<int> used;
    for (const auto& [id, len] : s.segments) used.insert(id);
    CHECK(used.size() == s.n_terrains());
    // Adjacent segments always change terrain.
    for (std::size_t i = 1; i < s.segments.size(); ++i)
      CHECK(s.segments[i].first != s.segments[i - 1].first);
    if (s.occlusion_rate > s.grain_shift_rate) ++visual_dominant;
  }
  CHECK(visual_dominant == 10);

  // Same structure counts but different draws for another seed.
  const auto other = terrain::standard_suite(1);
  REQUIRE(other.size() == 20);
  bool any_different = false;
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(other[i].n_terrains() == specs[i].n_terrains());
    if (other[i].terrains[0].audio.center_hz != specs[i].terrains[0].audio.center_hz)
      any_different = true;
  }
  CHECK(any_different);
}

TEST_SUITE_END();
