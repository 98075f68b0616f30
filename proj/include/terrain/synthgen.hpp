#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "terrain/ingest.hpp"

namespace terrain {

struct AudioSignature {
  double center_hz = 300.0;     // spectral envelope center
  double bandwidth_hz = 80.0;   // envelope width
  double gain = 1.0;
};

struct VisualSignature {
  double r = 0.5, g = 0.5, b = 0.5;   // base color in [0, 1]
  double texture_variance = 0.1;      // per-pixel noise amplitude
};

struct TerrainSignature {
  AudioSignature audio;
  VisualSignature visual;
};

// Describes one synthetic scene: a segment script over terrain ids plus the
// two documented noise regimes (visual occlusion events, audio grain shifts).
struct SceneSpec {
  std::string name;
  std::vector<std::pair<int, std::size_t>> segments;  // (terrain_id, n_frames)
  std::vector<TerrainSignature> terrains;
  double occlusion_rate = 0.0;    // per-frame probability of an occlusion event
  double grain_shift_rate = 0.0;  // per-frame probability of an envelope re-tilt
  std::uint64_t seed = 0;
  double sample_rate = 2000.0;
  double frame_rate = 30.0;
  double window_seconds = 2.8;
  std::size_t image_size = 128;

  std::size_t total_frames() const;
  std::size_t n_terrains() const { return terrains.size(); }
  void validate() const;
};

struct SceneData {
  FrameStream stream;                // carries ground-truth labels
  RunManifest manifest;              // paths are filled by write_scene
  std::vector<std::int16_t> audio_i16;  // exact PCM written to disk
};

// Deterministic synthesis: audio is terrain-band-filtered noise continuous
// across frames; images are base color plus seeded texture. Occlusion events
// overwrite a random image half with a dark blob for 5-15 consecutive
// frames; grain-shift events re-tilt the active terrain's envelope center by
// a uniform [0.8, 1.25] factor without changing the ground-truth label.
SceneData generate_scene(const SceneSpec& spec);

// Writes WAV + numbered PNGs + labels CSV + manifest JSON under out_dir, in
// exactly the formats the ingest module reads back. Returns the manifest path.
std::string write_scene(const SceneSpec& spec, const std::string& out_dir);

// The 20-scene acceptance recipe: 10 scenes dominated by visual noise, 10 by
// audio grain shifts; 2-4 terrains and 600-2000 frames each.
std::vector<SceneSpec> standard_suite(std::uint64_t seed);

}  // namespace terrain
