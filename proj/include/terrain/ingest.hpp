#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "terrain/linalg.hpp"

namespace terrain {

// 8-bit RGB image, row-major, channels interleaved. Matches what PNG holds,
// so a stream generated in memory and one re-read from disk are identical.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}

  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) {
    return rgb[(y * width + x) * 3 + c];
  }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
    return rgb[(y * width + x) * 3 + c];
  }
  // Intensity in [0, 1].
  double value(std::size_t y, std::size_t x, std::size_t c) const {
    return static_cast<double>(at(y, x, c)) / 255.0;
  }
};

struct RunManifest {
  std::string audio_path;
  double sample_rate = 0.0;
  std::string image_dir;
  double frame_rate = 30.0;
  std::optional<std::string> gt_labels_path;
  std::string scene_name;
};

struct FrameRecord {
  std::size_t frame_index = 0;
  double timestamp = 0.0;
  Vec audio_window;
  Image image;
  std::optional<int> gt_label;
};

// Time-aligned audio and image streams. Audio windows are materialized on
// demand from the shared buffer; storing one window per frame would blow up
// memory for the heavily overlapping 2.8 s windows.
class FrameStream {
 public:
  FrameStream() = default;
  FrameStream(Vec audio, double sample_rate, double frame_rate, std::size_t window_len,
              std::vector<Image> images, std::optional<std::vector<int>> gt_labels);

  std::size_t frame_count() const { return images_.size(); }
  double sample_rate() const { return sample_rate_; }
  double frame_rate() const { return frame_rate_; }
  std::size_t window_length() const { return window_len_; }
  double timestamp(std::size_t t) const { return static_cast<double>(t) / frame_rate_; }

  // Sample index the window of frame t is centered on.
  std::int64_t window_center(std::size_t t) const;

  // Audio window of frame t, zero-padded where it extends past stream ends.
  Vec audio_window(std::size_t t) const;

  const Image& image(std::size_t t) const { return images_[t]; }
  const Vec& audio() const { return audio_; }
  const std::optional<std::vector<int>>& gt_labels() const { return gt_labels_; }

  FrameRecord record(std::size_t t) const;

 private:
  Vec audio_;
  double sample_rate_ = 0.0;
  double frame_rate_ = 0.0;
  std::size_t window_len_ = 0;
  std::vector<Image> images_;
  std::optional<std::vector<int>> gt_labels_;
};

// Parse and validate a manifest JSON. Relative paths are resolved against
// the manifest's directory. Checks that referenced files exist, that the
// audio is long enough for the image count, and that an optional labels CSV
// has one row per image.
RunManifest load_manifest(const std::string& path);

// One FrameRecord per image; the audio window for frame t is centered at
// t / frame_rate and zero-padded at the stream edges.
FrameStream align_streams(const RunManifest& manifest, double window_seconds);

// CSV rows `frame_index,label`, ordered by frame index.
void export_pseudo_labels(std::size_t frame_count, const std::vector<int>& labels,
                          const std::string& out_path);

// Reads a labels CSV back; requires the header and contiguous frame indices.
std::vector<int> read_labels_csv(const std::string& path);

// Filenames sorted so that embedded numbers compare numerically
// (frame2.png < frame10.png); this order defines the frame index.
bool natural_less(const std::string& a, const std::string& b);
std::vector<std::string> list_images_natural_order(const std::string& dir);

}  // namespace terrain
