#include "terrain/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "terrain/png_io.hpp"
#include "terrain/wav_io.hpp"

namespace fs = std::filesystem;

namespace terrain {

bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      // Compare digit runs numerically: strip leading zeros, then by length,
      // then lexicographically.
      std::size_t is = i, js = j;
      while (is < ie - 1 && a[is] == '0') ++is;
      while (js < je - 1 && b[js] == '0') ++js;
      const std::size_t la = ie - is, lb = je - js;
      if (la != lb) return la < lb;
      const int cmp = a.compare(is, la, b, js, lb);
      if (cmp != 0) return cmp < 0;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() < b.size() || (a.size() == b.size() && a < b);
}

std::vector<std::string> list_images_natural_order(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("image directory not found: " + dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() >= 4 && name.substr(name.size() - 4) == ".png") names.push_back(name);
  }
  std::sort(names.begin(), names.end(), natural_less);
  std::vector<std::string> paths;
  paths.reserve(names.size());
  for (const auto& n : names) paths.push_back((fs::path(dir) / n).string());
  return paths;
}

namespace {

std::size_t count_label_rows(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open labels CSV: " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("labels CSV empty: " + path);
  std::size_t rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  return rows;
}

}  // namespace

RunManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("manifest not found: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("manifest parse error: " + std::string(e.what()));
  }

  RunManifest m;
  try {
    m.audio_path = j.at("audio_path").get<std::string>();
    m.sample_rate = j.at("sample_rate").get<double>();
    m.image_dir = j.at("image_dir").get<std::string>();
    m.frame_rate = j.value("frame_rate", 30.0);
    if (j.contains("gt_labels_path") && !j.at("gt_labels_path").is_null())
      m.gt_labels_path = j.at("gt_labels_path").get<std::string>();
    m.scene_name = j.value("scene_name", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("manifest schema violation: " + std::string(e.what()));
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"audio_path", "sample_rate", "image_dir",
                                  "frame_rate", "gt_labels_path", "scene_name"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known))
      throw std::runtime_error("manifest schema violation: unknown key '" + it.key() + "'");
  }

  if (m.frame_rate <= 0.0) throw std::runtime_error("manifest: frame_rate must be > 0");
  if (m.sample_rate <= 0.0) throw std::runtime_error("manifest: sample_rate must be > 0");

  // Resolve paths relative to the manifest's directory.
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (base / p).string();
  };
  m.audio_path = resolve(m.audio_path);
  m.image_dir = resolve(m.image_dir);
  if (m.gt_labels_path) m.gt_labels_path = resolve(*m.gt_labels_path);

  if (!fs::exists(m.audio_path)) throw std::runtime_error("audio file missing: " + m.audio_path);
  const std::vector<std::string> images = list_images_natural_order(m.image_dir);
  if (images.empty()) throw std::runtime_error("empty image stream: " + m.image_dir);

  const WavInfo info = read_wav_info(m.audio_path);
  if (std::fabs(info.sample_rate - m.sample_rate) > 1e-9)
    throw std::runtime_error("manifest sample_rate disagrees with WAV header");
  const double audio_seconds = static_cast<double>(info.frame_count) / info.sample_rate;
  const double needed = static_cast<double>(images.size() - 1) / m.frame_rate;
  if (audio_seconds + 1e-9 < needed)
    throw std::runtime_error("audio shorter than the image stream requires");

  if (m.gt_labels_path) {
    const std::size_t rows = count_label_rows(*m.gt_labels_path);
    if (rows != images.size())
      throw std::runtime_error("label/frame mismatch: " + std::to_string(rows) + " labels for " +
                               std::to_string(images.size()) + " frames");
  }
  return m;
}

FrameStream::FrameStream(Vec audio, double sample_rate, double frame_rate,
                         std::size_t window_len, std::vector<Image> images,
                         std::optional<std::vector<int>> gt_labels)
    : audio_(std::move(audio)),
      sample_rate_(sample_rate),
      frame_rate_(frame_rate),
      window_len_(window_len),
      images_(std::move(images)),
      gt_labels_(std::move(gt_labels)) {
  if (gt_labels_ && gt_labels_->size() != images_.size())
    throw std::invalid_argument("FrameStream: label count != frame count");
}

std::int64_t FrameStream::window_center(std::size_t t) const {
  return std::llround(static_cast<double>(t) / frame_rate_ * sample_rate_);
}

Vec FrameStream::audio_window(std::size_t t) const {
  Vec w(window_len_, 0.0);
  const std::int64_t start = window_center(t) - static_cast<std::int64_t>(window_len_ / 2);
  const std::int64_t n = static_cast<std::int64_t>(audio_.size());
  for (std::size_t i = 0; i < window_len_; ++i) {
    const std::int64_t s = start + static_cast<std::int64_t>(i);
    if (s >= 0 && s < n) w[i] = audio_[static_cast<std::size_t>(s)];
  }
  return w;
}

FrameRecord FrameStream::record(std::size_t t) const {
  FrameRecord r;
  r.frame_index = t;
  r.timestamp = timestamp(t);
  r.audio_window = audio_window(t);
  r.image = images_[t];
  if (gt_labels_) r.gt_label = (*gt_labels_)[t];
  return r;
}

FrameStream align_streams(const RunManifest& manifest, double window_seconds) {
  if (window_seconds <= 0.0) throw std::invalid_argument("align_streams: window_seconds must be > 0");

  Vec audio = read_wav_mono(manifest.audio_path);
  const std::vector<std::string> paths = list_images_natural_order(manifest.image_dir);
  if (paths.empty()) throw std::runtime_error("empty image stream: " + manifest.image_dir);

  std::vector<Image> images;
  images.reserve(paths.size());
  for (const auto& p : paths) images.push_back(read_png(p));

  std::optional<std::vector<int>> gt;
  if (manifest.gt_labels_path) gt = read_labels_csv(*manifest.gt_labels_path);

  const std::size_t window_len =
      static_cast<std::size_t>(std::llround(window_seconds * manifest.sample_rate));
  if (window_len == 0) throw std::invalid_argument("align_streams: window shorter than one sample");

  FrameStream stream(std::move(audio), manifest.sample_rate, manifest.frame_rate, window_len,
                     std::move(images), std::move(gt));

  // Reject runs whose audio covers less than half a window at every frame.
  bool any_half = false;
  const std::int64_t n = static_cast<std::int64_t>(stream.audio().size());
  for (std::size_t t = 0; t < stream.frame_count() && !any_half; ++t) {
    const std::int64_t start = stream.window_center(t) - static_cast<std::int64_t>(window_len / 2);
    const std::int64_t end = start + static_cast<std::int64_t>(window_len);
    const std::int64_t overlap = std::min(end, n) - std::max<std::int64_t>(start, 0);
    if (2 * overlap >= static_cast<std::int64_t>(window_len)) any_half = true;
  }
  if (!any_half) throw std::runtime_error("audio overlaps less than half a window at every frame");
  return stream;
}

void export_pseudo_labels(std::size_t frame_count, const std::vector<int>& labels,
                          const std::string& out_path) {
  if (labels.empty()) throw std::invalid_argument("export_pseudo_labels: empty labeling");
  if (labels.size() != frame_count)
    throw std::invalid_argument("export_pseudo_labels: label count != frame count");
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write labels CSV: " + out_path);
  os << "frame_index,label\n";
  for (std::size_t t = 0; t < labels.size(); ++t) os << t << "," << labels[t] << "\n";
  if (!os) throw std::runtime_error("short write: " + out_path);
}

std::vector<int> read_labels_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open labels CSV: " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("labels CSV empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "frame_index,label")
    throw std::runtime_error("labels CSV has unexpected header: " + line);

  std::vector<int> labels;
  std::size_t expect = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("labels CSV malformed row: " + line);
    const std::size_t idx = static_cast<std::size_t>(std::stoll(line.substr(0, comma)));
    if (idx != expect)
      throw std::runtime_error("labels CSV rows out of order at frame " + std::to_string(expect));
    labels.push_back(static_cast<int>(std::stoll(line.substr(comma + 1))));
    ++expect;
  }
  if (labels.empty()) throw std::runtime_error("labels CSV has no rows: " + path);
  return labels;
}

}  // namespace terrain
