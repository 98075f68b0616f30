#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "terrain/linalg.hpp"

namespace terrain {

struct WavInfo {
  double sample_rate = 0.0;
  std::size_t frame_count = 0;  // samples per channel
  std::uint16_t channels = 0;
};

// Header only; used by manifest validation to check duration cheaply.
WavInfo read_wav_info(const std::string& path);

// 16-bit PCM RIFF reader; multi-channel input is averaged down to mono.
// Samples are scaled to [-1, 1).
Vec read_wav_mono(const std::string& path, WavInfo* info = nullptr);

void write_wav_mono16(const std::string& path, const std::vector<std::int16_t>& samples,
                      double sample_rate);

}  // namespace terrain
