#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "terrain/linalg.hpp"

namespace terrain {

class FrameStream;

enum class Taper { Hamming, Hann, Rect };

Taper taper_from_name(const std::string& name);
std::string taper_name(Taper t);

struct MfccConfig {
  std::size_t n_coeffs = 26;
  std::size_t fft_size = 65536;  // 0 = smallest power of two >= window length
  std::size_t n_mel_filters = 26;
  double preemphasis = 0.97;
  Taper window_fn = Taper::Hamming;
  double log_floor = 1e-10;

  void validate(std::size_t window_len) const;
  std::size_t effective_fft_size(std::size_t window_len) const;

  bool operator==(const MfccConfig&) const = default;
};

// Triangular mel filterbank spanning 0 Hz to Nyquist. Each filter stores the
// non-zero bin range only; spectra are long and the triangles are narrow.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t n_filters, std::size_t fft_size, double sample_rate);

  std::size_t size() const { return filters_.size(); }
  double center_hz(std::size_t i) const { return centers_hz_[i]; }

  // Filter energies of a power spectrum (fft_size/2 + 1 bins).
  Vec apply(const std::vector<double>& power) const;

  static double hz_to_mel(double hz);
  static double mel_to_hz(double mel);

 private:
  struct Filter {
    std::size_t first_bin;
    std::vector<double> weights;
  };
  std::vector<Filter> filters_;
  std::vector<double> centers_hz_;
};

std::vector<double> make_taper(Taper t, std::size_t length);

// 26-dim cepstral descriptor of one audio window:
// pre-emphasis -> taper -> zero-pad -> power spectrum -> mel filterbank
// -> floored log energies -> orthonormal DCT-II, first n_coeffs kept.
Vec compute_mfcc(const std::vector<double>& window, double sample_rate, const MfccConfig& cfg);

// One MFCC vector per frame of an aligned stream, frame order preserved.
std::vector<Vec> mfcc_stream(const FrameStream& stream, const MfccConfig& cfg);

}  // namespace terrain
