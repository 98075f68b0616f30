#include "terrain/mfcc.hpp"

#include <cmath>
#include <stdexcept>

#include "terrain/fft.hpp"
#include "terrain/ingest.hpp"

namespace terrain {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// pre-emphasis -> taper -> power spectrum -> mel energies -> floored log
// -> orthonormal DCT-II.
Vec mfcc_pipeline(const std::vector<double>& window, const MelFilterbank& bank,
                  const std::vector<double>& taper, const MfccConfig& cfg, std::size_t n_fft) {
  std::vector<double> x(window.size());
  x[0] = window[0];
  for (std::size_t i = 1; i < window.size(); ++i)
    x[i] = window[i] - cfg.preemphasis * window[i - 1];
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= taper[i];

  const std::vector<double> power = power_spectrum(x, n_fft);
  Vec energies = bank.apply(power);
  for (double& e : energies) e = std::log(std::max(e, cfg.log_floor));

  const std::size_t m = cfg.n_mel_filters;
  Vec coeffs(cfg.n_coeffs, 0.0);
  for (std::size_t j = 0; j < cfg.n_coeffs; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      s += energies[i] * std::cos(kPi * static_cast<double>(j) * (2.0 * i + 1.0) / (2.0 * m));
    const double scale = (j == 0) ? std::sqrt(1.0 / static_cast<double>(m))
                                  : std::sqrt(2.0 / static_cast<double>(m));
    coeffs[j] = scale * s;
  }
  return coeffs;
}

}  // namespace

Taper taper_from_name(const std::string& name) {
  if (name == "hamming") return Taper::Hamming;
  if (name == "hann") return Taper::Hann;
  if (name == "rect") return Taper::Rect;
  throw std::invalid_argument("unknown taper: " + name);
}

std::string taper_name(Taper t) {
  switch (t) {
    case Taper::Hamming: return "hamming";
    case Taper::Hann: return "hann";
    case Taper::Rect: return "rect";
  }
  return "hamming";
}

void MfccConfig::validate(std::size_t window_len) const {
  if (n_coeffs == 0 || n_mel_filters == 0) throw std::invalid_argument("mfcc: zero-sized config");
  if (n_coeffs > n_mel_filters)
    throw std::invalid_argument("mfcc: n_coeffs must not exceed n_mel_filters");
  if (preemphasis < 0.0 || preemphasis >= 1.0)
    throw std::invalid_argument("mfcc: preemphasis must be in [0, 1)");
  const std::size_t n = effective_fft_size(window_len);
  if (!is_power_of_two(n)) throw std::invalid_argument("mfcc: fft_size must be a power of two");
  if (n < window_len) throw std::invalid_argument("mfcc: window longer than fft_size");
}

std::size_t MfccConfig::effective_fft_size(std::size_t window_len) const {
  return fft_size == 0 ? next_power_of_two(window_len) : fft_size;
}

double MelFilterbank::hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelFilterbank::mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(std::size_t n_filters, std::size_t fft_size, double sample_rate) {
  if (n_filters == 0) throw std::invalid_argument("mel filterbank: zero filters");
  const std::size_t n_bins = fft_size / 2 + 1;
  const double mel_hi = hz_to_mel(sample_rate / 2.0);

  // n_filters + 2 equally spaced mel points from 0 Hz to Nyquist; filter i
  // is the triangle (edge[i], edge[i+1], edge[i+2]).
  std::vector<double> edges_hz(n_filters + 2);
  for (std::size_t i = 0; i < edges_hz.size(); ++i)
    edges_hz[i] = mel_to_hz(mel_hi * static_cast<double>(i) / static_cast<double>(n_filters + 1));

  filters_.resize(n_filters);
  centers_hz_.resize(n_filters);
  const double bin_hz = sample_rate / static_cast<double>(fft_size);
  for (std::size_t f = 0; f < n_filters; ++f) {
    const double lo = edges_hz[f], mid = edges_hz[f + 1], hi = edges_hz[f + 2];
    centers_hz_[f] = mid;
    const std::size_t first = static_cast<std::size_t>(std::ceil(lo / bin_hz));
    std::vector<double> w;
    for (std::size_t k = first; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      if (hz >= hi) break;
      double weight = 0.0;
      if (hz >= lo && hz <= mid && mid > lo)
        weight = (hz - lo) / (mid - lo);
      else if (hz > mid && hi > mid)
        weight = (hi - hz) / (hi - mid);
      w.push_back(weight);
    }
    filters_[f].first_bin = first;
    filters_[f].weights = std::move(w);
  }
}

Vec MelFilterbank::apply(const std::vector<double>& power) const {
  Vec energies(filters_.size(), 0.0);
  for (std::size_t f = 0; f < filters_.size(); ++f) {
    const auto& flt = filters_[f];
    double s = 0.0;
    for (std::size_t i = 0; i < flt.weights.size(); ++i)
      s += flt.weights[i] * power[flt.first_bin + i];
    energies[f] = s;
  }
  return energies;
}

std::vector<double> make_taper(Taper t, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length <= 1 || t == Taper::Rect) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    const double c = std::cos(2.0 * kPi * static_cast<double>(n) / denom);
    w[n] = (t == Taper::Hamming) ? 0.54 - 0.46 * c : 0.5 - 0.5 * c;
  }
  return w;
}

Vec compute_mfcc(const std::vector<double>& window, double sample_rate, const MfccConfig& cfg) {
  if (window.empty()) throw std::invalid_argument("compute_mfcc: empty window");
  cfg.validate(window.size());
  const std::size_t n_fft = cfg.effective_fft_size(window.size());
  const MelFilterbank bank(cfg.n_mel_filters, n_fft, sample_rate);
  const std::vector<double> taper = make_taper(cfg.window_fn, window.size());
  return mfcc_pipeline(window, bank, taper, cfg, n_fft);
}

std::vector<Vec> mfcc_stream(const FrameStream& stream, const MfccConfig& cfg) {
  std::vector<Vec> out;
  out.reserve(stream.frame_count());
  if (stream.frame_count() == 0) return out;

  // Window length is constant across the run, so the filterbank and taper
  // are built once.
  const std::size_t window_len = stream.window_length();
  cfg.validate(window_len);
  const std::size_t n_fft = cfg.effective_fft_size(window_len);
  const MelFilterbank bank(cfg.n_mel_filters, n_fft, stream.sample_rate());
  const std::vector<double> taper = make_taper(cfg.window_fn, window_len);

  for (std::size_t t = 0; t < stream.frame_count(); ++t)
    out.push_back(mfcc_pipeline(stream.audio_window(t), bank, taper, cfg, n_fft));
  return out;
}

}  // namespace terrain
