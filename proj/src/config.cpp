#include "terrain/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace terrain {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  if (!v.empty() && v[0] == '-')
    throw std::invalid_argument("config: " + key + " must be non-negative, got " + v);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  }
}

void check_encoder(const std::string& section, const EncoderConfig& e) {
  if (e.kind != "pca" && e.kind != "vae")
    throw std::invalid_argument("config: " + section + ".kind must be pca or vae");
  if (e.latent_dim == 0) throw std::invalid_argument("config: " + section + ".latent_dim >= 1");
  if (e.hidden_dim == 0) throw std::invalid_argument("config: " + section + ".hidden_dim >= 1");
  if (e.batch_size == 0) throw std::invalid_argument("config: " + section + ".batch_size >= 1");
  if (e.step_size <= 0.0) throw std::invalid_argument("config: " + section + ".step_size > 0");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto enc_setters = [&](const std::string& prefix, EncoderConfig& e) {
    return std::map<std::string, Setter>{
        {prefix + ".kind", [&e](const std::string& k, const std::string& v) {
           if (v != "pca" && v != "vae")
             throw std::invalid_argument("config: " + k + " must be pca or vae");
           e.kind = v;
         }},
        {prefix + ".latent_dim",
         [&e](const std::string& k, const std::string& v) { e.latent_dim = parse_u64(k, v); }},
        {prefix + ".hidden_dim",
         [&e](const std::string& k, const std::string& v) { e.hidden_dim = parse_u64(k, v); }},
        {prefix + ".train_steps",
         [&e](const std::string& k, const std::string& v) { e.train_steps = parse_u64(k, v); }},
        {prefix + ".step_size",
         [&e](const std::string& k, const std::string& v) { e.step_size = parse_double(k, v); }},
        {prefix + ".batch_size",
         [&e](const std::string& k, const std::string& v) { e.batch_size = parse_u64(k, v); }},
        {prefix + ".load_path",
         [&e](const std::string&, const std::string& v) { e.load_path = v; }},
    };
  };

  std::map<std::string, Setter> setters{
      {"seed", [&](const std::string& k, const std::string& v) { cfg.seed = parse_u64(k, v); }},
      {"mode",
       [&](const std::string&, const std::string& v) { cfg.mode = switch_mode_from_name(v); }},
      {"k_em", [&](const std::string& k, const std::string& v) {
         cfg.k_em = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"target_k", [&](const std::string& k, const std::string& v) {
         cfg.target_k = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"window_seconds", [&](const std::string& k, const std::string& v) {
         cfg.window_seconds = parse_double(k, v);
       }},
      {"standardize", [&](const std::string&, const std::string& v) {
         cfg.standardize = normalization_from_name(v);
       }},
      {"linkage",
       [&](const std::string&, const std::string& v) { cfg.linkage = linkage_from_name(v); }},
      {"out_dir", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
      {"mfcc.n_coeffs", [&](const std::string& k, const std::string& v) {
         cfg.mfcc.n_coeffs = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"mfcc.fft_size", [&](const std::string& k, const std::string& v) {
         cfg.mfcc.fft_size = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"mfcc.n_mel_filters", [&](const std::string& k, const std::string& v) {
         cfg.mfcc.n_mel_filters = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"mfcc.preemphasis", [&](const std::string& k, const std::string& v) {
         cfg.mfcc.preemphasis = parse_double(k, v);
       }},
      {"mfcc.window", [&](const std::string&, const std::string& v) {
         cfg.mfcc.window_fn = taper_from_name(v);
       }},
      {"mfcc.log_floor", [&](const std::string& k, const std::string& v) {
         cfg.mfcc.log_floor = parse_double(k, v);
       }},
      {"pca.max_fit_frames", [&](const std::string& k, const std::string& v) {
         cfg.pca_max_fit_frames = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"pca.iterations", [&](const std::string& k, const std::string& v) {
         cfg.pca_iterations = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"em.max_iter", [&](const std::string& k, const std::string& v) {
         cfg.em_max_iter = static_cast<std::size_t>(parse_u64(k, v));
       }},
      {"em.tol",
       [&](const std::string& k, const std::string& v) { cfg.em_tol = parse_double(k, v); }},
  };
  for (auto& [k, f] : enc_setters("encoder.audio", cfg.audio)) setters.emplace(k, f);
  for (auto& [k, f] : enc_setters("encoder.visual", cfg.visual)) setters.emplace(k, f);

  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) + " is not key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(key, value);
  }

  if (cfg.target_k == 0) throw std::invalid_argument("config: target_k must be >= 1");
  if (cfg.window_seconds <= 0.0) throw std::invalid_argument("config: window_seconds must be > 0");
  if (cfg.mfcc.n_coeffs == 0 || cfg.mfcc.n_coeffs > cfg.mfcc.n_mel_filters)
    throw std::invalid_argument("config: mfcc.n_coeffs must be in [1, n_mel_filters]");
  if (cfg.mfcc.preemphasis < 0.0 || cfg.mfcc.preemphasis >= 1.0)
    throw std::invalid_argument("config: mfcc.preemphasis must be in [0, 1)");
  if (cfg.mfcc.fft_size != 0 && (cfg.mfcc.fft_size & (cfg.mfcc.fft_size - 1)) != 0)
    throw std::invalid_argument("config: mfcc.fft_size must be 0 or a power of two");
  if (cfg.em_tol <= 0.0) throw std::invalid_argument("config: em.tol must be > 0");
  if (cfg.em_max_iter == 0) throw std::invalid_argument("config: em.max_iter must be >= 1");
  if (cfg.pca_iterations == 0) throw std::invalid_argument("config: pca.iterations must be >= 1");
  check_encoder("encoder.audio", cfg.audio);
  check_encoder("encoder.visual", cfg.visual);
  return cfg;
}

PipelineConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
  std::ostringstream os;
  os << "seed = " << cfg.seed << "\n";
  os << "mode = " << switch_mode_name(cfg.mode) << "\n";
  os << "k_em = " << cfg.k_em << "\n";
  os << "target_k = " << cfg.target_k << "\n";
  os << "window_seconds = " << fmt_double(cfg.window_seconds) << "\n";
  os << "standardize = " << normalization_name(cfg.standardize) << "\n";
  os << "linkage = " << linkage_name(cfg.linkage) << "\n";
  os << "out_dir = " << cfg.out_dir << "\n";
  os << "mfcc.n_coeffs = " << cfg.mfcc.n_coeffs << "\n";
  os << "mfcc.fft_size = " << cfg.mfcc.fft_size << "\n";
  os << "mfcc.n_mel_filters = " << cfg.mfcc.n_mel_filters << "\n";
  os << "mfcc.preemphasis = " << fmt_double(cfg.mfcc.preemphasis) << "\n";
  os << "mfcc.window = " << taper_name(cfg.mfcc.window_fn) << "\n";
  os << "mfcc.log_floor = " << fmt_double(cfg.mfcc.log_floor) << "\n";
  const auto dump_enc = [&os](const std::string& prefix, const EncoderConfig& e) {
    os << prefix << ".kind = " << e.kind << "\n";
    os << prefix << ".latent_dim = " << e.latent_dim << "\n";
    os << prefix << ".hidden_dim = " << e.hidden_dim << "\n";
    os << prefix << ".train_steps = " << e.train_steps << "\n";
    os << prefix << ".step_size = " << fmt_double(e.step_size) << "\n";
    os << prefix << ".batch_size = " << e.batch_size << "\n";
    os << prefix << ".load_path = " << e.load_path << "\n";
  };
  dump_enc("encoder.audio", cfg.audio);
  dump_enc("encoder.visual", cfg.visual);
  os << "pca.max_fit_frames = " << cfg.pca_max_fit_frames << "\n";
  os << "pca.iterations = " << cfg.pca_iterations << "\n";
  os << "em.max_iter = " << cfg.em_max_iter << "\n";
  os << "em.tol = " << fmt_double(cfg.em_tol) << "\n";
  return os.str();
}

}  // namespace terrain
