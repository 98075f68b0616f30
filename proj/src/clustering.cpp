#include "terrain/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "terrain/rng.hpp"

namespace terrain {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_features(const std::vector<Vec>& features, std::size_t dim) {
  for (const Vec& f : features) {
    if (f.size() != dim) throw std::invalid_argument("feature dimension mismatch");
    for (double v : f)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature entry");
  }
}

// log N(x | mean, diag var) for one component.
double diag_log_density(const GmmModel& m, std::size_t k, const Vec& x) {
  double s = 0.0;
  const double* mu = m.means.row(k);
  const double* var = m.variances.row(k);
  for (std::size_t d = 0; d < m.dim; ++d) {
    const double diff = x[d] - mu[d];
    s += -0.5 * (kLog2Pi + std::log(var[d])) - diff * diff / (2.0 * var[d]);
  }
  return s;
}

// Log joint log(w_k) + log density per component, returned with the
// log-sum-exp; shared by the E-step, assignment and likelihood.
double log_joint(const GmmModel& m, const Vec& x, Vec& joint) {
  joint.resize(m.n_components);
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m.n_components; ++k) {
    joint[k] = std::log(std::max(m.weights[k], 1e-300)) + diag_log_density(m, k, x);
    hi = std::max(hi, joint[k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < m.n_components; ++k) sum += std::exp(joint[k] - hi);
  return hi + std::log(sum);
}

}  // namespace

SwitchMode switch_mode_from_name(const std::string& name) {
  if (name == "switched") return SwitchMode::Switched;
  if (name == "audio_only") return SwitchMode::AudioOnly;
  if (name == "visual_only") return SwitchMode::VisualOnly;
  if (name == "concat") return SwitchMode::Concat;
  throw std::invalid_argument("unknown switching mode: " + name);
}

std::string switch_mode_name(SwitchMode m) {
  switch (m) {
    case SwitchMode::Switched: return "switched";
    case SwitchMode::AudioOnly: return "audio_only";
    case SwitchMode::VisualOnly: return "visual_only";
    case SwitchMode::Concat: return "concat";
  }
  return "switched";
}

Linkage linkage_from_name(const std::string& name) {
  if (name == "average") return Linkage::Average;
  if (name == "single") return Linkage::Single;
  if (name == "complete") return Linkage::Complete;
  throw std::invalid_argument("unknown linkage: " + name);
}

std::string linkage_name(Linkage l) {
  switch (l) {
    case Linkage::Average: return "average";
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
  }
  return "average";
}

GmmModel em_fit(const std::vector<Vec>& features, std::size_t k, std::uint64_t seed,
                std::size_t max_iter, double tol) {
  const std::size_t n = features.size();
  if (k == 0) throw std::invalid_argument("em_fit: k must be >= 1");
  if (n < k) throw std::invalid_argument("em_fit: fewer samples than components");
  const std::size_t dim = features[0].size();
  check_features(features, dim);

  GmmModel m;
  m.n_components = k;
  m.dim = dim;
  m.weights.assign(k, 1.0 / static_cast<double>(k));
  m.means = Mat(k, dim);
  m.variances = Mat(k, dim);

  // Global per-dim variance seeds every component's covariance.
  Vec gmean(dim, 0.0), gvar(dim, 0.0);
  for (const Vec& f : features)
    for (std::size_t d = 0; d < dim; ++d) gmean[d] += f[d];
  for (std::size_t d = 0; d < dim; ++d) gmean[d] /= static_cast<double>(n);
  for (const Vec& f : features)
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = f[d] - gmean[d];
      gvar[d] += diff * diff;
    }
  for (std::size_t d = 0; d < dim; ++d)
    gvar[d] = std::max(gvar[d] / static_cast<double>(n), kVarianceFloor);

  // Farthest-point init: seeded first pick, then greedy max of the min
  // squared distance to the means chosen so far (ties to the smaller index).
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.uniform_int(n)));
  Vec min_d2(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const Vec& last = features[chosen.back()];
    for (std::size_t i = 0; i < n; ++i)
      min_d2[i] = std::min(min_d2[i], squared_distance(features[i], last));
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_d2[i] > best_d) {
        best_d = min_d2[i];
        best = i;
      }
    }
    chosen.push_back(best);
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < dim; ++d) {
      m.means(c, d) = features[chosen[c]][d];
      m.variances(c, d) = gvar[d];
    }

  Mat resp(n, k);
  Vec joint;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lse = log_joint(m, features[i], joint);
      ll += lse;
      for (std::size_t c = 0; c < k; ++c) resp(i, c) = std::exp(joint[c] - lse);
    }
    m.log_likelihood_history.push_back(ll);
    if (ll - prev_ll < tol && iter > 0) break;
    prev_ll = ll;

    // M-step.
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp(i, c);
      if (nk < 1e-12) {
        // Starved component: keep its parameters, zero its weight.
        m.weights[c] = nk / static_cast<double>(n);
        continue;
      }
      m.weights[c] = nk / static_cast<double>(n);
      for (std::size_t d = 0; d < dim; ++d) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += resp(i, c) * features[i][d];
        m.means(c, d) = s / nk;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double diff = features[i][d] - m.means(c, d);
          s += resp(i, c) * diff * diff;
        }
        m.variances(c, d) = std::max(s / nk, kVarianceFloor);
      }
    }
  }
  return m;
}

Mat em_responsibilities(const GmmModel& model, const std::vector<Vec>& features) {
  check_features(features, model.dim);
  Mat resp(features.size(), model.n_components);
  Vec joint;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double lse = log_joint(model, features[i], joint);
    for (std::size_t c = 0; c < model.n_components; ++c) resp(i, c) = std::exp(joint[c] - lse);
  }
  return resp;
}

std::vector<int> em_assign(const GmmModel& model, const std::vector<Vec>& features) {
  check_features(features, model.dim);
  std::vector<int> labels(features.size(), 0);
  Vec joint;
  for (std::size_t i = 0; i < features.size(); ++i) {
    log_joint(model, features[i], joint);
    std::size_t best = 0;
    for (std::size_t c = 1; c < model.n_components; ++c)
      if (joint[c] > joint[best]) best = c;
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

std::vector<Sequence> detect_sequences(const std::vector<int>& labels) {
  if (labels.empty()) throw std::invalid_argument("detect_sequences: empty label stream");
  std::vector<Sequence> seqs;
  std::size_t start = 0;
  for (std::size_t t = 1; t <= labels.size(); ++t) {
    if (t == labels.size() || labels[t] != labels[t - 1]) {
      seqs.push_back(Sequence{seqs.size(), start, t, labels[start]});
      start = t;
    }
  }
  return seqs;
}

std::vector<SequenceFeatures> average_sequence_features(const std::vector<Sequence>& seqs,
                                                        const std::vector<Vec>& audio,
                                                        const std::vector<Vec>& visual) {
  std::vector<SequenceFeatures> out;
  out.reserve(seqs.size());
  for (const Sequence& s : seqs) {
    if (s.end_frame > audio.size() || s.end_frame > visual.size())
      throw std::out_of_range("average_sequence_features: frame index out of range");
    SequenceFeatures f;
    f.audio_mean.assign(audio[s.start_frame].size(), 0.0);
    f.visual_mean.assign(visual[s.start_frame].size(), 0.0);
    for (std::size_t t = s.start_frame; t < s.end_frame; ++t) {
      for (std::size_t d = 0; d < f.audio_mean.size(); ++d) f.audio_mean[d] += audio[t][d];
      for (std::size_t d = 0; d < f.visual_mean.size(); ++d) f.visual_mean[d] += visual[t][d];
    }
    const double inv = 1.0 / static_cast<double>(s.length());
    for (double& v : f.audio_mean) v *= inv;
    for (double& v : f.visual_mean) v *= inv;
    out.push_back(std::move(f));
  }
  return out;
}

AffinityMatrix sequence_affinity(const std::vector<SequenceFeatures>& feats) {
  return sequence_affinity_mode(feats, SwitchMode::Switched);
}

AffinityMatrix sequence_affinity_mode(const std::vector<SequenceFeatures>& feats,
                                      SwitchMode mode) {
  const std::size_t n = feats.size();
  if (n < 2) throw std::invalid_argument("sequence_affinity: need at least 2 sequences");
  for (const auto& f : feats) {
    if (f.audio_mean.size() != feats[0].audio_mean.size() ||
        f.visual_mean.size() != feats[0].visual_mean.size())
      throw std::invalid_argument("sequence_affinity: inconsistent feature dims");
  }
  AffinityMatrix aff(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = 0.0;
      switch (mode) {
        case SwitchMode::Switched:
          dist = std::min(euclidean(feats[i].audio_mean, feats[j].audio_mean),
                          euclidean(feats[i].visual_mean, feats[j].visual_mean));
          break;
        case SwitchMode::AudioOnly:
          dist = euclidean(feats[i].audio_mean, feats[j].audio_mean);
          break;
        case SwitchMode::VisualOnly:
          dist = euclidean(feats[i].visual_mean, feats[j].visual_mean);
          break;
        case SwitchMode::Concat:
          dist = std::sqrt(squared_distance(feats[i].audio_mean, feats[j].audio_mean) +
                           squared_distance(feats[i].visual_mean, feats[j].visual_mean));
          break;
      }
      aff.at(i, j) = dist;
      aff.at(j, i) = dist;
    }
  }
  return aff;
}

std::vector<int> agglomerate(const AffinityMatrix& aff, std::size_t target_k, Linkage linkage,
                             std::vector<std::pair<std::size_t, std::size_t>>* merge_trace) {
  const std::size_t n = aff.n;
  if (n == 0) throw std::invalid_argument("agglomerate: empty affinity");
  if (target_k < 1 || target_k > n) throw std::invalid_argument("agglomerate: target_k out of range");
  if (merge_trace) merge_trace->clear();

  // Clusters live in the slot of their smallest member; dist is kept
  // current with Lance-Williams updates.
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> member(n);  // cluster slot of each sequence
  for (std::size_t i = 0; i < n; ++i) member[i] = i;
  std::vector<double> dist(aff.d);

  std::size_t active = n;
  while (active > target_k) {
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double d = dist[i * n + j];
        if (!found || d < best_d) {
          best_d = d;
          bi = i;
          bj = j;
          found = true;
        }
        // equal distances fall through: the scan order already prefers the
        // lexicographically smallest (i, j)
      }
    }

    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == bi || c == bj) continue;
      const double dic = dist[bi * n + c];
      const double djc = dist[bj * n + c];
      double merged = 0.0;
      switch (linkage) {
        case Linkage::Average:
          merged = (static_cast<double>(size[bi]) * dic + static_cast<double>(size[bj]) * djc) /
                   static_cast<double>(size[bi] + size[bj]);
          break;
        case Linkage::Single: merged = std::min(dic, djc); break;
        case Linkage::Complete: merged = std::max(dic, djc); break;
      }
      dist[bi * n + c] = merged;
      dist[c * n + bi] = merged;
    }
    size[bi] += size[bj];
    alive[bj] = false;
    for (std::size_t s = 0; s < n; ++s)
      if (member[s] == bj) member[s] = bi;
    if (merge_trace) merge_trace->emplace_back(bi, bj);
    --active;
  }

  // Renumber by first appearance.
  std::vector<int> labels(n, -1);
  std::vector<int> slot_label(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (slot_label[member[s]] < 0) slot_label[member[s]] = next++;
    labels[s] = slot_label[member[s]];
  }
  return labels;
}

PseudoLabeling propagate_labels(const std::vector<Sequence>& seqs,
                                const std::vector<int>& seq_labels, std::size_t n_frames) {
  if (seq_labels.size() != seqs.size())
    throw std::invalid_argument("propagate_labels: one label per sequence required");
  std::vector<int> frame_labels(n_frames, -1);
  int hi = -1;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    if (seqs[s].end_frame > n_frames)
      throw std::invalid_argument("propagate_labels: sequence exceeds frame count");
    for (std::size_t t = seqs[s].start_frame; t < seqs[s].end_frame; ++t)
      frame_labels[t] = seq_labels[s];
    hi = std::max(hi, seq_labels[s]);
  }
  for (int l : frame_labels)
    if (l < 0) throw std::invalid_argument("propagate_labels: sequences do not cover all frames");
  PseudoLabeling out;
  out.labels = std::move(frame_labels);
  out.n_clusters = static_cast<std::size_t>(hi + 1);
  return out;
}

}  // namespace terrain
