#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "terrain/linalg.hpp"

namespace terrain {

// Diagonal-covariance Gaussian mixture fitted by EM.
struct GmmModel {
  std::size_t n_components = 0;
  std::size_t dim = 0;
  Vec weights;    // K, sums to 1
  Mat means;      // K x d
  Mat variances;  // K x d, floored

  // Per-iteration log-likelihood of the fit (diagnostics; non-decreasing).
  Vec log_likelihood_history;
};

constexpr double kVarianceFloor = 1e-6;

// Maximal run of consecutive frames sharing one EM label.
// Half-open frame interval [start_frame, end_frame).
struct Sequence {
  std::size_t id = 0;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;
  int em_label = 0;

  std::size_t length() const { return end_frame - start_frame; }
};

// Per-sequence modality means (the averaged features each sequence is
// represented by downstream).
struct SequenceFeatures {
  Vec audio_mean;
  Vec visual_mean;
};

// Symmetric pairwise distance matrix between sequences, zero diagonal.
struct AffinityMatrix {
  std::size_t n = 0;
  std::vector<double> d;  // n x n row-major

  AffinityMatrix() = default;
  explicit AffinityMatrix(std::size_t n_) : n(n_), d(n_ * n_, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return d[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

struct PseudoLabeling {
  std::vector<int> labels;  // per frame
  std::size_t n_clusters = 0;
};

// How pairwise sequence distances combine the two modalities. Switched is
// the min-distance rule; the others are the baseline replacements.
enum class SwitchMode { Switched, AudioOnly, VisualOnly, Concat };

SwitchMode switch_mode_from_name(const std::string& name);
std::string switch_mode_name(SwitchMode m);

enum class Linkage { Average, Single, Complete };

Linkage linkage_from_name(const std::string& name);
std::string linkage_name(Linkage l);

// Fits a diagonal GMM by EM. Initialization is seeded farthest-point: the
// first mean is a random data point, each next one the point farthest from
// the means chosen so far. Iterates until the log-likelihood improves by
// less than `tol` or `max_iter` is reached.
GmmModel em_fit(const std::vector<Vec>& features, std::size_t k, std::uint64_t seed,
                std::size_t max_iter = 100, double tol = 1e-6);

// Posterior responsibilities, one row per point, rows sum to 1.
Mat em_responsibilities(const GmmModel& model, const std::vector<Vec>& features);

// Hard assignment: argmax responsibility, ties toward the smaller index.
std::vector<int> em_assign(const GmmModel& model, const std::vector<Vec>& features);

// Splits a label stream at every label change; the resulting sequences tile
// [0, T) exactly and adjacent sequences carry different labels.
std::vector<Sequence> detect_sequences(const std::vector<int>& labels);

// Arithmetic mean of each modality's latents over each sequence's frames.
std::vector<SequenceFeatures> average_sequence_features(const std::vector<Sequence>& seqs,
                                                        const std::vector<Vec>& audio,
                                                        const std::vector<Vec>& visual);

// d[i][j] = min(||audio_i - audio_j||, ||visual_i - visual_j||).
AffinityMatrix sequence_affinity(const std::vector<SequenceFeatures>& feats);

// Same, with the min replaced per baseline mode.
AffinityMatrix sequence_affinity_mode(const std::vector<SequenceFeatures>& feats, SwitchMode mode);

// Agglomerates the precomputed affinity down to target_k clusters, merging
// the globally closest pair each step (ties: smallest (i, j)). Cluster ids
// during merging are the smallest member sequence index; output labels are
// renumbered by first appearance. When `merge_trace` is given it receives
// the (i, j) cluster-slot pair of every merge in order.
std::vector<int> agglomerate(const AffinityMatrix& aff, std::size_t target_k,
                             Linkage linkage = Linkage::Average,
                             std::vector<std::pair<std::size_t, std::size_t>>* merge_trace = nullptr);

// Every frame takes the label of its containing sequence.
PseudoLabeling propagate_labels(const std::vector<Sequence>& seqs,
                                const std::vector<int>& seq_labels, std::size_t n_frames);

}  // namespace terrain
