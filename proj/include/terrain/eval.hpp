#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace terrain {

// Joint label counts: rows are predicted clusters, columns true classes.
// Label values are remapped to dense indices in order of first appearance.
struct ContingencyTable {
  std::size_t n_pred = 0;
  std::size_t n_true = 0;
  std::vector<std::size_t> counts;  // n_pred x n_true
  std::vector<int> pred_values;     // dense index -> original label
  std::vector<int> true_values;

  std::size_t at(std::size_t p, std::size_t t) const { return counts[p * n_true + t]; }
  std::size_t total() const;
};

ContingencyTable make_contingency(const std::vector<int>& pred, const std::vector<int>& truth);

// Normalized mutual information with geometric-mean normalization,
// I(pred; truth) / sqrt(H(pred) H(truth)), natural logs. Identical
// partitions (up to renaming) score exactly 1; a zero-entropy side scores 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

// Injective map from predicted clusters to true classes maximizing the
// matched count (exact assignment; -1 for clusters left unmapped when there
// are more clusters than classes).
std::vector<int> map_clusters_to_classes(const ContingencyTable& table);

struct ClassMetrics {
  std::string name;
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // a zero denominator was reported as 0
};

struct ClassificationReport {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::vector<ClassMetrics> classes;
  std::vector<int> cluster_to_class;  // the mapping used

  std::string to_text() const;
};

// Maps predicted clusters onto true classes (optimal assignment), then
// reports per-class precision/recall/F1 and overall accuracy.
ClassificationReport classification_report(const std::vector<int>& pred,
                                           const std::vector<int>& truth,
                                           const std::vector<std::string>& class_names = {});

}  // namespace terrain
