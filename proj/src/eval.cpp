#include "terrain/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace terrain {

namespace {

std::vector<std::size_t> dense_remap(const std::vector<int>& labels, std::vector<int>& values) {
  values.clear();
  std::map<int, std::size_t> index;
  std::vector<std::size_t> dense(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = index.find(labels[i]);
    if (it == index.end()) {
      it = index.emplace(labels[i], values.size()).first;
      values.push_back(labels[i]);
    }
    dense[i] = it->second;
  }
  return dense;
}

double entropy(const std::vector<std::size_t>& counts, std::size_t n) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

// True when the two labelings induce the same partition (a consistent
// bijection exists between their label values).
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto f = fwd.emplace(a[i], b[i]);
    if (!f.second && f.first->second != b[i]) return false;
    auto g = bwd.emplace(b[i], a[i]);
    if (!g.second && g.first->second != a[i]) return false;
  }
  return true;
}

}  // namespace

std::size_t ContingencyTable::total() const {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  return n;
}

ContingencyTable make_contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("label length mismatch");
  if (pred.empty()) throw std::invalid_argument("empty labelings");
  ContingencyTable t;
  const auto dp = dense_remap(pred, t.pred_values);
  const auto dt = dense_remap(truth, t.true_values);
  t.n_pred = t.pred_values.size();
  t.n_true = t.true_values.size();
  t.counts.assign(t.n_pred * t.n_true, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) ++t.counts[dp[i] * t.n_true + dt[i]];
  return t;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("nmi: label length mismatch");
  if (pred.empty()) throw std::invalid_argument("nmi: empty labelings");
  if (same_partition(pred, truth)) return 1.0;

  const ContingencyTable t = make_contingency(pred, truth);
  const std::size_t n = pred.size();
  std::vector<std::size_t> row(t.n_pred, 0), col(t.n_true, 0);
  for (std::size_t p = 0; p < t.n_pred; ++p)
    for (std::size_t c = 0; c < t.n_true; ++c) {
      row[p] += t.at(p, c);
      col[c] += t.at(p, c);
    }
  const double hp = entropy(row, n);
  const double ht = entropy(col, n);
  if (hp <= 0.0 || ht <= 0.0) return 0.0;

  double mi = 0.0;
  const double dn = static_cast<double>(n);
  for (std::size_t p = 0; p < t.n_pred; ++p) {
    for (std::size_t c = 0; c < t.n_true; ++c) {
      const std::size_t npc = t.at(p, c);
      if (npc == 0) continue;
      const double joint = static_cast<double>(npc) / dn;
      mi += joint * std::log(dn * static_cast<double>(npc) /
                             (static_cast<double>(row[p]) * static_cast<double>(col[c])));
    }
  }
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

std::vector<int> map_clusters_to_classes(const ContingencyTable& table) {
  const std::size_t np = table.n_pred, nt = table.n_true;
  if (np == 0 || nt == 0) throw std::invalid_argument("map_clusters_to_classes: empty table");
  if (nt > 20) throw std::invalid_argument("map_clusters_to_classes: too many classes");

  // Exact assignment by DP over subsets of true classes. States: best total
  // after deciding the first p clusters with `mask` classes consumed.
  const std::size_t n_masks = std::size_t{1} << nt;
  const long long kNeg = -1;
  std::vector<long long> best((np + 1) * n_masks, kNeg);
  std::vector<int> choice((np + 1) * n_masks, -2);
  best[0] = 0;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      const long long cur = best[p * n_masks + mask];
      if (cur < 0) continue;
      // leave cluster p unmapped
      if (best[(p + 1) * n_masks + mask] < cur) {
        best[(p + 1) * n_masks + mask] = cur;
        choice[(p + 1) * n_masks + mask] = -1;
      }
      for (std::size_t c = 0; c < nt; ++c) {
        if (mask & (std::size_t{1} << c)) continue;
        const std::size_t m2 = mask | (std::size_t{1} << c);
        const long long val = cur + static_cast<long long>(table.at(p, c));
        if (best[(p + 1) * n_masks + m2] < val) {
          best[(p + 1) * n_masks + m2] = val;
          choice[(p + 1) * n_masks + m2] = static_cast<int>(c);
        }
      }
    }
  }

  std::size_t arg_mask = 0;
  long long arg_best = kNeg;
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    if (best[np * n_masks + mask] > arg_best) {
      arg_best = best[np * n_masks + mask];
      arg_mask = mask;
    }
  }

  std::vector<int> mapping(np, -1);
  std::size_t mask = arg_mask;
  for (std::size_t p = np; p > 0; --p) {
    const int c = choice[p * n_masks + mask];
    mapping[p - 1] = (c >= 0) ? c : -1;
    if (c >= 0) mask &= ~(std::size_t{1} << static_cast<std::size_t>(c));
  }
  return mapping;
}

ClassificationReport classification_report(const std::vector<int>& pred,
                                           const std::vector<int>& truth,
                                           const std::vector<std::string>& class_names) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("classification_report: label length mismatch");
  if (pred.empty()) throw std::invalid_argument("classification_report: empty labelings");

  const ContingencyTable table = make_contingency(pred, truth);
  const std::vector<int> mapping = map_clusters_to_classes(table);

  // Frame labels after mapping clusters onto classes (-1 = unmapped).
  std::vector<int> pred_dense(pred.size()), truth_dense(truth.size());
  {
    std::vector<int> vals;
    pred_dense.assign(pred.size(), 0);
    auto dp = dense_remap(pred, vals);
    for (std::size_t i = 0; i < pred.size(); ++i)
      pred_dense[i] = mapping[dp[i]];
    auto dt = dense_remap(truth, vals);
    for (std::size_t i = 0; i < truth.size(); ++i) truth_dense[i] = static_cast<int>(dt[i]);
  }

  const std::size_t nt = table.n_true;
  std::vector<std::size_t> tp(nt, 0), fp(nt, 0), fn(nt, 0), support(nt, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int t = truth_dense[i];
    const int p = pred_dense[i];
    ++support[static_cast<std::size_t>(t)];
    if (p == t) {
      ++tp[static_cast<std::size_t>(t)];
      ++correct;
    } else {
      ++fn[static_cast<std::size_t>(t)];
      if (p >= 0) ++fp[static_cast<std::size_t>(p)];
    }
  }

  ClassificationReport rep;
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  rep.cluster_to_class.assign(table.n_pred, -1);
  for (std::size_t p = 0; p < table.n_pred; ++p)
    rep.cluster_to_class[p] = (mapping[p] >= 0) ? table.true_values[mapping[p]] : -1;

  // Classes reported in ascending original label order.
  std::vector<std::size_t> order(nt);
  for (std::size_t i = 0; i < nt; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.true_values[a] < table.true_values[b];
  });

  const double n = static_cast<double>(pred.size());
  for (std::size_t c : order) {
    ClassMetrics m;
    const int value = table.true_values[c];
    m.name = (value >= 0 && static_cast<std::size_t>(value) < class_names.size())
                 ? class_names[static_cast<std::size_t>(value)]
                 : "class_" + std::to_string(value);
    m.support = support[c];
    const std::size_t p_den = tp[c] + fp[c];
    const std::size_t r_den = tp[c] + fn[c];
    if (p_den == 0 || r_den == 0) m.degenerate = true;
    m.precision = p_den ? static_cast<double>(tp[c]) / static_cast<double>(p_den) : 0.0;
    m.recall = r_den ? static_cast<double>(tp[c]) / static_cast<double>(r_den) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    rep.weighted_precision += m.precision * static_cast<double>(m.support) / n;
    rep.weighted_recall += m.recall * static_cast<double>(m.support) / n;
    rep.weighted_f1 += m.f1 * static_cast<double>(m.support) / n;
    rep.classes.push_back(std::move(m));
  }
  return rep;
}

std::string ClassificationReport::to_text() const {
  std::ostringstream os;
  std::size_t name_w = 5;
  for (const auto& c : classes) name_w = std::max(name_w, c.name.size());
  os << std::string(name_w, ' ') << "  precision  recall      f1  support\n";
  char buf[128];
  for (const auto& c : classes) {
    std::snprintf(buf, sizeof(buf), "%*s  %9.3f  %6.3f  %6.3f  %7zu%s\n",
                  static_cast<int>(name_w), c.name.c_str(), c.precision, c.recall, c.f1,
                  c.support, c.degenerate ? "  (degenerate)" : "");
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "%*s  %9.3f  %6.3f  %6.3f\n", static_cast<int>(name_w),
                "weighted", weighted_precision, weighted_recall, weighted_f1);
  os << buf;
  std::snprintf(buf, sizeof(buf), "accuracy %.4f\n", accuracy);
  os << buf;
  return os.str();
}

}  // namespace terrain
