#pragma once

#include "otfs/core.hpp"
#include "otfs/ot.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace otfs {

enum class SelectionKind { exact_ot, nearest_neighbor, random };

/// How target rows are matched to source rows before feature ranking.
/// A seed is carried by (and only by) the random strategy.
struct SelectionStrategy {
  SelectionKind kind = SelectionKind::exact_ot;
  std::optional<std::uint64_t> seed;

  static SelectionStrategy exact_ot() { return {SelectionKind::exact_ot, std::nullopt}; }
  static SelectionStrategy nearest_neighbor() { return {SelectionKind::nearest_neighbor, std::nullopt}; }
  static SelectionStrategy random(std::uint64_t seed) { return {SelectionKind::random, seed}; }

  /// Throws ValidationError unless the seed is present exactly for random.
  void validate() const;
};

std::string to_string(SelectionKind kind);
/// Accepts "ot", "exact_ot", "1nn", "nearest_neighbor", "random".
SelectionKind parse_selection_kind(const std::string& name);

struct FeatureRanking {
  /// Feature indices, most similar across domains first.
  std::vector<Index> order;
  /// Diagonal of the feature coupling, indexed by feature.
  Vector diagonal_scores;
  /// Sinkhorn report of the feature-space problem.
  SolverReport report;
};

struct RankOptions {
  double lambda = 1.0;
  /// z-score each feature across samples before transposing, instead of
  /// z-scoring each sample across its features (the default).
  bool per_feature_normalization = false;
  /// Relative resolution of the diagonal scores. Scores are rounded to it
  /// before sorting; tied scores keep ascending feature index. 0 disables.
  double tie_tolerance = 1e-9;
  SinkhornOptions sinkhorn;
};

/// Row indices into t, one per row of s, chosen by the given strategy.
/// exact_ot requires rows(s) <= rows(t).
std::vector<Index> select_target_indices(const DataMatrix& s, const DataMatrix& t,
                                         const SelectionStrategy& strategy);

/// T_u: the selected target rows (original, un-normalized values; a row may
/// repeat). Target labels, if any, are dropped.
DataMatrix select_target_samples(const DataMatrix& s, const DataMatrix& t,
                                 const SelectionStrategy& strategy);

/// At most per_class rows of every class, drawn without replacement.
/// Selected rows keep their original relative order.
DataMatrix balance_source_by_class(const DataMatrix& s, Index per_class, std::uint64_t seed);

/// Features ordered by how much coupling mass they keep on themselves in
/// the feature-space entropic OT problem. When s has more rows than t the
/// two roles are exchanged; feature indices are unaffected.
FeatureRanking rank_features(const DataMatrix& s, const DataMatrix& t,
                             const SelectionStrategy& strategy, const RankOptions& options);
FeatureRanking rank_features(const DataMatrix& s, const DataMatrix& t,
                             const SelectionStrategy& strategy, double lambda = 1.0);

/// Both matrices restricted to the first d_star features of order.
std::pair<DataMatrix, DataMatrix> select_top_features(const DataMatrix& s, const DataMatrix& t,
                                                      const std::vector<Index>& order,
                                                      Index d_star);
std::pair<DataMatrix, DataMatrix> select_top_features(const DataMatrix& s, const DataMatrix& t,
                                                      const FeatureRanking& ranking,
                                                      Index d_star);

/// order reversed: least similar features first.
std::vector<Index> ascending_order(const FeatureRanking& ranking);

}  // namespace otfs
