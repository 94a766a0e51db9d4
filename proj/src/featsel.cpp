#include "otfs/featsel.hpp"

#include "otfs/error.hpp"
#include "otfs/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace otfs {

namespace {

void check_same_width(const DataMatrix& s, const DataMatrix& t) {
  if (s.rows() == 0 || t.rows() == 0) throw ValidationError("source and target must be non-empty");
  if (s.cols() != t.cols()) {
    std::ostringstream msg;
    msg << "source has " << s.cols() << " features, target has " << t.cols();
    throw ValidationError(msg.str());
  }
}

// Lowest column index whose value is within a relative hair of the row max.
// Plan entries that are equal in exact arithmetic can differ in the last
// bits after the simplex flow updates.
Index row_argmax(const Matrix& m, Index i) {
  const double peak = m.row(i).maxCoeff();
  const double floor = peak - 1e-9 * std::abs(peak);
  for (Index j = 0; j < m.cols(); ++j) {
    if (m(i, j) >= floor) return j;
  }
  return 0;
}

std::vector<Index> exact_ot_indices(const DataMatrix& s, const DataMatrix& t) {
  if (s.rows() > t.rows()) {
    std::ostringstream msg;
    msg << "exact_ot selection needs no more source rows than target rows (" << s.rows() << " > "
        << t.rows() << "); swap the roles of source and target";
    throw ValidationError(msg.str());
  }
  const CostMatrix c = squared_euclidean_cost(zscore(s), zscore(t));
  const Coupling plan = solve_exact(uniform_measure(s.rows()), uniform_measure(t.rows()), c);
  std::vector<Index> picks(static_cast<std::size_t>(s.rows()));
  for (Index i = 0; i < s.rows(); ++i) picks[static_cast<std::size_t>(i)] = row_argmax(plan.values, i);
  return picks;
}

std::vector<Index> nearest_indices(const DataMatrix& s, const DataMatrix& t) {
  const CostMatrix c = squared_euclidean_cost(zscore(s), zscore(t));
  std::vector<Index> picks(static_cast<std::size_t>(s.rows()));
  for (Index i = 0; i < s.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < t.rows(); ++j) {
      if (c(i, j) < c(i, best)) best = j;
    }
    picks[static_cast<std::size_t>(i)] = best;
  }
  return picks;
}

std::vector<Index> random_indices(const DataMatrix& s, const DataMatrix& t, std::uint64_t seed) {
  if (s.rows() > t.rows()) {
    throw ValidationError("random selection draws without replacement and needs rows(s) <= rows(t)");
  }
  Rng rng(seed);
  const auto draw = rng.sample_without_replacement(static_cast<std::size_t>(t.rows()),
                                                   static_cast<std::size_t>(s.rows()));
  return std::vector<Index>(draw.begin(), draw.end());
}


// Sort keys for the coupling diagonal that keep their precision when
// gamma_ii is within rounding of its marginal b_i. Entries with
// gamma_ii >= b_i / 2 are keyed by the mass column i sends elsewhere
// (smaller is better), which stays accurate far below the ulp of b_i.
// Smaller entries are keyed by gamma_ii itself. Both are rounded to a
// relative grid of width tol, so near-equal values tie.
struct DiagonalKey {
  bool kept = false;
  double value = 0.0;
};

std::vector<DiagonalKey> diagonal_keys(const Coupling& plan, double tol) {
  const Matrix& g = plan.values;
  const Vector& b = plan.col_marginal.weights();
  auto snap = [tol](double x) {
    if (tol == 0.0 || x <= 0.0) return x;
    return std::exp(std::round(std::log(x) / tol) * tol);
  };
  std::vector<DiagonalKey> keys(static_cast<std::size_t>(g.cols()));
  for (Index i = 0; i < g.cols(); ++i) {
    auto& k = keys[static_cast<std::size_t>(i)];
    k.kept = g(i, i) >= 0.5 * b[i];
    if (k.kept) {
      double leaked = 0.0;
      for (Index r = 0; r < g.rows(); ++r) {
        if (r != i) leaked += g(r, i);
      }
      k.value = snap(leaked);
    } else {
      k.value = snap(g(i, i));
    }
  }
  return keys;
}

// true when feature x ranks strictly before y
bool ranks_before(const DiagonalKey& x, const DiagonalKey& y) {
  if (x.kept != y.kept) return x.kept;
  return x.kept ? x.value < y.value : x.value > y.value;
}

}  // namespace

void SelectionStrategy::validate() const {
  if (kind == SelectionKind::random && !seed) {
    throw ValidationError("random selection strategy requires a seed");
  }
  if (kind != SelectionKind::random && seed) {
    throw ValidationError("only the random selection strategy takes a seed");
  }
}

std::string to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::exact_ot: return "exact_ot";
    case SelectionKind::nearest_neighbor: return "nearest_neighbor";
    case SelectionKind::random: return "random";
  }
  return "?";
}

SelectionKind parse_selection_kind(const std::string& name) {
  if (name == "ot" || name == "exact_ot") return SelectionKind::exact_ot;
  if (name == "1nn" || name == "nearest_neighbor") return SelectionKind::nearest_neighbor;
  if (name == "random") return SelectionKind::random;
  throw ValidationError("unknown selection strategy '" + name + "' (expected ot, 1nn or random)");
}

std::vector<Index> select_target_indices(const DataMatrix& s, const DataMatrix& t,
                                         const SelectionStrategy& strategy) {
  strategy.validate();
  check_same_width(s, t);
  switch (strategy.kind) {
    case SelectionKind::exact_ot: return exact_ot_indices(s, t);
    case SelectionKind::nearest_neighbor: return nearest_indices(s, t);
    case SelectionKind::random: return random_indices(s, t, *strategy.seed);
  }
  return {};
}

DataMatrix select_target_samples(const DataMatrix& s, const DataMatrix& t,
                                 const SelectionStrategy& strategy) {
  return t.without_labels().select_rows(select_target_indices(s, t, strategy));
}

DataMatrix balance_source_by_class(const DataMatrix& s, Index per_class, std::uint64_t seed) {
  if (!s.has_labels()) throw ValidationError("class balancing needs source labels");
  if (per_class < 1) throw ValidationError("per_class must be at least 1");
  std::map<int, std::vector<Index>> members;
  for (Index i = 0; i < s.rows(); ++i) members[s.labels()[static_cast<std::size_t>(i)]].push_back(i);

  Rng rng(seed);
  std::vector<Index> keep;
  for (const auto& [label, rows] : members) {
    const auto take = std::min<std::size_t>(rows.size(), static_cast<std::size_t>(per_class));
    for (std::size_t k : rng.sample_without_replacement(rows.size(), take)) keep.push_back(rows[k]);
  }
  std::sort(keep.begin(), keep.end());
  return s.select_rows(keep);
}

FeatureRanking rank_features(const DataMatrix& s, const DataMatrix& t,
                             const SelectionStrategy& strategy, const RankOptions& options) {
  check_same_width(s, t);
  if (s.cols() < 1) throw ValidationError("need at least one feature");
  if (!(options.tie_tolerance >= 0.0)) throw ValidationError("tie_tolerance must be >= 0");

  const bool swap = s.rows() > t.rows();
  const DataMatrix& a = swap ? t : s;
  const DataMatrix& b = swap ? s : t;
  const DataMatrix tu = select_target_samples(a, b, strategy);

  DataMatrix fa;
  DataMatrix fb;
  if (options.per_feature_normalization) {
    fa = zscore(a.without_labels()).transposed();
    fb = zscore(tu).transposed();
  } else {
    fa = zscore(a.without_labels().transposed());
    fb = zscore(tu.transposed());
  }
  const Index d = s.cols();
  const CostMatrix cf = squared_euclidean_cost(fa, fb);
  // Rank on the raw Sinkhorn iterate: rounding an unconverged plan spreads
  // mass over every entry at the scale of the leakage keys.
  SinkhornOptions sinkhorn = options.sinkhorn;
  sinkhorn.round_unconverged = false;
  EntropicSolution sol = solve_entropic(uniform_measure(d), uniform_measure(d), cf, options.lambda, sinkhorn);

  const auto keys = diagonal_keys(sol.coupling, options.tie_tolerance);
  const Vector& marg = sol.coupling.col_marginal.weights();
  FeatureRanking out;
  out.diagonal_scores.resize(d);
  for (Index i = 0; i < d; ++i) {
    const auto& k = keys[static_cast<std::size_t>(i)];
    out.diagonal_scores[i] = k.kept ? marg[i] - k.value : k.value;
  }
  out.order.resize(static_cast<std::size_t>(d));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](Index x, Index y) {
    return ranks_before(keys[static_cast<std::size_t>(x)], keys[static_cast<std::size_t>(y)]);
  });
  out.report = std::move(sol.report);
  return out;
}

FeatureRanking rank_features(const DataMatrix& s, const DataMatrix& t,
                             const SelectionStrategy& strategy, double lambda) {
  RankOptions options;
  options.lambda = lambda;
  return rank_features(s, t, strategy, options);
}

std::pair<DataMatrix, DataMatrix> select_top_features(const DataMatrix& s, const DataMatrix& t,
                                                      const std::vector<Index>& order,
                                                      Index d_star) {
  if (s.cols() != t.cols() || static_cast<Index>(order.size()) != s.cols()) {
    throw ValidationError("feature order does not match the data width");
  }
  if (d_star < 1 || d_star > s.cols()) {
    std::ostringstream msg;
    msg << "d_star must lie in [1, " << s.cols() << "], got " << d_star;
    throw ValidationError(msg.str());
  }
  const std::vector<Index> cols(order.begin(), order.begin() + d_star);
  return {s.select_cols(cols), t.select_cols(cols)};
}

std::pair<DataMatrix, DataMatrix> select_top_features(const DataMatrix& s, const DataMatrix& t,
                                                      const FeatureRanking& ranking,
                                                      Index d_star) {
  return select_top_features(s, t, ranking.order, d_star);
}

std::vector<Index> ascending_order(const FeatureRanking& ranking) {
  return {ranking.order.rbegin(), ranking.order.rend()};
}

}  // namespace otfs
