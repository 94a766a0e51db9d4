#pragma once

#include "otfs/core.hpp"

#include <cstdint>
#include <vector>

namespace otfs::detail {

/// Primal network simplex for the balanced transportation problem
///
///   min <gamma, C>  s.t.  gamma 1 = a,  gamma^T 1 = b,  gamma >= 0.
///
/// Sources are nodes [0, m), sinks [m, m + n), plus one artificial root.
/// The initial basis hangs every node off the root through an artificial
/// arc; sinks pay a big-M cost so real arcs price in first. Leaving arcs
/// follow the strongly-feasible-tree rule, which rules out cycling on the
/// heavily degenerate assignment-like instances produced by uniform weights.
class TransportSimplex {
 public:
  TransportSimplex(const Vector& supply, const Vector& demand, const Matrix& cost);

  /// Runs to optimality. Throws SolverError if the pivot budget runs out.
  void solve();

  Matrix flows() const;
  std::int64_t pivots() const { return pivots_; }

 private:
  enum : signed char { kUp = 1, kDown = -1 };
  enum : signed char { kTree = 0, kLower = 1 };

  int arc_source(std::int64_t e) const;
  int arc_target(std::int64_t e) const;
  double arc_cost(std::int64_t e) const;

  bool find_entering_arc();
  int find_join(int u, int v) const;
  void detach_child(int parent, int child);
  void pivot();
  void refresh_subtree(int top);

  int m_;
  int n_;
  int root_;
  std::int64_t real_arcs_;
  const double* cost_;
  double artificial_cost_;
  double eps_;

  std::vector<double> flow_;
  std::vector<signed char> state_;
  std::vector<signed char> artificial_up_;

  std::vector<int> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<signed char> pred_dir_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<std::vector<int>> children_;

  std::int64_t block_size_;
  std::int64_t next_arc_ = 0;
  std::int64_t in_arc_ = -1;
  std::int64_t pivots_ = 0;
};

}  // namespace otfs::detail
