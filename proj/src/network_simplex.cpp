#include "network_simplex.hpp"

#include "otfs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otfs::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TransportSimplex::TransportSimplex(const Vector& supply, const Vector& demand, const Matrix& cost)
    : m_(static_cast<int>(supply.size())),
      n_(static_cast<int>(demand.size())),
      root_(m_ + n_),
      real_arcs_(static_cast<std::int64_t>(m_) * n_),
      cost_(cost.data()) {
  const int nodes = m_ + n_;
  const double max_cost = cost.size() ? cost.maxCoeff() : 0.0;
  const double scale = max_cost > 0.0 ? max_cost : 1.0;
  artificial_cost_ = scale * static_cast<double>(nodes + 1);
  eps_ = 1e-11 * scale;

  const std::int64_t all_arcs = real_arcs_ + nodes;
  flow_.assign(static_cast<std::size_t>(all_arcs), 0.0);
  state_.assign(static_cast<std::size_t>(all_arcs), kLower);
  artificial_up_.assign(static_cast<std::size_t>(nodes), 0);

  parent_.assign(static_cast<std::size_t>(nodes + 1), -1);
  pred_.assign(static_cast<std::size_t>(nodes + 1), -1);
  pred_dir_.assign(static_cast<std::size_t>(nodes + 1), kUp);
  depth_.assign(static_cast<std::size_t>(nodes + 1), 0);
  pi_.assign(static_cast<std::size_t>(nodes + 1), 0.0);
  children_.assign(static_cast<std::size_t>(nodes + 1), {});

  for (int u = 0; u < nodes; ++u) {
    const double s = u < m_ ? supply[u] : -demand[u - m_];
    const std::int64_t e = real_arcs_ + u;
    parent_[u] = root_;
    pred_[u] = e;
    depth_[u] = 1;
    children_[root_].push_back(u);
    state_[e] = kTree;
    if (s >= 0.0) {
      artificial_up_[u] = 1;
      pred_dir_[u] = kUp;
      flow_[e] = s;
      pi_[u] = 0.0;
    } else {
      pred_dir_[u] = kDown;
      flow_[e] = -s;
      pi_[u] = artificial_cost_;
    }
  }

  block_size_ = std::max<std::int64_t>(10, static_cast<std::int64_t>(std::sqrt(static_cast<double>(real_arcs_))));
}

int TransportSimplex::arc_source(std::int64_t e) const {
  if (e < real_arcs_) return static_cast<int>(e / n_);
  const int u = static_cast<int>(e - real_arcs_);
  return artificial_up_[u] ? u : root_;
}

int TransportSimplex::arc_target(std::int64_t e) const {
  if (e < real_arcs_) return m_ + static_cast<int>(e % n_);
  const int u = static_cast<int>(e - real_arcs_);
  return artificial_up_[u] ? root_ : u;
}

double TransportSimplex::arc_cost(std::int64_t e) const {
  if (e < real_arcs_) return cost_[e];
  const int u = static_cast<int>(e - real_arcs_);
  return artificial_up_[u] ? 0.0 : artificial_cost_;
}

// Block search: scan arcs cyclically in blocks, take the most negative
// reduced cost seen once a block ends with a candidate. Lowest index wins
// ties inside a block because the comparison is strict.
bool TransportSimplex::find_entering_arc() {
  double best = -eps_;
  std::int64_t count = block_size_;
  std::int64_t e = next_arc_;
  in_arc_ = -1;
  auto scan = [&](std::int64_t from, std::int64_t to) -> bool {
    int i = static_cast<int>(from / n_);
    int j = static_cast<int>(from % n_);
    for (e = from; e < to; ++e) {
      if (state_[e] == kLower) {
        const double rc = cost_[e] + pi_[i] - pi_[m_ + j];
        if (rc < best) {
          best = rc;
          in_arc_ = e;
        }
      }
      if (++j == n_) {
        j = 0;
        ++i;
      }
      if (--count == 0) {
        if (in_arc_ >= 0) {
          ++e;
          return true;
        }
        count = block_size_;
      }
    }
    return false;
  };
  if (!scan(next_arc_, real_arcs_) && !scan(0, next_arc_) && in_arc_ < 0) return false;
  next_arc_ = e >= real_arcs_ ? 0 : e;
  return true;
}

int TransportSimplex::find_join(int u, int v) const {
  while (depth_[u] > depth_[v]) u = parent_[u];
  while (depth_[v] > depth_[u]) v = parent_[v];
  while (u != v) {
    u = parent_[u];
    v = parent_[v];
  }
  return u;
}

void TransportSimplex::detach_child(int parent, int child) {
  auto& kids = children_[parent];
  auto it = std::find(kids.begin(), kids.end(), child);
  *it = kids.back();
  kids.pop_back();
}

void TransportSimplex::pivot() {
  const std::int64_t in = in_arc_;
  const int first = arc_source(in);
  const int second = arc_target(in);
  const int join = find_join(first, second);

  // Flow is pushed along in-arc, so it runs join -> first -> second -> join.
  double delta = kInf;
  int u_out = -1;
  int side = 0;
  for (int u = first; u != join; u = parent_[u]) {
    const double d = pred_dir_[u] == kUp ? flow_[pred_[u]] : kInf;
    if (d < delta) {
      delta = d;
      u_out = u;
      side = 1;
    }
  }
  for (int u = second; u != join; u = parent_[u]) {
    const double d = pred_dir_[u] == kDown ? flow_[pred_[u]] : kInf;
    if (d <= delta) {
      delta = d;
      u_out = u;
      side = 2;
    }
  }
  if (u_out < 0 || !std::isfinite(delta)) {
    throw SolverError("network simplex: unbounded pivot (negative cycle)");
  }

  if (delta > 0.0) {
    flow_[in] += delta;
    for (int u = first; u != join; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * delta;
    for (int u = second; u != join; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * delta;
  }

  const std::int64_t out = pred_[u_out];
  flow_[out] = 0.0;
  state_[out] = kLower;
  state_[in] = kTree;

  const int u_in = side == 1 ? first : second;
  const int v_in = side == 1 ? second : first;

  // Reverse the tree path u_in .. u_out and hang it below v_in.
  std::vector<int> path;
  for (int u = u_in;; u = parent_[u]) {
    path.push_back(u);
    if (u == u_out) break;
  }
  std::vector<std::int64_t> arcs(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) arcs[k] = pred_[path[k]];

  detach_child(parent_[u_out], u_out);
  for (std::size_t k = path.size() - 1; k >= 1; --k) {
    const int upper = path[k];
    const int lower = path[k - 1];
    detach_child(upper, lower);
    parent_[upper] = lower;
    pred_[upper] = arcs[k - 1];
    children_[lower].push_back(upper);
  }
  parent_[u_in] = v_in;
  pred_[u_in] = in;
  children_[v_in].push_back(u_in);
  for (int u : path) pred_dir_[u] = arc_source(pred_[u]) == u ? kUp : kDown;

  refresh_subtree(u_in);
}

void TransportSimplex::refresh_subtree(int top) {
  std::vector<int> stack{top};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    const int p = parent_[u];
    const double c = arc_cost(pred_[u]);
    depth_[u] = depth_[p] + 1;
    // Tree arcs have zero reduced cost: c + pi[source] - pi[target] = 0.
    pi_[u] = pred_dir_[u] == kUp ? pi_[p] - c : pi_[p] + c;
    for (int child : children_[u]) stack.push_back(child);
  }
}

void TransportSimplex::solve() {
  const std::int64_t budget = 50 * (real_arcs_ + root_) + 100000;
  while (find_entering_arc()) {
    pivot();
    if (++pivots_ > budget) throw SolverError("network simplex: pivot budget exhausted");
  }
}

Matrix TransportSimplex::flows() const {
  Matrix gamma = Matrix::Zero(m_, n_);
  for (std::int64_t e = 0; e < real_arcs_; ++e) {
    if (state_[e] == kTree && flow_[e] > 0.0) gamma(e / n_, e % n_) = flow_[e];
  }
  return gamma;
}

}  // namespace otfs::detail
