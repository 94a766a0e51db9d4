#include "otfs/ot.hpp"

#include "network_simplex.hpp"
#include "otfs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace otfs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_shapes(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t, const CostMatrix& c) {
  if (mu_s.size() != c.rows() || mu_t.size() != c.cols()) {
    std::ostringstream msg;
    msg << "marginal sizes (" << mu_s.size() << ", " << mu_t.size() << ") do not match cost matrix "
        << c.rows() << "x" << c.cols();
    throw ValidationError(msg.str());
  }
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("regularization lambda must be positive and finite");
  }
}

double row_violation(const Vector& row_sums, const Vector& a) {
  return (row_sums - a).cwiseAbs().maxCoeff();
}

// log(sum_k exp(x_k)) over a strided range, robust to -inf entries.
template <typename Get>
double log_sum_exp(Index n, Get&& get) {
  double hi = kNegInf;
  for (Index k = 0; k < n; ++k) hi = std::max(hi, get(k));
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (Index k = 0; k < n; ++k) s += std::exp(get(k) - hi);
  return hi + std::log(s);
}

struct ScalingResult {
  Matrix plan;
  std::int64_t iterations = 0;
  bool ok = true;
};

// Classic scaling: gamma = diag(u) K diag(v), K = exp(-lambda C).
// Returns ok = false as soon as a scaling vector under/overflows.
ScalingResult sinkhorn_kernel(const Vector& a, const Vector& b, const Matrix& cost, double lambda,
                              const SinkhornOptions& opt) {
  ScalingResult res;
  const Matrix kernel = (-lambda * cost.array()).exp().matrix();
  Vector u = Vector::Ones(a.size());
  Vector v = Vector::Ones(b.size());
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    const Vector kv = kernel * v;
    if (res.iterations > 0 && row_violation(u.cwiseProduct(kv), a) < opt.tolerance) break;
    for (Index i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        u[i] = 0.0;
      } else if (kv[i] > 0.0) {
        u[i] = a[i] / kv[i];
      } else {
        res.ok = false;
        return res;
      }
    }
    const Vector ktu = kernel.transpose() * u;
    for (Index j = 0; j < b.size(); ++j) {
      if (b[j] == 0.0) {
        v[j] = 0.0;
      } else if (ktu[j] > 0.0) {
        v[j] = b[j] / ktu[j];
      } else {
        res.ok = false;
        return res;
      }
    }
    if (!u.allFinite() || !v.allFinite()) {
      res.ok = false;
      return res;
    }
  }
  res.plan = u.asDiagonal() * kernel * v.asDiagonal();
  res.ok = res.plan.allFinite();
  return res;
}

// One exact log-space sweep: f, then g, from the current potentials.
void log_sweep(const Vector& log_a, const Vector& log_b, const Matrix& scaled, Vector& f, Vector& g) {
  const Index m = log_a.size();
  const Index n = log_b.size();
  for (Index i = 0; i < m; ++i) {
    f[i] = log_a[i] == kNegInf ? kNegInf : log_a[i] - log_sum_exp(n, [&](Index j) { return scaled(i, j) + g[j]; });
  }
  for (Index j = 0; j < n; ++j) {
    g[j] = log_b[j] == kNegInf ? kNegInf : log_b[j] - log_sum_exp(m, [&](Index i) { return scaled(i, j) + f[i]; });
  }
}

// Scaling at a fixed lambda in stabilized form, warm-started from (f, g),
// where log gamma_ij = f_i - lambda C_ij + g_j. The potentials are folded
// into a kernel K_ij = exp(f_i - lambda C_ij + g_j) and plain scalings u, v
// run on top; when they drift far from 1, or a row or column of K
// underflows, they are absorbed back into (f, g) and K is rebuilt.
std::int64_t log_scaling(const Vector& a, const Vector& b, const Matrix& cost, double lambda,
                         double tolerance, std::int64_t budget, Vector& f, Vector& g) {
  constexpr double kDrift = 1e50;
  const Index m = a.size();
  const Index n = b.size();
  const Matrix scaled = -lambda * cost;
  const Vector log_a = a.array().log();
  const Vector log_b = b.array().log();
  Matrix kernel(m, n);
  Vector u = Vector::Ones(m);
  Vector v = Vector::Ones(n);

  auto absorb = [&] {
    for (Index i = 0; i < m; ++i) {
      if (a[i] > 0.0) f[i] += std::log(u[i]);
    }
    for (Index j = 0; j < n; ++j) {
      if (b[j] > 0.0) g[j] += std::log(v[j]);
    }
    u.setOnes();
    v.setOnes();
  };
  auto rebuild = [&] {
    log_sweep(log_a, log_b, scaled, f, g);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) kernel(i, j) = std::exp(f[i] + scaled(i, j) + g[j]);
    }
  };
  auto drifted = [&](const Vector& x) {
    for (Index k = 0; k < x.size(); ++k) {
      if (!(x[k] > 1.0 / kDrift && x[k] < kDrift)) return true;
    }
    return false;
  };

  rebuild();
  std::int64_t it = 0;
  for (; it < budget; ++it) {
    const Vector kv = kernel * v;
    if (it > 0 && row_violation(u.cwiseProduct(kv), a) < tolerance) break;
    bool stale = false;
    for (Index i = 0; i < m; ++i) {
      if (a[i] == 0.0) continue;
      if (kv[i] > 0.0) {
        u[i] = a[i] / kv[i];
      } else {
        stale = true;
      }
    }
    if (!stale) {
      const Vector ktu = kernel.transpose() * u;
      for (Index j = 0; j < n; ++j) {
        if (b[j] == 0.0) continue;
        if (ktu[j] > 0.0) {
          v[j] = b[j] / ktu[j];
        } else {
          stale = true;
        }
      }
    }
    if (stale) {
      // fall back on one exact log sweep from the last good potentials
      u.setOnes();
      v.setOnes();
      rebuild();
    } else if (drifted(u) || drifted(v)) {
      absorb();
      rebuild();
    }
  }
  absorb();
  return it;
}

// Projects a nearly feasible plan onto the transport polytope: cap rows at
// a, then columns at b, then put the missing mass back as a rank-one term.
// Entries stay non-negative and the change in l1 is at most twice the
// marginal violation.
void round_to_marginals(Matrix& plan, const Vector& a, const Vector& b) {
  const Vector rows = plan.rowwise().sum();
  for (Index i = 0; i < plan.rows(); ++i) {
    if (rows[i] > a[i]) plan.row(i) *= a[i] / rows[i];
  }
  const Vector cols = plan.colwise().sum().transpose();
  for (Index j = 0; j < plan.cols(); ++j) {
    if (cols[j] > b[j]) plan.col(j) *= b[j] / cols[j];
  }
  const Vector err_r = (a - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector err_c = (b - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double total = err_r.sum();
  if (total > 0.0) plan += err_r * err_c.transpose() / total;
}

// Log-domain Sinkhorn with lambda annealing: solve a well-conditioned
// problem first (lambda * max C around kAnnealStart), then double lambda,
// carrying the dual potentials over, until the requested lambda is reached.
// Only the last stage has to meet the tolerance.
ScalingResult sinkhorn_log(const Vector& a, const Vector& b, const Matrix& cost, double lambda,
                           const SinkhornOptions& opt) {
  constexpr double kAnnealStart = 8.0;
  constexpr double kStageTolerance = 1e-5;
  ScalingResult res;
  const Index m = a.size();
  const Index n = b.size();
  const double peak = cost.size() ? cost.maxCoeff() : 0.0;

  std::vector<double> stages{lambda};
  while (stages.back() * peak > kAnnealStart) stages.push_back(stages.back() / 2.0);
  std::reverse(stages.begin(), stages.end());

  Vector f = Vector::Zero(m);
  Vector g = Vector::Zero(n);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const bool last = k + 1 == stages.size();
    if (k > 0) {
      // potentials scale with lambda; zero-mass entries stay at -inf
      const double r = stages[k] / stages[k - 1];
      f *= r;
      g *= r;
    }
    res.iterations += log_scaling(a, b, cost, stages[k], last ? opt.tolerance : std::max(opt.tolerance, kStageTolerance),
                                  opt.max_iterations - res.iterations, f, g);
  }
  const Matrix scaled = -lambda * cost;
  res.plan.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) res.plan(i, j) = std::exp(f[i] + scaled(i, j) + g[j]);
  }
  res.ok = res.plan.allFinite();
  return res;
}

}  // namespace

double Coupling::max_marginal_violation() const {
  const double rows = (values.rowwise().sum() - row_marginal.weights()).cwiseAbs().maxCoeff();
  const double cols =
      (values.colwise().sum().transpose() - col_marginal.weights()).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

Index Coupling::nonzeros() const { return (values.array() != 0.0).count(); }

Coupling solve_exact(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t, const CostMatrix& c) {
  check_shapes(mu_s, mu_t, c);
  detail::TransportSimplex simplex(mu_s.weights(), mu_t.weights(), c.values());
  simplex.solve();
  return Coupling{simplex.flows(), mu_s, mu_t};
}

EntropicSolution solve_entropic(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t,
                                const CostMatrix& c, double lambda, const SinkhornOptions& options) {
  check_shapes(mu_s, mu_t, c);
  check_lambda(lambda);
  Matrix cost = c.values();
  if (options.normalize_cost && c.max() > 0.0) cost /= c.max();
  const double peak = cost.size() ? cost.maxCoeff() : 0.0;

  SolverReport report;
  ScalingResult run;
  if (lambda * peak <= options.log_domain_threshold) {
    run = sinkhorn_kernel(mu_s.weights(), mu_t.weights(), cost, lambda, options);
    report.iterations = run.iterations;
  } else {
    run.ok = false;
  }
  if (!run.ok) {
    run = sinkhorn_log(mu_s.weights(), mu_t.weights(), cost, lambda, options);
    report.iterations += run.iterations;
    report.log_domain = true;
  }
  if (!run.ok) throw SolverError("sinkhorn: non-finite plan even with log-domain updates");

  EntropicSolution out{Coupling{std::move(run.plan), mu_s, mu_t}, std::move(report)};
  // The report describes the Sinkhorn iterate; an unconverged plan is then
  // rounded so callers always get a coupling with the right marginals.
  out.report.final_marginal_violation = out.coupling.max_marginal_violation();
  out.report.converged = out.report.final_marginal_violation <= options.tolerance;
  if (!out.report.converged && options.round_unconverged) round_to_marginals(out.coupling.values, mu_s.weights(), mu_t.weights());
  out.report.objective = transport_cost(out.coupling.values, CostMatrix(std::move(cost))) -
                         entropy(out.coupling.values) / lambda;
  return out;
}

EntropicSolution solve_class_regularized(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t,
                                         const CostMatrix& c, const Labels& source_labels,
                                         double lambda, double eta,
                                         const ClassRegularizedOptions& options) {
  check_shapes(mu_s, mu_t, c);
  check_lambda(lambda);
  if (static_cast<Index>(source_labels.size()) != c.rows()) {
    throw ValidationError("class-regularized OT: one source label per source point is required");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be non-negative");

  // Normalize once so the MM objective and every inner solve see the same cost.
  CostMatrix cost = c;
  if (options.sinkhorn.normalize_cost && c.max() > 0.0) cost = CostMatrix(c.values() / c.max());
  SinkhornOptions inner = options.sinkhorn;
  inner.normalize_cost = false;

  EntropicSolution current = solve_entropic(mu_s, mu_t, cost, lambda, inner);
  std::int64_t total_iterations = current.report.iterations;
  bool all_converged = current.report.converged;
  bool any_log = current.report.log_domain;
  std::vector<double> history{
      class_regularized_objective(current.coupling.values, cost, source_labels, lambda, eta)};

  if (eta > 0.0) {
    std::map<int, Index> class_index;
    for (int l : source_labels) class_index.emplace(l, static_cast<Index>(class_index.size()));
    std::vector<Index> group(source_labels.size());
    for (std::size_t i = 0; i < source_labels.size(); ++i) group[i] = class_index[source_labels[i]];
    const Index classes = static_cast<Index>(class_index.size());
    const Index m = c.rows();
    const Index n = c.cols();

    for (int step = 0; step < options.outer_iterations; ++step) {
      const Matrix& plan = current.coupling.values;
      Matrix class_mass = Matrix::Zero(classes, n);
      for (Index i = 0; i < m; ++i) class_mass.row(group[static_cast<std::size_t>(i)]) += plan.row(i);

      // Linearize the concave sqrt at the current plan. The gradient entry
      // for (i, j) only depends on (class of i, j); its column minimum is
      // dropped since column-constant shifts do not move the argmin on Pi.
      Matrix grad(m, n);
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
          grad(i, j) = 0.5 / std::sqrt(class_mass(group[static_cast<std::size_t>(i)], j) + 1e-12);
        }
      }
      const Eigen::RowVectorXd col_min = grad.colwise().minCoeff();
      Matrix adjusted = cost.values();
      for (Index i = 0; i < m; ++i) adjusted.row(i) += eta * (grad.row(i) - col_min);

      current = solve_entropic(mu_s, mu_t, CostMatrix(std::move(adjusted)), lambda, inner);
      total_iterations += current.report.iterations;
      all_converged = all_converged && current.report.converged;
      any_log = any_log || current.report.log_domain;
      history.push_back(
          class_regularized_objective(current.coupling.values, cost, source_labels, lambda, eta));
    }
  }

  current.report.iterations = total_iterations;
  current.report.converged = all_converged;
  current.report.log_domain = any_log;
  current.report.objective = history.back();
  current.report.objective_history = std::move(history);
  return current;
}

double transport_cost(const Matrix& gamma, const CostMatrix& c) {
  if (gamma.rows() != c.rows() || gamma.cols() != c.cols()) {
    throw ValidationError("transport cost: plan and cost shapes differ");
  }
  return gamma.cwiseProduct(c.values()).sum();
}

double transport_cost(const Coupling& gamma, const CostMatrix& c) {
  return transport_cost(gamma.values, c);
}

double entropy(const Matrix& gamma) {
  double e = 0.0;
  for (Index i = 0; i < gamma.rows(); ++i) {
    for (Index j = 0; j < gamma.cols(); ++j) {
      const double g = gamma(i, j);
      if (g > 0.0) e -= g * std::log(g);
    }
  }
  return e;
}

double class_group_penalty(const Matrix& gamma, const Labels& source_labels) {
  if (static_cast<Index>(source_labels.size()) != gamma.rows()) {
    throw ValidationError("class penalty: label count does not match plan rows");
  }
  std::map<int, Vector> mass;
  for (Index i = 0; i < gamma.rows(); ++i) {
    auto [it, fresh] = mass.try_emplace(source_labels[static_cast<std::size_t>(i)]);
    if (fresh) it->second = Vector::Zero(gamma.cols());
    it->second += gamma.row(i).transpose();
  }
  double omega = 0.0;
  for (const auto& [label, col_mass] : mass) omega += col_mass.cwiseAbs().cwiseSqrt().sum();
  return omega;
}

double class_regularized_objective(const Matrix& gamma, const CostMatrix& c,
                                   const Labels& source_labels, double lambda, double eta) {
  check_lambda(lambda);
  return transport_cost(gamma, c) - entropy(gamma) / lambda +
         eta * class_group_penalty(gamma, source_labels);
}

}  // namespace otfs
