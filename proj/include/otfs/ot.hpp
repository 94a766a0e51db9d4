#pragma once

#include "otfs/core.hpp"

#include <cstdint>
#include <vector>

namespace otfs {

/// Transport plan with the marginals it was solved for.
struct Coupling {
  Matrix values;
  EmpiricalMeasure row_marginal;
  EmpiricalMeasure col_marginal;

  /// L-infinity distance between the plan's row/column sums and its marginals.
  double max_marginal_violation() const;
  Index nonzeros() const;
};

struct SolverReport {
  std::int64_t iterations = 0;
  double final_marginal_violation = 0.0;
  /// Value of the objective the solver minimized, at the returned plan.
  double objective = 0.0;
  bool converged = false;
  /// Sinkhorn ran (or finished) with log-domain updates.
  bool log_domain = false;
  /// Class-regularized solver only: objective after each MM step, starting
  /// with the plain entropic plan.
  std::vector<double> objective_history;
};

struct SinkhornOptions {
  double tolerance = 1e-9;
  std::int64_t max_iterations = 10000;
  /// Above this value of lambda * max(C) the kernel exp(-lambda C) is not
  /// formed; the solver works with log-scalings from the start.
  double log_domain_threshold = 500.0;
  /// Divide C by its maximum before solving (off by default).
  bool normalize_cost = false;
  /// When Sinkhorn stops short of the tolerance, project the plan onto the
  /// marginals before returning it. The report still describes the
  /// unprojected iterate.
  bool round_unconverged = true;
};

struct ClassRegularizedOptions {
  SinkhornOptions sinkhorn;
  int outer_iterations = 10;
};

struct EntropicSolution {
  Coupling coupling;
  SolverReport report;
};

/// Exact optimal transport (network simplex). The plan is a basic solution
/// with at most rows + cols - 1 nonzeros.
Coupling solve_exact(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t, const CostMatrix& c);

/// Entropy-regularized transport, minimizing <gamma, C> - E(gamma) / lambda,
/// by Sinkhorn scaling. report.converged is false when the marginal
/// violation is still above tolerance after max_iterations.
EntropicSolution solve_entropic(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t,
                                const CostMatrix& c, double lambda,
                                const SinkhornOptions& options = {});

/// Entropic transport plus eta * Omega(gamma), the l_{1/2,1} group penalty
/// over source classes, minimized by majorization-minimization.
EntropicSolution solve_class_regularized(const EmpiricalMeasure& mu_s, const EmpiricalMeasure& mu_t,
                                         const CostMatrix& c, const Labels& source_labels,
                                         double lambda, double eta,
                                         const ClassRegularizedOptions& options = {});

/// Frobenius product <gamma, C>.
double transport_cost(const Coupling& gamma, const CostMatrix& c);
double transport_cost(const Matrix& gamma, const CostMatrix& c);

/// E(gamma) = -sum gamma log gamma, with 0 log 0 = 0.
double entropy(const Matrix& gamma);

/// Omega(gamma) = sum_j sum_L ||gamma(I_L, j)||_1^{1/2}.
double class_group_penalty(const Matrix& gamma, const Labels& source_labels);

/// <gamma, C> - E(gamma) / lambda + eta * Omega(gamma).
double class_regularized_objective(const Matrix& gamma, const CostMatrix& c,
                                   const Labels& source_labels, double lambda, double eta);

}  // namespace otfs
