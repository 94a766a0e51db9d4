#include <doctest.h>

#include "otfs/error.hpp"
#include "otfs/ot.hpp"
#include "otfs/random.hpp"
#include "support/assignment_oracle.hpp"
#include "support/helpers.hpp"

#include <cmath>

using namespace otfs;
using testing_support::max_abs_diff;
using testing_support::random_matrix;
using testing_support::random_measure;

namespace {

oracle::Costs to_costs(const Matrix& m) {
  oracle::Costs c(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) c[static_cast<std::size_t>(i)].push_back(m(i, j));
  }
  return c;
}

Matrix outer(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  return a.weights() * b.weights().transpose();
}

}  // namespace

TEST_CASE("exact: single point pair") {
  const Coupling g = solve_exact(uniform_measure(1), uniform_measure(1), CostMatrix(Matrix::Zero(1, 1)));
  CHECK(g.values(0, 0) == 1.0);
  CHECK(transport_cost(g, CostMatrix(Matrix::Zero(1, 1))) == 0.0);
}

TEST_CASE("exact: two points on the line match to themselves") {
  Matrix c(2, 2);
  c << 0, 1, 1, 0;
  const Coupling g = solve_exact(uniform_measure(2), uniform_measure(2), CostMatrix(c));
  CHECK(g.values(0, 0) == 0.5);
  CHECK(g.values(1, 1) == 0.5);
  CHECK(g.values(0, 1) == 0.0);
  CHECK(g.values(1, 0) == 0.0);
  CHECK(transport_cost(g, CostMatrix(c)) == 0.0);
}

TEST_CASE("exact: 6x6 uniform instances equal the Hungarian optimum over 6") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix c = random_matrix(rng, 6, 6, 0.0, 10.0);
    const Coupling g = solve_exact(uniform_measure(6), uniform_measure(6), CostMatrix(c));
    const double reference = oracle::hungarian(to_costs(c)) / 6.0;
    CHECK(std::abs(transport_cost(g, CostMatrix(c)) - reference) < 1e-9);
  }
}

TEST_CASE("exact: oracle self-check, Hungarian equals brute force") {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = to_costs(random_matrix(rng, 5, 5));
    CHECK(std::abs(oracle::hungarian(c) - oracle::brute_force_assignment(c)) < 1e-12);
  }
}

TEST_CASE("exact: feasibility and vertex sparsity on rectangular instances") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const Index m = 1 + static_cast<Index>(rng.below(25));
    const Index n = 1 + static_cast<Index>(rng.below(25));
    const EmpiricalMeasure a = trial % 2 ? uniform_measure(m) : random_measure(rng, m);
    const EmpiricalMeasure b = trial % 3 ? uniform_measure(n) : random_measure(rng, n);
    const CostMatrix c(random_matrix(rng, m, n));
    const Coupling g = solve_exact(a, b, c);
    CHECK(g.max_marginal_violation() <= 1e-12);
    CHECK((g.values.array() >= 0.0).all());
    CHECK(g.nonzeros() <= m + n - 1);
  }
}

TEST_CASE("exact: scaling the cost keeps an optimal support") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix c = random_matrix(rng, 7, 7);
    const double alpha = 0.01 + 100.0 * rng.uniform();
    const Coupling g1 = solve_exact(uniform_measure(7), uniform_measure(7), CostMatrix(c));
    const Coupling g2 = solve_exact(uniform_measure(7), uniform_measure(7), CostMatrix(alpha * c));
    const double v1 = transport_cost(g1, CostMatrix(c));
    // the plan found for the scaled problem is optimal for the original one
    CHECK(std::abs(transport_cost(g2, CostMatrix(c)) - v1) < 1e-9);
    CHECK(std::abs(transport_cost(g2, CostMatrix(alpha * c)) - alpha * v1) < 1e-9 * std::max(1.0, alpha));
  }
}

TEST_CASE("exact: dimension mismatch is a validation error") {
  CHECK_THROWS_AS(solve_exact(uniform_measure(2), uniform_measure(3), CostMatrix(Matrix::Zero(2, 2))),
                  ValidationError);
}

TEST_CASE("exact: heavily degenerate instances terminate") {
  // all-equal costs and integer-like grids are the classic cycling traps
  for (Index n : {5, 12, 30}) {
    const Coupling g = solve_exact(uniform_measure(n), uniform_measure(2 * n), CostMatrix(Matrix::Ones(n, 2 * n)));
    CHECK(g.max_marginal_violation() <= 1e-12);
    Matrix grid(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) grid(i, j) = static_cast<double>((i * j) % 3);
    }
    const Coupling h = solve_exact(uniform_measure(n), uniform_measure(n), CostMatrix(grid));
    const double reference = oracle::hungarian(to_costs(grid)) / static_cast<double>(n);
    CHECK(std::abs(transport_cost(h, CostMatrix(grid)) - reference) < 1e-9);
  }
}

TEST_CASE("entropic: zero cost gives the independent coupling") {
  Rng rng(31);
  const EmpiricalMeasure a = random_measure(rng, 4);
  const EmpiricalMeasure b = random_measure(rng, 6);
  for (double lambda : {0.1, 1.0, 50.0}) {
    const auto sol = solve_entropic(a, b, CostMatrix(Matrix::Zero(4, 6)), lambda);
    CHECK(max_abs_diff(sol.coupling.values, outer(a, b)) < 1e-12);
    CHECK(sol.report.converged);
  }
}

TEST_CASE("entropic: tiny lambda approaches the independent coupling") {
  Rng rng(32);
  const CostMatrix c(random_matrix(rng, 5, 7, 0.0, 3.0));
  const auto sol = solve_entropic(uniform_measure(5), uniform_measure(7), c, 1e-6);
  CHECK(max_abs_diff(sol.coupling.values, outer(uniform_measure(5), uniform_measure(7))) < 1e-4);
}

TEST_CASE("entropic: lambda 100 is within 2% of the exact optimum on 8x8") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const CostMatrix c(random_matrix(rng, 8, 8));
    const double exact = transport_cost(solve_exact(uniform_measure(8), uniform_measure(8), c), c);
    const auto sol = solve_entropic(uniform_measure(8), uniform_measure(8), c, 100.0);
    const double ent = transport_cost(sol.coupling, c);
    CHECK(ent >= exact - 1e-9);
    CHECK(ent <= exact * 1.02);
  }
}

TEST_CASE("entropic: transport cost is non-increasing in lambda") {
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 2 + static_cast<Index>(rng.below(10));
    const Index n = 2 + static_cast<Index>(rng.below(10));
    const CostMatrix c(random_matrix(rng, m, n));
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const double v = transport_cost(solve_entropic(uniform_measure(m), uniform_measure(n), c, lambda).coupling, c);
      CHECK(v <= previous + 1e-9);
      previous = v;
    }
  }
}

TEST_CASE("entropic: log-domain path agrees with kernel scaling") {
  Rng rng(35);
  const CostMatrix c(random_matrix(rng, 9, 6, 0.0, 4.0));
  const EmpiricalMeasure a = random_measure(rng, 9);
  const EmpiricalMeasure b = random_measure(rng, 6);
  const auto kernel = solve_entropic(a, b, c, 20.0);
  CHECK_FALSE(kernel.report.log_domain);
  SinkhornOptions forced;
  forced.log_domain_threshold = 0.0;
  const auto logd = solve_entropic(a, b, c, 20.0, forced);
  CHECK(logd.report.log_domain);
  CHECK(max_abs_diff(kernel.coupling.values, logd.coupling.values) < 1e-8);
}

TEST_CASE("entropic: large lambda * C stays finite") {
  Rng rng(36);
  const CostMatrix c(random_matrix(rng, 10, 10, 0.0, 1000.0));
  const auto sol = solve_entropic(uniform_measure(10), uniform_measure(10), c, 50.0);
  CHECK(sol.report.log_domain);
  CHECK(sol.coupling.values.allFinite());
  CHECK(sol.coupling.max_marginal_violation() <= 1e-6);
}

TEST_CASE("entropic: converged implies tolerance, and a tight budget reports failure") {
  Rng rng(37);
  const CostMatrix c(random_matrix(rng, 6, 6, 0.0, 50.0));
  SinkhornOptions tight;
  tight.max_iterations = 2;
  const auto sol = solve_entropic(uniform_measure(6), uniform_measure(6), c, 1.0, tight);
  CHECK(sol.report.iterations <= 2);
  CHECK(sol.report.converged == (sol.report.final_marginal_violation <= tight.tolerance));
  // an unconverged iterate is still handed back as a feasible coupling
  CHECK(!sol.report.converged);
  CHECK(sol.report.final_marginal_violation > 1e-6);
  CHECK(sol.coupling.max_marginal_violation() <= 1e-12);
  CHECK((sol.coupling.values.array() >= 0.0).all());
  const auto full = solve_entropic(uniform_measure(6), uniform_measure(6), c, 1.0);
  CHECK(full.report.converged);
  CHECK(full.report.final_marginal_violation <= 1e-9);
}

TEST_CASE("entropic: normalize_cost divides by the maximum") {
  Rng rng(38);
  const Matrix raw = random_matrix(rng, 5, 5, 0.0, 7.0);
  SinkhornOptions opt;
  opt.normalize_cost = true;
  const auto a = solve_entropic(uniform_measure(5), uniform_measure(5), CostMatrix(raw), 3.0, opt);
  const auto b = solve_entropic(uniform_measure(5), uniform_measure(5), CostMatrix(raw / raw.maxCoeff()), 3.0);
  CHECK(max_abs_diff(a.coupling.values, b.coupling.values) < 1e-14);
}

TEST_CASE("entropic: bad lambda is rejected") {
  const CostMatrix c(Matrix::Ones(2, 2));
  CHECK_THROWS_AS(solve_entropic(uniform_measure(2), uniform_measure(2), c, 0.0), ValidationError);
  CHECK_THROWS_AS(solve_entropic(uniform_measure(2), uniform_measure(2), c, -1.0), ValidationError);
}

TEST_CASE("entropic: reported objective matches its definition") {
  Rng rng(39);
  const CostMatrix c(random_matrix(rng, 4, 5));
  const auto sol = solve_entropic(uniform_measure(4), uniform_measure(5), c, 2.5);
  const double expected = transport_cost(sol.coupling, c) - entropy(sol.coupling.values) / 2.5;
  CHECK(sol.report.objective == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("class-regularized: eta = 0 reduces to entropic") {
  Rng rng(41);
  const CostMatrix c(random_matrix(rng, 6, 5));
  const Labels y{0, 1, 0, 1, 2, 2};
  const auto ent = solve_entropic(uniform_measure(6), uniform_measure(5), c, 2.0);
  const auto cls = solve_class_regularized(uniform_measure(6), uniform_measure(5), c, y, 2.0, 0.0);
  CHECK(max_abs_diff(ent.coupling.values, cls.coupling.values) <= 1e-9);
}

TEST_CASE("class-regularized: one class reduces to entropic") {
  Rng rng(42);
  const CostMatrix c(random_matrix(rng, 7, 4));
  const Labels y(7, 3);
  const auto ent = solve_entropic(uniform_measure(7), uniform_measure(4), c, 2.0);
  const auto cls = solve_class_regularized(uniform_measure(7), uniform_measure(4), c, y, 2.0, 5.0);
  CHECK(max_abs_diff(ent.coupling.values, cls.coupling.values) <= 1e-9);
}

TEST_CASE("class-regularized: ambiguous 4x4 instance lowers the group penalty") {
  // sources 0,1 are class 0 and 2,3 class 1; every target is equally far
  // from one point of each class, so the entropic plan mixes classes
  Matrix c(4, 4);
  c << 0.0, 1.0, 0.2, 1.0,
       1.0, 0.0, 1.0, 0.2,
       0.2, 1.0, 0.0, 1.0,
       1.0, 0.2, 1.0, 0.0;
  const Labels y{0, 0, 1, 1};
  const auto ent = solve_entropic(uniform_measure(4), uniform_measure(4), CostMatrix(c), 2.0);
  const auto cls = solve_class_regularized(uniform_measure(4), uniform_measure(4), CostMatrix(c), y, 2.0, 1.0);
  // Omega by direct summation
  auto omega = [&](const Matrix& g) {
    double s = 0.0;
    for (Index j = 0; j < 4; ++j) {
      s += std::sqrt(g(0, j) + g(1, j)) + std::sqrt(g(2, j) + g(3, j));
    }
    return s;
  };
  CHECK(omega(cls.coupling.values) <= omega(ent.coupling.values));
  CHECK(class_group_penalty(cls.coupling.values, y) == doctest::Approx(omega(cls.coupling.values)));
  CHECK(cls.coupling.max_marginal_violation() <= 1e-6);
}

TEST_CASE("class-regularized: MM objective never increases") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 4 + static_cast<Index>(rng.below(8));
    const Index n = 3 + static_cast<Index>(rng.below(8));
    Labels y(static_cast<std::size_t>(m));
    for (auto& l : y) l = static_cast<int>(rng.below(3));
    const CostMatrix c(random_matrix(rng, m, n));
    const auto sol = solve_class_regularized(uniform_measure(m), uniform_measure(n), c, y, 2.0, 1.0);
    const auto& h = sol.report.objective_history;
    REQUIRE(h.size() == 11);
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] + 1e-9);
    CHECK(sol.report.objective == h.back());
    CHECK(h.back() == doctest::Approx(class_regularized_objective(sol.coupling.values, c, y, 2.0, 1.0)));
  }
}

TEST_CASE("class-regularized: argument validation") {
  const CostMatrix c(Matrix::Ones(3, 2));
  CHECK_THROWS_AS(solve_class_regularized(uniform_measure(3), uniform_measure(2), c, Labels{0, 1}, 1.0, 1.0),
                  ValidationError);
  CHECK_THROWS_AS(solve_class_regularized(uniform_measure(3), uniform_measure(2), c, Labels{0, 1, 1}, 1.0, -1.0),
                  ValidationError);
}

TEST_CASE("transport_cost examples") {
  Matrix g(1, 1);
  g << 1.0;
  Matrix c(1, 1);
  c << 7.0;
  CHECK(transport_cost(g, CostMatrix(c)) == 7.0);
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  Matrix zero_diag(2, 2);
  zero_diag << 0, 3, 4, 0;
  CHECK(transport_cost(half, CostMatrix(zero_diag)) == 0.0);
  CHECK_THROWS_AS(transport_cost(half, CostMatrix(Matrix::Ones(2, 3))), ValidationError);

  Rng rng(44);
  const Matrix gr = random_matrix(rng, 5, 5);
  const Matrix cr = random_matrix(rng, 5, 5);
  double naive = 0.0;
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) naive += gr(i, j) * cr(i, j);
  }
  CHECK(transport_cost(gr, CostMatrix(cr)) == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("solvers are deterministic") {
  Rng rng(45);
  const CostMatrix c(random_matrix(rng, 12, 9));
  const Coupling a = solve_exact(uniform_measure(12), uniform_measure(9), c);
  const Coupling b = solve_exact(uniform_measure(12), uniform_measure(9), c);
  CHECK(a.values == b.values);
  const auto e1 = solve_entropic(uniform_measure(12), uniform_measure(9), c, 3.0);
  const auto e2 = solve_entropic(uniform_measure(12), uniform_measure(9), c, 3.0);
  CHECK(e1.coupling.values == e2.coupling.values);
}
