#pragma once

#include "otfs/core.hpp"
#include "otfs/random.hpp"

#include <vector>

namespace testing_support {

inline otfs::Matrix random_matrix(otfs::Rng& rng, otfs::Index rows, otfs::Index cols, double lo = 0.0,
                                  double hi = 1.0) {
  otfs::Matrix m(rows, cols);
  for (otfs::Index i = 0; i < rows; ++i) {
    for (otfs::Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  }
  return m;
}

inline otfs::EmpiricalMeasure random_measure(otfs::Rng& rng, otfs::Index n) {
  otfs::Vector w(n);
  for (otfs::Index i = 0; i < n; ++i) w[i] = 0.1 + rng.uniform();
  w /= w.sum();
  // push the rounding residue into the largest entry
  otfs::Index big = 0;
  w.maxCoeff(&big);
  w[big] += 1.0 - w.sum();
  return otfs::EmpiricalMeasure(w);
}

inline double max_abs_diff(const otfs::Matrix& a, const otfs::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing_support
