#pragma once

#include "otfs/core.hpp"
#include "otfs/ot.hpp"

namespace otfs {

/// Barycentric image of the source points under a plan:
///   S_a = diag((gamma 1)^-1) gamma T.
/// Row i is the gamma-weighted mean of the target rows, so it stays inside
/// their convex hull. Labels of the result are left empty; callers attach
/// the source labels themselves.
DataMatrix barycentric_map(const Coupling& gamma, const DataMatrix& target);

}  // namespace otfs
