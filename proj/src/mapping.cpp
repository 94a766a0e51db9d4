#include "otfs/mapping.hpp"

#include "otfs/error.hpp"

#include <sstream>

namespace otfs {

DataMatrix barycentric_map(const Coupling& gamma, const DataMatrix& target) {
  const Matrix& plan = gamma.values;
  if (plan.cols() != target.rows()) {
    std::ostringstream msg;
    msg << "barycentric map: plan has " << plan.cols() << " columns but target has "
        << target.rows() << " rows";
    throw ValidationError(msg.str());
  }
  const Vector mass = plan.rowwise().sum();
  for (Index i = 0; i < mass.size(); ++i) {
    if (!(mass[i] > 0.0)) {
      std::ostringstream msg;
      msg << "barycentric map: source row " << i << " carries no mass";
      throw ValidationError(msg.str());
    }
  }
  Matrix mapped = mass.cwiseInverse().asDiagonal() * (plan * target.values());
  return DataMatrix(std::move(mapped), std::nullopt, target.column_names());
}

}  // namespace otfs
