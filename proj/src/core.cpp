#include "otfs/core.hpp"

#include "otfs/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace otfs {

DataMatrix::DataMatrix(Matrix values, std::optional<Labels> labels,
                       std::vector<std::string> column_names)
    : values_(std::move(values)), labels_(std::move(labels)),
      column_names_(std::move(column_names)) {
  if (!values_.allFinite()) {
    for (Index i = 0; i < values_.rows(); ++i) {
      for (Index j = 0; j < values_.cols(); ++j) {
        if (!std::isfinite(values_(i, j))) {
          std::ostringstream msg;
          msg << "non-finite value at row " << i << ", column " << j;
          throw ValidationError(msg.str());
        }
      }
    }
  }
  if (labels_ && static_cast<Index>(labels_->size()) != values_.rows()) {
    std::ostringstream msg;
    msg << "label count " << labels_->size() << " does not match row count " << values_.rows();
    throw ValidationError(msg.str());
  }
  if (!column_names_.empty() && static_cast<Index>(column_names_.size()) != values_.cols()) {
    throw ValidationError("column name count does not match column count");
  }
}

const Labels& DataMatrix::labels() const {
  if (!labels_) throw ValidationError("data matrix has no labels");
  return *labels_;
}

DataMatrix DataMatrix::without_labels() const {
  return DataMatrix(values_, std::nullopt, column_names_);
}

DataMatrix DataMatrix::select_rows(const std::vector<Index>& rows) const {
  Matrix out(static_cast<Index>(rows.size()), values_.cols());
  std::optional<Labels> out_labels;
  if (labels_) out_labels.emplace();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    if (r < 0 || r >= values_.rows()) throw ValidationError("row index out of range");
    out.row(static_cast<Index>(k)) = values_.row(r);
    if (labels_) out_labels->push_back((*labels_)[static_cast<std::size_t>(r)]);
  }
  return DataMatrix(std::move(out), std::move(out_labels), column_names_);
}

DataMatrix DataMatrix::select_cols(const std::vector<Index>& cols) const {
  Matrix out(values_.rows(), static_cast<Index>(cols.size()));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Index c = cols[k];
    if (c < 0 || c >= values_.cols()) throw ValidationError("column index out of range");
    out.col(static_cast<Index>(k)) = values_.col(c);
    if (!column_names_.empty()) names.push_back(column_names_[static_cast<std::size_t>(c)]);
  }
  return DataMatrix(std::move(out), labels_, std::move(names));
}

DataMatrix DataMatrix::transposed() const {
  return DataMatrix(Matrix(values_.transpose()));
}

EmpiricalMeasure::EmpiricalMeasure(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ValidationError("empirical measure needs at least one point");
  double total = 0.0;
  for (Index i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      std::ostringstream msg;
      msg << "measure weight " << i << " is negative or non-finite";
      throw ValidationError(msg.str());
    }
    total += w;
  }
    // Summation error grows with n; very long vectors get a proportionally wider band.
  const double band = kSumTolerance * std::max(1.0, static_cast<double>(weights_.size()) / 1000.0);
  if (std::abs(total - 1.0) > band) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "measure weights sum to " << total << ", expected 1";
    throw ValidationError(msg.str());
  }
}

CostMatrix::CostMatrix(Matrix values) : values_(std::move(values)) {
  for (Index i = 0; i < values_.rows(); ++i) {
    for (Index j = 0; j < values_.cols(); ++j) {
      const double c = values_(i, j);
      if (!std::isfinite(c) || c < 0.0) {
        std::ostringstream msg;
        msg << "cost entry (" << i << ", " << j << ") is negative or non-finite";
        throw ValidationError(msg.str());
      }
    }
  }
}

double CostMatrix::max() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }

DataMatrix zscore(const DataMatrix& m) {
  if (m.rows() < 1) throw ValidationError("zscore needs at least one row");
  const Matrix& x = m.values();
  const double n = static_cast<double>(x.rows());
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).sum() / n;
    double var = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
      const double d = x(i, j) - mean;
      var += d * d;
    }
    double sd = std::sqrt(var / n);
    if (sd == 0.0) sd = 1.0;
    for (Index i = 0; i < x.rows(); ++i) out(i, j) = (x(i, j) - mean) / sd;
  }
  return DataMatrix(std::move(out), m.maybe_labels(), m.column_names());
}

CostMatrix squared_euclidean_cost(const DataMatrix& a, const DataMatrix& b) {
  if (a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << "cost: column mismatch (" << a.cols() << " vs " << b.cols() << ")";
    throw ValidationError(msg.str());
  }
  const Matrix& x = a.values();
  const Matrix& y = b.values();
  Matrix c(x.rows(), y.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < y.rows(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < x.cols(); ++k) {
        const double d = x(i, k) - y(j, k);
        s += d * d;
      }
      c(i, j) = s;
    }
  }
  return CostMatrix(std::move(c));
}

EmpiricalMeasure uniform_measure(Index n) {
  if (n < 1) throw ValidationError("uniform measure needs n >= 1");
  return EmpiricalMeasure(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

}  // namespace otfs
