#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace otfs {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Dense instance-by-feature table with optional per-row class labels.
///
/// Entries are always finite and the label list, when present, has one entry
/// per row. Column names are informational (CSV headers) and may be empty.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Matrix values, std::optional<Labels> labels = std::nullopt,
                      std::vector<std::string> column_names = {});

  const Matrix& values() const { return values_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }

  bool has_labels() const { return labels_.has_value(); }
  const Labels& labels() const;
  const std::optional<Labels>& maybe_labels() const { return labels_; }

  const std::vector<std::string>& column_names() const { return column_names_; }

  /// Same values and column names, labels dropped.
  DataMatrix without_labels() const;
  /// Rows picked by index (duplicates allowed); labels follow their rows.
  DataMatrix select_rows(const std::vector<Index>& rows) const;
  /// Columns picked by index, in the given order.
  DataMatrix select_cols(const std::vector<Index>& cols) const;
  /// Transposed view as a new unlabeled matrix (features become rows).
  DataMatrix transposed() const;

 private:
  Matrix values_;
  std::optional<Labels> labels_;
  std::vector<std::string> column_names_;
};

/// Probability vector: non-negative weights summing to one.
class EmpiricalMeasure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(Vector weights);

  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  double operator[](Index i) const { return weights_[i]; }

 private:
  Vector weights_;
};

/// Non-negative, finite dissimilarity matrix between two point sets.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  double operator()(Index i, Index j) const { return values_(i, j); }
  double max() const;

 private:
  Matrix values_;
};

/// Column-wise standardization with population standard deviation.
/// Constant columns map to zero instead of NaN.
DataMatrix zscore(const DataMatrix& m);

/// Entry (i, j) is ||a_i - b_j||^2.
CostMatrix squared_euclidean_cost(const DataMatrix& a, const DataMatrix& b);

EmpiricalMeasure uniform_measure(Index n);

}  // namespace otfs
