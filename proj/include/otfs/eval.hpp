#pragma once

#include "otfs/core.hpp"
#include "otfs/featsel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace otfs {

// ---- classifiers ----------------------------------------------------------

/// Majority label among the k nearest training rows (Euclidean). Distance
/// ties go to the lower training index; vote ties go to the label whose
/// first neighbor has the lowest training index.
Labels knn_predict(const DataMatrix& train, const DataMatrix& test, Index k = 1);

struct LinearSvm {
  Vector weights;
  double bias = 0.0;
  int positive_label = 1;
  int negative_label = 0;

  /// Signed margin <w, x> + b; positive means positive_label.
  double score(const Eigen::Ref<const Vector>& x) const;
  Vector scores(const DataMatrix& x) const;
  Labels predict(const DataMatrix& x) const;
};

/// L2-regularized hinge loss, Pegasos-style stochastic subgradient with step
/// 1 / (reg * t). The bias is trained as an extra always-one feature and is
/// regularized with the weights. Requires exactly two distinct labels; the
/// larger one is the positive class.
LinearSvm train_linear_svm(const DataMatrix& train, double reg = 1e-4, int epochs = 50,
                           std::uint64_t seed = 0);

// ---- metrics ---------------------------------------------------------------

double accuracy(const Labels& predicted, const Labels& truth);

/// Mann-Whitney AUC: share of (positive, negative) pairs ranked correctly,
/// ties counted one half. Entries equal to positive_label are positives.
double auc(const std::vector<double>& scores, const Labels& truth, int positive_label = 1);

// ---- synthetic data --------------------------------------------------------

enum class ShiftKind {
  /// target column -> scale * column + offset
  affine,
  /// target column independently permuted across rows
  shuffle,
};

struct SyntheticConfig {
  Index n_s = 200;
  Index n_t = 400;
  Index d = 20;
  Index k_shifted = 5;
  int n_classes = 10;
  std::uint64_t seed = 0;
  /// Class means are drawn from N(0, class_separation^2) per feature.
  double class_separation = 4.0;
  double noise = 1.0;
  ShiftKind shift = ShiftKind::affine;
  double scale = -1.0;
  double offset = 0.0;
};

struct ShiftedDataset {
  DataMatrix source;
  DataMatrix target;
  /// Shifted feature indices, ascending.
  std::vector<Index> planted;
};

/// Class-conditional Gaussians shared by both domains, except for the
/// planted columns of the target, which get the configured shift.
ShiftedDataset generate_shifted_dataset(const SyntheticConfig& config);

// ---- experiment protocol ---------------------------------------------------

enum class Adaptation { none, barycentric_ot3 };
enum class ClassifierKind { knn1, linear_svm };
enum class MetricKind { accuracy, auc };
enum class Arm { descending, ascending, random };

std::string to_string(Adaptation a);
std::string to_string(ClassifierKind c);
std::string to_string(MetricKind m);
std::string to_string(Arm a);
Arm parse_arm(const std::string& name);

struct ExperimentConfig {
  int repetitions = 19;
  /// Source rows kept per class in each repetition; 0 keeps every row.
  Index per_class_samples = 20;
  std::vector<Index> feature_counts;
  SelectionStrategy strategy;
  RankOptions rank;
  Adaptation adaptation = Adaptation::none;
  double ot3_lambda = 2.0;
  double ot3_eta = 1.0;
  ClassifierKind classifier = ClassifierKind::knn1;
  MetricKind metric = MetricKind::accuracy;
  double svm_reg = 1e-4;
  int svm_epochs = 50;
  std::vector<Arm> arms{Arm::descending};
  std::uint64_t seed = 0;
  /// When false all wall times are reported as zero (reproducible output).
  bool record_timings = true;
};

struct ArmResult {
  Arm arm = Arm::descending;
  /// repetition x feature count
  Matrix per_repetition_scores;
  Vector means;
  /// population standard deviation over repetitions
  Vector std_devs;
  /// repetition x feature count, seconds
  Matrix per_repetition_seconds;
  /// seconds per feature count, summed over repetitions
  Vector wall_times;
};

struct ExperimentResult {
  std::vector<Index> feature_counts;
  std::vector<ArmResult> arms;

  const ArmResult& arm(Arm a) const;
};

/// Repetition r uses seed + r. Target labels are read only when scoring.
ExperimentResult run_da_experiment(const DataMatrix& source, const DataMatrix& target,
                                   const ExperimentConfig& config);

}  // namespace otfs
