#include "otfs/eval.hpp"
#include "otfs/error.hpp"
#include "otfs/mapping.hpp"
#include "otfs/ot.hpp"
#include "otfs/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace otfs {

std::string to_string(Adaptation a) { return a == Adaptation::none ? "none" : "ot3"; }
std::string to_string(ClassifierKind c) { return c == ClassifierKind::knn1 ? "knn1" : "svm"; }
std::string to_string(MetricKind m) { return m == MetricKind::accuracy ? "accuracy" : "auc"; }

std::string to_string(Arm a) {
  switch (a) {
    case Arm::descending: return "descending";
    case Arm::ascending: return "ascending";
    case Arm::random: return "random";
  }
  return "?";
}

Arm parse_arm(const std::string& name) {
  if (name == "descending") return Arm::descending;
  if (name == "ascending") return Arm::ascending;
  if (name == "random") return Arm::random;
  throw ValidationError("unknown arm '" + name + "' (expected descending, ascending or random)");
}

const ArmResult& ExperimentResult::arm(Arm a) const {
  for (const auto& r : arms) {
    if (r.arm == a) return r;
  }
  throw ValidationError("experiment has no '" + to_string(a) + "' arm");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate(const DataMatrix& source, const DataMatrix& target, const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw ValidationError("repetitions must be at least 1");
  if (cfg.per_class_samples < 0) throw ValidationError("per_class_samples must be >= 0");
  if (cfg.feature_counts.empty()) throw ValidationError("feature_counts must not be empty");
  if (cfg.arms.empty()) throw ValidationError("at least one arm is required");
  if (source.cols() != target.cols()) throw ValidationError("source and target feature counts differ");
  for (Index f : cfg.feature_counts) {
    if (f < 1 || f > source.cols()) {
      std::ostringstream msg;
      msg << "feature count " << f << " outside [1, " << source.cols() << "]";
      throw ValidationError(msg.str());
    }
  }
  if (!source.has_labels()) throw ValidationError("experiment needs source labels");
  if (!target.has_labels()) throw ValidationError("experiment needs target labels for scoring");
  cfg.strategy.validate();
}

double evaluate(const DataMatrix& train, const DataMatrix& test, const Labels& truth,
                const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.classifier == ClassifierKind::knn1) {
    const Labels pred = knn_predict(train, test, 1);
    if (cfg.metric == MetricKind::accuracy) return accuracy(pred, truth);
    // 1-NN has no margin: score each point by its hard vote.
    const int positive = *std::max_element(train.labels().begin(), train.labels().end());
    std::vector<double> s(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) s[i] = pred[i] == positive ? 1.0 : 0.0;
    return auc(s, truth, positive);
  }
  const LinearSvm model = train_linear_svm(train, cfg.svm_reg, cfg.svm_epochs, seed);
  if (cfg.metric == MetricKind::accuracy) return accuracy(model.predict(test), truth);
  const Vector s = model.scores(test);
  return auc(std::vector<double>(s.data(), s.data() + s.size()), truth, model.positive_label);
}

}  // namespace

ExperimentResult run_da_experiment(const DataMatrix& source, const DataMatrix& target,
                                   const ExperimentConfig& cfg) {
  validate(source, target, cfg);
  const auto n_counts = static_cast<Index>(cfg.feature_counts.size());
  const Index d = source.cols();

  ExperimentResult result;
  result.feature_counts = cfg.feature_counts;
  for (Arm a : cfg.arms) {
    ArmResult r;
    r.arm = a;
    r.per_repetition_scores = Matrix::Zero(cfg.repetitions, n_counts);
    r.per_repetition_seconds = Matrix::Zero(cfg.repetitions, n_counts);
    result.arms.push_back(std::move(r));
  }
  const bool needs_ranking = std::any_of(cfg.arms.begin(), cfg.arms.end(), [](Arm a) { return a != Arm::random; });
  // Target labels stay here; ranking and adaptation only see the features.
  const DataMatrix target_x = target.without_labels();
  const Labels& truth = target.labels();

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed = cfg.seed + static_cast<std::uint64_t>(rep);
    const DataMatrix src = cfg.per_class_samples > 0
                               ? balance_source_by_class(source, cfg.per_class_samples, rep_seed)
                               : source;
    SelectionStrategy strategy = cfg.strategy;
    if (strategy.seed) strategy.seed = *strategy.seed + static_cast<std::uint64_t>(rep);

    double rank_seconds = 0.0;
    FeatureRanking ranking;
    if (needs_ranking) {
      const auto start = Clock::now();
      ranking = rank_features(src.without_labels(), target_x, strategy, cfg.rank);
      rank_seconds = seconds_since(start);
    }

    for (auto& arm : result.arms) {
      std::vector<Index> order;
      if (arm.arm == Arm::descending) {
        order = ranking.order;
      } else if (arm.arm == Arm::ascending) {
        order = ascending_order(ranking);
      } else {
        order.resize(static_cast<std::size_t>(d));
        std::iota(order.begin(), order.end(), Index{0});
        Rng rng(derive_seed(rep_seed, 2));
        rng.shuffle(order);
      }
      for (Index c = 0; c < n_counts; ++c) {
        const auto start = Clock::now();
        auto [train, test] = select_top_features(src, target_x, order, cfg.feature_counts[static_cast<std::size_t>(c)]);
        if (cfg.adaptation == Adaptation::barycentric_ot3) {
          const CostMatrix cost = squared_euclidean_cost(train, test);
          const EntropicSolution plan =
              solve_class_regularized(uniform_measure(train.rows()), uniform_measure(test.rows()), cost,
                                      train.labels(), cfg.ot3_lambda, cfg.ot3_eta, {});
          DataMatrix mapped = barycentric_map(plan.coupling, test);
          train = DataMatrix(mapped.values(), train.labels(), mapped.column_names());
        }
        const double score = evaluate(train, test, truth, cfg, derive_seed(rep_seed, 3));
        arm.per_repetition_scores(rep, c) = score;
        if (cfg.record_timings) {
          arm.per_repetition_seconds(rep, c) =
              seconds_since(start) + (arm.arm == Arm::random ? 0.0 : rank_seconds);
        }
      }
    }
  }

  for (auto& arm : result.arms) {
    arm.means = arm.per_repetition_scores.colwise().mean().transpose();
    arm.wall_times = arm.per_repetition_seconds.colwise().sum().transpose();
    arm.std_devs.resize(n_counts);
    for (Index c = 0; c < n_counts; ++c) {
      const auto centered = arm.per_repetition_scores.col(c).array() - arm.means[c];
      arm.std_devs[c] = std::sqrt(centered.square().sum() / static_cast<double>(cfg.repetitions));
    }
  }
  return result;
}

}  // namespace otfs
