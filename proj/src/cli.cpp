#include "otfs/cli.hpp"
#include "otfs/error.hpp"
#include "otfs/featsel.hpp"
#include "otfs/io.hpp"
#include "otfs/mapping.hpp"
#include "otfs/ot.hpp"
#include "otfs/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

namespace otfs {

namespace {

struct InputArgs {
  std::string source;
  std::string target;
  std::string label_column;
  bool no_header = false;
  std::string delimiter = ",";

  void add_to(CLI::App* cmd, bool labels_required) {
    cmd->add_option("--source", source, "source CSV (rows = instances)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--target", target, "target CSV")->required()->check(CLI::ExistingFile);
    auto* opt = cmd->add_option("--label-column", label_column, "label column, by header name or 0-based index");
    if (labels_required) opt->required();
    cmd->add_flag("--no-header", no_header, "input files have no header row");
    cmd->add_option("--delimiter", delimiter, "field delimiter")->capture_default_str();
  }

  CsvOptions csv() const {
    if (delimiter.size() != 1) throw ValidationError("--delimiter must be a single character");
    CsvOptions o;
    o.has_header = !no_header;
    o.delimiter = delimiter[0];
    if (!label_column.empty()) o.label_column = label_column;
    return o;
  }

  // Target labels are optional: a file without the label column is accepted.
  DataMatrix load_target() const {
    CsvOptions o = csv();
    try {
      return load_csv(target, o);
    } catch (const ValidationError&) {
      if (!o.label_column) throw;
      o.label_column.reset();
      return load_csv(target, o);
    }
  }
};

struct RankArgs {
  InputArgs in;
  std::string strategy = "ot";
  double lambda = 1.0;
  std::uint64_t seed = 0;
  Index balance_per_class = 0;
  bool per_feature_normalization = false;
  std::string out;
};

int cmd_rank(const RankArgs& a) {
  DataMatrix s = load_csv(a.in.source, a.in.csv());
  const DataMatrix t = a.in.load_target();
  if (a.balance_per_class > 0) s = balance_source_by_class(s, a.balance_per_class, a.seed);

  SelectionStrategy strategy{parse_selection_kind(a.strategy), std::nullopt};
  if (strategy.kind == SelectionKind::random) strategy.seed = derive_seed(a.seed, 1);
  RankOptions options;
  options.lambda = a.lambda;
  options.per_feature_normalization = a.per_feature_normalization;
  const FeatureRanking ranking = rank_features(s.without_labels(), t.without_labels(), strategy, options);

  RankingArtifact art;
  art.source_path = a.in.source;
  art.target_path = a.in.target;
  art.strategy = to_string(strategy.kind);
  art.lambda = a.lambda;
  art.seed = a.seed;
  art.order = ranking.order;
  art.diagonal_scores.assign(ranking.diagonal_scores.data(),
                             ranking.diagonal_scores.data() + ranking.diagonal_scores.size());
  art.version = tool_version();
  write_file_atomic(a.out, to_json(art));
  if (!ranking.report.converged) {
    std::cerr << "warning: feature-space Sinkhorn stopped at marginal violation "
              << ranking.report.final_marginal_violation << "\n";
  }
  return 0;
}

struct PipelineArgs {
  InputArgs in;
  std::vector<Index> feature_counts;
  int repetitions = 19;
  Index per_class = 20;
  std::string strategy = "ot";
  double lambda = 1.0;
  std::string adaptation = "none";
  double ot3_lambda = 2.0;
  double ot3_eta = 1.0;
  std::string classifier = "knn1";
  std::string metric = "accuracy";
  double svm_reg = 1e-4;
  int svm_epochs = 50;
  std::vector<std::string> arms{"descending", "ascending", "random"};
  std::uint64_t seed = 0;
  bool no_timings = false;
  std::string out_dir;
};

int cmd_pipeline(const PipelineArgs& a) {
  const DataMatrix s = load_csv(a.in.source, a.in.csv());
  const DataMatrix t = load_csv(a.in.target, a.in.csv());

  ExperimentConfig cfg;
  cfg.repetitions = a.repetitions;
  cfg.per_class_samples = a.per_class;
  cfg.feature_counts = a.feature_counts.empty() ? std::vector<Index>{s.cols()} : a.feature_counts;
  cfg.strategy = {parse_selection_kind(a.strategy), std::nullopt};
  if (cfg.strategy.kind == SelectionKind::random) cfg.strategy.seed = derive_seed(a.seed, 1);
  cfg.rank.lambda = a.lambda;
  if (a.adaptation == "none") {
    cfg.adaptation = Adaptation::none;
  } else if (a.adaptation == "ot3") {
    cfg.adaptation = Adaptation::barycentric_ot3;
  } else {
    throw ValidationError("--adaptation must be none or ot3");
  }
  cfg.ot3_lambda = a.ot3_lambda;
  cfg.ot3_eta = a.ot3_eta;
  if (a.classifier == "knn1") {
    cfg.classifier = ClassifierKind::knn1;
  } else if (a.classifier == "svm") {
    cfg.classifier = ClassifierKind::linear_svm;
  } else {
    throw ValidationError("--classifier must be knn1 or svm");
  }
  if (a.metric == "accuracy") {
    cfg.metric = MetricKind::accuracy;
  } else if (a.metric == "auc") {
    cfg.metric = MetricKind::auc;
  } else {
    throw ValidationError("--metric must be accuracy or auc");
  }
  cfg.svm_reg = a.svm_reg;
  cfg.svm_epochs = a.svm_epochs;
  cfg.arms.clear();
  for (const auto& name : a.arms) cfg.arms.push_back(parse_arm(name));
  cfg.seed = a.seed;
  cfg.record_timings = !a.no_timings;

  const ExperimentResult result = run_da_experiment(s, t, cfg);
  const std::filesystem::path dir(a.out_dir);
  write_file_atomic((dir / "result.json").string(), experiment_to_json(result, cfg));
  write_file_atomic((dir / "scores.csv").string(), experiment_to_table(result));
  return 0;
}

struct AdaptArgs {
  InputArgs in;
  std::string method = "class";
  double lambda = 2.0;
  double eta = 1.0;
  bool normalize_cost = false;
  std::string out;
};

int cmd_adapt(const AdaptArgs& a) {
  const DataMatrix s = load_csv(a.in.source, a.in.csv());
  const DataMatrix t = a.in.load_target();
  if (s.cols() != t.cols()) throw ValidationError("source and target feature counts differ");
  const EmpiricalMeasure mu_s = uniform_measure(s.rows());
  const EmpiricalMeasure mu_t = uniform_measure(t.rows());
  const CostMatrix cost = squared_euclidean_cost(s, t);
  SinkhornOptions sk;
  sk.normalize_cost = a.normalize_cost;

  Coupling plan;
  if (a.method == "exact") {
    plan = solve_exact(mu_s, mu_t, cost);
  } else if (a.method == "entropic") {
    plan = solve_entropic(mu_s, mu_t, cost, a.lambda, sk).coupling;
  } else if (a.method == "class") {
    if (!s.has_labels()) throw ValidationError("--method class needs source labels (--label-column)");
    plan = solve_class_regularized(mu_s, mu_t, cost, s.labels(), a.lambda, a.eta, {sk, 10}).coupling;
  } else {
    throw ValidationError("--method must be exact, entropic or class");
  }
  const DataMatrix mapped = barycentric_map(plan, t.without_labels());
  const DataMatrix out(mapped.values(), s.maybe_labels(), s.column_names());
  const std::string label_name = a.in.label_column.empty() ? "label" : a.in.label_column;
  write_file_atomic(a.out, format_csv(out, a.in.csv().delimiter, label_name));
  return 0;
}

struct GenerateArgs {
  SyntheticConfig cfg;
  std::string shift = "affine";
  std::string out_dir;
};

int cmd_generate(GenerateArgs a) {
  if (a.shift == "affine") {
    a.cfg.shift = ShiftKind::affine;
  } else if (a.shift == "shuffle") {
    a.cfg.shift = ShiftKind::shuffle;
  } else {
    throw ValidationError("--shift must be affine or shuffle");
  }
  const ShiftedDataset data = generate_shifted_dataset(a.cfg);
  const std::filesystem::path dir(a.out_dir);
  write_file_atomic((dir / "source.csv").string(), format_csv(data.source));
  write_file_atomic((dir / "target.csv").string(), format_csv(data.target));
  nlohmann::ordered_json j;
  j["version"] = tool_version();
  j["seed"] = a.cfg.seed;
  j["n_s"] = a.cfg.n_s;
  j["n_t"] = a.cfg.n_t;
  j["d"] = a.cfg.d;
  j["n_classes"] = a.cfg.n_classes;
  j["shift"] = a.shift;
  j["planted"] = data.planted;
  write_file_atomic((dir / "planted.json").string(), j.dump(2) + "\n");
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Feature ranking for domain adaptation with optimal transport", "otfs"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "rank features by cross-domain similarity");
  rank.in.add_to(rank_cmd, false);
  rank_cmd->add_option("--strategy", rank.strategy, "target sample selection: ot, 1nn or random")
      ->check(CLI::IsMember({"ot", "1nn", "random"}));
  rank_cmd->add_option("--lambda", rank.lambda, "entropic regularization of the feature-space problem");
  rank_cmd->add_option("--seed", rank.seed, "seed for class balancing and random selection");
  rank_cmd->add_option("--balance-per-class", rank.balance_per_class,
                       "keep at most this many source rows per class (0 = all; needs --label-column)");
  rank_cmd->add_flag("--per-feature-normalization", rank.per_feature_normalization,
                     "z-score features instead of samples before the feature-space problem");
  rank_cmd->add_option("--out", rank.out, "ranking JSON to write")->required();

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "repeated selection + classification experiment");
  pipe.in.add_to(pipe_cmd, true);
  pipe_cmd->add_option("--feature-counts", pipe.feature_counts, "numbers of kept features (default: all)")
      ->delimiter(',');
  pipe_cmd->add_option("--repetitions", pipe.repetitions, "repetitions (20 for the AUC protocol)");
  pipe_cmd->add_option("--per-class", pipe.per_class, "source rows sampled per class (0 = all)");
  pipe_cmd->add_option("--strategy", pipe.strategy, "target sample selection: ot, 1nn or random")
      ->check(CLI::IsMember({"ot", "1nn", "random"}));
  pipe_cmd->add_option("--lambda", pipe.lambda, "feature-ranking regularization");
  pipe_cmd->add_option("--adaptation", pipe.adaptation, "none or ot3")->check(CLI::IsMember({"none", "ot3"}));
  pipe_cmd->add_option("--ot3-lambda", pipe.ot3_lambda, "class-regularized OT lambda");
  pipe_cmd->add_option("--ot3-eta", pipe.ot3_eta, "class-regularized OT eta");
  pipe_cmd->add_option("--classifier", pipe.classifier, "knn1 or svm")->check(CLI::IsMember({"knn1", "svm"}));
  pipe_cmd->add_option("--metric", pipe.metric, "accuracy or auc")->check(CLI::IsMember({"accuracy", "auc"}));
  pipe_cmd->add_option("--svm-reg", pipe.svm_reg, "linear SVM L2 regularization");
  pipe_cmd->add_option("--svm-epochs", pipe.svm_epochs, "linear SVM epochs");
  pipe_cmd->add_option("--arms", pipe.arms, "feature orders to evaluate")
      ->delimiter(',')
      ->check(CLI::IsMember({"descending", "ascending", "random"}));
  pipe_cmd->add_option("--seed", pipe.seed, "base seed; repetition r uses seed + r");
  pipe_cmd->add_flag("--no-timings", pipe.no_timings, "write 0 for all wall times (reproducible output)");
  pipe_cmd->add_option("--out-dir", pipe.out_dir, "directory for result.json and scores.csv")->required();

  AdaptArgs adapt;
  auto* adapt_cmd = app.add_subcommand("adapt", "map source rows onto the target by barycentric OT");
  adapt.in.add_to(adapt_cmd, false);
  adapt_cmd->add_option("--method", adapt.method, "exact, entropic or class")
      ->check(CLI::IsMember({"exact", "entropic", "class"}));
  adapt_cmd->add_option("--lambda", adapt.lambda, "entropic regularization (entropic, class)");
  adapt_cmd->add_option("--eta", adapt.eta, "class regularization weight (class)");
  adapt_cmd->add_flag("--normalize-cost", adapt.normalize_cost, "divide the cost matrix by its maximum");
  adapt_cmd->add_option("--out", adapt.out, "adapted source CSV to write")->required();

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic source/target pair with planted shifts");
  gen_cmd->add_option("--n-s", gen.cfg.n_s, "source rows");
  gen_cmd->add_option("--n-t", gen.cfg.n_t, "target rows");
  gen_cmd->add_option("--d", gen.cfg.d, "features");
  gen_cmd->add_option("--k", gen.cfg.k_shifted, "shifted features");
  gen_cmd->add_option("--classes", gen.cfg.n_classes, "classes");
  gen_cmd->add_option("--separation", gen.cfg.class_separation, "std of the class means");
  gen_cmd->add_option("--noise", gen.cfg.noise, "within-class std");
  gen_cmd->add_option("--shift", gen.shift, "affine or shuffle")->check(CLI::IsMember({"affine", "shuffle"}));
  gen_cmd->add_option("--scale", gen.cfg.scale, "affine shift: multiplier");
  gen_cmd->add_option("--offset", gen.cfg.offset, "affine shift: additive term");
  gen_cmd->add_option("--seed", gen.cfg.seed, "seed");
  gen_cmd->add_option("--out-dir", gen.out_dir, "directory for source.csv, target.csv, planted.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*rank_cmd) return cmd_rank(rank);
    if (*pipe_cmd) return cmd_pipeline(pipe);
    if (*adapt_cmd) return cmd_adapt(adapt);
    if (*gen_cmd) return cmd_generate(gen);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace otfs
