#include "otfs/cli.hpp"
#include "otfs/error.hpp"
#include "otfs/io.hpp"

#include <json.hpp>

#include <sstream>

namespace otfs {

using Json = nlohmann::ordered_json;

std::string tool_version() { return OTFS_VERSION; }

std::string to_json(const RankingArtifact& a) {
  Json j;
  j["version"] = a.version;
  j["source_path"] = a.source_path;
  j["target_path"] = a.target_path;
  j["strategy"] = a.strategy;
  j["lambda"] = a.lambda;
  j["seed"] = a.seed;
  j["order"] = a.order;
  j["diagonal_scores"] = a.diagonal_scores;
  return j.dump(2) + "\n";
}

RankingArtifact ranking_artifact_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
    RankingArtifact a;
    a.version = j.at("version").get<std::string>();
    a.source_path = j.at("source_path").get<std::string>();
    a.target_path = j.at("target_path").get<std::string>();
    a.strategy = j.at("strategy").get<std::string>();
    a.lambda = j.at("lambda").get<double>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.order = j.at("order").get<std::vector<Index>>();
    a.diagonal_scores = j.at("diagonal_scores").get<std::vector<double>>();
    if (a.order.size() != a.diagonal_scores.size()) {
      throw ValidationError("ranking artifact: order and diagonal_scores differ in length");
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("ranking artifact: ") + e.what());
  }
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string experiment_to_json(const ExperimentResult& result, const ExperimentConfig& cfg) {
  Json j;
  j["version"] = tool_version();
  Json c;
  c["repetitions"] = cfg.repetitions;
  c["per_class_samples"] = cfg.per_class_samples;
  c["feature_counts"] = cfg.feature_counts;
  c["strategy"] = to_string(cfg.strategy.kind);
  c["lambda"] = cfg.rank.lambda;
  c["adaptation"] = to_string(cfg.adaptation);
  if (cfg.adaptation == Adaptation::barycentric_ot3) {
    c["ot3_lambda"] = cfg.ot3_lambda;
    c["ot3_eta"] = cfg.ot3_eta;
  }
  c["classifier"] = to_string(cfg.classifier);
  c["metric"] = to_string(cfg.metric);
  c["seed"] = cfg.seed;
  j["config"] = c;
  Json arms = Json::array();
  for (const auto& arm : result.arms) {
    Json a;
    a["arm"] = to_string(arm.arm);
    Json reps = Json::array();
    for (Index r = 0; r < arm.per_repetition_scores.rows(); ++r) {
      reps.push_back(to_std(arm.per_repetition_scores.row(r).transpose()));
    }
    a["per_repetition_scores"] = reps;
    a["means"] = to_std(arm.means);
    a["std_devs"] = to_std(arm.std_devs);
    a["wall_times"] = to_std(arm.wall_times);
    arms.push_back(a);
  }
  j["arms"] = arms;
  return j.dump(2) + "\n";
}

std::string experiment_to_table(const ExperimentResult& result, char delim) {
  std::ostringstream out;
  out << "repetition" << delim << "d_star" << delim << "arm" << delim << "score" << delim << "seconds\n";
  for (const auto& arm : result.arms) {
    for (Index r = 0; r < arm.per_repetition_scores.rows(); ++r) {
      for (std::size_t c = 0; c < result.feature_counts.size(); ++c) {
        const auto col = static_cast<Index>(c);
        out << r << delim << result.feature_counts[c] << delim << to_string(arm.arm) << delim
            << format_double(arm.per_repetition_scores(r, col)) << delim
            << format_double(arm.per_repetition_seconds(r, col)) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace otfs
