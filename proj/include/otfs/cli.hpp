#pragma once

#include "otfs/core.hpp"
#include "otfs/eval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace otfs {

/// Persisted result of one feature ranking.
struct RankingArtifact {
  std::string source_path;
  std::string target_path;
  std::string strategy;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::vector<Index> order;
  std::vector<double> diagonal_scores;
  std::string version;
};

std::string tool_version();

std::string to_json(const RankingArtifact& artifact);
RankingArtifact ranking_artifact_from_json(const std::string& text);

/// result.json body for a pipeline run.
std::string experiment_to_json(const ExperimentResult& result, const ExperimentConfig& config);
/// Long-format table with columns repetition, d_star, arm, score, seconds.
std::string experiment_to_table(const ExperimentResult& result, char delimiter = ',');

/// Entry point of the otfs tool. Exit codes: 0 ok, 1 usage or validation
/// error, 2 solver failure.
int run_cli(int argc, const char* const* argv);

}  // namespace otfs
