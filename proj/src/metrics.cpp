#include "otfs/eval.hpp"
#include "otfs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace otfs {

double accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    std::ostringstream msg;
    msg << "accuracy: " << predicted.size() << " predictions for " << truth.size() << " labels";
    throw ValidationError(msg.str());
  }
  if (truth.empty()) throw ValidationError("accuracy: empty label list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double auc(const std::vector<double>& scores, const Labels& truth, int positive_label) {
  if (scores.size() != truth.size()) throw ValidationError("auc: scores and labels differ in length");
  for (double s : scores) {
    if (std::isnan(s)) throw ValidationError("auc: NaN score");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Count in half-units so the result is exact: 2 per won pair, 1 per tie.
  std::uint64_t half_wins = 0;
  std::uint64_t neg_below = 0;
  std::uint64_t pos_total = 0;
  for (std::size_t g = 0; g < idx.size();) {
    std::size_t h = g;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (h < idx.size() && scores[idx[h]] == scores[idx[g]]) {
      (truth[idx[h]] == positive_label ? pos : neg) += 1;
      ++h;
    }
    half_wins += 2 * pos * neg_below + pos * neg;
    neg_below += neg;
    pos_total += pos;
    g = h;
  }
  if (pos_total == 0 || neg_below == 0) throw ValidationError("auc: both classes must be present");
  return static_cast<double>(half_wins) / (2.0 * static_cast<double>(pos_total) * static_cast<double>(neg_below));
}

}  // namespace otfs
