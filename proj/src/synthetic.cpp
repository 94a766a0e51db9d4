#include "otfs/eval.hpp"
#include "otfs/error.hpp"
#include "otfs/random.hpp"

#include <algorithm>
#include <string>

namespace otfs {

ShiftedDataset generate_shifted_dataset(const SyntheticConfig& cfg) {
  if (cfg.n_s < 1 || cfg.n_t < 1 || cfg.d < 1) throw ValidationError("synthetic: n_s, n_t and d must be positive");
  if (cfg.k_shifted < 0 || cfg.k_shifted > cfg.d) throw ValidationError("synthetic: k_shifted must lie in [0, d]");
  if (cfg.n_classes < 1) throw ValidationError("synthetic: need at least one class");
  if (!(cfg.noise >= 0.0) || !(cfg.class_separation >= 0.0)) {
    throw ValidationError("synthetic: noise and class_separation must be non-negative");
  }

  Rng rng(cfg.seed);
  Matrix means(cfg.n_classes, cfg.d);
  for (Index c = 0; c < means.rows(); ++c) {
    for (Index j = 0; j < cfg.d; ++j) means(c, j) = cfg.class_separation * rng.normal();
  }
  auto draw = [&](Index n, Labels& y) {
    y.resize(static_cast<std::size_t>(n));
    for (auto& label : y) label = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_classes)));
    Matrix x(n, cfg.d);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < cfg.d; ++j) x(i, j) = means(y[static_cast<std::size_t>(i)], j) + cfg.noise * rng.normal();
    }
    return x;
  };
  Labels ys;
  Labels yt;
  Matrix xs = draw(cfg.n_s, ys);
  Matrix xt = draw(cfg.n_t, yt);

  const auto picks = rng.sample_without_replacement(static_cast<std::size_t>(cfg.d),
                                                    static_cast<std::size_t>(cfg.k_shifted));
  std::vector<Index> planted(picks.begin(), picks.end());
  std::sort(planted.begin(), planted.end());
  for (Index j : planted) {
    if (cfg.shift == ShiftKind::affine) {
      xt.col(j) = (cfg.scale * xt.col(j).array() + cfg.offset).matrix();
    } else {
      std::vector<double> column(static_cast<std::size_t>(cfg.n_t));
      for (Index i = 0; i < cfg.n_t; ++i) column[static_cast<std::size_t>(i)] = xt(i, j);
      rng.shuffle(column);
      for (Index i = 0; i < cfg.n_t; ++i) xt(i, j) = column[static_cast<std::size_t>(i)];
    }
  }

  std::vector<std::string> names;
  for (Index j = 0; j < cfg.d; ++j) names.push_back("f" + std::to_string(j));
  return {DataMatrix(std::move(xs), std::move(ys), names), DataMatrix(std::move(xt), std::move(yt), names),
          std::move(planted)};
}

}  // namespace otfs
