#include "otfs/eval.hpp"
#include "otfs/error.hpp"
#include "otfs/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace otfs {

Labels knn_predict(const DataMatrix& train, const DataMatrix& test, Index k) {
  if (train.rows() == 0) throw ValidationError("knn: empty training set");
  if (k < 1) throw ValidationError("knn: k must be at least 1");
  if (train.cols() != test.cols()) {
    std::ostringstream msg;
    msg << "knn: train has " << train.cols() << " features, test has " << test.cols();
    throw ValidationError(msg.str());
  }
  const Labels& y = train.labels();
  const Index kk = std::min(k, train.rows());
  const Matrix& xt = train.values();
  Labels out(static_cast<std::size_t>(test.rows()));

  std::vector<double> dist(static_cast<std::size_t>(train.rows()));
  std::vector<Index> idx(static_cast<std::size_t>(train.rows()));
  for (Index q = 0; q < test.rows(); ++q) {
    for (Index i = 0; i < train.rows(); ++i) {
      dist[static_cast<std::size_t>(i)] = (xt.row(i) - test.values().row(q)).squaredNorm();
    }
    if (kk == 1) {
      Index best = 0;
      for (Index i = 1; i < train.rows(); ++i) {
        if (dist[static_cast<std::size_t>(i)] < dist[static_cast<std::size_t>(best)]) best = i;
      }
      out[static_cast<std::size_t>(q)] = y[static_cast<std::size_t>(best)];
      continue;
    }
    std::iota(idx.begin(), idx.end(), Index{0});
    std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](Index a, Index b) {
      const double da = dist[static_cast<std::size_t>(a)];
      const double db = dist[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    });
    // votes: label -> (count, lowest training index among its neighbors)
    std::vector<std::pair<int, std::pair<int, Index>>> votes;
    for (Index r = 0; r < kk; ++r) {
      const Index i = idx[static_cast<std::size_t>(r)];
      const int label = y[static_cast<std::size_t>(i)];
      auto it = std::find_if(votes.begin(), votes.end(), [&](const auto& v) { return v.first == label; });
      if (it == votes.end()) {
        votes.push_back({label, {1, i}});
      } else {
        ++it->second.first;
        it->second.second = std::min(it->second.second, i);
      }
    }
    auto winner = std::max_element(votes.begin(), votes.end(), [](const auto& a, const auto& b) {
      if (a.second.first != b.second.first) return a.second.first < b.second.first;
      return a.second.second > b.second.second;
    });
    out[static_cast<std::size_t>(q)] = winner->first;
  }
  return out;
}

double LinearSvm::score(const Eigen::Ref<const Vector>& x) const { return weights.dot(x) + bias; }

Vector LinearSvm::scores(const DataMatrix& x) const {
  if (x.cols() != weights.size()) throw ValidationError("svm: feature count differs from the model");
  return (x.values() * weights).array() + bias;
}

Labels LinearSvm::predict(const DataMatrix& x) const {
  const Vector s = scores(x);
  Labels out(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s[i] > 0.0 ? positive_label : negative_label;
  return out;
}

LinearSvm train_linear_svm(const DataMatrix& train, double reg, int epochs, std::uint64_t seed) {
  if (!(reg > 0.0) || !std::isfinite(reg)) throw ValidationError("svm: reg must be positive");
  if (epochs < 1) throw ValidationError("svm: epochs must be at least 1");
  const Labels& y = train.labels();
  const std::set<int> classes(y.begin(), y.end());
  if (classes.size() != 2) {
    std::ostringstream msg;
    msg << "svm: training labels must contain exactly two classes, found " << classes.size();
    throw ValidationError(msg.str());
  }
  LinearSvm model;
  model.negative_label = *classes.begin();
  model.positive_label = *classes.rbegin();

  const Index n = train.rows();
  const Index d = train.cols();
  // w_aug = [w, b], x_aug = [x, 1]
  Vector w = Vector::Zero(d + 1);
  Rng rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::int64_t t = 0;
  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (Index i : order) {
      ++t;
      const double eta = 1.0 / (reg * static_cast<double>(t));
      const double yi = y[static_cast<std::size_t>(i)] == model.positive_label ? 1.0 : -1.0;
      const double margin = yi * (train.values().row(i).dot(w.head(d)) + w[d]);
      w *= 1.0 - eta * reg;
      if (margin < 1.0) {
        w.head(d) += eta * yi * train.values().row(i).transpose();
        w[d] += eta * yi;
      }
    }
  }
  model.weights = w.head(d);
  model.bias = w[d];
  return model;
}

}  // namespace otfs
