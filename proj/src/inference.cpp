#include "deeprotect/inference.hpp"

#include <algorithm>
#include <cmath>

#include "deeprotect/errors.hpp"

namespace deeprotect {

RidgeClassifier fit_ridge(const Matrix& X, const std::vector<double>& y,
                          double beta) {
  if (X.cols() == 0) {
    throw ValidationError("ridge-empty", "cannot fit on zero samples");
  }
  if (static_cast<Eigen::Index>(y.size()) != X.cols()) {
    throw ValidationError("ridge-labels",
                          "label count does not match sample count");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("ridge-beta", "beta must be finite and >= 0");
  }

  const Eigen::Index dim = X.rows();
  Matrix normal = X * X.transpose();
  normal.diagonal().array() += beta;
  Vector rhs = Vector::Zero(dim);
  for (Eigen::Index t = 0; t < X.cols(); ++t) {
    rhs += y[static_cast<size_t>(t)] * X.col(t);
  }

  RidgeClassifier clf;
  clf.beta = beta;
  // LDLt handles the beta = 0 positive-semidefinite case.
  clf.c = normal.ldlt().solve(rhs);
  clf.codec.assign(y.begin(), y.end());
  std::sort(clf.codec.begin(), clf.codec.end());
  clf.codec.erase(std::unique(clf.codec.begin(), clf.codec.end()),
                  clf.codec.end());
  return clf;
}

double predict(const RidgeClassifier& clf, const Vector& x) {
  if (x.size() != clf.c.size()) {
    throw ValidationError("ridge-dim", "input dimension does not match model");
  }
  return clf.c.dot(x);
}

double classify(const RidgeClassifier& clf, const Vector& x) {
  if (clf.codec.empty()) {
    throw ValidationError("ridge-codec", "classifier has no label codec");
  }
  double score = predict(clf, x);
  double best = clf.codec.front();
  double best_dist = std::abs(score - best);
  for (double code : clf.codec) {
    double d = std::abs(score - code);
    if (d < best_dist) {  // strict: equal distance keeps the smaller code
      best = code;
      best_dist = d;
    }
  }
  return best;
}

double accuracy(const RidgeClassifier& clf, const Matrix& X,
                const std::vector<double>& y) {
  if (X.cols() == 0) {
    throw ValidationError("ridge-empty", "cannot score an empty set");
  }
  if (static_cast<Eigen::Index>(y.size()) != X.cols()) {
    throw ValidationError("ridge-labels",
                          "label count does not match sample count");
  }
  Eigen::Index hits = 0;
  for (Eigen::Index t = 0; t < X.cols(); ++t) {
    if (classify(clf, X.col(t)) == y[static_cast<size_t>(t)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(X.cols());
}

}  // namespace deeprotect
