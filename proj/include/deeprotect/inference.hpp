#pragma once

#include <vector>

#include "deeprotect/numerics.hpp"

namespace deeprotect {

// Linear inference model fit by ridge regression,
//   c = argmin  beta*||c||^2 + sum_t (c.x_t - y_t)^2,
// solved in closed form from the normal equations
//   (beta*I + X*Xt) c = X*y.
// Class decisions decode the real-valued score to the nearest code in
// `codec` (the sorted distinct training labels), ties toward the smaller
// code. The codec travels with the model through serialization.
struct RidgeClassifier {
  Vector c;
  double beta = 0.1;
  std::vector<double> codec;
};

// X holds one sample per column (dim x n). Throws ValidationError when n = 0,
// when y's length differs from n, or when beta < 0.
RidgeClassifier fit_ridge(const Matrix& X, const std::vector<double>& y,
                          double beta);

double predict(const RidgeClassifier& clf, const Vector& x);  // raw score c.x
double classify(const RidgeClassifier& clf, const Vector& x);  // nearest code

// Fraction of columns of X whose decoded class equals y. Throws
// ValidationError on an empty evaluation set.
double accuracy(const RidgeClassifier& clf, const Matrix& X,
                const std::vector<double>& y);

}  // namespace deeprotect
