#pragma once

#include <Eigen/Dense>
#include <vector>

#include "deeprotect/rng.hpp"

namespace deeprotect {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Square matrix with orthonormal rows. Construction validates the invariant
// ||M*Mt - I||_inf <= kOrthTol and throws ValidationError on violation, so
// holding an OrthMatrix is proof of orthonormality.
struct OrthMatrix {
  static constexpr double kOrthTol = 1e-8;

  explicit OrthMatrix(Matrix rows);

  const Matrix& rows() const { return m_; }
  double orth_residual() const;  // ||M*Mt - I||_inf, recomputed

 private:
  Matrix m_;
};

// Max-norm deviation of M's rows from orthonormality: ||M*Mt - I||_inf.
double orth_residual(const Matrix& m);

// Completes `first` to an orthonormal basis of R^n (n = first.size()).
// Row 0 is first/||first||; the remaining rows come from Gram-Schmidt over
// the identity candidates e_1..e_n, skipping any candidate whose residual
// after projection removal has norm < 1e-10 (the candidate nearly parallel
// to the span built so far). A second orthogonalization pass keeps the
// result well conditioned at higher dimensions.
//
// Throws ValidationError for a zero or non-finite input vector.
OrthMatrix gram_schmidt_complete(const Vector& first);

// Inverse symmetric square root M^(-1/2) via eigendecomposition.
// Preconditions: M square, symmetric to 1e-10, eigenvalues >= 1e-12.
// An eigenvalue below the threshold raises RuntimeError naming it rather
// than being clamped: callers (the W*Wt re-orthonormalization step) feed
// matrices that are well conditioned by construction, so a tiny eigenvalue
// means the caller's state is broken and clamping would hide it.
Matrix inv_sqrt_sym(const Matrix& m);

// One draw from Laplace(0, lambda) by inverse CDF over a uniform u in (0,1):
//   v = u - 1/2,  draw = -lambda * sgn(v) * ln(1 - 2|v|).
// lambda == 0 returns exactly 0.0 (no draw is consumed either way — the
// uniform is always drawn so paired-seed experiments stay aligned across
// lambda values). lambda < 0 or non-finite throws ValidationError.
double sample_laplace(double lambda, Rng& rng);

// Shannon entropy in bits of an unnormalized count vector. Zero counts
// contribute nothing (0*log 0 := 0). Throws ValidationError if any count is
// negative or all counts are zero.
double discrete_entropy(const std::vector<double>& counts);

// Conditional entropy H(Y|X) in bits from a joint count table with
// joint(i, j) = count(X = i, Y = j). Same validity rules as
// discrete_entropy.
double conditional_entropy(const Matrix& joint_counts);

}  // namespace deeprotect
