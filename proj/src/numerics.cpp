#include "deeprotect/numerics.hpp"

#include <cmath>
#include <sstream>

#include "deeprotect/errors.hpp"

namespace deeprotect {

double orth_residual(const Matrix& m) {
  Matrix gram = m * m.transpose();
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

OrthMatrix::OrthMatrix(Matrix rows) : m_(std::move(rows)) {
  if (m_.rows() != m_.cols()) {
    throw ValidationError("orth-shape", "OrthMatrix requires a square matrix");
  }
  double res = deeprotect::orth_residual(m_);
  if (!(res <= kOrthTol)) {
    std::ostringstream os;
    os << "rows are not orthonormal, ||M*Mt - I||_inf = " << res;
    throw ValidationError("orth-invariant", os.str());
  }
}

double OrthMatrix::orth_residual() const { return deeprotect::orth_residual(m_); }

OrthMatrix gram_schmidt_complete(const Vector& first) {
  const Eigen::Index n = first.size();
  if (n < 1) {
    throw ValidationError("gs-empty", "cannot complete an empty vector");
  }
  if (!first.allFinite()) {
    throw ValidationError("gs-nonfinite", "input vector has non-finite entries");
  }
  double norm = first.norm();
  if (norm < 1e-300) {
    throw ValidationError("gs-zero", "cannot complete the zero vector");
  }

  Matrix basis(n, n);
  Eigen::Index k = 0;
  basis.row(k++) = first.transpose() / norm;

  // Candidate pool: the identity rows. Modified Gram-Schmidt with a second
  // projection pass; residuals below the threshold mark candidates already
  // represented in the span and are skipped.
  constexpr double kResidualTol = 1e-10;
  for (Eigen::Index cand = 0; cand < n && k < n; ++cand) {
    Vector v = Vector::Unit(n, cand);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        v -= basis.row(j).dot(v) * basis.row(j).transpose();
      }
    }
    double res = v.norm();
    if (res < kResidualTol) continue;
    basis.row(k++) = v.transpose() / res;
  }
  if (k < n) {
    // Unreachable for a nonzero start vector: n identity candidates plus the
    // seed vector always span R^n. Guarded anyway to fail loudly.
    throw RuntimeError("gs-incomplete", "basis completion stalled");
  }
  return OrthMatrix(std::move(basis));
}

Matrix inv_sqrt_sym(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw ValidationError("invsqrt-shape", "matrix must be square");
  }
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream os;
    os << "matrix is not symmetric, max |M - Mt| = " << asym;
    throw ValidationError("invsqrt-symmetry", os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw RuntimeError("invsqrt-eig", "eigendecomposition failed to converge");
  }
  const Vector& vals = eig.eigenvalues();
  constexpr double kMinEig = 1e-12;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < kMinEig) {
      std::ostringstream os;
      os << "eigenvalue " << vals[i] << " below threshold " << kMinEig
         << " (index " << i << ")";
      throw RuntimeError("invsqrt-singular", os.str());
    }
  }
  Vector inv_roots = vals.array().sqrt().inverse();
  return eig.eigenvectors() * inv_roots.asDiagonal() *
         eig.eigenvectors().transpose();
}

double sample_laplace(double lambda, Rng& rng) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("laplace-scale", "lambda must be finite and >= 0");
  }
  double v = rng.uniform_open() - 0.5;
  if (lambda == 0.0) return 0.0;
  double sign = v < 0.0 ? -1.0 : 1.0;
  return -lambda * sign * std::log(1.0 - 2.0 * std::abs(v));
}

double discrete_entropy(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0 || std::isnan(c)) {
      throw ValidationError("entropy-counts", "counts must be non-negative");
    }
    total += c;
  }
  if (total <= 0.0) {
    throw ValidationError("entropy-empty", "all counts are zero");
  }
  double h = 0.0;
  for (double c : counts) {
    if (c == 0.0) continue;
    double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

double conditional_entropy(const Matrix& joint_counts) {
  std::vector<double> flat(joint_counts.data(),
                           joint_counts.data() + joint_counts.size());
  double h_joint = discrete_entropy(flat);

  std::vector<double> marginal(static_cast<size_t>(joint_counts.rows()));
  for (Eigen::Index i = 0; i < joint_counts.rows(); ++i) {
    marginal[static_cast<size_t>(i)] = joint_counts.row(i).sum();
  }
  // H(Y|X) = H(X,Y) - H(X)
  return h_joint - discrete_entropy(marginal);
}

}  // namespace deeprotect
