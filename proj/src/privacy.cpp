#include "deeprotect/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deeprotect/errors.hpp"

namespace deeprotect {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kBaseline: return "baseline";
    case Mode::kMode1: return "mode1";
    case Mode::kMode2: return "mode2";
  }
  throw ValidationError("mode-name", "unknown mode value");
}

Mode parse_mode(const std::string& name) {
  if (name == "baseline") return Mode::kBaseline;
  if (name == "mode1") return Mode::kMode1;
  if (name == "mode2") return Mode::kMode2;
  throw ValidationError("mode-name",
                        "unknown mode '" + name + "' (baseline|mode1|mode2)");
}

double PrivacySpec::lambda() const {
  if (std::isnan(epsilon) || epsilon <= 0.0) {
    throw ValidationError("epsilon-range", "epsilon must be > 0");
  }
  if (!std::isfinite(delta_q) || delta_q < 0.0) {
    throw ValidationError("sensitivity-range", "delta_q must be finite and >= 0");
  }
  if (dim_x < 1 || dim_f < 1) {
    throw ValidationError("dims-range", "dimensions must be >= 1");
  }
  if (mode == Mode::kMode2) {
    if (!std::isfinite(delta_q_relax) || delta_q_relax < 0.0 ||
        delta_q_relax > delta_q + 1e-12) {
      throw ValidationError("relax-exceeds",
                            "delta_q_relax must lie in [0, delta_q]");
    }
  }
  if (std::isinf(epsilon)) return 0.0;
  switch (mode) {
    case Mode::kBaseline:
      return static_cast<double>(dim_x) * delta_q / epsilon;
    case Mode::kMode1:
      return std::sqrt(static_cast<double>(dim_f)) * static_cast<double>(dim_x) *
             delta_q / epsilon;
    case Mode::kMode2:
      return std::sqrt(static_cast<double>(dim_f)) * static_cast<double>(dim_x) *
             delta_q_relax / epsilon;
  }
  throw ValidationError("mode-name", "unknown mode value");
}

namespace {

double max_coordinate_range(const Matrix& windows) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < windows.rows(); ++i) {
    best = std::max(best, windows.row(i).maxCoeff() - windows.row(i).minCoeff());
  }
  return best;
}

}  // namespace

double estimate_sensitivity(const WindowedDataset& dataset) {
  if (dataset.count() < 2) {
    throw ValidationError("sensitivity-windows",
                          "sensitivity estimation needs >= 2 windows");
  }
  return max_coordinate_range(dataset.windows);
}

double relaxed_sensitivity(const RidgeClassifier& sensitive_clf,
                           const WindowedDataset& dataset, double delta_q) {
  const Eigen::Index n = dataset.dim_x();
  if (sensitive_clf.c.size() != n) {
    throw ValidationError("relax-dim",
                          "classifier dimension does not match windows");
  }
  if (sensitive_clf.c.norm() < 1e-300 || !sensitive_clf.c.allFinite()) {
    throw ValidationError("classifier-zero",
                          "sensitive classifier must be non-zero and finite");
  }
  if (!std::isfinite(delta_q) || delta_q < 0.0) {
    throw ValidationError("sensitivity-range", "delta_q must be finite and >= 0");
  }
  if (dataset.count() < 1) {
    throw ValidationError("relax-windows", "need at least one window");
  }
  const OrthMatrix s = gram_schmidt_complete(sensitive_clf.c);
  // S is orthonormal, so the first column of S^-1 = S^T is S's first row:
  // the normalized sensitive direction itself.
  const Vector u = s.rows().row(0).transpose();
  const Eigen::RowVectorXd scores = u.transpose() * dataset.windows;
  const double gamma_max = scores.maxCoeff() - scores.minCoeff();
  const double dx = static_cast<double>(n);
  return std::min(gamma_max * u.lpNorm<1>(), dx * delta_q) / dx;
}

namespace {

WindowedDataset shape_like(const WindowedDataset& src, Matrix windows) {
  WindowedDataset out;
  out.windows = std::move(windows);
  out.n_s = src.n_s;
  out.n_w = src.n_w;
  out.labels_useful = src.labels_useful;
  out.labels_sensitive = src.labels_sensitive;
  recompute_ranges(out);
  return out;
}

void validate_stack_for(const WindowedDataset& dataset,
                        const AutoencoderStack& stack) {
  if (stack.layers.empty()) {
    throw ValidationError("stack-empty", "stack has no layers");
  }
  if (stack.dim_x() != dataset.dim_x()) {
    throw ValidationError("stack-dim",
                          "stack input dimension does not match windows");
  }
}

}  // namespace

PerturbResult perturb_baseline(const WindowedDataset& dataset, double epsilon,
                               const Rng& rng, Exec exec) {
  if (dataset.count() < 2) {
    throw ValidationError("sensitivity-windows",
                          "sensitivity estimation needs >= 2 windows");
  }
  const Scaler sc = Scaler::from_dataset(dataset);
  const Matrix scaled = sc.scale(dataset.windows);

  PrivacySpec spec;
  spec.epsilon = epsilon;
  spec.mode = Mode::kBaseline;
  spec.delta_q = max_coordinate_range(scaled);
  spec.delta_q_relax = spec.delta_q;
  spec.dim_x = static_cast<int>(dataset.dim_x());
  spec.dim_f = static_cast<int>(dataset.dim_x());
  const double lambda = spec.lambda();

  Matrix noisy(scaled.rows(), scaled.cols());
  for_each_index(scaled.cols(), exec, [&](std::int64_t w) {
    Rng r = rng.child(static_cast<std::uint64_t>(w));
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
      noisy(i, w) = scaled(i, w) + sample_laplace(lambda, r);
    }
  });

  PerturbResult result;
  result.data = shape_like(dataset, sc.unscale(noisy));
  result.spec = spec;
  result.seed = rng.seed();
  return result;
}

Matrix perturb_features_decode(const AutoencoderStack& stack,
                               const Matrix& features, double lambda,
                               const Rng& rng, Exec exec) {
  if (stack.layers.empty()) {
    throw ValidationError("stack-empty", "stack has no layers");
  }
  if (features.rows() != stack.dim_f()) {
    throw ValidationError("decode-dim", "feature dimension does not match stack");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ValidationError("lambda-range", "lambda must be finite and >= 0");
  }
  Matrix noisy(features.rows(), features.cols());
  for_each_index(features.cols(), exec, [&](std::int64_t w) {
    Rng r = rng.child(static_cast<std::uint64_t>(w));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      noisy(i, w) = features(i, w) + sample_laplace(lambda, r);
    }
  });
  return stack.decode(noisy);
}

namespace {

PerturbResult feature_mechanism(const WindowedDataset& dataset,
                                const AutoencoderStack& stack,
                                const RidgeClassifier* sensitive_clf,
                                double epsilon, const Rng& rng, Exec exec) {
  validate_stack_for(dataset, stack);
  const Scaler sc = stack.scaler();
  const Matrix scaled = sc.scale(dataset.windows);
  if (dataset.count() < 2) {
    throw ValidationError("sensitivity-windows",
                          "sensitivity estimation needs >= 2 windows");
  }

  PrivacySpec spec;
  spec.epsilon = epsilon;
  spec.delta_q = max_coordinate_range(scaled);
  spec.dim_x = static_cast<int>(stack.dim_x());
  spec.dim_f = static_cast<int>(stack.dim_f());
  if (sensitive_clf != nullptr) {
    spec.mode = Mode::kMode2;
    spec.delta_q_relax =
        relaxed_sensitivity(*sensitive_clf, shape_like(dataset, scaled), spec.delta_q);
  } else {
    spec.mode = Mode::kMode1;
    spec.delta_q_relax = spec.delta_q;
  }
  const double lambda = spec.lambda();

  const Matrix features = stack.encode(scaled);
  const Matrix decoded = perturb_features_decode(stack, features, lambda, rng, exec);

  PerturbResult result;
  result.data = shape_like(dataset, sc.unscale(decoded));
  result.spec = spec;
  result.seed = rng.seed();
  return result;
}

}  // namespace

PerturbResult perturb_mode1(const WindowedDataset& dataset,
                            const AutoencoderStack& stack, double epsilon,
                            const Rng& rng, Exec exec) {
  return feature_mechanism(dataset, stack, nullptr, epsilon, rng, exec);
}

PerturbResult perturb_mode2(const WindowedDataset& dataset,
                            const AutoencoderStack& stack,
                            const RidgeClassifier& sensitive_clf,
                            double epsilon, const Rng& rng, Exec exec) {
  return feature_mechanism(dataset, stack, &sensitive_clf, epsilon, rng, exec);
}

void BudgetLedger::record(double epsilon, const std::string& partition) {
  if (std::isnan(epsilon) || epsilon <= 0.0) {
    throw ValidationError("ledger-epsilon", "ledger entries need epsilon > 0");
  }
  entries.push_back(Entry{epsilon, partition});
}

double ledger_epsilon(const BudgetLedger& ledger) {
  if (ledger.entries.empty()) {
    throw ValidationError("ledger-empty", "ledger has no entries");
  }
  std::map<std::string, double> sums;
  for (const BudgetLedger::Entry& e : ledger.entries) {
    if (std::isnan(e.epsilon) || e.epsilon <= 0.0) {
      throw ValidationError("ledger-epsilon", "ledger entries need epsilon > 0");
    }
    sums[e.partition] += e.epsilon;
  }
  double best = 0.0;
  for (const auto& [partition, total] : sums) best = std::max(best, total);
  return best;
}

}  // namespace deeprotect
