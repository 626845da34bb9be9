#include "deeprotect/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "deeprotect/errors.hpp"

namespace deeprotect {

Vector informativeness(const Matrix& features, const std::vector<double>& labels,
                       int bins) {
  const Eigen::Index n = features.cols();
  if (n < 1) {
    throw ValidationError("info-empty", "informativeness needs at least one window");
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ValidationError("info-labels", "need one label per window");
  }
  if (bins < 1) {
    throw ValidationError("info-bins", "bins must be >= 1");
  }

  std::vector<double> codec(labels.begin(), labels.end());
  std::sort(codec.begin(), codec.end());
  codec.erase(std::unique(codec.begin(), codec.end()), codec.end());
  const int n_labels = static_cast<int>(codec.size());
  if (n_labels < 2) {
    throw ValidationError("labels-constant",
                          "labels carry no entropy (need >= 2 distinct values)");
  }
  std::vector<int> label_idx(static_cast<size_t>(n));
  std::vector<double> label_counts(static_cast<size_t>(n_labels), 0.0);
  for (Eigen::Index t = 0; t < n; ++t) {
    int k = static_cast<int>(
        std::lower_bound(codec.begin(), codec.end(), labels[static_cast<size_t>(t)]) -
        codec.begin());
    label_idx[static_cast<size_t>(t)] = k;
    label_counts[static_cast<size_t>(k)] += 1.0;
  }
  const double h_y = discrete_entropy(label_counts);

  Vector info(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double lo = features.row(i).minCoeff();
    const double span = features.row(i).maxCoeff() - lo;
    Matrix joint = Matrix::Zero(bins, n_labels);
    for (Eigen::Index t = 0; t < n; ++t) {
      int bin = 0;
      if (span > 0.0) {
        bin = static_cast<int>((features(i, t) - lo) / span * bins);
        bin = std::min(bins - 1, std::max(0, bin));
      }
      joint(bin, label_idx[static_cast<size_t>(t)]) += 1.0;
    }
    const double v = 1.0 - conditional_entropy(joint) / h_y;
    info[i] = std::min(1.0, std::max(0.0, v));
  }
  return info;
}

double expected_error(const WindowedDataset& original,
                      const WindowedDataset& perturbed) {
  if (original.windows.rows() != perturbed.windows.rows() ||
      original.windows.cols() != perturbed.windows.cols()) {
    throw ValidationError("error-shape", "datasets have different shapes");
  }
  const Eigen::Index n = original.count();
  if (n < 1) {
    throw ValidationError("error-empty", "need at least one window");
  }
  const double total = (perturbed.windows - original.windows).cwiseAbs().sum();
  return total / (static_cast<double>(n) * static_cast<double>(original.dim_x()));
}

double advantage_factor(const PrivacySpec& baseline, const PrivacySpec& deeprotect) {
  if (baseline.mode != Mode::kBaseline) {
    throw ValidationError("advantage-baseline", "first spec must be baseline");
  }
  if (baseline.dim_x != deeprotect.dim_x) {
    throw ValidationError("advantage-dims", "specs describe different dim_x");
  }
  if (deeprotect.mode == Mode::kBaseline) return 1.0;
  if (deeprotect.dim_f < 1) {
    throw ValidationError("advantage-zero-denominator", "dim_f must be >= 1");
  }
  double factor = static_cast<double>(deeprotect.dim_x) /
                  static_cast<double>(deeprotect.dim_f);
  if (deeprotect.mode == Mode::kMode2) {
    if (!(deeprotect.delta_q_relax > 0.0)) {
      throw ValidationError("advantage-zero-denominator",
                            "delta_q_relax must be > 0 for the mode2 factor");
    }
    factor *= deeprotect.delta_q / deeprotect.delta_q_relax;
  }
  return factor;
}

std::vector<EvalReport> tradeoff_sweep(const WindowedDataset& dataset,
                                       const AutoencoderStack& stack,
                                       const RidgeClassifier& useful_clf,
                                       const RidgeClassifier& sensitive_clf,
                                       const std::vector<double>& epsilons,
                                       const std::vector<Mode>& modes,
                                       std::uint64_t seed, Exec exec) {
  if (epsilons.empty() || modes.empty()) {
    throw ValidationError("sweep-empty", "need at least one epsilon and one mode");
  }
  if (dataset.labels_useful.empty() || dataset.labels_sensitive.empty()) {
    throw ValidationError("sweep-labels",
                          "sweep needs per-window useful and sensitive labels");
  }
  const Scaler sc = stack.scaler();
  const Vector clean_info =
      informativeness(stack.encode(sc.scale(dataset.windows)), dataset.labels_useful);
  const Rng master(seed);

  const size_t count = epsilons.size() * modes.size();
  std::vector<EvalReport> reports(count);
  for_each_index(static_cast<std::int64_t>(count), exec, [&](std::int64_t task) {
    const double eps = epsilons[static_cast<size_t>(task) / modes.size()];
    const Mode mode = modes[static_cast<size_t>(task) % modes.size()];

    // Every epsilon owns an RNG derived from (seed, epsilon) — never from the
    // task index, so adding or reordering grid points does not change any
    // other point's output, and never from the mode, so all modes at one
    // epsilon see identical noise draws (paired seeds). Pairing makes the
    // cross-mode error ordering a scale comparison on shared uniforms rather
    // than a Monte-Carlo race.
    const Rng point_rng = master.child(stream_of(eps, 1));
    const Rng baseline_rng = point_rng;

    PerturbResult pr;
    switch (mode) {
      case Mode::kBaseline:
        pr = perturb_baseline(dataset, eps, point_rng, exec);
        break;
      case Mode::kMode1:
        pr = perturb_mode1(dataset, stack, eps, point_rng, exec);
        break;
      case Mode::kMode2:
        pr = perturb_mode2(dataset, stack, sensitive_clf, eps, point_rng, exec);
        break;
    }

    EvalReport rep;
    rep.epsilon = eps;
    rep.mode = mode;
    rep.mean_l1_error = expected_error(dataset, pr.data);
    const Matrix scaled_out = sc.scale(pr.data.windows);
    rep.useful_accuracy = accuracy(useful_clf, scaled_out, dataset.labels_useful);
    rep.sensitive_accuracy =
        accuracy(sensitive_clf, scaled_out, dataset.labels_sensitive);
    rep.informativeness.assign(clean_info.data(), clean_info.data() + clean_info.size());
    rep.delta_q = pr.spec.delta_q;
    rep.delta_q_relax = pr.spec.delta_q_relax;
    rep.lambda = pr.spec.lambda();
    rep.seed = pr.seed;

    if (mode == Mode::kBaseline) {
      rep.advantage_predicted = 1.0;
      rep.advantage_measured = 1.0;
    } else {
      PrivacySpec base_spec = pr.spec;
      base_spec.mode = Mode::kBaseline;
      base_spec.dim_f = base_spec.dim_x;
      rep.advantage_predicted = advantage_factor(base_spec, pr.spec);
      const PerturbResult base = perturb_baseline(dataset, eps, baseline_rng, exec);
      const double base_err = expected_error(dataset, base.data);
      rep.advantage_measured =
          rep.mean_l1_error > 0.0 ? base_err / rep.mean_l1_error : 0.0;
    }
    reports[static_cast<size_t>(task)] = std::move(rep);
  });
  return reports;
}

}  // namespace deeprotect
