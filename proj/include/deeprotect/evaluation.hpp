#pragma once

#include <cstdint>
#include <vector>

#include "deeprotect/autoencoder.hpp"
#include "deeprotect/dataset.hpp"
#include "deeprotect/inference.hpp"
#include "deeprotect/numerics.hpp"
#include "deeprotect/parallel.hpp"
#include "deeprotect/privacy.hpp"

namespace deeprotect {

// One utility/privacy operating point: a mechanism applied at one epsilon,
// with fixed classifiers (trained on clean data) evaluated on its output.
struct EvalReport {
  double epsilon = 0.0;
  Mode mode = Mode::kBaseline;
  double useful_accuracy = 0.0;
  double sensitive_accuracy = 0.0;
  double mean_l1_error = 0.0;
  // Analytic error-reduction factor vs the per-coordinate baseline
  // (dim_x/dim_f for mode1, times delta_q/delta_q_relax for mode2), and the
  // measured counterpart baseline_error/mode_error at the same epsilon.
  double advantage_predicted = 1.0;
  double advantage_measured = 1.0;
  std::vector<double> informativeness;  // per clean feature, in [0,1]
  double delta_q = 0.0;
  double delta_q_relax = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

// Relative mutual information Info(f_i) = 1 - H(y|f_i)/H(y) per feature row,
// with features quantized into `bins` equal-width bins over their observed
// range. Clipped to [0,1]. Errors when labels carry no entropy.
Vector informativeness(const Matrix& features, const std::vector<double>& labels,
                       int bins = 10);

// Mean over windows of ||perturbed - original||_1 / dim_x.
double expected_error(const WindowedDataset& original,
                      const WindowedDataset& perturbed);

// Analytic expected-error advantage of a feature-space mechanism over the
// per-coordinate baseline: dim_x/dim_f for mode1, (dim_x/dim_f) *
// (delta_q/delta_q_relax) for mode2, 1 for baseline-vs-baseline.
double advantage_factor(const PrivacySpec& baseline, const PrivacySpec& deeprotect);

// Full grid sweep: one report per (epsilon, mode) pair, epsilons outer loop,
// modes inner, in the order given. Each point derives its RNG from
// (seed, epsilon) — never from the task index, so the report list is a pure
// function of the arguments regardless of execution order or thread count,
// and never from the mode, so all modes at one epsilon see identical noise
// draws (paired seeds: cross-mode comparisons differ only by the noise
// scale, not by the realization).
std::vector<EvalReport> tradeoff_sweep(const WindowedDataset& dataset,
                                       const AutoencoderStack& stack,
                                       const RidgeClassifier& useful_clf,
                                       const RidgeClassifier& sensitive_clf,
                                       const std::vector<double>& epsilons,
                                       const std::vector<Mode>& modes,
                                       std::uint64_t seed,
                                       Exec exec = Exec::kParallel);

}  // namespace deeprotect
