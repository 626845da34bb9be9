#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deeprotect/autoencoder.hpp"
#include "deeprotect/dataset.hpp"
#include "deeprotect/inference.hpp"
#include "deeprotect/numerics.hpp"
#include "deeprotect/parallel.hpp"
#include "deeprotect/rng.hpp"

namespace deeprotect {

// Perturbation mechanisms.
//
//   baseline  adds Laplace noise to every coordinate of every window,
//   mode1     adds Laplace noise to the autoencoder features and decodes,
//   mode2     is mode1 with the noise scale derived from the relaxed
//             sensitivity of a designated sensitive inference.
enum class Mode { kBaseline, kMode1, kMode2 };

const char* mode_name(Mode mode);
Mode parse_mode(const std::string& name);

// Noise-scale bookkeeping for one mechanism invocation. `lambda()` derives
// the Laplace scale from the mode and validates the invariants:
//
//   baseline: lambda = dim_x * delta_q / epsilon
//   mode1:    lambda = sqrt(dim_f) * dim_x * delta_q / epsilon
//   mode2:    lambda = sqrt(dim_f) * dim_x * delta_q_relax / epsilon
//
// epsilon = +infinity is the exact no-noise limit (lambda = 0).
struct PrivacySpec {
  double epsilon = 0.0;
  Mode mode = Mode::kBaseline;
  double delta_q = 0.0;
  double delta_q_relax = 0.0;  // equals delta_q outside mode2
  int dim_x = 0;
  int dim_f = 0;

  double lambda() const;
};

// A perturbed dataset plus the parameters that produced it. `spec` and
// `seed` are everything needed to reproduce `data` from the input.
struct PerturbResult {
  WindowedDataset data;
  PrivacySpec spec;
  std::uint64_t seed = 0;
};

// Largest per-coordinate range over the dataset's windows, i.e. the local
// (data-derived) per-tuple sensitivity. Requires >= 2 windows.
double estimate_sensitivity(const WindowedDataset& dataset);

// Sensitivity restricted to window pairs whose components orthogonal to the
// sensitive direction agree. With c_hat the normalized classifier and S the
// orthonormal completion starting from it, such pairs differ by gamma*c_hat,
// |gamma| bounded by the empirical range of the sensitive score c_hat.x over
// the dataset (the mechanism operates in scaled space; pass scaled windows).
// Returns min(gamma_max * ||c_hat||_1, dim_x * delta_q) / dim_x, which never
// exceeds delta_q.
double relaxed_sensitivity(const RidgeClassifier& sensitive_clf,
                           const WindowedDataset& dataset, double delta_q);

// Per-coordinate Laplace mechanism. Windows are min-max scaled to [0,1]
// per coordinate, perturbed, and mapped back; the sensitivity is estimated
// from the scaled data. Window w draws from rng.child(w), coordinates in
// order, so serial and parallel runs agree bit for bit.
PerturbResult perturb_baseline(const WindowedDataset& dataset, double epsilon,
                               const Rng& rng, Exec exec = Exec::kParallel);

// Feature-space mechanism: scale with the stack's training ranges, encode,
// add per-feature Laplace noise, decode, unscale.
PerturbResult perturb_mode1(const WindowedDataset& dataset,
                            const AutoencoderStack& stack, double epsilon,
                            const Rng& rng, Exec exec = Exec::kParallel);

// mode1 with the noise scale derived from relaxed_sensitivity of the given
// sensitive classifier. When delta_q_relax == delta_q this reproduces mode1
// bit for bit under the same seed.
PerturbResult perturb_mode2(const WindowedDataset& dataset,
                            const AutoencoderStack& stack,
                            const RidgeClassifier& sensitive_clf,
                            double epsilon, const Rng& rng,
                            Exec exec = Exec::kParallel);

// The post-encoding tail of mode1/mode2: add Lap(lambda) per feature
// (column w from rng.child(w)) and decode. Takes features only — the raw
// windows are out of reach by construction, which a test exploits to verify
// the mechanisms never touch raw data after encoding.
Matrix perturb_features_decode(const AutoencoderStack& stack,
                               const Matrix& features, double lambda,
                               const Rng& rng, Exec exec = Exec::kParallel);

// Privacy-budget ledger. Entries sharing a partition id describe mechanisms
// applied to the same data (budgets add); distinct ids describe mechanisms
// on disjoint data (budgets combine by max).
struct BudgetLedger {
  struct Entry {
    double epsilon = 0.0;
    std::string partition;
  };
  std::vector<Entry> entries;

  void record(double epsilon, const std::string& partition);
};

// Total budget: group entries by partition, sum epsilons within each group,
// return the maximum group sum. Errors on an empty ledger.
double ledger_epsilon(const BudgetLedger& ledger);

}  // namespace deeprotect
