#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "deeprotect/dataset.hpp"
#include "deeprotect/numerics.hpp"
#include "deeprotect/parallel.hpp"

namespace deeprotect {

// One tied-weight layer: encode f = sigmoid(W x + b_enc), decode
// x~ = sigmoid(Wt f + b_dec). W is h x n with rows kept orthonormal by the
// training loop (re-orthonormalized after every gradient step).
struct LayerParams {
  Matrix W;
  Vector b_enc;
  Vector b_dec;

  Eigen::Index in_dim() const { return W.cols(); }
  Eigen::Index out_dim() const { return W.rows(); }
};

struct HyperParams {
  double alpha = 0.1;          // gradient step on the batch-mean gradient
  double mu = 1.0;             // utility term weight
  double beta = 0.1;           // ridge weight inside the utility term
  double weight_decay = 1e-4;
  double sparsity_weight = 0.0;   // delta; 0 disables the KL term
  double sparsity_target = 0.05;  // rho
  int iters = 500;             // gradient steps per greedy layer
  int batch = 0;               // 0 = auto: full batch up to 1000 windows, else 32
  double finetune_fraction = 0.2;  // full-stack pass length, relative to iters
};

// Trained stack plus everything needed to run the pipeline: the supervised
// classifier c (living in reconstruction space, trained by SGD during the
// full-stack pass) and the min-max input scaling captured from the training
// data. encode/decode operate on *scaled* windows; the pipeline helpers
// below handle raw data.
struct AutoencoderStack {
  std::vector<LayerParams> layers;
  Vector c;
  Vector scale_lo, scale_hi;
  HyperParams hyper;

  Eigen::Index dim_x() const;
  Eigen::Index dim_f() const;
  Scaler scaler() const { return Scaler::from_ranges(scale_lo, scale_hi); }

  Matrix encode(const Matrix& scaled_windows) const;
  Matrix decode(const Matrix& features) const;
};

// The training objective (the sum form; gradients below are its exact
// derivatives, and the training step uses alpha * grad / batch_size):
//
//   J = sum_t ||x_t - dec(enc(x_t))||^2
//     + weight_decay * sum_l ||W_l||_F^2
//     + sparsity_weight * sum_l sum_i KL(rho || rho_hat_{l,i})
//     + mu * beta * ||c||^2
//     + mu * sum_t (c . dec(enc(x_t)) - y_t)^2
//
// rho_hat_{l,i} is the batch mean of hidden unit i of layer l (natural-log
// Bernoulli KL). The utility terms are dropped when hyper.mu == 0, in which
// case y may be empty.
double stack_objective(const std::vector<LayerParams>& layers, const Vector& c,
                       const Matrix& X, const Vector& y, const HyperParams& hp);

struct LayerGrads {
  Matrix W;
  Vector b_enc;
  Vector b_dec;
};
struct StackGrads {
  std::vector<LayerGrads> layers;
  Vector c;
};

// Analytic gradients of stack_objective, accumulated over a fixed number of
// column chunks and reduced in chunk order, so the result is bit-identical
// for Exec::kSerial and Exec::kParallel at any thread count. The KL term
// couples samples through rho_hat; it is handled with a first pass that
// collects activation means before the per-chunk backward pass.
StackGrads stack_gradients(const std::vector<LayerParams>& layers,
                           const Vector& c, const Matrix& X, const Vector& y,
                           const HyperParams& hp, Exec exec = Exec::kParallel);

// Progress callback. Greedy pretraining reports layer = 0..L-1; the
// full-stack fine-tuning pass reports layer = L. `objective` is the current
// phase's J over the phase's full input, evaluated after the step and
// re-orthonormalization; `orth_residual` is the max ||W*Wt - I||_inf over
// the layers updated in the step.
struct TrainRecord {
  int layer;
  int iter;
  double objective;
  double orth_residual;
};
using TrainObserver = std::function<void(const TrainRecord&)>;

// Greedy layer-wise training followed by a full-stack supervised pass.
//
// Each greedy layer runs Algorithm-style iterations on its input (the scaled
// windows for layer 0, the previous layer's features after): uniform
// [-0.05, 0.05] seeded init, analytic gradients with the utility term off,
// step alpha * grad / batch, then W := (W*Wt)^(-1/2) W. The fine-tuning pass
// (ceil(finetune_fraction * iters) steps) optimizes the full Eq-shaped
// objective end to end, including c, re-orthonormalizing every layer each
// step.
//
// Deterministic given (data, dims, hyper, seed): layer l draws its init from
// substream l (W row-major, then b_enc, then b_dec), c from substream 1e6,
// epoch shuffles from substreams 2e6 + phase * 1e4 + epoch. Identical seeds
// produce bit-identical stacks.
//
// Requires non-increasing dims and, when hyper.mu != 0, per-window useful
// labels on `data`.
AutoencoderStack train(const WindowedDataset& data,
                       const std::vector<int>& hidden_dims,
                       const HyperParams& hyper, std::uint64_t seed,
                       const TrainObserver& observer = nullptr,
                       Exec exec = Exec::kParallel);

// Convenience: Eq-shaped objective of a trained stack on a raw dataset
// (scales with the stack's scaler, labels from the dataset).
double objective(const AutoencoderStack& stack, const WindowedDataset& data);

}  // namespace deeprotect
