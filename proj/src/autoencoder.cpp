#include "deeprotect/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deeprotect/errors.hpp"

namespace deeprotect {

namespace {

Matrix sigmoid(const Matrix& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// Forward activations for one column chunk.
// h[l] are the encode activations (h[0] = input chunk, h[L] = features),
// g[l] the decode activations (g[L] = h[L], g[0] = reconstruction).
struct ForwardCache {
  std::vector<Matrix> h;
  std::vector<Matrix> g;
};

ForwardCache forward(const std::vector<LayerParams>& layers, const Matrix& X) {
  const size_t L = layers.size();
  ForwardCache fc;
  fc.h.resize(L + 1);
  fc.g.resize(L + 1);
  fc.h[0] = X;
  for (size_t l = 0; l < L; ++l) {
    fc.h[l + 1] =
        sigmoid((layers[l].W * fc.h[l]).colwise() + layers[l].b_enc);
  }
  fc.g[L] = fc.h[L];
  for (size_t l = L; l-- > 0;) {
    fc.g[l] =
        sigmoid((layers[l].W.transpose() * fc.g[l + 1]).colwise() + layers[l].b_dec);
  }
  return fc;
}

void validate_stack_args(const std::vector<LayerParams>& layers,
                         const Vector& c, const Matrix& X, const Vector& y,
                         const HyperParams& hp) {
  if (layers.empty()) {
    throw ValidationError("stack-empty", "stack has no layers");
  }
  Eigen::Index in = layers.front().in_dim();
  if (X.rows() != in) {
    throw ValidationError("stack-dim", "input dimension does not match layer 0");
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    Eigen::Index expect = l == 0 ? in : layers[l - 1].out_dim();
    if (layers[l].in_dim() != expect ||
        layers[l].b_enc.size() != layers[l].out_dim() ||
        layers[l].b_dec.size() != layers[l].in_dim()) {
      throw ValidationError("stack-dim",
                            "layer " + std::to_string(l) + " shapes are inconsistent");
    }
  }
  if (hp.mu != 0.0) {
    if (c.size() != in) {
      throw ValidationError("stack-classifier",
                            "utility term needs c of input dimension");
    }
    if (y.size() != X.cols()) {
      throw ValidationError("stack-labels",
                            "utility term needs one label per window");
    }
  }
  if (!(hp.sparsity_target > 0.0 && hp.sparsity_target < 1.0)) {
    throw ValidationError("hyper-rho", "sparsity_target must lie in (0,1)");
  }
}

// rho_hat clamp: sigmoid outputs can round to exactly 0/1 under saturation,
// which would put infinities into the KL term. The clamp only matters in
// that pathological regime.
double clamp_rho(double v) {
  return std::min(1.0 - 1e-12, std::max(1e-12, v));
}

}  // namespace

Eigen::Index AutoencoderStack::dim_x() const {
  if (layers.empty()) throw ValidationError("stack-empty", "stack has no layers");
  return layers.front().in_dim();
}

Eigen::Index AutoencoderStack::dim_f() const {
  if (layers.empty()) throw ValidationError("stack-empty", "stack has no layers");
  return layers.back().out_dim();
}

Matrix AutoencoderStack::encode(const Matrix& scaled_windows) const {
  if (layers.empty()) throw ValidationError("stack-empty", "stack has no layers");
  if (scaled_windows.rows() != dim_x()) {
    throw ValidationError("encode-dim", "window dimension does not match stack");
  }
  Matrix h = scaled_windows;
  for (const LayerParams& lp : layers) {
    h = sigmoid((lp.W * h).colwise() + lp.b_enc);
  }
  return h;
}

Matrix AutoencoderStack::decode(const Matrix& features) const {
  if (layers.empty()) throw ValidationError("stack-empty", "stack has no layers");
  if (features.rows() != dim_f()) {
    throw ValidationError("decode-dim", "feature dimension does not match stack");
  }
  Matrix g = features;
  for (size_t l = layers.size(); l-- > 0;) {
    g = sigmoid((layers[l].W.transpose() * g).colwise() + layers[l].b_dec);
  }
  return g;
}

double stack_objective(const std::vector<LayerParams>& layers, const Vector& c,
                       const Matrix& X, const Vector& y, const HyperParams& hp) {
  validate_stack_args(layers, c, X, y, hp);
  const double m = static_cast<double>(X.cols());
  ForwardCache fc = forward(layers, X);

  double j = (fc.g[0] - X).squaredNorm();
  for (const LayerParams& lp : layers) {
    j += hp.weight_decay * lp.W.squaredNorm();
  }
  if (hp.sparsity_weight != 0.0) {
    const double rho = hp.sparsity_target;
    for (size_t l = 0; l < layers.size(); ++l) {
      Vector rho_hat = fc.h[l + 1].rowwise().sum() / m;
      for (Eigen::Index i = 0; i < rho_hat.size(); ++i) {
        double r = clamp_rho(rho_hat[i]);
        j += hp.sparsity_weight *
             (rho * std::log(rho / r) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - r)));
      }
    }
  }
  if (hp.mu != 0.0) {
    Eigen::RowVectorXd residual = c.transpose() * fc.g[0] - y.transpose();
    j += hp.mu * hp.beta * c.squaredNorm();
    j += hp.mu * residual.squaredNorm();
  }
  return j;
}

StackGrads stack_gradients(const std::vector<LayerParams>& layers,
                           const Vector& c, const Matrix& X, const Vector& y,
                           const HyperParams& hp, Exec exec) {
  validate_stack_args(layers, c, X, y, hp);
  const size_t L = layers.size();
  const Eigen::Index m = X.cols();
  const int n_chunks = static_cast<int>(std::min<Eigen::Index>(64, std::max<Eigen::Index>(1, m)));

  // Pass 1: per-chunk forward. Activation row sums are reduced in chunk
  // order to give a thread-count-independent rho_hat.
  std::vector<ForwardCache> caches(static_cast<size_t>(n_chunks));
  std::vector<std::vector<Vector>> act_sums(static_cast<size_t>(n_chunks));
  for_chunks(m, n_chunks, exec, [&](int chunk, std::int64_t begin, std::int64_t end) {
    if (begin == end) return;
    ForwardCache fc = forward(layers, X.middleCols(begin, end - begin));
    auto& sums = act_sums[static_cast<size_t>(chunk)];
    sums.resize(L);
    for (size_t l = 0; l < L; ++l) sums[l] = fc.h[l + 1].rowwise().sum();
    caches[static_cast<size_t>(chunk)] = std::move(fc);
  });

  // Sparsity pressure per hidden unit: kappa = delta * dKL/drho_hat, spread
  // as kappa/m over every sample's activation gradient.
  std::vector<Vector> kappa(L);
  if (hp.sparsity_weight != 0.0) {
    const double rho = hp.sparsity_target;
    for (size_t l = 0; l < L; ++l) {
      Vector total = Vector::Zero(layers[l].out_dim());
      for (int chunk = 0; chunk < n_chunks; ++chunk) {
        const auto& sums = act_sums[static_cast<size_t>(chunk)];
        if (!sums.empty()) total += sums[l];
      }
      kappa[l] = Vector(layers[l].out_dim());
      for (Eigen::Index i = 0; i < total.size(); ++i) {
        double r = clamp_rho(total[i] / static_cast<double>(m));
        kappa[l][i] = hp.sparsity_weight * (-rho / r + (1.0 - rho) / (1.0 - r));
      }
    }
  }

  // Pass 2: per-chunk backward through the tied-weight decode and encode
  // chains; W collects contributions from both of its uses.
  std::vector<StackGrads> partial(static_cast<size_t>(n_chunks));
  for_chunks(m, n_chunks, exec, [&](int chunk, std::int64_t begin, std::int64_t end) {
    if (begin == end) return;
    const ForwardCache& fc = caches[static_cast<size_t>(chunk)];
    const Eigen::Index mc = end - begin;
    StackGrads sg;
    sg.layers.resize(L);
    for (size_t l = 0; l < L; ++l) {
      sg.layers[l].W = Matrix::Zero(layers[l].out_dim(), layers[l].in_dim());
      sg.layers[l].b_enc = Vector::Zero(layers[l].out_dim());
      sg.layers[l].b_dec = Vector::Zero(layers[l].in_dim());
    }

    Matrix upstream = 2.0 * (fc.g[0] - X.middleCols(begin, mc));
    Eigen::RowVectorXd residual;
    if (hp.mu != 0.0) {
      residual = c.transpose() * fc.g[0] - y.segment(begin, mc).transpose();
      upstream.noalias() += (2.0 * hp.mu) * c * residual;
      sg.c = (2.0 * hp.mu) * fc.g[0] * residual.transpose();
    }

    for (size_t l = 0; l < L; ++l) {  // decode chain, reconstruction inward
      Matrix dv = upstream.array() * fc.g[l].array() * (1.0 - fc.g[l].array());
      sg.layers[l].b_dec += dv.rowwise().sum();
      sg.layers[l].W.noalias() += fc.g[l + 1] * dv.transpose();
      upstream.noalias() = layers[l].W * dv;
    }
    if (hp.sparsity_weight != 0.0) {
      upstream.colwise() += kappa[L - 1] / static_cast<double>(m);
    }
    for (size_t l = L; l-- > 0;) {  // encode chain, features back to input
      Matrix dz = upstream.array() * fc.h[l + 1].array() * (1.0 - fc.h[l + 1].array());
      sg.layers[l].b_enc += dz.rowwise().sum();
      sg.layers[l].W.noalias() += dz * fc.h[l].transpose();
      if (l > 0) {
        upstream.noalias() = layers[l].W.transpose() * dz;
        if (hp.sparsity_weight != 0.0) {
          upstream.colwise() += kappa[l - 1] / static_cast<double>(m);
        }
      }
    }
    partial[static_cast<size_t>(chunk)] = std::move(sg);
  });

  StackGrads total;
  total.layers.resize(L);
  for (size_t l = 0; l < L; ++l) {
    total.layers[l].W = Matrix::Zero(layers[l].out_dim(), layers[l].in_dim());
    total.layers[l].b_enc = Vector::Zero(layers[l].out_dim());
    total.layers[l].b_dec = Vector::Zero(layers[l].in_dim());
  }
  total.c = Vector::Zero(c.size());
  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    const StackGrads& sg = partial[static_cast<size_t>(chunk)];
    if (sg.layers.empty()) continue;
    for (size_t l = 0; l < L; ++l) {
      total.layers[l].W += sg.layers[l].W;
      total.layers[l].b_enc += sg.layers[l].b_enc;
      total.layers[l].b_dec += sg.layers[l].b_dec;
    }
    if (sg.c.size() > 0) total.c += sg.c;
  }
  for (size_t l = 0; l < L; ++l) {
    total.layers[l].W += (2.0 * hp.weight_decay) * layers[l].W;
  }
  if (hp.mu != 0.0) {
    total.c += (2.0 * hp.mu * hp.beta) * c;
  }
  return total;
}

namespace {

double uniform_init(Rng& r) { return r.uniform_open() * 0.1 - 0.05; }

LayerParams init_layer(Eigen::Index n_in, Eigen::Index n_out, Rng r) {
  LayerParams lp;
  lp.W.resize(n_out, n_in);
  for (Eigen::Index i = 0; i < n_out; ++i) {
    for (Eigen::Index j = 0; j < n_in; ++j) lp.W(i, j) = uniform_init(r);
  }
  lp.b_enc.resize(n_out);
  for (Eigen::Index i = 0; i < n_out; ++i) lp.b_enc[i] = uniform_init(r);
  lp.b_dec.resize(n_in);
  for (Eigen::Index i = 0; i < n_in; ++i) lp.b_dec[i] = uniform_init(r);
  return lp;
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, Rng r) {
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    Eigen::Index j = static_cast<Eigen::Index>(r.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

// One training phase: `steps` gradient iterations over mini-batches of X,
// each followed by the W := (W*Wt)^(-1/2) W re-orthonormalization.
void run_phase(std::vector<LayerParams>& layers, Vector& c, bool update_c,
               const Matrix& X, const Vector& y, const HyperParams& hp,
               int steps, int phase_id, int record_layer,
               const TrainObserver& observer, Exec exec, const Rng& master) {
  const Eigen::Index m = X.cols();
  Eigen::Index batch = hp.batch > 0 ? std::min<Eigen::Index>(hp.batch, m)
                                    : (m > 1000 ? 32 : m);
  std::vector<Eigen::Index> perm;
  Eigen::Index pos = m;  // forces a fresh epoch on the first step
  int epoch = -1;

  Matrix bx(X.rows(), batch);
  Vector by(y.size() > 0 ? batch : 0);
  for (int step = 0; step < steps; ++step) {
    if (pos + batch > m) {
      ++epoch;
      perm = shuffled_indices(
          m, master.child(2000000ULL +
                          static_cast<std::uint64_t>(phase_id) * 10000ULL +
                          static_cast<std::uint64_t>(epoch)));
      pos = 0;
    }
    for (Eigen::Index k = 0; k < batch; ++k) {
      Eigen::Index src = perm[static_cast<size_t>(pos + k)];
      bx.col(k) = X.col(src);
      if (by.size() > 0) by[k] = y[src];
    }
    pos += batch;

    StackGrads grads = stack_gradients(layers, c, bx, by, hp, exec);
    const double step_size = hp.alpha / static_cast<double>(batch);
    double orth = 0.0;
    for (size_t l = 0; l < layers.size(); ++l) {
      layers[l].W -= step_size * grads.layers[l].W;
      layers[l].b_enc -= step_size * grads.layers[l].b_enc;
      layers[l].b_dec -= step_size * grads.layers[l].b_dec;
      const Matrix gram = layers[l].W * layers[l].W.transpose();
      const Matrix sym = 0.5 * (gram + gram.transpose());  // exact symmetry despite rounding
      layers[l].W = inv_sqrt_sym(sym) * layers[l].W;
      orth = std::max(orth, orth_residual(layers[l].W));
    }
    if (update_c) c -= step_size * grads.c;

    if (observer) {
      observer(TrainRecord{record_layer, step,
                           stack_objective(layers, c, X, y, hp), orth});
    }
  }
}

}  // namespace

AutoencoderStack train(const WindowedDataset& data,
                       const std::vector<int>& hidden_dims,
                       const HyperParams& hyper, std::uint64_t seed,
                       const TrainObserver& observer, Exec exec) {
  if (hidden_dims.empty()) {
    throw ValidationError("train-dims", "need at least one hidden layer");
  }
  Eigen::Index prev = data.dim_x();
  for (size_t l = 0; l < hidden_dims.size(); ++l) {
    if (hidden_dims[l] < 1 || hidden_dims[l] > prev) {
      throw ValidationError("train-dims",
                            "hidden dims must be non-increasing and within input "
                            "dimension (layer " + std::to_string(l) + ")");
    }
    prev = hidden_dims[l];
  }
  if (!(hyper.alpha > 0.0) || hyper.iters < 1 || hyper.mu < 0.0 ||
      hyper.beta < 0.0 || hyper.weight_decay < 0.0 || hyper.sparsity_weight < 0.0 ||
      hyper.batch < 0 || hyper.finetune_fraction < 0.0 || hyper.finetune_fraction > 1.0) {
    throw ValidationError("hyper-range", "hyperparameter out of range");
  }
  if (data.count() < 2) {
    throw ValidationError("train-data", "need at least 2 windows to train");
  }
  Vector y;
  if (hyper.mu != 0.0) {
    if (data.labels_useful.empty()) {
      throw ValidationError("train-labels",
                            "utility term needs per-window useful labels "
                            "(set mu = 0 for unsupervised training)");
    }
    y = Eigen::Map<const Vector>(data.labels_useful.data(),
                                 static_cast<Eigen::Index>(data.labels_useful.size()));
  }

  AutoencoderStack stack;
  stack.hyper = hyper;
  stack.scale_lo = data.range_lo;
  stack.scale_hi = data.range_hi;
  const Scaler sc = stack.scaler();
  const Matrix X0 = sc.scale(data.windows);

  Rng master(seed);
  HyperParams greedy = hyper;
  greedy.mu = 0.0;

  Matrix X = X0;
  Vector no_labels;
  Vector no_c;
  for (size_t l = 0; l < hidden_dims.size(); ++l) {
    std::vector<LayerParams> single{init_layer(X.rows(), hidden_dims[l],
                                               master.child(static_cast<std::uint64_t>(l)))};
    run_phase(single, no_c, false, X, no_labels, greedy, hyper.iters,
              static_cast<int>(l), static_cast<int>(l), observer, exec, master);
    stack.layers.push_back(std::move(single.front()));
    const LayerParams& lp = stack.layers.back();
    X = sigmoid((lp.W * X).colwise() + lp.b_enc);
  }

  stack.c = Vector(X0.rows());
  {
    Rng cr = master.child(1000000ULL);
    for (Eigen::Index i = 0; i < stack.c.size(); ++i) stack.c[i] = uniform_init(cr);
  }
  int ft_steps = static_cast<int>(
      std::ceil(hyper.finetune_fraction * static_cast<double>(hyper.iters)));
  if (ft_steps > 0 && hyper.mu != 0.0) {
    run_phase(stack.layers, stack.c, true, X0, y, hyper, ft_steps,
              static_cast<int>(hidden_dims.size()),
              static_cast<int>(hidden_dims.size()), observer, exec, master);
  }
  return stack;
}

double objective(const AutoencoderStack& stack, const WindowedDataset& data) {
  const Matrix scaled = stack.scaler().scale(data.windows);
  Vector y;
  if (stack.hyper.mu != 0.0) {
    if (data.labels_useful.empty()) {
      throw ValidationError("objective-labels",
                            "stack has a utility term but data has no labels");
    }
    y = Eigen::Map<const Vector>(data.labels_useful.data(),
                                 static_cast<Eigen::Index>(data.labels_useful.size()));
  }
  return stack_objective(stack.layers, stack.c, scaled, y, stack.hyper);
}

}  // namespace deeprotect
