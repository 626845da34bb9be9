// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Tolerances and runtime budgets are pinned in code; a
// criterion that cannot be met by a faithful implementation is reported as a
// FAIL with its measured values rather than weakened.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "deeprotect/autoencoder.hpp"
#include "deeprotect/dataset.hpp"
#include "deeprotect/errors.hpp"
#include "deeprotect/evaluation.hpp"
#include "deeprotect/inference.hpp"
#include "deeprotect/numerics.hpp"
#include "deeprotect/privacy.hpp"
#include "deeprotect/rng.hpp"
#include "deeprotect/serialize.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace deeprotect;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Shared pinned pipeline: the reference configuration (3 sensors, window 10,
// dim_x = 30, hidden [15, 7], dim_f = 7) on the seeded synthetic dataset.
// ---------------------------------------------------------------------------
struct Pipeline {
  WindowedDataset data;
  AutoencoderStack stack;
  RidgeClassifier useful;
  RidgeClassifier sensitive;
  double max_orth = 0.0;  // worst per-iteration residual seen during training
  int train_records = 0;
};

const Pipeline& pipeline() {
  static const Pipeline p = [] {
    Pipeline out;
    SynthSpec spec = default_synth_spec(3, 10);
    out.data = window(synthesize(1, 3, 2000, spec), 10);
    HyperParams hp;  // defaults: alpha 0.1, mu 1.0, iters 500
    TrainObserver obs = [&out](const TrainRecord& rec) {
      ++out.train_records;
      if (rec.orth_residual > out.max_orth) out.max_orth = rec.orth_residual;
    };
    out.stack = train(out.data, {15, 7}, hp, 3, obs);
    Matrix scaled = out.stack.scaler().scale(out.data.windows);
    out.useful = fit_ridge(scaled, out.data.labels_useful, 0.1);
    out.sensitive = fit_ridge(scaled, out.data.labels_sensitive, 0.1);
    return out;
  }();
  return p;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

double majority_share(const std::vector<double>& labels) {
  std::vector<double> codec(labels.begin(), labels.end());
  std::sort(codec.begin(), codec.end());
  codec.erase(std::unique(codec.begin(), codec.end()), codec.end());
  double best = 0.0;
  for (double code : codec) {
    double n = 0.0;
    for (double v : labels) {
      if (v == code) n += 1.0;
    }
    best = std::max(best, n / static_cast<double>(labels.size()));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Criterion 1: every training iteration keeps every updated layer orthonormal
// to 1e-8 on the pinned configuration.
// ---------------------------------------------------------------------------
Outcome criterion_orthogonality() {
  const Pipeline& p = pipeline();
  Outcome o;
  o.pass = p.train_records > 0 && p.max_orth <= 1e-8;
  o.detail = fmt("max ||W*Wt - I||_inf = %.3e over %d iterations (limit 1e-8)",
                 p.max_orth, p.train_records);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 2: analytic gradients match central finite differences of an
// independently coded objective on 20 random small configurations.
// ---------------------------------------------------------------------------
Outcome criterion_gradients() {
  Rng rng(200);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + trial % 6;
    int h1 = 1 + trial % d;
    std::vector<int> dims = {h1};
    if (trial % 2 == 0 && h1 > 1) dims.push_back(1 + trial % h1);
    int m = 3 + trial % 6;

    std::vector<LayerParams> layers;
    int in = d;
    for (int hd : dims) {
      LayerParams lp;
      lp.W.resize(hd, in);
      lp.b_enc.resize(hd);
      lp.b_dec.resize(in);
      for (int i = 0; i < hd; ++i) {
        for (int j = 0; j < in; ++j) lp.W(i, j) = rng.uniform_open() - 0.5;
      }
      for (int i = 0; i < hd; ++i) lp.b_enc[i] = rng.uniform_open() - 0.5;
      for (int j = 0; j < in; ++j) lp.b_dec[j] = rng.uniform_open() - 0.5;
      layers.push_back(lp);
      in = hd;
    }
    Vector c(d);
    for (int i = 0; i < d; ++i) c[i] = rng.uniform_open() - 0.5;
    Matrix X(d, m);
    for (int i = 0; i < d; ++i) {
      for (int t = 0; t < m; ++t) X(i, t) = rng.uniform_open();
    }
    Vector y(m);
    for (int t = 0; t < m; ++t) y[t] = rng.uniform_open() > 0.5 ? 1.0 : -1.0;

    HyperParams hp;
    hp.mu = (trial % 3 == 0) ? 0.0 : 0.3 + 0.2 * (trial % 4);
    hp.beta = 0.2;
    hp.weight_decay = (trial % 2 == 0) ? 0.0 : 0.01;
    hp.sparsity_weight = (trial % 4 == 0) ? 0.15 : 0.0;
    hp.sparsity_target = 0.1;

    StackGrads analytic = stack_gradients(layers, c, X, y, hp, Exec::kSerial);
    StackGrads fd = oracle::fd_gradients(layers, c, X, y, hp, 1e-5);
    worst = std::max(worst, oracle::max_rel_error(analytic, fd));
  }
  Outcome o;
  o.pass = worst <= 1e-5;
  o.detail = fmt("worst relative gradient error %.3e over 20 configurations "
                 "(limit 1e-5)", worst);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 3: Laplace sampler moments and tails at lambda in {0.5, 2, 6}.
// ---------------------------------------------------------------------------
Outcome criterion_laplace() {
  const int n = 1000000;
  Outcome o;
  o.pass = true;
  std::string parts;
  int li = 0;
  for (double lambda : {0.5, 2.0, 6.0}) {
    Rng rng(3000 + static_cast<std::uint64_t>(li++));
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[static_cast<size_t>(i)] = sample_laplace(lambda, rng);

    double sum_abs = 0.0;
    for (double v : draws) sum_abs += std::abs(v);
    const double mean_abs = sum_abs / n;
    const bool mean_ok = std::abs(mean_abs - lambda) <= 0.01 * lambda;
    o.pass = o.pass && mean_ok;

    bool tails_ok = true;
    for (double factor : {1.0, 2.0, 3.0}) {
      const double t = factor * lambda;
      long hits = 0;
      for (double v : draws) {
        if (std::abs(v) > t) ++hits;
      }
      const double observed = static_cast<double>(hits) / n;
      const double expected = std::exp(-t / lambda);
      tails_ok = tails_ok && std::abs(observed - expected) <= 0.01;
    }
    o.pass = o.pass && tails_ok;
    parts += fmt("%slambda=%g: mean|x|=%.4f%s", parts.empty() ? "" : "; ",
                 lambda, mean_abs, tails_ok ? "" : " TAIL-MISS");
  }
  o.detail = parts + " (mean within 1%, tails within 0.01 at t = lambda, 2 lambda, 3 lambda)";
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 4: Monte-Carlo epsilon witness for the two-input baseline
// mechanism at epsilon = 1.
// ---------------------------------------------------------------------------
Outcome criterion_epsilon_witness() {
  const int n_runs = 1000000;
  const double eps = 1.0;
  Matrix w(1, 2);
  w << 0.0, 1.0;
  WindowedDataset ds;
  ds.windows = w;
  ds.n_s = 1;
  ds.n_w = 1;
  recompute_ranges(ds);

  const double lo = -3.0, hi = 4.0, width = 0.25;
  const int n_bins = static_cast<int>((hi - lo) / width);
  std::vector<long> h0(static_cast<size_t>(n_bins), 0);
  std::vector<long> h1(static_cast<size_t>(n_bins), 0);
  for (int run = 0; run < n_runs; ++run) {
    PerturbResult res = perturb_baseline(ds, eps, Rng(static_cast<std::uint64_t>(run)),
                                         Exec::kSerial);
    for (int win = 0; win < 2; ++win) {
      const double v = res.data.windows(0, win);
      const int bin = static_cast<int>(std::floor((v - lo) / width));
      if (bin < 0 || bin >= n_bins) continue;
      (win == 0 ? h0 : h1)[static_cast<size_t>(bin)] += 1;
    }
  }
  // "Well-populated" is pinned at >= 3000 hits on both sides (0.3% of the
  // runs), which keeps the per-bin sampling error a few times smaller than
  // the 10% slack on the ratio bound.
  double worst_ratio = 0.0;
  int checked = 0;
  for (int b = 0; b < n_bins; ++b) {
    const long a = h0[static_cast<size_t>(b)];
    const long c = h1[static_cast<size_t>(b)];
    if (a < 3000 || c < 3000) continue;
    const double ratio = static_cast<double>(std::max(a, c)) /
                         static_cast<double>(std::min(a, c));
    worst_ratio = std::max(worst_ratio, ratio);
    ++checked;
  }
  const double limit = std::exp(eps) * 1.1;
  Outcome o;
  o.pass = checked >= 10 && worst_ratio <= limit;
  o.detail = fmt("worst bin density ratio %.3f over %d well-populated bins "
                 "(limit e^1 * 1.1 = %.3f)", worst_ratio, checked, limit);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 5: budget composition, exact arithmetic.
// ---------------------------------------------------------------------------
Outcome criterion_composition() {
  BudgetLedger same;
  same.record(1.0, "p");
  same.record(2.0, "p");
  const double sum = ledger_epsilon(same);

  BudgetLedger disjoint;
  disjoint.record(1.0, "a");
  disjoint.record(2.0, "b");
  const double max = ledger_epsilon(disjoint);

  Outcome o;
  o.pass = (sum == 3.0) && (max == 2.0);
  o.detail = fmt("same-partition {1,2} -> %.17g (want 3), disjoint {1},{2} -> "
                 "%.17g (want 2)", sum, max);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 6: relaxed sensitivity properties.
// ---------------------------------------------------------------------------
Outcome criterion_relaxed_sensitivity() {
  // (a) never exceeds delta_q over 1000 random instances
  Rng rng(11);
  bool bounded = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + trial % 6;
    const Eigen::Index n = 2 + trial % 7;
    Matrix w(d, n);
    for (Eigen::Index t = 0; t < n; ++t) {
      for (int i = 0; i < d; ++i) w(i, t) = rng.uniform_open();
    }
    Vector c(d);
    for (int i = 0; i < d; ++i) c[i] = rng.uniform_open() - 0.5;
    if (c.norm() < 1e-6) c[0] = 1.0;
    WindowedDataset ds;
    ds.windows = w;
    ds.n_s = d;
    ds.n_w = 1;
    recompute_ranges(ds);
    double dq = oracle::sensitivity_bruteforce(w);
    if (dq == 0.0) dq = 0.5;
    RidgeClassifier clf;
    clf.c = c;
    clf.codec = {1.0, 2.0};
    const double relaxed = relaxed_sensitivity(clf, ds, dq);
    bounded = bounded && relaxed >= 0.0 && relaxed <= dq * (1.0 + 1e-12);
  }

  // (b) hand-constructed 2-D case: direction e1, score range 0.4, delta_q 1
  //     -> min(0.4 * 1, 2 * 1) / 2 = 0.2 exactly
  Matrix hand(2, 3);
  hand << 0.1, 0.5, 0.3,
          2.0, 2.0, 2.0;
  WindowedDataset hand_ds;
  hand_ds.windows = hand;
  hand_ds.n_s = 2;
  hand_ds.n_w = 1;
  recompute_ranges(hand_ds);
  RidgeClassifier e1;
  e1.c = (Vector(2) << 2.0, 0.0).finished();
  e1.codec = {1.0, 2.0};
  const double hand_val = relaxed_sensitivity(e1, hand_ds, 1.0);
  const bool hand_ok = std::abs(hand_val - 0.2) <= 1e-15;

  // (c) brute-force pair-search oracle on grid data (windows = base + t_k u)
  Rng grid_rng(13);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + trial % 5;
    Vector c(d);
    for (int i = 0; i < d; ++i) c[i] = grid_rng.uniform_open() - 0.5;
    if (c.norm() < 1e-6) c[0] = 1.0;
    const Vector u = c / c.norm();
    Vector base(d);
    for (int i = 0; i < d; ++i) base[i] = grid_rng.uniform_open();
    const Eigen::Index n = 4 + trial % 5;
    Matrix w(d, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      w.col(k) = base + (0.3 * static_cast<double>(k) / static_cast<double>(n)) * u;
    }
    WindowedDataset ds;
    ds.windows = w;
    ds.n_s = d;
    ds.n_w = 1;
    recompute_ranges(ds);
    RidgeClassifier clf;
    clf.c = c;
    clf.codec = {1.0, 2.0};
    const double lib = relaxed_sensitivity(clf, ds, 1.0);
    const double ref = oracle::relaxed_sensitivity_bruteforce(w, u, 1.0, 1e-9);
    worst_gap = std::max(worst_gap, std::abs(lib - ref));
  }
  const bool oracle_ok = worst_gap <= 1e-9;

  Outcome o;
  o.pass = bounded && hand_ok && oracle_ok;
  o.detail = fmt("bound held on 1000 random instances: %s; hand case %.17g "
                 "(want 0.2); max oracle gap %.3e (limit 1e-9)",
                 bounded ? "yes" : "NO", hand_val, worst_gap);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 7: paired-seed error ordering and the theoretical baseline/mode1
// ratio band at epsilon = 5 on the pinned configuration.
// ---------------------------------------------------------------------------
Outcome criterion_utility_ordering() {
  const Pipeline& p = pipeline();
  const auto reports = tradeoff_sweep(
      p.data, p.stack, p.useful, p.sensitive, {5.0},
      {Mode::kBaseline, Mode::kMode1, Mode::kMode2}, 17);
  const EvalReport& base = reports[0];
  const EvalReport& m1 = reports[1];
  const EvalReport& m2 = reports[2];

  const bool relax_active = m2.delta_q_relax < m2.delta_q;
  const bool ordering = base.mean_l1_error > m1.mean_l1_error &&
                        m1.mean_l1_error > m2.mean_l1_error;
  const double ratio = base.mean_l1_error / m1.mean_l1_error;
  const double band_lo = (30.0 / 7.0) / 2.0;
  const double band_hi = (30.0 / 7.0) * 2.0;
  const bool ratio_ok = ratio >= band_lo && ratio <= band_hi;

  Outcome o;
  o.pass = relax_active && ordering && ratio_ok;
  o.detail = fmt("errors baseline %.4f > mode1 %.4f > mode2 %.4f: %s; "
                 "baseline/mode1 ratio %.2f vs band [%.3f, %.3f]: %s "
                 "(decode saturation bounds the mode1 error near its "
                 "reconstruction floor while the baseline error grows like "
                 "lambda, so the analytic band does not hold at this epsilon)",
                 base.mean_l1_error, m1.mean_l1_error, m2.mean_l1_error,
                 ordering ? "ok" : "VIOLATED", ratio, band_lo, band_hi,
                 ratio_ok ? "ok" : "OUT OF BAND");
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 8: end-to-end trade-off shape at epsilon = 5 (mode2): useful
// accuracy near its noise-free value, sensitive accuracy near chance.
// ---------------------------------------------------------------------------
Outcome criterion_tradeoff() {
  const Pipeline& p = pipeline();
  const auto reports = tradeoff_sweep(p.data, p.stack, p.useful, p.sensitive,
                                      {5.0, kInf}, {Mode::kMode2}, 17);
  const EvalReport& noisy = reports[0];
  const EvalReport& noise_free = reports[1];
  const double chance = majority_share(p.data.labels_sensitive);

  const bool useful_ok =
      std::abs(noisy.useful_accuracy - noise_free.useful_accuracy) <= 0.10;
  const bool sensitive_ok = noisy.sensitive_accuracy <= chance + 0.10;

  Outcome o;
  o.pass = useful_ok && sensitive_ok;
  o.detail = fmt("useful %.3f vs noise-free %.3f (|diff| <= 0.10: %s); "
                 "sensitive %.3f vs chance %.3f + 0.10 (%s)",
                 noisy.useful_accuracy, noise_free.useful_accuracy,
                 useful_ok ? "ok" : "NO", noisy.sensitive_accuracy, chance,
                 sensitive_ok ? "ok" : "NO");
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 9: CLI round-trip with byte-identical reruns.
// ---------------------------------------------------------------------------
Outcome criterion_cli_roundtrip() {
  Outcome o;
  if (support::binary_path().empty()) {
    o.detail = "DEEPROTECT_BIN is not set";
    return o;
  }
  const std::string d = support::make_temp_dir("acceptance");
  if (d.empty()) {
    o.detail = "could not create a temp directory";
    return o;
  }
  auto run = [&](const std::string& args) { return support::run_cli(args, d); };

  support::RunResult gen = run("gen --out " + d + "/data.csv --seed 1 --sensors 3 "
                               "--window 10 --timestamps 2000");
  support::RunResult train = run("train --data " + d + "/data.csv --window 10 "
                                 "--dims 15,7 --seed 3 --stack-out " + d + "/stack.json "
                                 "--useful-out " + d + "/useful.json "
                                 "--sensitive-out " + d + "/sensitive.json");
  support::RunResult pert = run("perturb --data " + d + "/data.csv --mode mode2 "
                                "--epsilon 5 --seed 17 --stack " + d + "/stack.json "
                                "--sensitive " + d + "/sensitive.json "
                                "--out " + d + "/pert.csv");
  support::RunResult eval = run("eval --data " + d + "/data.csv --perturbed " +
                                d + "/pert.csv --stack " + d + "/stack.json "
                                "--useful " + d + "/useful.json --sensitive " +
                                d + "/sensitive.json --out " + d + "/report.jsonl");
  const bool exits_ok = gen.exit_code == 0 && train.exit_code == 0 &&
                        pert.exit_code == 0 && eval.exit_code == 0;

  const std::string clean_csv = support::slurp(d + "/data.csv");
  const std::string pert_csv = support::slurp(d + "/pert.csv");
  auto lines = [](const std::string& s) {
    return std::count(s.begin(), s.end(), '\n');
  };
  auto header = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  const bool shape_ok = !pert_csv.empty() &&
                        lines(pert_csv) == lines(clean_csv) &&
                        header(pert_csv) == header(clean_csv);

  bool report_ok = false;
  const std::string jsonl = support::slurp(d + "/report.jsonl");
  if (lines(jsonl) == 1) {
    try {
      validate_report_json(nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n'))));
      report_ok = true;
    } catch (const std::exception&) {
      report_ok = false;
    }
  }

  support::RunResult gen2 = run("gen --out " + d + "/data2.csv --seed 1 --sensors 3 "
                                "--window 10 --timestamps 2000");
  support::RunResult train2 = run("train --data " + d + "/data.csv --window 10 "
                                  "--dims 15,7 --seed 3 --stack-out " + d + "/stack2.json "
                                  "--useful-out " + d + "/useful2.json "
                                  "--sensitive-out " + d + "/sensitive2.json");
  support::RunResult pert2 = run("perturb --data " + d + "/data.csv --mode mode2 "
                                 "--epsilon 5 --seed 17 --stack " + d + "/stack.json "
                                 "--sensitive " + d + "/sensitive.json "
                                 "--out " + d + "/pert2.csv");
  support::RunResult eval2 = run("eval --data " + d + "/data.csv --perturbed " +
                                 d + "/pert2.csv --sidecar " + d + "/pert2.csv.json "
                                 "--stack " + d + "/stack.json --useful " + d +
                                 "/useful.json --sensitive " + d + "/sensitive.json "
                                 "--out " + d + "/report2.jsonl");
  const bool rerun_ok =
      gen2.exit_code == 0 && train2.exit_code == 0 && pert2.exit_code == 0 &&
      eval2.exit_code == 0 &&
      support::slurp(d + "/data2.csv") == clean_csv &&
      support::slurp(d + "/stack2.json") == support::slurp(d + "/stack.json") &&
      support::slurp(d + "/useful2.json") == support::slurp(d + "/useful.json") &&
      support::slurp(d + "/sensitive2.json") == support::slurp(d + "/sensitive.json") &&
      support::slurp(d + "/pert2.csv") == pert_csv &&
      support::slurp(d + "/pert2.csv.json") == support::slurp(d + "/pert.csv.json") &&
      support::slurp(d + "/report2.jsonl") == jsonl;

  o.pass = exits_ok && shape_ok && report_ok && rerun_ok;
  o.detail = fmt("exits %s, perturbed CSV shape %s, report schema %s, "
                 "byte-identical reruns %s",
                 exits_ok ? "ok" : "NONZERO", shape_ok ? "ok" : "MISMATCH",
                 report_ok ? "ok" : "INVALID", rerun_ok ? "ok" : "DIFFER");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    double budget_seconds;  // 0 = no budget
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "training keeps layers orthonormal every iteration", 60,
       criterion_orthogonality},
      {2, "analytic gradients match finite differences", 60, criterion_gradients},
      {3, "Laplace sampler moments and tails", 30, criterion_laplace},
      {4, "Monte-Carlo epsilon witness for the baseline mechanism", 60,
       criterion_epsilon_witness},
      {5, "budget composition: sum within, max across partitions", 0,
       criterion_composition},
      {6, "relaxed sensitivity: bound, hand case, pair-search oracle", 0,
       criterion_relaxed_sensitivity},
      {7, "paired error ordering and baseline/mode1 ratio band", 300,
       criterion_utility_ordering},
      {8, "trade-off shape: useful near noise-free, sensitive near chance", 600,
       criterion_tradeoff},
      {9, "CLI round-trip with byte-identical reruns", 0, criterion_cli_roundtrip},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.budget_seconds > 0 && seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt("; OVER TIME BUDGET %.0fs", c.budget_seconds);
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s [%.1fs] -- %s\n", o.pass ? "PASS" : "FAIL",
                c.id, c.label, seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
