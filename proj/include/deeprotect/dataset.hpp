#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "deeprotect/numerics.hpp"

namespace deeprotect {

// Raw multi-sensor time series: one row per sensor, one column per timestamp.
// Label vectors, when present, carry one value per timestamp (generated data
// and CSV files with yU/yS columns); empty means absent.
struct SensorStream {
  Matrix samples;  // n_s x t
  double rate_hz = 10.0;
  std::vector<double> y_useful;
  std::vector<double> y_sensitive;

  Eigen::Index sensors() const { return samples.rows(); }
  Eigen::Index timestamps() const { return samples.cols(); }
};

// Fixed-size windows cut from a stream. Column w of `windows` is window w,
// with the n_s x n_w block stacked column-major (all sensors at the first
// timestamp, then all sensors at the second, ...), so dim_x = n_s * n_w.
// range_lo/range_hi are tight per-coordinate bounds over all windows.
// Per-window labels, when present, have one entry per window.
struct WindowedDataset {
  Matrix windows;  // dim_x x n_windows
  int n_s = 0;
  int n_w = 0;
  Vector range_lo, range_hi;
  std::vector<double> labels_useful;
  std::vector<double> labels_sensitive;

  Eigen::Index dim_x() const { return windows.rows(); }
  Eigen::Index count() const { return windows.cols(); }
};

// Recomputes tight per-coordinate bounds from `windows`.
void recompute_ranges(WindowedDataset& ds);

// Cuts a stream into count = floor(t / n_w) windows; the trailing partial
// window is discarded. Per-timestamp labels become per-window labels by
// majority vote inside each window, ties resolved toward the smaller label.
// Throws ValidationError for n_w < 1 or t < n_w (zero windows).
WindowedDataset window(const SensorStream& stream, int n_w);

// Inverse of window(): lays the windows back out as a count * n_w timestamp
// stream. Per-window labels, when present, repeat across their window's
// timestamps.
SensorStream unwindow(const WindowedDataset& ds, double rate_hz = 10.0);

// Synthetic generator. Windows are drawn as
//   x = useful_scale * a * u  +  sensitive_scale * b * s  +  sigma * xi
// with a, b ~ N(0,1) scalars and xi ~ N(0, I) per window, using a seeded
// engine (draw order per window: a, b, then the dim_x entries of xi).
// Labels are exact functionals of the realized window:
//   yU = +1 if u.x >= 0 else -1
//   yS = 1 + #{k : s.x > t_k} with thresholds t_k at the empirical
//        k/n_classes quantiles of the generated s-scores, k = 1..n_classes-1
//        (t_k = sorted_scores[floor(count * k / n_classes)]).
// The last window is truncated if t is not a multiple of n_w; windowing the
// result with the same n_w recovers the generated windows exactly.
struct SynthSpec {
  Vector u;                    // useful direction, unit norm, dim n_s * n_w
  Vector s;                    // sensitive direction, unit norm
  int n_w = 10;
  double useful_scale = 2.0;   // latent amplitude along u
  double sensitive_scale = 1.0;
  double sigma = 0.3;          // ambient noise level, >= 0
  int sensitive_classes = 3;
  double rate_hz = 10.0;
};

// Default directions for an n_s x n_w window space: u is uniform over the
// coordinates of all sensors except the last, s is the first slot of the
// last sensor. These keep the useful signal broad (robust under feature
// noise) and the sensitive signal narrow, which is the regime the relaxed
// mechanism is designed for.
SynthSpec default_synth_spec(int n_s, int n_w);

SensorStream synthesize(std::uint64_t seed, int n_s, Eigen::Index t,
                        const SynthSpec& spec);

// CSV schema (docs/formats.md): header "t,s1..sN[,yU][,yS]", one row per
// timestamp, values with >= 12 significant digits. Malformed content throws
// ValidationError; unreadable/unwritable paths throw RuntimeError.
SensorStream load_csv(const std::string& path);
void save_csv(const SensorStream& stream, const std::string& path);

// Per-coordinate min-max map onto [0,1] built from dataset ranges, needed
// because the sigmoid decoder can only reproduce (0,1) values. A degenerate
// coordinate (hi == lo) maps to 0.5 and back to its constant. The map is
// affine, so out-of-range inputs extrapolate rather than clip.
struct Scaler {
  Vector lo, hi;

  static Scaler from_ranges(const Vector& lo, const Vector& hi);
  static Scaler from_dataset(const WindowedDataset& ds);

  Matrix scale(const Matrix& windows) const;
  Matrix unscale(const Matrix& scaled) const;
};

}  // namespace deeprotect
