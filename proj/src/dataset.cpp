#include "deeprotect/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "deeprotect/errors.hpp"
#include "deeprotect/rng.hpp"

namespace deeprotect {

void recompute_ranges(WindowedDataset& ds) {
  ds.range_lo = ds.windows.rowwise().minCoeff();
  ds.range_hi = ds.windows.rowwise().maxCoeff();
}

namespace {

// Majority vote over a label slice; ties go to the smaller label value.
double majority_label(const std::vector<double>& labels, Eigen::Index begin,
                      Eigen::Index end) {
  std::map<double, int> votes;
  for (Eigen::Index i = begin; i < end; ++i) votes[labels[static_cast<size_t>(i)]]++;
  double best = 0.0;
  int best_count = -1;
  for (const auto& [value, count] : votes) {
    if (count > best_count) {  // map iterates ascending, so ties keep the smaller
      best = value;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

WindowedDataset window(const SensorStream& stream, int n_w) {
  if (n_w < 1) {
    throw ValidationError("window-size", "window length must be >= 1");
  }
  const Eigen::Index n_s = stream.sensors();
  const Eigen::Index t = stream.timestamps();
  if (n_s < 1) {
    throw ValidationError("window-sensors", "stream has no sensor rows");
  }
  const Eigen::Index count = t / n_w;
  if (count < 1) {
    throw ValidationError(
        "window-empty",
        "stream has " + std::to_string(t) + " timestamps, fewer than one window of " +
            std::to_string(n_w));
  }

  WindowedDataset ds;
  ds.n_s = static_cast<int>(n_s);
  ds.n_w = n_w;
  ds.windows.resize(n_s * n_w, count);
  for (Eigen::Index w = 0; w < count; ++w) {
    // Column-major stack of the n_s x n_w block starting at timestamp w*n_w.
    ds.windows.col(w) =
        Eigen::Map<const Vector>(stream.samples.data() + w * n_w * n_s, n_s * n_w);
  }
  if (!stream.y_useful.empty()) {
    ds.labels_useful.resize(static_cast<size_t>(count));
    for (Eigen::Index w = 0; w < count; ++w) {
      ds.labels_useful[static_cast<size_t>(w)] =
          majority_label(stream.y_useful, w * n_w, (w + 1) * n_w);
    }
  }
  if (!stream.y_sensitive.empty()) {
    ds.labels_sensitive.resize(static_cast<size_t>(count));
    for (Eigen::Index w = 0; w < count; ++w) {
      ds.labels_sensitive[static_cast<size_t>(w)] =
          majority_label(stream.y_sensitive, w * n_w, (w + 1) * n_w);
    }
  }
  recompute_ranges(ds);
  return ds;
}

SensorStream unwindow(const WindowedDataset& ds, double rate_hz) {
  if (ds.n_s < 1 || ds.n_w < 1 ||
      ds.dim_x() != static_cast<Eigen::Index>(ds.n_s) * ds.n_w) {
    throw ValidationError("unwindow-shape",
                          "dataset n_s/n_w do not describe its window dimension");
  }
  if (ds.count() < 1) {
    throw ValidationError("unwindow-empty", "dataset has no windows");
  }
  const Eigen::Index count = ds.count();
  SensorStream stream;
  stream.rate_hz = rate_hz;
  stream.samples.resize(ds.n_s, count * ds.n_w);
  for (Eigen::Index w = 0; w < count; ++w) {
    stream.samples.middleCols(w * ds.n_w, ds.n_w) =
        Eigen::Map<const Matrix>(ds.windows.col(w).data(), ds.n_s, ds.n_w);
  }
  auto spread = [&](const std::vector<double>& per_window) {
    std::vector<double> per_ts(static_cast<size_t>(count * ds.n_w));
    for (Eigen::Index w = 0; w < count; ++w) {
      for (int k = 0; k < ds.n_w; ++k) {
        per_ts[static_cast<size_t>(w * ds.n_w + k)] = per_window[static_cast<size_t>(w)];
      }
    }
    return per_ts;
  };
  if (!ds.labels_useful.empty()) {
    if (ds.labels_useful.size() != static_cast<size_t>(count)) {
      throw ValidationError("unwindow-labels", "labels must be per-window");
    }
    stream.y_useful = spread(ds.labels_useful);
  }
  if (!ds.labels_sensitive.empty()) {
    if (ds.labels_sensitive.size() != static_cast<size_t>(count)) {
      throw ValidationError("unwindow-labels", "labels must be per-window");
    }
    stream.y_sensitive = spread(ds.labels_sensitive);
  }
  return stream;
}

SynthSpec default_synth_spec(int n_s, int n_w) {
  if (n_s < 1 || n_w < 1) {
    throw ValidationError("synth-dims", "n_s and n_w must be >= 1");
  }
  const int dim = n_s * n_w;
  SynthSpec spec;
  spec.n_w = n_w;
  spec.u = Vector::Zero(dim);
  spec.s = Vector::Zero(dim);
  if (n_s == 1) {
    // Single sensor: split the window in time instead — useful on every
    // slot, sensitive on the first slot only.
    spec.u = Vector::Constant(dim, 1.0);
    spec.u[0] = 0.0;
    spec.s[0] = 1.0;
  } else {
    for (int k = 0; k < n_w; ++k) {
      for (int s_idx = 0; s_idx + 1 < n_s; ++s_idx) {
        spec.u[k * n_s + s_idx] = 1.0;
      }
    }
    spec.s[n_s - 1] = 1.0;  // last sensor, first slot
  }
  spec.u.normalize();
  return spec;
}

SensorStream synthesize(std::uint64_t seed, int n_s, Eigen::Index t,
                        const SynthSpec& spec) {
  if (n_s < 1 || t < 1) {
    throw ValidationError("synth-shape", "need n_s >= 1 and t >= 1");
  }
  if (spec.n_w < 1) {
    throw ValidationError("synth-window", "spec.n_w must be >= 1");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(n_s) * spec.n_w;
  if (spec.u.size() != dim || spec.s.size() != dim) {
    throw ValidationError("synth-directions",
                          "u and s must have dimension n_s * n_w = " +
                              std::to_string(dim));
  }
  if (std::abs(spec.u.norm() - 1.0) > 1e-8 || std::abs(spec.s.norm() - 1.0) > 1e-8) {
    throw ValidationError("synth-directions", "u and s must be unit-norm");
  }
  if (!(spec.sigma >= 0.0)) {
    throw ValidationError("synth-sigma", "sigma must be >= 0");
  }
  if (spec.sensitive_classes < 2) {
    throw ValidationError("synth-classes", "need at least 2 sensitive classes");
  }

  const Eigen::Index count = (t + spec.n_w - 1) / spec.n_w;  // covers t, last may be cut
  Matrix windows(dim, count);
  std::mt19937_64 engine(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index w = 0; w < count; ++w) {
    double a = gauss(engine);
    double b = gauss(engine);
    Vector xi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) xi[i] = gauss(engine);
    windows.col(w) = spec.useful_scale * a * spec.u +
                     spec.sensitive_scale * b * spec.s + spec.sigma * xi;
  }

  // Labels from the realized windows.
  std::vector<double> y_u(static_cast<size_t>(count));
  Vector scores(count);
  for (Eigen::Index w = 0; w < count; ++w) {
    y_u[static_cast<size_t>(w)] = spec.u.dot(windows.col(w)) >= 0.0 ? 1.0 : -1.0;
    scores[w] = spec.s.dot(windows.col(w));
  }
  std::vector<double> sorted(scores.data(), scores.data() + count);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds;
  for (int k = 1; k < spec.sensitive_classes; ++k) {
    thresholds.push_back(
        sorted[static_cast<size_t>(count * k / spec.sensitive_classes)]);
  }
  std::vector<double> y_s(static_cast<size_t>(count));
  for (Eigen::Index w = 0; w < count; ++w) {
    int cls = 1;
    for (double th : thresholds)
      if (scores[w] > th) ++cls;
    y_s[static_cast<size_t>(w)] = cls;
  }

  SensorStream stream;
  stream.rate_hz = spec.rate_hz;
  stream.samples.resize(n_s, t);
  stream.y_useful.resize(static_cast<size_t>(t));
  stream.y_sensitive.resize(static_cast<size_t>(t));
  for (Eigen::Index ts = 0; ts < t; ++ts) {
    const Eigen::Index w = ts / spec.n_w;
    const Eigen::Index slot = ts % spec.n_w;
    stream.samples.col(ts) = windows.col(w).segment(slot * n_s, n_s);
    stream.y_useful[static_cast<size_t>(ts)] = y_u[static_cast<size_t>(w)];
    stream.y_sensitive[static_cast<size_t>(ts)] = y_s[static_cast<size_t>(w)];
  }
  return stream;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& text, Eigen::Index line_no) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("csv-number", "line " + std::to_string(line_no) +
                                            ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

SensorStream load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw RuntimeError("io-open", "cannot open '" + path + "' for reading");
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw ValidationError("csv-header", "'" + path + "' is empty");
  }
  std::vector<std::string> cols = split_line(header, ',');
  if (cols.empty() || cols[0] != "t") {
    throw ValidationError("csv-header", "first column must be 't'");
  }
  size_t n_s = 0;
  while (1 + n_s < cols.size() &&
         cols[1 + n_s] == "s" + std::to_string(n_s + 1)) {
    ++n_s;
  }
  if (n_s == 0) {
    throw ValidationError("csv-header", "no sensor columns s1..sN found");
  }
  size_t next = 1 + n_s;
  bool has_yu = next < cols.size() && cols[next] == "yU";
  if (has_yu) ++next;
  bool has_ys = next < cols.size() && cols[next] == "yS";
  if (has_ys) ++next;
  if (next != cols.size()) {
    throw ValidationError("csv-header",
                          "unrecognized trailing column '" + cols[next] + "'");
  }

  std::vector<std::vector<double>> rows;
  std::string line;
  Eigen::Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_line(line, ',');
    if (fields.size() != cols.size()) {
      throw ValidationError("csv-row",
                            "line " + std::to_string(line_no) + " has " +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(cols.size()));
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (const std::string& f : fields) values.push_back(parse_number(f, line_no));
    Eigen::Index expected_t = static_cast<Eigen::Index>(rows.size());
    if (values[0] != static_cast<double>(expected_t)) {
      throw ValidationError("csv-timestamp",
                            "line " + std::to_string(line_no) +
                                ": expected timestamp index " +
                                std::to_string(expected_t));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) {
    throw ValidationError("csv-empty", "'" + path + "' has no data rows");
  }

  SensorStream stream;
  const Eigen::Index t = static_cast<Eigen::Index>(rows.size());
  stream.samples.resize(static_cast<Eigen::Index>(n_s), t);
  if (has_yu) stream.y_useful.resize(rows.size());
  if (has_ys) stream.y_sensitive.resize(rows.size());
  for (Eigen::Index ts = 0; ts < t; ++ts) {
    const std::vector<double>& row = rows[static_cast<size_t>(ts)];
    for (size_t s_idx = 0; s_idx < n_s; ++s_idx) {
      stream.samples(static_cast<Eigen::Index>(s_idx), ts) = row[1 + s_idx];
    }
    size_t at = 1 + n_s;
    if (has_yu) stream.y_useful[static_cast<size_t>(ts)] = row[at++];
    if (has_ys) stream.y_sensitive[static_cast<size_t>(ts)] = row[at];
  }
  return stream;
}

void save_csv(const SensorStream& stream, const std::string& path) {
  if (stream.sensors() < 1 || stream.timestamps() < 1) {
    throw ValidationError("csv-shape", "stream must have sensors and timestamps");
  }
  bool has_yu = !stream.y_useful.empty();
  bool has_ys = !stream.y_sensitive.empty();
  if ((has_yu && stream.y_useful.size() != static_cast<size_t>(stream.timestamps())) ||
      (has_ys && stream.y_sensitive.size() != static_cast<size_t>(stream.timestamps()))) {
    throw ValidationError("csv-labels", "label vectors must match timestamp count");
  }
  std::ofstream out(path);
  if (!out) {
    throw RuntimeError("io-open", "cannot open '" + path + "' for writing");
  }
  out << "t";
  for (Eigen::Index s_idx = 0; s_idx < stream.sensors(); ++s_idx) {
    out << ",s" << (s_idx + 1);
  }
  if (has_yu) out << ",yU";
  if (has_ys) out << ",yS";
  out << "\n";

  char buf[64];
  for (Eigen::Index ts = 0; ts < stream.timestamps(); ++ts) {
    out << ts;
    for (Eigen::Index s_idx = 0; s_idx < stream.sensors(); ++s_idx) {
      std::snprintf(buf, sizeof buf, "%.15g", stream.samples(s_idx, ts));
      out << ',' << buf;
    }
    if (has_yu) {
      std::snprintf(buf, sizeof buf, "%.15g", stream.y_useful[static_cast<size_t>(ts)]);
      out << ',' << buf;
    }
    if (has_ys) {
      std::snprintf(buf, sizeof buf, "%.15g", stream.y_sensitive[static_cast<size_t>(ts)]);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) {
    throw RuntimeError("io-write", "failed writing '" + path + "'");
  }
}

Scaler Scaler::from_ranges(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw ValidationError("scaler-ranges", "lo/hi must be non-empty and equal length");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) {
      throw ValidationError("scaler-ranges", "range_lo must be <= range_hi");
    }
  }
  return Scaler{lo, hi};
}

Scaler Scaler::from_dataset(const WindowedDataset& ds) {
  return from_ranges(ds.range_lo, ds.range_hi);
}

Matrix Scaler::scale(const Matrix& windows) const {
  if (windows.rows() != lo.size()) {
    throw ValidationError("scaler-dim", "window dimension does not match ranges");
  }
  Matrix out(windows.rows(), windows.cols());
  for (Eigen::Index i = 0; i < windows.rows(); ++i) {
    double span = hi[i] - lo[i];
    if (span <= 0.0) {
      out.row(i).setConstant(0.5);
    } else {
      out.row(i) = (windows.row(i).array() - lo[i]) / span;
    }
  }
  return out;
}

Matrix Scaler::unscale(const Matrix& scaled) const {
  if (scaled.rows() != lo.size()) {
    throw ValidationError("scaler-dim", "window dimension does not match ranges");
  }
  Matrix out(scaled.rows(), scaled.cols());
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
    double span = hi[i] - lo[i];
    if (span <= 0.0) {
      out.row(i).setConstant(lo[i]);
    } else {
      out.row(i) = scaled.row(i).array() * span + lo[i];
    }
  }
  return out;
}

}  // namespace deeprotect
