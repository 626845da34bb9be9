#include "deeprotect/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "deeprotect/errors.hpp"

namespace deeprotect {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad_doc(const std::string& what) {
  throw ValidationError("json-field", what);
}

njson parse_text(const std::string& text) {
  try {
    return njson::parse(text);
  } catch (const njson::exception& e) {
    throw ValidationError("json-parse", e.what());
  }
}

void check_schema(const njson& doc, const char* expected) {
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
    bad_doc("document has no schema tag");
  }
  if (doc["schema"].get<std::string>() != expected) {
    bad_doc("expected schema '" + std::string(expected) + "', found '" +
            doc["schema"].get<std::string>() + "'");
  }
}

ojson eps_to_json(double epsilon) {
  if (std::isinf(epsilon) && epsilon > 0.0) return ojson("inf");
  return ojson(epsilon);
}

double eps_from_json(const njson& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    bad_doc("epsilon string must be 'inf'");
  }
  if (!v.is_number()) bad_doc("epsilon must be a number or 'inf'");
  return v.get<double>();
}

ojson vector_to_json(const Vector& v) {
  ojson arr = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const njson& arr, const char* what) {
  if (!arr.is_array()) bad_doc(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const njson& x : arr) {
    if (!x.is_number()) bad_doc(std::string(what) + " must hold numbers");
    v[i++] = x.get<double>();
  }
  return v;
}

ojson matrix_to_json(const Matrix& m) {  // array of rows
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const njson& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    bad_doc(std::string(what) + " must be a non-empty array of rows");
  }
  const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size());
  const njson& first = rows[0];
  if (!first.is_array() || first.empty()) {
    bad_doc(std::string(what) + " rows must be non-empty arrays");
  }
  const Eigen::Index n_cols = static_cast<Eigen::Index>(first.size());
  Matrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const njson& row = rows[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      bad_doc(std::string(what) + " rows have inconsistent lengths");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      const njson& x = row[static_cast<size_t>(j)];
      if (!x.is_number()) bad_doc(std::string(what) + " must hold numbers");
      m(i, j) = x.get<double>();
    }
  }
  return m;
}

std::string g15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("io-open", "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw RuntimeError("io-read", "failed reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("io-open", "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw RuntimeError("io-write", "failed writing '" + path + "'");
}

nlohmann::ordered_json classifier_to_json(const RidgeClassifier& clf) {
  ojson doc;
  doc["schema"] = kClassifierSchema;
  doc["c"] = vector_to_json(clf.c);
  doc["beta"] = clf.beta;
  doc["codec"] = clf.codec;
  return doc;
}

RidgeClassifier classifier_from_json(const nlohmann::json& doc) {
  check_schema(doc, kClassifierSchema);
  try {
    RidgeClassifier clf;
    clf.c = vector_from_json(doc.at("c"), "c");
    clf.beta = doc.at("beta").get<double>();
    clf.codec = doc.at("codec").get<std::vector<double>>();
    return clf;
  } catch (const njson::exception& e) {
    bad_doc(e.what());
  }
}

void save_classifier(const RidgeClassifier& clf, const std::string& path) {
  write_text_file(path, classifier_to_json(clf).dump(2) + "\n");
}

RidgeClassifier load_classifier(const std::string& path) {
  return classifier_from_json(parse_text(read_text_file(path)));
}

nlohmann::ordered_json stack_to_json(const AutoencoderStack& stack) {
  ojson doc;
  doc["schema"] = kStackSchema;
  ojson dims = ojson::array();
  if (!stack.layers.empty()) {
    dims.push_back(stack.layers.front().in_dim());
    for (const LayerParams& lp : stack.layers) dims.push_back(lp.out_dim());
  }
  doc["dims"] = std::move(dims);
  ojson layers = ojson::array();
  for (const LayerParams& lp : stack.layers) {
    ojson layer;
    layer["W"] = matrix_to_json(lp.W);
    layer["b_enc"] = vector_to_json(lp.b_enc);
    layer["b_dec"] = vector_to_json(lp.b_dec);
    layers.push_back(std::move(layer));
  }
  doc["layers"] = std::move(layers);
  doc["classifier_c"] = vector_to_json(stack.c);
  doc["scale_lo"] = vector_to_json(stack.scale_lo);
  doc["scale_hi"] = vector_to_json(stack.scale_hi);
  ojson hyper;
  hyper["alpha"] = stack.hyper.alpha;
  hyper["mu"] = stack.hyper.mu;
  hyper["beta"] = stack.hyper.beta;
  hyper["weight_decay"] = stack.hyper.weight_decay;
  hyper["sparsity_weight"] = stack.hyper.sparsity_weight;
  hyper["sparsity_target"] = stack.hyper.sparsity_target;
  hyper["iters"] = stack.hyper.iters;
  hyper["batch"] = stack.hyper.batch;
  hyper["finetune_fraction"] = stack.hyper.finetune_fraction;
  doc["hyper"] = std::move(hyper);
  return doc;
}

AutoencoderStack stack_from_json(const nlohmann::json& doc) {
  check_schema(doc, kStackSchema);
  try {
    AutoencoderStack stack;
    for (const njson& layer : doc.at("layers")) {
      LayerParams lp;
      lp.W = matrix_from_json(layer.at("W"), "W");
      lp.b_enc = vector_from_json(layer.at("b_enc"), "b_enc");
      lp.b_dec = vector_from_json(layer.at("b_dec"), "b_dec");
      if (lp.b_enc.size() != lp.out_dim() || lp.b_dec.size() != lp.in_dim()) {
        bad_doc("layer bias lengths do not match W");
      }
      stack.layers.push_back(std::move(lp));
    }
    if (stack.layers.empty()) bad_doc("stack must have at least one layer");
    const std::vector<long long> dims = doc.at("dims").get<std::vector<long long>>();
    if (dims.size() != stack.layers.size() + 1 ||
        dims.front() != stack.layers.front().in_dim()) {
      bad_doc("dims does not match layer shapes");
    }
    for (size_t l = 0; l < stack.layers.size(); ++l) {
      if (dims[l + 1] != stack.layers[l].out_dim() ||
          (l > 0 && stack.layers[l].in_dim() != stack.layers[l - 1].out_dim())) {
        bad_doc("dims does not match layer shapes");
      }
    }
    stack.c = vector_from_json(doc.at("classifier_c"), "classifier_c");
    stack.scale_lo = vector_from_json(doc.at("scale_lo"), "scale_lo");
    stack.scale_hi = vector_from_json(doc.at("scale_hi"), "scale_hi");
    if (stack.scale_lo.size() != stack.layers.front().in_dim() ||
        stack.scale_hi.size() != stack.layers.front().in_dim()) {
      bad_doc("scale ranges must have input dimension");
    }
    const njson& hyper = doc.at("hyper");
    stack.hyper.alpha = hyper.at("alpha").get<double>();
    stack.hyper.mu = hyper.at("mu").get<double>();
    stack.hyper.beta = hyper.at("beta").get<double>();
    stack.hyper.weight_decay = hyper.at("weight_decay").get<double>();
    stack.hyper.sparsity_weight = hyper.at("sparsity_weight").get<double>();
    stack.hyper.sparsity_target = hyper.at("sparsity_target").get<double>();
    stack.hyper.iters = hyper.at("iters").get<int>();
    stack.hyper.batch = hyper.at("batch").get<int>();
    stack.hyper.finetune_fraction = hyper.at("finetune_fraction").get<double>();
    return stack;
  } catch (const njson::exception& e) {
    bad_doc(e.what());
  }
}

void save_stack(const AutoencoderStack& stack, const std::string& path) {
  write_text_file(path, stack_to_json(stack).dump(2) + "\n");
}

AutoencoderStack load_stack(const std::string& path) {
  return stack_from_json(parse_text(read_text_file(path)));
}

nlohmann::ordered_json sidecar_to_json(const PrivacySpec& spec, std::uint64_t seed) {
  ojson doc;
  doc["schema"] = kSidecarSchema;
  doc["mode"] = mode_name(spec.mode);
  doc["epsilon"] = eps_to_json(spec.epsilon);
  doc["lambda"] = spec.lambda();
  doc["delta_q"] = spec.delta_q;
  doc["delta_q_relax"] = spec.delta_q_relax;
  doc["dim_x"] = spec.dim_x;
  doc["dim_f"] = spec.dim_f;
  doc["seed"] = seed;
  doc["sensitivity_basis"] = "empirical-local";
  return doc;
}

std::pair<PrivacySpec, std::uint64_t> sidecar_from_json(const nlohmann::json& doc) {
  check_schema(doc, kSidecarSchema);
  try {
    PrivacySpec spec;
    spec.mode = parse_mode(doc.at("mode").get<std::string>());
    spec.epsilon = eps_from_json(doc.at("epsilon"));
    spec.delta_q = doc.at("delta_q").get<double>();
    spec.delta_q_relax = doc.at("delta_q_relax").get<double>();
    spec.dim_x = doc.at("dim_x").get<int>();
    spec.dim_f = doc.at("dim_f").get<int>();
    const double recorded = doc.at("lambda").get<double>();
    const double derived = spec.lambda();
    if (std::abs(recorded - derived) > 1e-9 * std::max(1.0, std::abs(derived))) {
      bad_doc("recorded lambda " + g15(recorded) +
              " does not match the value derived from the document fields " + g15(derived));
    }
    return {spec, doc.at("seed").get<std::uint64_t>()};
  } catch (const njson::exception& e) {
    bad_doc(e.what());
  }
}

void save_sidecar(const PrivacySpec& spec, std::uint64_t seed,
                  const std::string& path) {
  write_text_file(path, sidecar_to_json(spec, seed).dump(2) + "\n");
}

std::pair<PrivacySpec, std::uint64_t> load_sidecar(const std::string& path) {
  return sidecar_from_json(parse_text(read_text_file(path)));
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  ojson doc;
  doc["schema"] = kReportSchema;
  doc["epsilon"] = eps_to_json(report.epsilon);
  doc["mode"] = mode_name(report.mode);
  doc["useful_accuracy"] = report.useful_accuracy;
  doc["sensitive_accuracy"] = report.sensitive_accuracy;
  doc["mean_l1_error"] = report.mean_l1_error;
  doc["advantage_predicted"] = report.advantage_predicted;
  doc["advantage_measured"] = report.advantage_measured;
  doc["informativeness"] = report.informativeness;
  doc["delta_q"] = report.delta_q;
  doc["delta_q_relax"] = report.delta_q_relax;
  doc["lambda"] = report.lambda;
  doc["seed"] = report.seed;
  return doc;
}

EvalReport report_from_json(const nlohmann::json& doc) {
  validate_report_json(doc);
  EvalReport rep;
  rep.epsilon = eps_from_json(doc.at("epsilon"));
  rep.mode = parse_mode(doc.at("mode").get<std::string>());
  rep.useful_accuracy = doc.at("useful_accuracy").get<double>();
  rep.sensitive_accuracy = doc.at("sensitive_accuracy").get<double>();
  rep.mean_l1_error = doc.at("mean_l1_error").get<double>();
  rep.advantage_predicted = doc.at("advantage_predicted").get<double>();
  rep.advantage_measured = doc.at("advantage_measured").get<double>();
  rep.informativeness = doc.at("informativeness").get<std::vector<double>>();
  rep.delta_q = doc.at("delta_q").get<double>();
  rep.delta_q_relax = doc.at("delta_q_relax").get<double>();
  rep.lambda = doc.at("lambda").get<double>();
  rep.seed = doc.at("seed").get<std::uint64_t>();
  return rep;
}

void validate_report_json(const nlohmann::json& doc) {
  check_schema(doc, kReportSchema);
  auto need_number = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number()) {
      bad_doc(std::string("report field '") + key + "' missing or not a number");
    }
    return doc[key].get<double>();
  };
  if (!doc.contains("epsilon")) bad_doc("report field 'epsilon' missing");
  eps_from_json(doc["epsilon"]);
  if (!doc.contains("mode") || !doc["mode"].is_string()) {
    bad_doc("report field 'mode' missing or not a string");
  }
  parse_mode(doc["mode"].get<std::string>());
  auto need_fraction = [&](const char* key) {
    double v = need_number(key);
    if (!(v >= 0.0 && v <= 1.0)) {
      bad_doc(std::string("report field '") + key + "' outside [0,1]");
    }
  };
  need_fraction("useful_accuracy");
  need_fraction("sensitive_accuracy");
  need_number("mean_l1_error");
  need_number("advantage_predicted");
  need_number("advantage_measured");
  need_number("delta_q");
  need_number("delta_q_relax");
  need_number("lambda");
  if (!doc.contains("informativeness") || !doc["informativeness"].is_array()) {
    bad_doc("report field 'informativeness' missing or not an array");
  }
  for (const njson& v : doc["informativeness"]) {
    if (!v.is_number() || !(v.get<double>() >= 0.0 && v.get<double>() <= 1.0)) {
      bad_doc("informativeness entries must be numbers in [0,1]");
    }
  }
  if (!doc.contains("seed") || !doc["seed"].is_number_unsigned()) {
    bad_doc("report field 'seed' missing or not an unsigned integer");
  }
}

void save_reports_jsonl(const std::vector<EvalReport>& reports,
                        const std::string& path) {
  std::string text;
  for (const EvalReport& rep : reports) {
    text += report_to_json(rep).dump();
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<EvalReport> load_reports_jsonl(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<EvalReport> reports;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    reports.push_back(report_from_json(parse_text(line)));
  }
  return reports;
}

void save_reports_csv(const std::vector<EvalReport>& reports,
                      const std::string& path) {
  std::string text =
      "epsilon,mode,useful_accuracy,sensitive_accuracy,mean_l1_error,"
      "advantage_predicted,advantage_measured,info_mean,delta_q,delta_q_relax,"
      "lambda,seed\n";
  for (const EvalReport& rep : reports) {
    double info_mean = 0.0;
    if (!rep.informativeness.empty()) {
      for (double v : rep.informativeness) info_mean += v;
      info_mean /= static_cast<double>(rep.informativeness.size());
    }
    text += g15(rep.epsilon);
    text += ',';
    text += mode_name(rep.mode);
    for (double v : {rep.useful_accuracy, rep.sensitive_accuracy,
                     rep.mean_l1_error, rep.advantage_predicted,
                     rep.advantage_measured, info_mean, rep.delta_q,
                     rep.delta_q_relax, rep.lambda}) {
      text += ',';
      text += g15(v);
    }
    text += ',';
    text += std::to_string(rep.seed);
    text += '\n';
  }
  write_text_file(path, text);
}

nlohmann::ordered_json ledger_to_json(const BudgetLedger& ledger) {
  ojson doc;
  doc["schema"] = kLedgerSchema;
  ojson entries = ojson::array();
  for (const BudgetLedger::Entry& e : ledger.entries) {
    ojson entry;
    entry["epsilon"] = eps_to_json(e.epsilon);
    entry["partition"] = e.partition;
    entries.push_back(std::move(entry));
  }
  doc["entries"] = std::move(entries);
  return doc;
}

BudgetLedger ledger_from_json(const nlohmann::json& doc) {
  check_schema(doc, kLedgerSchema);
  try {
    BudgetLedger ledger;
    for (const njson& entry : doc.at("entries")) {
      ledger.record(eps_from_json(entry.at("epsilon")),
                    entry.at("partition").get<std::string>());
    }
    return ledger;
  } catch (const njson::exception& e) {
    bad_doc(e.what());
  }
}

void save_ledger(const BudgetLedger& ledger, const std::string& path) {
  write_text_file(path, ledger_to_json(ledger).dump(2) + "\n");
}

BudgetLedger load_ledger(const std::string& path) {
  return ledger_from_json(parse_text(read_text_file(path)));
}

}  // namespace deeprotect
