#include "deeprotect/cli.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "deeprotect/autoencoder.hpp"
#include "deeprotect/dataset.hpp"
#include "deeprotect/errors.hpp"
#include "deeprotect/evaluation.hpp"
#include "deeprotect/inference.hpp"
#include "deeprotect/privacy.hpp"
#include "deeprotect/registry.hpp"
#include "deeprotect/serialize.hpp"

namespace deeprotect {

namespace {

using njson = nlohmann::json;

double parse_epsilon_text(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("epsilon-parse",
                          "cannot parse epsilon '" + text + "' (number or 'inf')");
  }
  return value;
}

std::vector<std::string> split_commas(const std::string& text, const char* what) {
  std::vector<std::string> items;
  std::string cur;
  auto flush = [&] {
    size_t b = cur.find_first_not_of(" \t");
    size_t e = cur.find_last_not_of(" \t");
    if (b == std::string::npos) {
      throw ValidationError("list-parse", std::string(what) + " has an empty item");
    }
    items.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char ch : text) {
    if (ch == ',') {
      flush();
    } else {
      cur += ch;
    }
  }
  flush();
  return items;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (const std::string& item : split_commas(text, what)) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw ValidationError("list-parse", std::string(what) + ": cannot parse '" +
                                              item + "' as an integer");
    }
    out.push_back(value);
  }
  return out;
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_commas(text, "epsilons")) {
    out.push_back(parse_epsilon_text(item));
  }
  return out;
}

std::vector<Mode> parse_mode_list(const std::string& text) {
  std::vector<Mode> out;
  for (const std::string& item : split_commas(text, "modes")) {
    out.push_back(parse_mode(item));
  }
  return out;
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) {
    throw ValidationError("cli-missing", std::string(flag) + " is required");
  }
}

// --config JSON support: flags parsed with count() == 0 pick up their value
// from the config object; explicit flags always win. Every key in the config
// must correspond to a known flag of the subcommand.
class ConfigHooks {
 public:
  void install(CLI::App* sub) {
    sub->add_option("--config", config_path_,
                    "JSON object supplying values for flags not given "
                    "explicitly (flags override the file)");
  }

  template <typename T>
  void add_option(CLI::App* sub, const std::string& flag, T& var,
                  const std::string& desc) {
    CLI::Option* opt = sub->add_option(flag, var, desc);
    hooks_.push_back({opt, flag.substr(2), [&var](const njson& v) {
                        var = v.get<T>();
                      }});
  }

  // String-valued flag whose config value may also be a number or an array
  // (joined with commas) — used for epsilon and list flags.
  void add_text_option(CLI::App* sub, const std::string& flag, std::string& var,
                       const std::string& desc) {
    CLI::Option* opt = sub->add_option(flag, var, desc);
    hooks_.push_back({opt, flag.substr(2), [&var](const njson& v) {
                        var = text_of(v);
                      }});
  }

  void add_flag(CLI::App* sub, const std::string& flag, bool& var,
                const std::string& desc) {
    CLI::Option* opt = sub->add_flag(flag, var, desc);
    hooks_.push_back({opt, flag.substr(2), [&var](const njson& v) {
                        var = v.get<bool>();
                      }});
  }

  void merge() const {
    if (config_path_.empty()) return;
    njson cfg;
    try {
      cfg = njson::parse(read_text_file(config_path_));
    } catch (const njson::exception& e) {
      throw ValidationError("json-parse", e.what());
    }
    if (!cfg.is_object()) {
      throw ValidationError("config-shape", "config file must hold a JSON object");
    }
    for (const auto& [key, value] : cfg.items()) {
      const Hook* hook = nullptr;
      for (const Hook& h : hooks_) {
        if (h.key == key) {
          hook = &h;
          break;
        }
      }
      if (hook == nullptr) {
        throw ValidationError("config-key", "unknown config key '" + key + "'");
      }
      if (hook->opt->count() == 0) {
        try {
          hook->apply(value);
        } catch (const njson::exception& e) {
          throw ValidationError("config-value",
                                "config key '" + key + "': " + e.what());
        }
      }
    }
  }

 private:
  struct Hook {
    CLI::Option* opt;
    std::string key;
    std::function<void(const njson&)> apply;
  };

  static std::string text_of(const njson& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    if (v.is_array()) {
      std::string joined;
      for (const njson& item : v) {
        if (!joined.empty()) joined += ',';
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      return joined;
    }
    throw ValidationError("config-value",
                          "expected a string, number, or array, got " +
                              std::string(v.type_name()));
  }

  std::string config_path_;
  std::vector<Hook> hooks_;
};

int window_from_stack(const AutoencoderStack& stack, const SensorStream& stream) {
  const Eigen::Index n_s = stream.sensors();
  if (n_s < 1 || stack.dim_x() % n_s != 0) {
    throw ValidationError(
        "perturb-window",
        "stack input dimension " + std::to_string(stack.dim_x()) +
            " is not a multiple of the stream's sensor count " + std::to_string(n_s));
  }
  return static_cast<int>(stack.dim_x() / n_s);
}

EvalReport single_report(const WindowedDataset& clean,
                         const WindowedDataset& perturbed,
                         const AutoencoderStack& stack,
                         const RidgeClassifier& useful_clf,
                         const RidgeClassifier& sensitive_clf,
                         const PrivacySpec& spec, std::uint64_t seed, Exec exec) {
  if (clean.labels_useful.empty() || clean.labels_sensitive.empty()) {
    throw ValidationError("eval-labels",
                          "clean dataset needs yU and yS label columns");
  }
  const Scaler sc = stack.scaler();

  EvalReport rep;
  rep.epsilon = spec.epsilon;
  rep.mode = spec.mode;
  rep.mean_l1_error = expected_error(clean, perturbed);
  const Matrix scaled_out = sc.scale(perturbed.windows);
  rep.useful_accuracy = accuracy(useful_clf, scaled_out, clean.labels_useful);
  rep.sensitive_accuracy = accuracy(sensitive_clf, scaled_out, clean.labels_sensitive);
  const Vector info =
      informativeness(stack.encode(sc.scale(clean.windows)), clean.labels_useful);
  rep.informativeness.assign(info.data(), info.data() + info.size());
  rep.delta_q = spec.delta_q;
  rep.delta_q_relax = spec.delta_q_relax;
  rep.lambda = spec.lambda();
  rep.seed = seed;
  if (spec.mode == Mode::kBaseline) {
    rep.advantage_predicted = 1.0;
    rep.advantage_measured = 1.0;
  } else {
    PrivacySpec base_spec = spec;
    base_spec.mode = Mode::kBaseline;
    base_spec.dim_f = base_spec.dim_x;
    rep.advantage_predicted = advantage_factor(base_spec, spec);
    // The measured factor needs a baseline run at the same epsilon; its RNG
    // derives from the mechanism seed so the report is reproducible.
    const PerturbResult base = perturb_baseline(
        clean, spec.epsilon, Rng(seed).child(stream_of(spec.epsilon, 1)), exec);
    const double base_err = expected_error(clean, base.data);
    rep.advantage_measured =
        rep.mean_l1_error > 0.0 ? base_err / rep.mean_l1_error : 0.0;
  }
  return rep;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "Windowed sensor-stream minimization and Laplace perturbation pipeline"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  struct {
    std::string out;
    std::uint64_t seed = 1;
    int sensors = 3;
    int window = 10;
    int timestamps = 2000;
    double useful_scale = 2.0;
    double sensitive_scale = 1.0;
    double sigma = 0.3;
    int classes = 3;
    double rate = 10.0;
    ConfigHooks cfg;
  } gen;
  {
    CLI::App* sub = app.add_subcommand("gen", "Generate a labeled synthetic CSV");
    gen.cfg.install(sub);
    gen.cfg.add_option(sub, "--out", gen.out, "output CSV path");
    gen.cfg.add_option(sub, "--seed", gen.seed, "generator seed");
    gen.cfg.add_option(sub, "--sensors", gen.sensors, "sensor count N_s");
    gen.cfg.add_option(sub, "--window", gen.window, "window length N_w");
    gen.cfg.add_option(sub, "--timestamps", gen.timestamps, "timestamps to emit");
    gen.cfg.add_option(sub, "--useful-scale", gen.useful_scale,
                       "useful latent amplitude");
    gen.cfg.add_option(sub, "--sensitive-scale", gen.sensitive_scale,
                       "sensitive latent amplitude");
    gen.cfg.add_option(sub, "--sigma", gen.sigma, "ambient noise level");
    gen.cfg.add_option(sub, "--classes", gen.classes, "sensitive class count");
    gen.cfg.add_option(sub, "--rate", gen.rate, "sample rate in Hz");
    sub->callback([&] {
      gen.cfg.merge();
      require_path(gen.out, "--out");
      SynthSpec spec = default_synth_spec(gen.sensors, gen.window);
      spec.useful_scale = gen.useful_scale;
      spec.sensitive_scale = gen.sensitive_scale;
      spec.sigma = gen.sigma;
      spec.sensitive_classes = gen.classes;
      spec.rate_hz = gen.rate;
      save_csv(synthesize(gen.seed, gen.sensors, gen.timestamps, spec), gen.out);
    });
  }

  // ---- train --------------------------------------------------------------
  struct {
    std::string data;
    int window = 10;
    std::string dims = "15,7";
    std::string stack_out;
    std::string useful_out;
    std::string sensitive_out;
    std::uint64_t seed = 1;
    double alpha = 0.1;
    double mu = 1.0;
    double beta = 0.1;
    double weight_decay = 1e-4;
    double sparsity_weight = 0.0;
    double sparsity_target = 0.05;
    int iters = 500;
    int batch = 0;
    double finetune_fraction = 0.2;
    bool serial = false;
    ConfigHooks cfg;
  } train_cmd;
  {
    CLI::App* sub = app.add_subcommand(
        "train", "Train the minimization stack and ridge classifiers");
    train_cmd.cfg.install(sub);
    train_cmd.cfg.add_option(sub, "--data", train_cmd.data, "labeled input CSV");
    train_cmd.cfg.add_option(sub, "--window", train_cmd.window, "window length N_w");
    train_cmd.cfg.add_text_option(sub, "--dims", train_cmd.dims,
                                  "hidden layer sizes, comma-separated");
    train_cmd.cfg.add_option(sub, "--stack-out", train_cmd.stack_out,
                             "output stack JSON path");
    train_cmd.cfg.add_option(sub, "--useful-out", train_cmd.useful_out,
                             "output useful-classifier JSON path (needs yU)");
    train_cmd.cfg.add_option(sub, "--sensitive-out", train_cmd.sensitive_out,
                             "output sensitive-classifier JSON path (needs yS)");
    train_cmd.cfg.add_option(sub, "--seed", train_cmd.seed, "training seed");
    train_cmd.cfg.add_option(sub, "--alpha", train_cmd.alpha, "gradient step size");
    train_cmd.cfg.add_option(sub, "--mu", train_cmd.mu, "utility term weight");
    train_cmd.cfg.add_option(sub, "--beta", train_cmd.beta,
                             "ridge weight (classifiers and utility term)");
    train_cmd.cfg.add_option(sub, "--weight-decay", train_cmd.weight_decay,
                             "weight decay");
    train_cmd.cfg.add_option(sub, "--sparsity-weight", train_cmd.sparsity_weight,
                             "KL sparsity weight (0 disables)");
    train_cmd.cfg.add_option(sub, "--sparsity-target", train_cmd.sparsity_target,
                             "KL sparsity target rho");
    train_cmd.cfg.add_option(sub, "--iters", train_cmd.iters,
                             "gradient steps per greedy layer");
    train_cmd.cfg.add_option(sub, "--batch", train_cmd.batch,
                             "batch size (0 = auto)");
    train_cmd.cfg.add_option(sub, "--finetune-fraction", train_cmd.finetune_fraction,
                             "full-stack pass length relative to --iters");
    train_cmd.cfg.add_flag(sub, "--serial", train_cmd.serial,
                           "disable parallel kernels");
    sub->callback([&] {
      train_cmd.cfg.merge();
      require_path(train_cmd.data, "--data");
      require_path(train_cmd.stack_out, "--stack-out");
      const Exec exec = train_cmd.serial ? Exec::kSerial : Exec::kParallel;
      const SensorStream stream = load_csv(train_cmd.data);
      const WindowedDataset ds = window(stream, train_cmd.window);
      HyperParams hyper;
      hyper.alpha = train_cmd.alpha;
      hyper.mu = train_cmd.mu;
      hyper.beta = train_cmd.beta;
      hyper.weight_decay = train_cmd.weight_decay;
      hyper.sparsity_weight = train_cmd.sparsity_weight;
      hyper.sparsity_target = train_cmd.sparsity_target;
      hyper.iters = train_cmd.iters;
      hyper.batch = train_cmd.batch;
      hyper.finetune_fraction = train_cmd.finetune_fraction;
      const AutoencoderStack stack =
          train(ds, parse_int_list(train_cmd.dims, "dims"), hyper, train_cmd.seed,
                nullptr, exec);
      save_stack(stack, train_cmd.stack_out);
      const Matrix scaled = stack.scaler().scale(ds.windows);
      if (!train_cmd.useful_out.empty()) {
        if (ds.labels_useful.empty()) {
          throw ValidationError("train-labels", "--useful-out needs a yU column");
        }
        save_classifier(fit_ridge(scaled, ds.labels_useful, train_cmd.beta),
                        train_cmd.useful_out);
      }
      if (!train_cmd.sensitive_out.empty()) {
        if (ds.labels_sensitive.empty()) {
          throw ValidationError("train-labels", "--sensitive-out needs a yS column");
        }
        save_classifier(fit_ridge(scaled, ds.labels_sensitive, train_cmd.beta),
                        train_cmd.sensitive_out);
      }
    });
  }

  // ---- perturb ------------------------------------------------------------
  struct {
    std::string data;
    std::string mode;
    std::string epsilon;
    std::string out;
    std::string sidecar;
    std::string stack_path;
    std::string sensitive_path;
    int window = 10;
    std::uint64_t seed = 1;
    bool serial = false;
    ConfigHooks cfg;
  } pert;
  {
    CLI::App* sub = app.add_subcommand("perturb", "Perturb a CSV stream");
    pert.cfg.install(sub);
    pert.cfg.add_option(sub, "--data", pert.data, "input CSV");
    pert.cfg.add_text_option(sub, "--mode", pert.mode, "baseline|mode1|mode2");
    pert.cfg.add_text_option(sub, "--epsilon", pert.epsilon,
                             "privacy budget (number or 'inf')");
    pert.cfg.add_option(sub, "--out", pert.out, "output CSV path");
    pert.cfg.add_option(sub, "--sidecar", pert.sidecar,
                        "sidecar JSON path (default: <out>.json)");
    pert.cfg.add_option(sub, "--stack", pert.stack_path,
                        "stack JSON (mode1/mode2; also fixes the window length)");
    pert.cfg.add_option(sub, "--sensitive", pert.sensitive_path,
                        "sensitive classifier JSON (mode2)");
    pert.cfg.add_option(sub, "--window", pert.window,
                        "window length N_w (baseline only)");
    pert.cfg.add_option(sub, "--seed", pert.seed, "mechanism seed");
    pert.cfg.add_flag(sub, "--serial", pert.serial, "disable parallel kernels");
    sub->callback([&] {
      pert.cfg.merge();
      require_path(pert.data, "--data");
      require_path(pert.out, "--out");
      require_path(pert.mode, "--mode");
      require_path(pert.epsilon, "--epsilon");
      const Mode mode = parse_mode(pert.mode);
      const double eps = parse_epsilon_text(pert.epsilon);
      const Exec exec = pert.serial ? Exec::kSerial : Exec::kParallel;
      const SensorStream stream = load_csv(pert.data);
      const Rng rng(pert.seed);

      PerturbResult pr;
      if (mode == Mode::kBaseline) {
        pr = perturb_baseline(window(stream, pert.window), eps, rng, exec);
      } else {
        require_path(pert.stack_path, "--stack");
        const AutoencoderStack stack = load_stack(pert.stack_path);
        const WindowedDataset ds = window(stream, window_from_stack(stack, stream));
        if (mode == Mode::kMode1) {
          pr = perturb_mode1(ds, stack, eps, rng, exec);
        } else {
          require_path(pert.sensitive_path, "--sensitive");
          pr = perturb_mode2(ds, stack, load_classifier(pert.sensitive_path), eps,
                             rng, exec);
        }
      }
      save_csv(unwindow(pr.data, stream.rate_hz), pert.out);
      const std::string sidecar_path =
          pert.sidecar.empty() ? pert.out + ".json" : pert.sidecar;
      save_sidecar(pr.spec, pr.seed, sidecar_path);
    });
  }

  // ---- eval ---------------------------------------------------------------
  struct {
    std::string data;
    std::string perturbed;
    std::string sidecar;
    std::string stack_path;
    std::string useful_path;
    std::string sensitive_path;
    std::string out;
    std::string csv;
    bool serial = false;
    ConfigHooks cfg;
  } eval_cmd;
  {
    CLI::App* sub = app.add_subcommand(
        "eval", "Evaluate one perturbed CSV against its clean source");
    eval_cmd.cfg.install(sub);
    eval_cmd.cfg.add_option(sub, "--data", eval_cmd.data, "clean labeled CSV");
    eval_cmd.cfg.add_option(sub, "--perturbed", eval_cmd.perturbed,
                            "perturbed CSV (from `perturb`)");
    eval_cmd.cfg.add_option(sub, "--sidecar", eval_cmd.sidecar,
                            "sidecar JSON (default: <perturbed>.json)");
    eval_cmd.cfg.add_option(sub, "--stack", eval_cmd.stack_path, "stack JSON");
    eval_cmd.cfg.add_option(sub, "--useful", eval_cmd.useful_path,
                            "useful classifier JSON");
    eval_cmd.cfg.add_option(sub, "--sensitive", eval_cmd.sensitive_path,
                            "sensitive classifier JSON");
    eval_cmd.cfg.add_option(sub, "--out", eval_cmd.out, "output report JSONL");
    eval_cmd.cfg.add_option(sub, "--csv", eval_cmd.csv, "optional CSV table");
    eval_cmd.cfg.add_flag(sub, "--serial", eval_cmd.serial,
                          "disable parallel kernels");
    sub->callback([&] {
      eval_cmd.cfg.merge();
      require_path(eval_cmd.data, "--data");
      require_path(eval_cmd.perturbed, "--perturbed");
      require_path(eval_cmd.stack_path, "--stack");
      require_path(eval_cmd.useful_path, "--useful");
      require_path(eval_cmd.sensitive_path, "--sensitive");
      require_path(eval_cmd.out, "--out");
      const Exec exec = eval_cmd.serial ? Exec::kSerial : Exec::kParallel;
      const std::string sidecar_path =
          eval_cmd.sidecar.empty() ? eval_cmd.perturbed + ".json" : eval_cmd.sidecar;
      const auto [spec, seed] = load_sidecar(sidecar_path);
      const AutoencoderStack stack = load_stack(eval_cmd.stack_path);
      const RidgeClassifier useful_clf = load_classifier(eval_cmd.useful_path);
      const RidgeClassifier sensitive_clf = load_classifier(eval_cmd.sensitive_path);
      const SensorStream clean_stream = load_csv(eval_cmd.data);
      const SensorStream pert_stream = load_csv(eval_cmd.perturbed);
      const int n_w = window_from_stack(stack, clean_stream);
      const WindowedDataset clean = window(clean_stream, n_w);
      const WindowedDataset perturbed = window(pert_stream, n_w);
      const EvalReport rep = single_report(clean, perturbed, stack, useful_clf,
                                           sensitive_clf, spec, seed, exec);
      save_reports_jsonl({rep}, eval_cmd.out);
      if (!eval_cmd.csv.empty()) save_reports_csv({rep}, eval_cmd.csv);
    });
  }

  // ---- bench --------------------------------------------------------------
  struct {
    std::string data;
    std::string stack_path;
    std::string useful_path;
    std::string sensitive_path;
    std::string epsilons = "0.5,1,2,5,10";
    std::string modes = "baseline,mode1,mode2";
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
    bool serial = false;
    ConfigHooks cfg;
  } bench;
  {
    CLI::App* sub = app.add_subcommand(
        "bench", "Sweep the utility/privacy trade-off across an epsilon grid");
    bench.cfg.install(sub);
    bench.cfg.add_option(sub, "--data", bench.data, "clean labeled CSV");
    bench.cfg.add_option(sub, "--stack", bench.stack_path, "stack JSON");
    bench.cfg.add_option(sub, "--useful", bench.useful_path,
                         "useful classifier JSON");
    bench.cfg.add_option(sub, "--sensitive", bench.sensitive_path,
                         "sensitive classifier JSON");
    bench.cfg.add_text_option(sub, "--epsilons", bench.epsilons,
                              "epsilon grid, comma-separated (numbers or 'inf')");
    bench.cfg.add_text_option(sub, "--modes", bench.modes,
                              "modes to sweep, comma-separated");
    bench.cfg.add_option(sub, "--seed", bench.seed, "sweep seed");
    bench.cfg.add_option(sub, "--out", bench.out, "output report JSONL");
    bench.cfg.add_option(sub, "--csv", bench.csv, "optional CSV table");
    bench.cfg.add_flag(sub, "--serial", bench.serial, "disable parallel kernels");
    sub->callback([&] {
      bench.cfg.merge();
      require_path(bench.data, "--data");
      require_path(bench.stack_path, "--stack");
      require_path(bench.useful_path, "--useful");
      require_path(bench.sensitive_path, "--sensitive");
      require_path(bench.out, "--out");
      const Exec exec = bench.serial ? Exec::kSerial : Exec::kParallel;
      const AutoencoderStack stack = load_stack(bench.stack_path);
      const SensorStream stream = load_csv(bench.data);
      const WindowedDataset ds = window(stream, window_from_stack(stack, stream));
      const std::vector<EvalReport> reports = tradeoff_sweep(
          ds, stack, load_classifier(bench.useful_path),
          load_classifier(bench.sensitive_path), parse_eps_list(bench.epsilons),
          parse_mode_list(bench.modes), bench.seed, exec);
      save_reports_jsonl(reports, bench.out);
      if (!bench.csv.empty()) save_reports_csv(reports, bench.csv);
    });
  }

  // ---- budget -------------------------------------------------------------
  struct {
    std::string ledger_path;
    ConfigHooks cfg;
  } budget;
  {
    CLI::App* sub = app.add_subcommand(
        "budget", "Total privacy budget of a ledger file");
    budget.cfg.install(sub);
    budget.cfg.add_option(sub, "--ledger", budget.ledger_path, "ledger JSON");
    sub->callback([&] {
      budget.cfg.merge();
      require_path(budget.ledger_path, "--ledger");
      const double total = ledger_epsilon(load_ledger(budget.ledger_path));
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.15g", total);
      std::cout << buf << "\n";
    });
  }

  // ---- registry -----------------------------------------------------------
  struct {
    std::string lookup;
    bool as_json = false;
    ConfigHooks cfg;
  } reg;
  {
    CLI::App* sub = app.add_subcommand(
        "registry", "Catalogue of known inferences over mobile sensor data");
    reg.cfg.install(sub);
    reg.cfg.add_option(sub, "--lookup", reg.lookup,
                       "print only rows with this exact name");
    reg.cfg.add_flag(sub, "--json", reg.as_json, "print the raw JSON document");
    sub->callback([&] {
      reg.cfg.merge();
      if (reg.as_json) {
        std::cout << inference_registry_json();
        return;
      }
      const std::vector<InferenceInfo> rows =
          reg.lookup.empty() ? inference_registry() : registry_lookup(reg.lookup);
      for (const InferenceInfo& info : rows) {
        std::cout << info.name << " | " << info.category << " | ";
        for (size_t i = 0; i < info.sensors.size(); ++i) {
          if (i > 0) std::cout << ", ";
          std::cout << info.sensors[i];
        }
        std::cout << "\n";
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    std::cerr << "ERROR cli-parse: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "ERROR internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("deeprotect");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace deeprotect
