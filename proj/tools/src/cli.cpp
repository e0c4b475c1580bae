#include "corenet/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "corenet/compressor.hpp"
#include "corenet/dataset.hpp"
#include "corenet/error.hpp"
#include "corenet/eval.hpp"
#include "corenet/log.hpp"
#include "corenet/nnw1.hpp"
#include "corenet/serialize.hpp"
#include "corenet/trainer.hpp"

namespace corenet::cli {

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  other failure (including a failed --verify)\n"
    "  2  input file not found\n"
    "  3  malformed file, checksum mismatch or shape mismatch\n"
    "  4  usage error: unknown flag or invalid value\n"
    "  5  computation failed (too little data, divergence, no convergence)\n"
    "Errors are reported on stderr as one line:\n"
    "  corenet-error code=<n> kind=<kind> message=\"<text>\"";

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return kNotFound;
    case ErrorKind::kFormat:
    case ErrorKind::kChecksum:
    case ErrorKind::kDimensionMismatch: return kBadFormat;
    case ErrorKind::kInvalidArgument: return kUsage;
    case ErrorKind::kConvergence:
    case ErrorKind::kDivergence:
    case ErrorKind::kInsufficientData:
    case ErrorKind::kNoPositiveMass: return kComputation;
  }
  return kFailure;
}

std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void report_error(std::ostream& err, int code, std::string_view kind, std::string_view message) {
  err << "corenet-error code=" << code << " kind=" << kind << " message=" << quoted(message)
      << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kNotFound, "cannot write: " + path);
  f << text;
  if (!f) throw Error(ErrorKind::kNotFound, "write failed: " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kNotFound, "file not found: " + path);
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, path + ": " + e.what());
  }
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidArgument, "bad layer size: " + item);
    }
  }
  if (out.size() < 2) throw Error(ErrorKind::kInvalidArgument, "architecture needs >= 2 layers");
  return out;
}

double parse_double(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidArgument, "not a number: " + text);
  }
}

// Flags shared by compress, sweep and bound. Only flags actually given
// override the config file.
struct ConfigFlags {
  std::string config_path;
  double eps = 0.5;
  double delta = 0.1;
  std::string mode = "corenet";
  double k = 2.0;
  double kprime = 2.0;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t n_points = 1;
  std::size_t max_trials = 25;
  bool recompute_hatted = false;

  CLI::Option* o_eps = nullptr;
  CLI::Option* o_delta = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_kprime = nullptr;
  CLI::Option* o_fraction = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_jobs = nullptr;
  CLI::Option* o_n_points = nullptr;
  CLI::Option* o_max_trials = nullptr;
  CLI::Option* o_recompute = nullptr;

  void attach(CLI::App* app, bool with_mode) {
    app->add_option("--config", config_path, "JSON config; flags given on the command line win");
    o_eps = app->add_option("--eps", eps, "relative error target in (0, 1]");
    o_delta = app->add_option("--delta", delta, "failure probability in (0, 1)");
    if (with_mode) o_mode = app->add_option("--mode", mode, "corenet | corenet+ | corenet++");
    o_k = app->add_option("--k", k, "constant K");
    o_kprime = app->add_option("--kprime", kprime, "constant K'");
    if (with_mode) o_fraction = app->add_option("--fraction", fraction, "keep this share of nonzeros (budget sizing)");
    o_seed = app->add_option("--seed", seed, "random seed");
    o_jobs = app->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    o_n_points = app->add_option("--n-points", n_points, "extend the guarantee to this many points")
                     ->check(CLI::PositiveNumber);
    o_max_trials = app->add_option("--max-trials", max_trials, "cap on amplification trials")
                       ->check(CLI::PositiveNumber);
    o_recompute = app->add_flag("--recompute-hatted", recompute_hatted,
                                "recompute sensitivities through compressed layers");
  }

  CompressionConfig build() const {
    CompressionConfig c;
    if (!config_path.empty()) apply_json(read_json(config_path), c);
    const auto given = [](CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(o_eps)) c.epsilon = eps;
    if (given(o_delta)) c.delta = delta;
    if (given(o_mode)) c.mode = parse_mode(mode);
    if (given(o_k)) c.constants.k = k;
    if (given(o_kprime)) c.constants.k_prime = kprime;
    if (given(o_fraction)) c.sizing = BudgetSizing{fraction};
    if (given(o_seed)) c.seed = seed;
    if (given(o_jobs)) c.jobs = jobs;
    if (given(o_n_points)) c.generalize_points = n_points;
    if (given(o_max_trials)) c.max_amplification_trials = max_trials;
    if (given(o_recompute)) c.recompute_hatted = recompute_hatted;
    c.validate();
    return c;
  }
};

struct TrainArgs {
  std::string data;
  std::string synth;
  std::size_t n = 3000;
  std::string arch;
  std::string out;
  TrainConfig cfg;
};

struct SynthArgs {
  std::string kind = "digits";
  std::size_t n = 3000;
  std::uint64_t seed = 0;
  int classes = 10;
  std::size_t dim = 16;
  double separation = 4.0;
  std::string out;
};

Dataset make_synthetic(const std::string& kind, std::size_t n, std::uint64_t seed, int classes,
                       std::size_t dim, double separation) {
  if (kind == "digits") return make_digits(n, seed);
  if (kind == "blobs") return make_blobs(n, classes, dim, separation, seed);
  throw Error(ErrorKind::kInvalidArgument, "unknown synthetic kind: " + kind);
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Dataset d = make_synthetic(a.kind, a.n, a.seed, a.classes, a.dim, a.separation);
  save_csv(d, a.out);
  out << Json{{"rows", d.size()}, {"dim", d.dim()}, {"classes", d.num_classes}}.dump() << '\n';
  return kOk;
}

int cmd_train(TrainArgs& a, std::ostream& out) {
  Dataset data = !a.data.empty() ? load_csv(a.data) : make_digits(a.n, a.cfg.seed);
  assign_splits(data, SplitFractions{}, a.cfg.seed);
  std::vector<std::size_t> sizes = a.arch.empty()
                                       ? std::vector<std::size_t>{data.dim(), 64, 32,
                                                                  static_cast<std::size_t>(data.num_classes)}
                                       : parse_sizes(a.arch);
  TrainLog log;
  const Network net = train(sizes, data, a.cfg, &log);
  save_weights(net, a.out);
  const double test_acc = accuracy(net, data.split(Split::kTest));
  out << Json{{"train_accuracy", log.train_accuracy},
              {"test_accuracy", test_acc},
              {"final_loss", log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back()}}
             .dump()
      << '\n';
  return kOk;
}

struct CompressArgs {
  std::string weights;
  std::string data;
  std::string out;
  std::string report;
  std::string dump_sensitivities;
  std::string dump_plan;
  ConfigFlags flags;
};

int cmd_compress(const CompressArgs& a, std::ostream& out) {
  const CompressionConfig cfg = a.flags.build();
  const Network net = load_weights(a.weights);
  const Dataset data = load_csv(a.data);
  const CompressionOutcome o = compress(net, data.features, cfg);
  save_weights(o.compressed.network, a.out);
  const Json report = compression_report(o, cfg);
  if (!a.report.empty()) {
    write_json(a.report, report);
  } else {
    out << report.dump(2) << '\n';
  }
  if (!a.dump_sensitivities.empty()) {
    write_json(a.dump_sensitivities, Json{{"profile", to_json(o.profile)},
                                          {"delta_hat", to_json(o.plan.delta_hat)}});
  }
  if (!a.dump_plan.empty()) write_json(a.dump_plan, to_json(o.plan));
  return kOk;
}

struct SweepArgs {
  std::string weights;
  std::string data;
  std::string schemes = "corenet,uniform";
  std::string fractions = "0.1..1.0";
  std::size_t trials = 1;
  double validation_fraction = 0.5;
  std::string out_json;
  std::string out_csv;
  ConfigFlags flags;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  SweepConfig sc;
  sc.base = a.flags.build();
  sc.jobs = sc.base.jobs;
  sc.trials = a.trials;
  sc.fractions = parse_fractions(a.fractions);
  std::stringstream ss(a.schemes);
  std::string item;
  while (std::getline(ss, item, ',')) sc.schemes.push_back(parse_scheme(item));
  const Network net = load_weights(a.weights);
  Dataset data = load_csv(a.data);
  if (!(a.validation_fraction > 0.0 && a.validation_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "validation fraction must be in (0, 1)");
  }
  assign_splits(data, SplitFractions{0.0, a.validation_fraction}, sc.base.seed);
  const CompressionReport report = sweep(net, data, sc);
  const Json j = to_json(report);
  if (!a.out_json.empty()) {
    write_json(a.out_json, j);
  } else {
    out << j.dump(2) << '\n';
  }
  if (!a.out_csv.empty()) write_text(a.out_csv, report_csv(report));
  return kOk;
}

struct EvalArgs {
  std::string original;
  std::string compressed;
  std::string data;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const Network original = load_weights(a.original);
  const Network compressed = load_weights(a.compressed);
  const Dataset data = load_csv(a.data);
  const double acc_o = accuracy(original, data);
  const double acc_c = accuracy(compressed, data);
  out << Json{{"relative_error", relative_error(compressed, original, data.features)},
              {"accuracy_original", acc_o},
              {"accuracy_compressed", acc_c},
              {"accuracy_drop", acc_o - acc_c},
              {"size_original", size_of(original)},
              {"size_compressed", size_of(compressed)}}
             .dump(2)
      << '\n';
  return kOk;
}

struct BoundArgs {
  std::string weights;
  std::string data;
  double gamma = 1.0;
  ConfigFlags flags;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  if (!(a.gamma > 0.0)) throw Error(ErrorKind::kInvalidArgument, "gamma must be > 0");
  CompressionConfig cfg = a.flags.build();
  cfg.mode = CompressionMode::kCoreNet;
  const Network net = load_weights(a.weights);
  const Dataset data = load_csv(a.data);
  const CompressionOutcome o = compress(net, data.features, cfg);
  const GeneralizationBoundInput in = bound_input(net, data, a.gamma, o);
  const double bound = generalization_bound(in);
  out << Json{{"bound", bound},
              {"margin_loss", in.margin_loss},
              {"radical", bound - in.margin_loss},
              {"gamma", in.gamma},
              {"n", in.n},
              {"max_output_norm_sq", in.max_output_norm_sq},
              {"delta_products", in.delta_products},
              {"sensitivity_sums", in.sensitivity_sums},
              {"convention", kBoundConvention}}
             .dump(2)
      << '\n';
  return kOk;
}

struct ConvertArgs {
  std::string data;
  std::string weights;
  std::string verify;
  std::string out;
};

Json verify_sidecar(const Network& net, const Json& side) {
  if (!side.contains("inputs") || !side.contains("outputs")) {
    throw Error(ErrorKind::kFormat, "sidecar needs inputs and outputs");
  }
  const double tol = side.value("tolerance", 1e-5);
  std::vector<std::vector<double>> inputs, outputs;
  try {
    inputs = side["inputs"].get<std::vector<std::vector<double>>>();
    outputs = side["outputs"].get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("sidecar: ") + e.what());
  }
  if (inputs.size() != outputs.size()) throw Error(ErrorKind::kFormat, "sidecar: inputs vs outputs");
  double worst = 0.0;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    if (inputs[p].size() != net.input_dim() || outputs[p].size() != net.output_dim()) {
      throw Error(ErrorKind::kDimensionMismatch, "sidecar: vector size does not match network");
    }
    const Vector got = evaluate(net, inputs[p]);
    for (std::size_t i = 0; i < got.size(); ++i) {
      worst = std::max(worst, std::abs(got[i] - outputs[p][i]));
    }
  }
  return Json{{"points", inputs.size()}, {"max_abs_diff", worst}, {"tolerance", tol},
              {"verified", worst <= tol}};
}

int cmd_convert(const ConvertArgs& a, std::ostream& out, std::ostream& err) {
  if (a.data.empty() && a.weights.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "convert needs --data or --weights");
  }
  Json result = Json::object();
  int code = kOk;
  if (!a.data.empty()) {
    const Dataset d = load_csv(a.data);
    result["data"] = Json{{"rows", d.size()}, {"dim", d.dim()}, {"classes", d.num_classes},
                          {"digest", digest(d)}};
  }
  if (!a.weights.empty()) {
    const Network net = load_weights(a.weights);
    Json layers = Json::array();
    for (const auto& w : net.weights()) {
      layers.push_back(Json{{"rows", w.rows()}, {"cols", w.cols()}, {"nnz", w.nnz()}});
    }
    result["weights"] = Json{{"layer_sizes", net.layer_sizes()}, {"layers", layers},
                             {"size", size_of(net)}};
    if (!a.verify.empty()) {
      result["verify"] = verify_sidecar(net, read_json(a.verify));
      if (!result["verify"]["verified"].get<bool>()) {
        report_error(err, kFailure, "verification",
                     "outputs differ from sidecar by " +
                         std::to_string(result["verify"]["max_abs_diff"].get<double>()));
        code = kFailure;
      }
    }
    if (!a.out.empty()) save_weights(net, a.out);
  }
  out << result.dump(2) << '\n';
  return code;
}

}  // namespace

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const double lo = parse_double(text.substr(0, dots));
    std::string rest = text.substr(dots + 2);
    double step = 0.1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = parse_double(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const double hi = parse_double(rest);
    if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorKind::kInvalidArgument, "bad range: " + text);
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  }
  for (double f : out) {
    if (!(f > 0.0 && f <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "fraction outside (0, 1]: " + text);
  }
  if (out.empty()) throw Error(ErrorKind::kInvalidArgument, "no fractions given");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coreset-based sparsification of ReLU networks", "corenet"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "write a synthetic labeled CSV dataset");
  s_synth->add_option("--kind", synth.kind, "digits | blobs");
  s_synth->add_option("--n", synth.n, "number of points")->check(CLI::PositiveNumber);
  s_synth->add_option("--seed", synth.seed, "random seed");
  s_synth->add_option("--classes", synth.classes, "blob classes")->check(CLI::PositiveNumber);
  s_synth->add_option("--dim", synth.dim, "blob dimension")->check(CLI::PositiveNumber);
  s_synth->add_option("--separation", synth.separation, "blob center radius");
  s_synth->add_option("--out", synth.out, "output CSV")->required();

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "train a ReLU network and write NNW1");
  s_train->add_option("--data", tr.data, "labeled CSV (default: synthetic digits)");
  s_train->add_option("--n", tr.n, "synthetic points when --data is absent");
  s_train->add_option("--arch", tr.arch, "layer sizes, e.g. 64,64,32,10");
  s_train->add_option("--epochs", tr.cfg.epochs, "epochs");
  s_train->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate");
  s_train->add_option("--batch", tr.cfg.batch_size, "batch size")->check(CLI::PositiveNumber);
  s_train->add_option("--seed", tr.cfg.seed, "random seed");
  s_train->add_option("--out", tr.out, "output NNW1")->required();

  CompressArgs ca;
  auto* s_compress = app.add_subcommand("compress", "sparsify a network");
  s_compress->add_option("--weights", ca.weights, "input NNW1")->required();
  s_compress->add_option("--data", ca.data, "validation CSV")->required();
  s_compress->add_option("--out", ca.out, "output NNW1")->required();
  s_compress->add_option("--report", ca.report, "report JSON (default: stdout)");
  s_compress->add_option("--dump-sensitivities", ca.dump_sensitivities, "write sensitivities JSON");
  s_compress->add_option("--dump-plan", ca.dump_plan, "write the compression plan JSON");
  ca.flags.attach(s_compress, true);

  SweepArgs sw;
  auto* s_sweep = app.add_subcommand("sweep", "compare schemes over retained fractions");
  s_sweep->add_option("--weights", sw.weights, "input NNW1")->required();
  s_sweep->add_option("--data", sw.data, "labeled CSV, split into validation and test")->required();
  s_sweep->add_option("--schemes", sw.schemes, "corenet,corenet+,corenet++,uniform,l1,l2,l1l2,svd");
  s_sweep->add_option("--fractions", sw.fractions, "0.1..1.0, a..b:step or a comma list");
  s_sweep->add_option("--trials", sw.trials, "trials per cell")->check(CLI::PositiveNumber);
  s_sweep->add_option("--validation-fraction", sw.validation_fraction, "share used for compression");
  s_sweep->add_option("--out-json", sw.out_json, "report JSON (default: stdout)");
  s_sweep->add_option("--out-csv", sw.out_csv, "report CSV");
  sw.flags.attach(s_sweep, false);

  EvalArgs ev;
  auto* s_eval = app.add_subcommand("eval", "compare two networks on a labeled CSV");
  s_eval->add_option("--original", ev.original, "reference NNW1")->required();
  s_eval->add_option("--compressed", ev.compressed, "compressed NNW1")->required();
  s_eval->add_option("--data", ev.data, "labeled CSV")->required();

  BoundArgs bd;
  auto* s_bound = app.add_subcommand("bound", "generalization-bound diagnostic");
  s_bound->add_option("--weights", bd.weights, "input NNW1")->required();
  s_bound->add_option("--data", bd.data, "labeled CSV")->required();
  s_bound->add_option("--gamma", bd.gamma, "margin, > 0");
  bd.flags.attach(s_bound, false);

  ConvertArgs cv;
  auto* s_convert = app.add_subcommand("convert", "check a CSV dataset or an NNW1 file");
  s_convert->add_option("--data", cv.data, "CSV to check");
  s_convert->add_option("--weights", cv.weights, "NNW1 to check");
  s_convert->add_option("--verify", cv.verify, "sidecar JSON with inputs, outputs, tolerance");
  s_convert->add_option("--out", cv.out, "re-encode the NNW1 here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    report_error(err, kUsage, "usage", e.what());
    return kUsage;
  }

  try {
    if (s_synth->parsed()) return cmd_synth(synth, out);
    if (s_train->parsed()) return cmd_train(tr, out);
    if (s_compress->parsed()) return cmd_compress(ca, out);
    if (s_sweep->parsed()) return cmd_sweep(sw, out);
    if (s_eval->parsed()) return cmd_eval(ev, out);
    if (s_bound->parsed()) return cmd_bound(bd, out);
    if (s_convert->parsed()) return cmd_convert(cv, out, err);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    report_error(err, code, to_string(e.kind()), e.what());
    return code;
  } catch (const std::exception& e) {
    report_error(err, kFailure, "internal", e.what());
    return kFailure;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace corenet::cli
