#include "corenet/serialize.hpp"

#include <cstdio>
#include <set>

#include <zlib.h>

#include "corenet/error.hpp"

namespace corenet {

std::string digest_bytes(std::string_view bytes) {
  const auto crc = crc32_z(0L, reinterpret_cast<const Bytef*>(bytes.data()), bytes.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return std::string("crc32:") + buf;
}

std::string digest(const Json& value) { return digest_bytes(value.dump()); }

std::string digest(const Dataset& data) {
  std::string bytes;
  const auto& f = data.features.data();
  bytes.append(reinterpret_cast<const char*>(f.data()), f.size() * sizeof(double));
  bytes.append(reinterpret_cast<const char*>(data.labels.data()), data.labels.size() * sizeof(int));
  return digest_bytes(bytes);
}

Json to_json(const CompressionConfig& c) {
  Json j;
  j["epsilon"] = c.epsilon;
  j["delta"] = c.delta;
  j["mode"] = to_string(c.mode);
  j["k"] = c.constants.k;
  j["k_prime"] = c.constants.k_prime;
  if (const auto* b = std::get_if<BudgetSizing>(&c.sizing)) {
    j["sizing"] = "budget";
    j["fraction"] = b->fraction;
  } else {
    j["sizing"] = "theory";
  }
  j["seed"] = c.seed;
  j["n_points"] = c.generalize_points ? Json(*c.generalize_points) : Json(nullptr);
  j["sampling"] = c.scheme == SamplingScheme::kUniform ? "uniform" : "sensitivity";
  j["recompute_hatted"] = c.recompute_hatted;
  j["max_trials"] = c.max_amplification_trials;
  j["delta_cap"] = c.delta_options.cap;
  return j;
}

Json to_json(const EpsilonSchedule& s) {
  return Json{{"epsilon", s.epsilon},
              {"delta", s.delta},
              {"epsilon_prime", s.epsilon_prime},
              {"layer_epsilon", s.layer_epsilon}};
}

Json to_json(const DeltaEstimates& d) {
  return Json{{"kappa", d.kappa}, {"per_layer", d.per_layer}, {"per_neuron", d.per_neuron}};
}

namespace {

Json budget_json(const ClassBudget& b) {
  Json j{{"kind", to_string(b.kind)}};
  if (b.kind == ClassBudget::Kind::kSample) j["m"] = b.draws;
  return j;
}

Json edges_json(const EdgeSensitivities& e) {
  return Json{{"edges", e.edges},
              {"sensitivity", e.sensitivity},
              {"total", e.total},
              {"inactive", e.inactive}};
}

}  // namespace

Json to_json(const CompressionPlan& p) {
  Json neurons = Json::array();
  for (const auto& layer : p.neurons) {
    Json l = Json::array();
    for (const auto& n : layer) {
      l.push_back(Json{{"positive", budget_json(n.positive)}, {"negative", budget_json(n.negative)}});
    }
    neurons.push_back(std::move(l));
  }
  return Json{{"subsample", p.subsample},
              {"holdout", p.holdout},
              {"sampling_delta", p.sampling_delta},
              {"required_subsample", p.required_subsample},
              {"schedule", to_json(p.schedule)},
              {"delta_hat", to_json(p.delta_hat)},
              {"neurons", std::move(neurons)},
              {"tau_formula", p.formula_trials},
              {"tau_used", p.trials_used},
              {"m_per_sign", p.duplicate_draws_per_sign ? "duplicated" : "split"}};
}

Json to_json(const SensitivityProfile& profile) {
  Json layers = Json::array();
  for (const auto& layer : profile.layers) {
    Json ns = Json::array();
    for (const auto& n : layer.neurons) {
      Json j{{"positive", edges_json(n.positive)},
             {"negative", edges_json(n.negative)},
             {"point_count", n.point_count}};
      if (n.bias) j["bias"] = n.bias->value;
      ns.push_back(std::move(j));
    }
    layers.push_back(Json{{"signed_inputs", layer.signed_inputs}, {"neurons", std::move(ns)}});
  }
  return Json{{"sample_points", profile.sample_points}, {"layers", std::move(layers)}};
}

Json to_json(const CompressionStats& s) {
  return Json{{"original_size", s.original_size},
              {"compressed_size", s.compressed_size},
              {"original_layer_nnz", s.original_layer_nnz},
              {"layer_nnz", s.layer_nnz},
              {"pruned_neurons", s.pruned_neurons},
              {"no_compression", s.no_compression},
              {"warnings",
               {{"delta_capped", s.delta_capped},
                {"uniform_fallback", s.uniform_fallback},
                {"skipped_points", s.skipped_points},
                {"amplification_fallback", s.amplification_fallback},
                {"inactive_neurons", s.inactive_neurons}}}};
}

Json to_json(const SweepConfig& c) {
  Json schemes = Json::array();
  for (Scheme s : c.schemes) schemes.push_back(to_string(s));
  return Json{{"schemes", schemes},
              {"fractions", c.fractions},
              {"trials", c.trials},
              {"base", to_json(c.base)}};
}

Json to_json(const CompressionReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    Json j{{"scheme", p.scheme},
           {"fraction", p.fraction},
           {"trial_count", p.trial_count},
           {"size", p.size},
           {"err_mean", p.err_mean},
           {"err_std", p.err_std},
           {"accdrop_mean", p.accdrop_mean},
           {"accdrop_std", p.accdrop_std}};
    if (p.error) j["error"] = *p.error;
    points.push_back(std::move(j));
  }
  return Json{{"points", std::move(points)},
              {"trials", r.trials},
              {"original_size", r.original_size},
              {"provenance",
               {{"network", r.network_digest}, {"data", r.data_digest}, {"config", r.config_digest}}}};
}

Json compression_report(const CompressionOutcome& o, const CompressionConfig& config) {
  const auto& p = o.plan;
  Json pruned = Json::array();
  for (const auto& layer : o.compressed.pruned) {
    Json l = Json::array();
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (layer[i]) l.push_back(i);
    }
    pruned.push_back(std::move(l));
  }
  Json j = to_json(o.stats);
  j["mode"] = to_string(config.mode);
  j["sampling"] = config.scheme == SamplingScheme::kUniform ? "uniform" : "sensitivity";
  j["plan"] = Json{{"subsample_size", p.subsample.size()},
                   {"holdout_size", p.holdout.size()},
                   {"sampling_delta", p.sampling_delta},
                   {"k", config.constants.k},
                   {"k_prime", config.constants.k_prime},
                   {"lambda_star", config.constants.lambda_star()},
                   {"kappa", p.delta_hat.kappa},
                   {"delta_hat", p.delta_hat.per_layer},
                   {"schedule", to_json(p.schedule)},
                   {"tau_formula", p.formula_trials},
                   {"tau_used", p.trials_used},
                   {"m_per_sign", p.duplicate_draws_per_sign ? "duplicated" : "split"}};
  j["pruned"] = std::move(pruned);
  j["provenance"] = Json{{"config", o.compressed.config_digest},
                         {"plan", o.compressed.plan_digest},
                         {"seed", o.compressed.seed}};
  return j;
}

void apply_json(const Json& v, CompressionConfig& c) {
  if (!v.is_object()) throw Error(ErrorKind::kFormat, "config: expected a JSON object");
  static const std::set<std::string> known = {
      "epsilon", "eps", "delta", "mode", "k", "k_prime", "kprime", "fraction", "sizing", "seed",
      "n_points", "sampling", "recompute_hatted", "max_trials", "delta_cap", "jobs"};
  try {
    for (const auto& [key, value] : v.items()) {
      if (!known.count(key)) throw Error(ErrorKind::kFormat, "config: unknown key " + key);
    }
    if (v.contains("epsilon")) c.epsilon = v["epsilon"].get<double>();
    if (v.contains("eps")) c.epsilon = v["eps"].get<double>();
    if (v.contains("delta")) c.delta = v["delta"].get<double>();
    if (v.contains("mode")) c.mode = parse_mode(v["mode"].get<std::string>());
    if (v.contains("k")) c.constants.k = v["k"].get<double>();
    if (v.contains("k_prime")) c.constants.k_prime = v["k_prime"].get<double>();
    if (v.contains("kprime")) c.constants.k_prime = v["kprime"].get<double>();
    if (v.contains("sizing") && v["sizing"].get<std::string>() == "theory") c.sizing = TheorySizing{};
    if (v.contains("fraction")) c.sizing = BudgetSizing{v["fraction"].get<double>()};
    if (v.contains("seed")) c.seed = v["seed"].get<std::uint64_t>();
    if (v.contains("n_points") && !v["n_points"].is_null()) {
      c.generalize_points = v["n_points"].get<std::size_t>();
    }
    if (v.contains("sampling")) {
      c.scheme = v["sampling"].get<std::string>() == "uniform" ? SamplingScheme::kUniform
                                                               : SamplingScheme::kSensitivity;
    }
    if (v.contains("recompute_hatted")) c.recompute_hatted = v["recompute_hatted"].get<bool>();
    if (v.contains("max_trials")) c.max_amplification_trials = v["max_trials"].get<std::size_t>();
    if (v.contains("delta_cap")) c.delta_options.cap = v["delta_cap"].get<double>();
    if (v.contains("jobs")) c.jobs = v["jobs"].get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("config: ") + e.what());
  }
}

}  // namespace corenet
