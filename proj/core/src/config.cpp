#include "looppnr/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

namespace looppnr {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!object.is_object()) {
    throw InvalidArgument("config: " + where + " must be an object");
  }
  for (const auto& item : object.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) {
      throw InvalidArgument("config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <class T>
void read(const json& object, const char* key, T& target, const std::string& where) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument("config: bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

json prior_to_json(const PriorKind& prior) {
  if (std::holds_alternative<UniformPrior>(prior)) return {{"kind", "uniform"}};
  if (const auto* p = std::get_if<PoissonPrior>(&prior)) return {{"kind", "poisson"}, {"mean", p->mean}};
  if (const auto* p = std::get_if<TwoPointPrior>(&prior)) {
    return {{"kind", "two_point"}, {"n1", p->n1}, {"n2", p->n2}, {"p1", p->p1}};
  }
  return {{"kind", "custom"}, {"weights", std::get<CustomPrior>(prior).weights}};
}

PriorKind prior_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "mean", "n1", "n2", "p1", "weights"}, "prior");
  std::string kind = "uniform";
  read(j, "kind", kind, "prior");
  if (kind == "uniform") return UniformPrior{};
  if (kind == "poisson") {
    PoissonPrior p;
    read(j, "mean", p.mean, "prior");
    return p;
  }
  if (kind == "two_point") {
    TwoPointPrior p;
    read(j, "n1", p.n1, "prior");
    read(j, "n2", p.n2, "prior");
    read(j, "p1", p.p1, "prior");
    return p;
  }
  if (kind == "custom") {
    CustomPrior p;
    read(j, "weights", p.weights, "prior");
    return p;
  }
  throw InvalidArgument("config: unknown prior kind '" + kind + "'");
}

json policy_to_json(const PolicySpec& p) {
  if (p.kind == PolicySpec::Kind::passive) return {{"kind", "passive"}, {"epsilon", p.epsilon}};
  return {{"kind", "adaptive"}, {"grid_min", p.grid_min}, {"grid_max", p.grid_max}, {"grid_points", p.grid_points}};
}

PolicySpec policy_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "epsilon", "grid_min", "grid_max", "grid_points"}, "policy");
  std::string kind;
  read(j, "kind", kind, "policy");
  PolicySpec spec;
  if (kind == "passive") {
    spec = PolicySpec::passive(0.02);
    read(j, "epsilon", spec.epsilon, "policy");
  } else if (kind == "adaptive") {
    spec = PolicySpec::adaptive();
    read(j, "grid_min", spec.grid_min, "policy");
    read(j, "grid_max", spec.grid_max, "policy");
    read(j, "grid_points", spec.grid_points, "policy");
  } else {
    throw InvalidArgument("config: policy kind must be 'passive' or 'adaptive', got '" + kind + "'");
  }
  return spec;
}

json to_json(const RunConfig& c) {
  const EnsembleConfig& e = c.ensemble;
  json policies = json::array();
  for (const auto& p : e.policies) policies.push_back(policy_to_json(p));
  json stop = {{"n_threshold", e.n_threshold}, {"max_rounds", nullptr}};
  if (e.max_rounds) stop["max_rounds"] = *e.max_rounds;
  return {
      {"params", {{"eta", e.params.eta}, {"gamma", e.params.gamma}, {"nu", e.params.nu}, {"n_max", e.params.n_max}}},
      {"prior", prior_to_json(e.prior)},
      {"policies", policies},
      {"n0_values", e.n0_values},
      {"n_trials", e.n_trials},
      {"stop", stop},
      {"master_seed", e.master_seed},
      {"trace", e.record_info_trace},
      {"output_dir", c.output_dir},
      {"dump_belief", c.dump_belief},
      {"threads", c.threads},
      {"eta_values", c.eta_values},
  };
}

RunConfig from_json(const json& j) {
  reject_unknown_keys(j,
                      {"params", "prior", "policies", "n0_values", "n_trials", "stop", "master_seed", "trace",
                       "output_dir", "dump_belief", "threads", "eta_values"},
                      "config");
  RunConfig c;
  EnsembleConfig& e = c.ensemble;
  if (j.contains("params")) {
    const json& p = j.at("params");
    reject_unknown_keys(p, {"eta", "gamma", "nu", "n_max"}, "params");
    read(p, "eta", e.params.eta, "params");
    read(p, "gamma", e.params.gamma, "params");
    read(p, "nu", e.params.nu, "params");
    read(p, "n_max", e.params.n_max, "params");
  }
  if (j.contains("prior")) e.prior = prior_from_json(j.at("prior"));
  if (j.contains("policies")) {
    const json& list = j.at("policies");
    if (!list.is_array()) throw InvalidArgument("config: policies must be an array");
    e.policies.clear();
    for (const auto& p : list) e.policies.push_back(policy_from_json(p));
  }
  read(j, "n0_values", e.n0_values, "config");
  read(j, "n_trials", e.n_trials, "config");
  if (j.contains("stop")) {
    const json& s = j.at("stop");
    reject_unknown_keys(s, {"n_threshold", "max_rounds"}, "stop");
    read(s, "n_threshold", e.n_threshold, "stop");
    if (s.contains("max_rounds") && !s.at("max_rounds").is_null()) {
      std::size_t rounds = 0;
      read(s, "max_rounds", rounds, "stop");
      e.max_rounds = rounds;
    }
  }
  read(j, "master_seed", e.master_seed, "config");
  read(j, "trace", e.record_info_trace, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "dump_belief", c.dump_belief, "config");
  read(j, "threads", c.threads, "config");
  read(j, "eta_values", c.eta_values, "config");
  return c;
}

}  // namespace

void RunConfig::validate() const {
  ensemble.validate();
  for (double eta : eta_values) require_probability(eta, "eta_values entry");
  if (output_dir.empty()) throw InvalidArgument("config: output_dir must not be empty");
}

std::string to_json_text(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunConfig run_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("config: cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_json_text(buffer.str());
}

}  // namespace looppnr
