#include "wdru/config.hpp"

#include "wdru/active_learning.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace wdru {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

// Shortest text that parses back to the same double.
std::string real_text(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += real_text(xs[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += xs[i];
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

const char* policy_name(RadiusPolicy p) {
  switch (p) {
    case RadiusPolicy::kFixed: return "fixed";
    case RadiusPolicy::kAsRobustAsPossible: return "as-robust-as-possible";
    case RadiusPolicy::kMinRadiusPlusDelta: return "min-radius-plus-delta";
    case RadiusPolicy::kFractionOfTrueDistance: return "fraction-of-true-distance";
  }
  return "unknown";
}

struct Entry {
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Access>
Entry real_entry(std::string name, Access access) {
  return {name, [=](ExperimentConfig& c, const std::string& v) { access(c) = to_real(name, v); },
          [=](const ExperimentConfig& c) { return real_text(access(const_cast<ExperimentConfig&>(c))); }};
}

template <typename Access>
Entry uint_entry(std::string name, Access access) {
  return {name,
          [=](ExperimentConfig& c, const std::string& v) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(to_uint(name, v));
          },
          [=](const ExperimentConfig& c) { return std::to_string(access(const_cast<ExperimentConfig&>(c))); }};
}

template <typename Access>
Entry bool_entry(std::string name, Access access) {
  return {name, [=](ExperimentConfig& c, const std::string& v) { access(c) = to_bool(name, v); },
          [=](const ExperimentConfig& c) {
            return std::string(access(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          }};
}

template <typename Access>
Entry string_entry(std::string name, Access access) {
  return {name, [=](ExperimentConfig& c, const std::string& v) { access(c) = v; },
          [=](const ExperimentConfig& c) { return access(const_cast<ExperimentConfig&>(c)); }};
}

void add_solver_entries(std::vector<Entry>& e, const std::string& prefix, SolverConfig ExperimentConfig::*member) {
  auto s = [member](ExperimentConfig& c) -> SolverConfig& { return c.*member; };
  e.push_back(real_entry(prefix + "step_size", [s](ExperimentConfig& c) -> double& { return s(c).step_size; }));
  e.push_back(uint_entry(prefix + "batch_size", [s](ExperimentConfig& c) -> std::size_t& { return s(c).batch_size; }));
  e.push_back({prefix + "update_rule",
               [s, prefix](ExperimentConfig& c, const std::string& v) {
                 if (v == "adam") {
                   s(c).update_rule = UpdateRule::kAdam;
                 } else if (v == "sgd") {
                   s(c).update_rule = UpdateRule::kSgd;
                 } else {
                   throw ConfigError(prefix + "update_rule: expected adam or sgd");
                 }
               },
               [s](const ExperimentConfig& c) {
                 return std::string(s(const_cast<ExperimentConfig&>(c)).update_rule == UpdateRule::kAdam ? "adam"
                                                                                                          : "sgd");
               }});
  e.push_back(real_entry(prefix + "adam_beta1", [s](ExperimentConfig& c) -> double& { return s(c).adam_beta1; }));
  e.push_back(real_entry(prefix + "adam_beta2", [s](ExperimentConfig& c) -> double& { return s(c).adam_beta2; }));
  e.push_back(real_entry(prefix + "adam_epsilon", [s](ExperimentConfig& c) -> double& { return s(c).adam_epsilon; }));
  e.push_back(
      real_entry(prefix + "lr_decay_factor", [s](ExperimentConfig& c) -> double& { return s(c).lr_decay_factor; }));
  e.push_back(
      uint_entry(prefix + "lr_decay_every", [s](ExperimentConfig& c) -> std::size_t& { return s(c).lr_decay_every; }));
  e.push_back(uint_entry(prefix + "max_steps", [s](ExperimentConfig& c) -> std::size_t& { return s(c).max_steps; }));
  e.push_back(uint_entry(prefix + "min_steps", [s](ExperimentConfig& c) -> std::size_t& { return s(c).min_steps; }));
  e.push_back(
      real_entry(prefix + "convergence_tol", [s](ExperimentConfig& c) -> double& { return s(c).convergence_tol; }));
  e.push_back(uint_entry(prefix + "convergence_window",
                         [s](ExperimentConfig& c) -> std::size_t& { return s(c).convergence_window; }));
  e.push_back(uint_entry(prefix + "eval_every", [s](ExperimentConfig& c) -> std::size_t& { return s(c).eval_every; }));
  e.push_back(string_entry(prefix + "trace_path", [s](ExperimentConfig& c) -> std::string& { return s(c).trace_path; }));
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    using C = ExperimentConfig;
    std::vector<Entry> e;
    e.push_back({"kind", [](C& c, const std::string& v) { c.kind = parse_kind(v); },
                 [](const C& c) { return std::string(to_string(c.kind)); }});
    e.push_back(string_entry("dataset", [](C& c) -> std::string& { return c.dataset; }));
    e.push_back(string_entry("label_column", [](C& c) -> std::string& { return c.label_column; }));
    e.push_back(string_entry("positive_token", [](C& c) -> std::string& { return c.positive_token; }));
    e.push_back(bool_entry("standardize", [](C& c) -> bool& { return c.standardize; }));
    e.push_back(uint_entry("synthetic_rows", [](C& c) -> std::size_t& { return c.synthetic_rows; }));
    e.push_back(uint_entry("synthetic_dim", [](C& c) -> std::size_t& { return c.synthetic_dim; }));
    e.push_back(real_entry("synthetic_separation", [](C& c) -> double& { return c.synthetic_separation; }));
    e.push_back(uint_entry("synthetic_seed", [](C& c) -> std::uint64_t& { return c.synthetic_seed; }));
    e.push_back(uint_entry("seed", [](C& c) -> std::uint64_t& { return c.seed; }));
    e.push_back(uint_entry("trials", [](C& c) -> std::size_t& { return c.trials; }));
    e.push_back(uint_entry("threads", [](C& c) -> std::size_t& { return c.threads; }));
    e.push_back(string_entry("output", [](C& c) -> std::string& { return c.output; }));
    e.push_back(uint_entry("n_labeled", [](C& c) -> std::size_t& { return c.n_labeled; }));
    e.push_back({"n_labeled_grid",
                 [](C& c, const std::string& v) {
                   c.n_labeled_grid.clear();
                   for (const auto& s : split_list(v)) c.n_labeled_grid.push_back(to_uint("n_labeled_grid", s));
                 },
                 [](const C& c) { return join(c.n_labeled_grid); }});
    e.push_back(bool_entry("unlabeled_is_full", [](C& c) -> bool& { return c.unlabeled_is_full; }));
    e.push_back({"prior",
                 [](C& c, const std::string& v) {
                   if (v != "strong" && v != "weak") throw ConfigError("prior: expected strong or weak");
                   c.prior = v;
                 },
                 [](const C& c) { return c.prior; }});
    e.push_back({"prior_probabilities",
                 [](C& c, const std::string& v) {
                   c.prior_probabilities.clear();
                   for (const auto& s : split_list(v)) c.prior_probabilities.push_back(to_real("prior_probabilities", s));
                 },
                 [](const C& c) { return join(c.prior_probabilities); }});
    e.push_back(real_entry("prior_level", [](C& c) -> double& { return c.prior_level; }));
    e.push_back({"eps_policy",
                 [](C& c, const std::string& v) {
                   for (auto p : {RadiusPolicy::kFixed, RadiusPolicy::kAsRobustAsPossible,
                                  RadiusPolicy::kMinRadiusPlusDelta, RadiusPolicy::kFractionOfTrueDistance}) {
                     if (v == policy_name(p)) {
                       c.radius.policy = p;
                       return;
                     }
                   }
                   throw ConfigError("eps_policy: unknown policy '" + v + "'");
                 },
                 [](const C& c) { return std::string(policy_name(c.radius.policy)); }});
    e.push_back(real_entry("eps", [](C& c) -> double& { return c.radius.eps; }));
    e.push_back(real_entry("delta", [](C& c) -> double& { return c.radius.delta_margin; }));
    e.push_back(real_entry("confidence_threshold", [](C& c) -> double& { return c.radius.confidence_threshold; }));
    e.push_back(real_entry("fraction", [](C& c) -> double& { return c.radius.fraction; }));
    e.push_back(uint_entry("grid_points", [](C& c) -> std::size_t& { return c.radius.grid_points; }));
    e.push_back(real_entry("grid_span", [](C& c) -> double& { return c.radius.grid_span; }));
    e.push_back(real_entry("kappa", [](C& c) -> double& { return c.kappa; }));
    e.push_back(real_entry("z_score", [](C& c) -> double& { return c.z_score; }));
    e.push_back(bool_entry("force_zero_theta", [](C& c) -> bool& { return c.force_zero_theta; }));
    add_solver_entries(e, "", &C::solver);
    for (const char* name : {"eps_grid", "delta_grid"}) {
      const std::string key = name;
      auto field = [key](C& c) -> std::vector<double>& { return key == "eps_grid" ? c.eps_grid : c.delta_grid; };
      e.push_back({key,
                   [field, key](C& c, const std::string& v) {
                     field(c).clear();
                     for (const auto& s : split_list(v)) field(c).push_back(to_real(key, s));
                   },
                   [field](const C& c) { return join(field(const_cast<C&>(c))); }});
    }
    e.push_back({"strategies",
                 [](C& c, const std::string& v) {
                   c.strategies = split_list(v);
                   for (const auto& s : c.strategies) parse_strategy(s);
                 },
                 [](const C& c) { return join(c.strategies); }});
    e.push_back(uint_entry("stop_at", [](C& c) -> std::size_t& { return c.stop_at; }));
    e.push_back(uint_entry("candidate_subsample", [](C& c) -> std::size_t& { return c.candidate_subsample; }));
    e.push_back(real_entry("ridge_gamma", [](C& c) -> double& { return c.ridge_gamma; }));
    e.push_back(bool_entry("mc_include_norm", [](C& c) -> bool& { return c.mc_include_norm; }));
    add_solver_entries(e, "dr_", &C::dr_solver);
    e.push_back(uint_entry("oracle_instances", [](C& c) -> std::size_t& { return c.oracle_instances; }));
    e.push_back(uint_entry("oracle_dim", [](C& c) -> std::size_t& { return c.oracle_dim; }));
    e.push_back(uint_entry("oracle_support", [](C& c) -> std::size_t& { return c.oracle_support; }));
    e.push_back(uint_entry("oracle_labeled", [](C& c) -> std::size_t& { return c.oracle_labeled; }));
    e.push_back(real_entry("oracle_excess", [](C& c) -> double& { return c.oracle_excess; }));
    return e;
  }();
  return entries;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : dr_solver(StrategyConfig::default_dr_solver()) {}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kBoundVsNl: return "bound-vs-nl";
    case ExperimentKind::kConfVsNl: return "conf-vs-nl";
    case ExperimentKind::kRadiusSweep: return "radius-sweep";
    case ExperimentKind::kRobustnessSweep: return "robustness-sweep";
    case ExperimentKind::kActive: return "active";
    case ExperimentKind::kOracleCheck: return "oracle-check";
    case ExperimentKind::kTrainDru: return "train-dru";
    case ExperimentKind::kTrainBaseline: return "train-baseline";
    case ExperimentKind::kMinRadius: return "min-radius";
    case ExperimentKind::kWasserstein: return "wasserstein";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ExperimentKind::kWasserstein); ++k) {
    const auto kind = static_cast<ExperimentKind>(k);
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& e : registry()) {
    if (e.name == key) {
      e.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + key);
    try {
      set_config_value(config, key, trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : registry()) out.emplace_back(e.name, e.get(config));
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.output.empty()) throw ConfigError("output path is empty");
  if (!(c.kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (!(c.z_score >= 0.0)) throw ConfigError("z_score must be >= 0");
  if (c.prior == "strong" && !c.prior_probabilities.empty() && c.prior_probabilities.size() != 2) {
    throw ConfigError("prior_probabilities needs two entries (negative, positive)");
  }
  if (c.strategies.empty()) throw ConfigError("strategies is empty");
  try {
    validate(c.solver);
    validate(c.dr_solver);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace wdru
