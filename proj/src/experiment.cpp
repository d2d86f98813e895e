#include "wdru/experiment.hpp"

#include "wdru/active_learning.hpp"
#include "wdru/baseline.hpp"
#include "wdru/errors.hpp"
#include "wdru/guarantees.hpp"
#include "wdru/primal_oracle.hpp"
#include "wdru/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <thread>

namespace wdru {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string theta_text(const Theta& theta) {
  std::string out;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (j) out += ';';
    out += num(theta(j));
  }
  return out;
}

template <typename... Cells>
std::string row(const Cells&... cells) {
  std::string out;
  auto add = [&](const auto& c) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_convertible_v<decltype(c), std::string>) {
      out += c;
    } else if constexpr (std::is_floating_point_v<std::decay_t<decltype(c)>>) {
      out += num(c);
    } else {
      out += std::to_string(c);
    }
  };
  (add(cells), ...);
  return out;
}

struct TrialOutput {
  std::vector<std::string> rows;
  /// (group, metric, value) for the summary table.
  std::vector<std::tuple<std::string, std::string, double>> metrics;
};

struct Plan {
  std::string header;
  std::size_t count = 1;
  std::function<TrialOutput(std::size_t trial, std::uint64_t seed)> run;
  /// Summary layout; empty when the kind has no summary.
  std::string summary_header;
};

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix;
}

// Rank-based 95% interval of the median.
std::tuple<double, double, double> median_interval(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double half = 0.98 * std::sqrt(n);
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(n / 2.0 - half)));
  const auto hi = static_cast<std::size_t>(std::min(n - 1.0, std::ceil(n / 2.0 + half)));
  return {median(v), v[std::min(lo, v.size() - 1)], v[hi]};
}

std::vector<double> true_probabilities(const ExperimentConfig& c, const LabeledDataset& full) {
  return c.prior_probabilities.empty() ? label_frequencies(full) : c.prior_probabilities;
}

LabelPrior trial_prior(const ExperimentConfig& c, const LabeledDataset& labeled, const LabeledDataset& full) {
  if (c.prior == "weak") return make_prior(labeled, PriorSpec::weak(c.prior_level));
  return make_prior(labeled, PriorSpec::strong(true_probabilities(c, full)));
}

SolverConfig trial_solver(const SolverConfig& base, std::uint64_t seed) {
  SolverConfig s = base;
  s.seed = seed;
  s.trace_path.clear();
  return s;
}

struct DruRun {
  SolveResult result;
  double eps = 0.0;
};

DruRun train_dru_at(const ExperimentConfig& c, const Split& split, const LabelPrior& prior, double eps,
                    std::uint64_t seed, const std::string& trace_path = "") {
  SolverConfig cfg = trial_solver(c.solver, seed);
  cfg.radius_eps = eps;
  cfg.trace_path = trace_path;
  const Theta theta0 = Theta::Zero(static_cast<Eigen::Index>(split.full.dim()));
  if (c.force_zero_theta) cfg.update_theta = false;
  DruRun run{sgd_solve(split.labeled, split.unlabeled, prior, {c.kappa}, cfg, theta0), eps};
  if (run.result.status == SolveStatus::kInfeasible) {
    throw InfeasibleError("decision set is empty at eps = " + num(eps));
  }
  return run;
}

RadiusChoice choose_radius(const ExperimentConfig& c, const Split& split, const LabelPrior& prior,
                           std::uint64_t seed) {
  RadiusContext ctx{split.labeled, split.unlabeled, prior, {c.kappa}, trial_solver(c.solver, seed), &split.full};
  return select_radius(c.radius, ctx);
}

std::string trace_for(const ExperimentConfig& c, std::size_t trial) {
  if (c.solver.trace_path.empty()) return "";
  if (c.trials == 1) return c.solver.trace_path;
  return with_suffix(c.solver.trace_path, ".trial" + std::to_string(trial) + ".csv");
}

Plan plan_for(const ExperimentConfig& c, const RawTable& table) {
  const TransportCostSpec cost{c.kappa};
  const auto split_of = [&c, &table](std::size_t n, std::uint64_t seed) {
    return sample_split(table, n, seed, c.unlabeled_is_full);
  };
  Plan p;
  p.count = c.trials;
  switch (c.kind) {
    case ExperimentKind::kTrainDru:
      p.header = "trial,seed,n_labeled,eps,eps0,status,steps,objective,likelihood_bound,median_confidence,theta";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        const Split s = split_of(c.n_labeled, seed);
        const LabelPrior prior = trial_prior(c, s.labeled, s.full);
        RadiusChoice r = choose_radius(c, s, prior, seed);
        if (c.radius.policy == RadiusPolicy::kFixed || c.radius.policy == RadiusPolicy::kFractionOfTrueDistance) {
          r.eps0 = prior_min_radius(s.labeled, s.unlabeled, prior, cost);
        }
        const DruRun run = train_dru_at(c, s, prior, r.eps, seed, trace_for(c, trial));
        const PerformanceBound b =
            performance_bound(run.result.state, s.labeled, s.unlabeled, prior, r.eps, cost, c.z_score);
        return TrialOutput{{row(trial, seed, c.n_labeled, r.eps, r.eps0, std::string(to_string(run.result.status)),
                                run.result.steps, run.result.objective, b.likelihood_bound,
                                median_confidence(run.result.state.theta, s.unlabeled.points),
                                theta_text(run.result.state.theta))},
                           {}};
      };
      break;
    case ExperimentKind::kTrainBaseline:
      p.header = "trial,seed,n_labeled,eps,alpha,worst_case_value,likelihood_bound,median_confidence,theta";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        const Split s = split_of(c.n_labeled, seed);
        const LabelPrior prior = trial_prior(c, s.labeled, s.full);
        const RadiusChoice r = choose_radius(c, s, prior, seed);
        const BaselineResult b = baseline_train(s.labeled, r.eps, cost, trial_solver(c.solver, seed));
        return TrialOutput{{row(trial, seed, c.n_labeled, r.eps, b.alpha, b.worst_case_value,
                                std::exp(-b.worst_case_value), median_confidence(b.theta, s.unlabeled.points),
                                theta_text(b.theta))},
                           {}};
      };
      break;
    case ExperimentKind::kMinRadius:
      p.header = "trial,seed,n_labeled,prior,eps0";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        const Split s = split_of(c.n_labeled, seed);
        const LabelPrior prior = trial_prior(c, s.labeled, s.full);
        const double eps0 = prior_min_radius(s.labeled, s.unlabeled, prior, cost);
        return TrialOutput{{row(trial, seed, c.n_labeled, c.prior, eps0)}, {{"all", "eps0", eps0}}};
      };
      p.summary_header = "group,metric,median,lower,upper,count";
      break;
    case ExperimentKind::kWasserstein:
      p.header = "trial,seed,n_labeled,distance";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        const Split s = split_of(c.n_labeled, seed);
        const double w = discrete_wasserstein(DiscreteDistribution::empirical(s.labeled),
                                              DiscreteDistribution::empirical(s.full), cost)
                             .distance;
        return TrialOutput{{row(trial, seed, c.n_labeled, w)}, {{"all", "distance", w}}};
      };
      p.summary_header = "group,metric,median,lower,upper,count";
      break;
    case ExperimentKind::kBoundVsNl:
    case ExperimentKind::kConfVsNl:
      p.header = "method,trial,seed,n_labeled,eps,neg_log_bound,correction,likelihood_bound,median_confidence,vacuous";
      p.summary_header = "group,metric,median,lower,upper,count";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        TrialOutput out;
        const std::vector<std::size_t> grid =
            c.n_labeled_grid.empty() ? std::vector<std::size_t>{c.n_labeled} : c.n_labeled_grid;
        for (std::size_t n : grid) {
          const Split s = split_of(n, seed);
          const LabelPrior prior = trial_prior(c, s.labeled, s.full);
          const RadiusChoice r = choose_radius(c, s, prior, seed);
          const std::string group = std::to_string(n);

          Theta base_theta = Theta::Zero(static_cast<Eigen::Index>(s.full.dim()));
          if (!c.force_zero_theta) base_theta = baseline_train(s.labeled, r.eps, cost, trial_solver(c.solver, seed)).theta;
          const double base_value = baseline_worst_case(base_theta, s.labeled, r.eps, cost);
          const double base_lik = std::exp(-base_value);
          const double base_conf = median_confidence(base_theta, s.unlabeled.points);
          out.rows.push_back(row(std::string("baseline"), trial, seed, n, r.eps, base_value, 0.0, base_lik, base_conf,
                                 std::string(base_lik <= 0.5 ? "true" : "false")));
          out.metrics.emplace_back("baseline/" + group, "likelihood_bound", base_lik);
          out.metrics.emplace_back("baseline/" + group, "median_confidence", base_conf);

          const DruRun run = train_dru_at(c, s, prior, r.eps, seed);
          const PerformanceBound b =
              performance_bound(run.result.state, s.labeled, s.unlabeled, prior, r.eps, cost, c.z_score);
          const double conf = median_confidence(run.result.state.theta, s.unlabeled.points);
          out.rows.push_back(row(std::string("dru-") + c.prior, trial, seed, n, r.eps, b.neg_log_bound, b.correction,
                                 b.likelihood_bound, conf, std::string(b.vacuous() ? "true" : "false")));
          out.metrics.emplace_back("dru-" + c.prior + "/" + group, "likelihood_bound", b.likelihood_bound);
          out.metrics.emplace_back("dru-" + c.prior + "/" + group, "median_confidence", conf);
        }
        return out;
      };
      break;
    case ExperimentKind::kRadiusSweep:
      p.header = "trial,seed,n_labeled,eps0,delta,eps,likelihood,median_confidence";
      p.summary_header = "group,metric,median,lower,upper,count";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        TrialOutput out;
        const Split s = split_of(c.n_labeled, seed);
        const LabelPrior prior = trial_prior(c, s.labeled, s.full);
        const double eps0 = prior_min_radius(s.labeled, s.unlabeled, prior, cost);
        for (double delta : c.delta_grid) {
          const DruRun run = train_dru_at(c, s, prior, eps0 + delta, seed);
          const double lik = mean_likelihood(run.result.state.theta, s.full);
          const double conf = median_confidence(run.result.state.theta, s.unlabeled.points);
          out.rows.push_back(row(trial, seed, c.n_labeled, eps0, delta, eps0 + delta, lik, conf));
          out.metrics.emplace_back("delta=" + num(delta), "likelihood", lik);
          out.metrics.emplace_back("delta=" + num(delta), "median_confidence", conf);
        }
        return out;
      };
      break;
    case ExperimentKind::kRobustnessSweep:
      p.header = "trial,seed,n_labeled,eps,delta,log10_eps,log10_delta,worst_case_likelihood";
      p.summary_header = "group,metric,median,lower,upper,count";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        TrialOutput out;
        const Split s = split_of(c.n_labeled, seed);
        for (const RobustnessCell& cell :
             robustness_sweep(s.labeled, c.eps_grid, c.delta_grid, cost, trial_solver(c.solver, seed))) {
          out.rows.push_back(row(trial, seed, c.n_labeled, cell.eps, cell.delta, std::log10(cell.eps),
                                 std::log10(cell.delta), cell.likelihood));
          out.metrics.emplace_back("eps=" + num(cell.eps) + "/delta=" + num(cell.delta), "worst_case_likelihood",
                                   cell.likelihood);
        }
        return out;
      };
      break;
    case ExperimentKind::kActive:
      p.header = "strategy,trial,seed,n_labeled,likelihood";
      p.summary_header = "strategy,median_aulc,lower,upper,count";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        TrialOutput out;
        // The pool must be disjoint from the labeled set.
        const Split s = sample_split(table, c.n_labeled, seed, /*unlabeled_is_full=*/false);
        for (const std::string& name : c.strategies) {
          StrategyConfig sc;
          sc.kind = parse_strategy(name);
          sc.candidate_subsample = c.candidate_subsample;
          sc.ridge_gamma = c.ridge_gamma;
          sc.delta_margin = c.radius.delta_margin;
          sc.seed = seed;
          sc.mc_include_norm = c.mc_include_norm;
          sc.true_probabilities = true_probabilities(c, s.full);
          sc.weak_level = c.prior_level;
          sc.cost = cost;
          sc.solver = c.dr_solver;
          ActiveState state;
          state.labeled = s.labeled;
          state.pool = s.unlabeled.points;
          state.pool_labels = s.unlabeled_labels;
          const std::vector<CurvePoint> curve = run_active_loop(state, sc, s.full, c.stop_at);
          for (const auto& pt : curve) out.rows.push_back(row(name, trial, seed, pt.n_labeled, pt.likelihood));
          out.metrics.emplace_back(name, "aulc", aulc(curve));
        }
        return out;
      };
      break;
    case ExperimentKind::kOracleCheck:
      p.count = c.oracle_instances;
      p.header = "instance,seed,dim,n_support,n_labeled,prior,eps0,eps,primal,dual,gap,rel_gap,pass";
      p.run = [=, &c](std::size_t trial, std::uint64_t seed) {
        const OracleInstance inst =
            random_oracle_instance(seed, c.oracle_dim, c.oracle_support, c.oracle_labeled, trial % 2 == 0);
        const double eps0 = min_feasible_radius(inst.data, inst.support.points, inst.prior, cost);
        const double eps = eps0 + c.oracle_excess;
        const DualityGap g = duality_gap_check(inst.theta, inst.data, inst.support, inst.prior, eps, cost,
                                               trial_solver(c.solver, seed));
        const double rel = std::abs(g.gap) / (1.0 + std::abs(g.primal));
        return TrialOutput{{row(trial, seed, inst.theta.size() - 1, inst.support.size(), inst.data.size(),
                                std::string(inst.strong_prior ? "strong" : "weak"), eps0, eps, g.primal, g.dual,
                                g.gap, rel, std::string(rel <= 1e-3 ? "true" : "false"))},
                           {}};
      };
      break;
  }
  return p;
}

void write_lines(const std::string& path, const std::string& header, const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
}

}  // namespace

OracleInstance random_oracle_instance(std::uint64_t seed, std::size_t max_dim, std::size_t max_support,
                                      std::size_t max_labeled, bool strong_prior) {
  if (max_dim < 1 || max_support < 1 || max_labeled < 1) throw std::invalid_argument("oracle sizes must be >= 1");
  CounterRng rng(seed);
  const std::size_t q = 1 + rng.index(max_dim);
  const std::size_t nu = 1 + rng.index(max_support);
  const std::size_t nl = 1 + rng.index(max_labeled);
  const auto point = [&] {
    Eigen::VectorXd r(static_cast<Eigen::Index>(q));
    for (auto& v : r) v = 2.0 * rng.uniform() - 1.0;
    return with_bias(r);
  };
  OracleInstance inst;
  for (std::size_t j = 0; j < nu; ++j) inst.support.points.push_back(point());
  for (std::size_t i = 0; i < nl; ++i) {
    FeatureVector x = point();
    inst.data.samples.push_back({std::move(x), Label::from_index(rng.index(2))});
  }
  inst.strong_prior = strong_prior;
  if (strong_prior) {
    const double pos = rng.uniform();
    inst.prior = LabelPrior::exact({1.0 - pos, pos});
  } else {
    const double a = 0.5 * rng.uniform();
    const double b = 0.5 + 0.5 * rng.uniform();
    inst.prior = LabelPrior{{1.0 - b, a}, {1.0 - a, b}};
  }
  inst.theta = Theta(static_cast<Eigen::Index>(q + 1));
  for (auto& v : inst.theta) v = rng.normal();
  return inst;
}

RawTable load_dataset(const ExperimentConfig& c) {
  RawTable raw = c.dataset == "synthetic"
                     ? synthetic_two_gaussian(c.synthetic_rows, c.synthetic_dim, c.synthetic_separation, c.synthetic_seed)
                     : load_csv(c.dataset, c.label_column, c.positive_token);
  if (!c.standardize) return raw;
  return standardize(raw).table;
}

int ExperimentReport::exit_code() const {
  for (const auto& t : trials) {
    if (t.status == "infeasible") return 2;
    if (t.status == "numerical") return 3;
    if (t.status != "ok") return 1;
  }
  return 0;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate(config);
  const RawTable table = load_dataset(config);
  const Plan plan = plan_for(config, table);

  std::vector<std::optional<TrialOutput>> results(plan.count);
  ExperimentReport report;
  report.trials.resize(plan.count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t t = next++; t < plan.count; t = next++) {
      TrialOutcome& o = report.trials[t];
      o.trial = t;
      o.seed = derive_seed(config.seed, t);
      try {
        results[t] = plan.run(t, o.seed);
      } catch (const InfeasibleError& e) {
        o.status = "infeasible";
        o.message = e.what();
      } catch (const NumericalError& e) {
        o.status = "numerical";
        o.message = e.what();
      } catch (const std::exception& e) {
        o.status = "error";
        o.message = e.what();
      }
    }
  };
  const std::size_t workers = std::min(config.threads, plan.count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::string> rows;
  std::vector<std::string> groups;
  std::map<std::pair<std::string, std::string>, std::vector<double>> metrics;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : results) {
    if (!r) continue;
    rows.insert(rows.end(), r->rows.begin(), r->rows.end());
    for (const auto& [group, metric, value] : r->metrics) {
      auto& v = metrics[{group, metric}];
      if (v.empty()) order.emplace_back(group, metric);
      v.push_back(value);
    }
  }
  write_lines(config.output, plan.header, rows);
  report.outputs.push_back(config.output);

  if (!plan.summary_header.empty()) {
    std::vector<std::string> summary;
    for (const auto& key : order) {
      const auto& v = metrics[key];
      const auto [med, lo, hi] = median_interval(v);
      if (config.kind == ExperimentKind::kActive) {
        summary.push_back(row(key.first, med, lo, hi, v.size()));
      } else {
        summary.push_back(row(key.first, key.second, med, lo, hi, v.size()));
      }
    }
    const std::string path = with_suffix(config.output, ".summary.csv");
    write_lines(path, plan.summary_header, summary);
    report.outputs.push_back(path);
  }

  nlohmann::ordered_json meta;
  meta["kind"] = to_string(config.kind);
  meta["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_entries(config)) meta["config"][k] = v;
  meta["trials"] = nlohmann::ordered_json::array();
  for (const auto& t : report.trials) {
    meta["trials"].push_back({{"trial", t.trial}, {"seed", t.seed}, {"status", t.status}, {"message", t.message}});
  }
  meta["outputs"] = report.outputs;
  report.metadata_path = with_suffix(config.output, ".meta.json");
  std::ofstream(report.metadata_path, std::ios::binary) << meta.dump(2) << '\n';
  return report;
}

}  // namespace wdru
