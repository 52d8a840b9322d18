#include "certctl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "certctl/episode.hpp"
#include "certctl/log.hpp"
#include "certctl/policy.hpp"
#include "certctl/selftest.hpp"
#include "certctl/training.hpp"

namespace certctl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::vector<std::string> stamp(const RunConfig& cfg) {
  return {"config_hash=" + cfg.config_hash, "seed=" + std::to_string(cfg.seed)};
}

/// Loads the policy if given, else a zero-output policy for RL variants.
ctrl::EstimatorPtr make_policy(const RunConfig& cfg, const Assembled& a,
                               const std::optional<std::string>& policy_path) {
  if (!ctrl::variant_uses_policy(cfg.variant) && !policy_path) return nullptr;
  if (policy_path) {
    auto loaded = std::make_shared<learn::MlpEstimatorPolicy>(
        learn::MlpEstimatorPolicy::load(*policy_path));
    if (!(loaded->layout() == a.layout))
      throw std::runtime_error("policy layout does not match config: " + *policy_path);
    return loaded;
  }
  return std::make_shared<ctrl::ZeroEstimator>(a.layout);
}

ordered_json violations_json(const sim::ViolationCounts& v) {
  ordered_json j;
  j["clf_steps"] = v.clf_steps;
  j["barrier_steps"] = v.barrier_steps;
  j["constraint_steps"] = v.constraint_steps;
  j["infeasible_steps"] = v.infeasible_steps;
  j["total_steps"] = v.total_steps;
  j["failure"] = v.failure;
  j["barrier_violated"] = v.barrier_violated;
  j["constraint_violated"] = v.constraint_violated;
  return j;
}

int guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log_error(e.what());
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    log_error(e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int cmd_train(const CommonFlags& flags) {
  return guard([&]() -> int {
    const RunConfig cfg = load_config(flags.config_path, flags.seed, flags.out_dir,
                                      flags.episodes);
    if (!ctrl::variant_uses_policy(cfg.variant))
      throw ConfigError("train requires an RL controller variant, got " +
                        ctrl::to_string(cfg.variant));
    const Assembled a = assemble(cfg);
    fs::create_directories(cfg.out_dir);

    std::optional<learn::MlpEstimatorPolicy> warm;
    if (flags.policy_path) {
      warm = learn::MlpEstimatorPolicy::load(*flags.policy_path);
      log_info("resuming from " + *flags.policy_path + " at episode " +
               std::to_string(warm->episodes_trained()));
    }

    const learn::TrainingResult result =
        learn::run_training(a.pair, cfg.variant, a.setup, a.episode, a.x0_box, a.psi_spec,
                            cfg.training, warm ? &*warm : nullptr);

    result.policy.save((fs::path(cfg.out_dir) / "policy.json").string());

    std::string log_csv;
    for (const auto& c : stamp(cfg)) log_csv += "# " + c + "\n";
    log_csv +=
        "episode,steps,total_reward,mean_l_v,mean_l_b,mean_l_c,infeasible_steps,"
        "failed,sigma,eval_reward,is_best\n";
    for (const auto& row : result.log) {
      log_csv += std::to_string(row.episode) + "," + std::to_string(row.steps) + "," +
                 fmt(row.total_reward) + "," + fmt(row.mean_l_v) + "," +
                 fmt(row.mean_l_b) + "," + fmt(row.mean_l_c) + "," +
                 std::to_string(row.infeasible_steps) + "," +
                 std::to_string(int(row.failed)) + "," + fmt(row.sigma) + "," +
                 fmt(row.eval_reward) + "," + std::to_string(int(row.is_best)) + "\n";
    }
    write_file(fs::path(cfg.out_dir) / "training_log.csv", log_csv);

    ordered_json summary;
    summary["config_hash"] = cfg.config_hash;
    summary["seed"] = cfg.seed;
    summary["variant"] = ctrl::to_string(cfg.variant);
    summary["episodes_run"] = result.episodes_run;
    summary["episodes_trained_total"] = result.policy.episodes_trained();
    summary["best_eval_reward"] = result.best_eval_reward;
    summary["nan_flagged"] = result.nan_flagged;
    write_file(fs::path(cfg.out_dir) / "train_summary.json", summary.dump(1) + "\n");

    return result.nan_flagged ? 1 : 0;
  });
}

int cmd_eval(const CommonFlags& flags) {
  return guard([&]() -> int {
    const RunConfig cfg = load_config(flags.config_path, flags.seed, flags.out_dir,
                                      flags.episodes);
    const Assembled a = assemble(cfg);
    fs::create_directories(cfg.out_dir);
    const ctrl::EstimatorPtr policy = make_policy(cfg, a, flags.policy_path);

    sim::EpisodeOptions opts = a.episode;
    opts.sigma_mu = 0.0;  // evaluation runs are deterministic
    learn::RewardWeights weights = cfg.training.weights;

    std::mt19937_64 rng(cfg.seed);
    ordered_json per_episode = ordered_json::array();
    sim::ViolationCounts aggregate;
    aggregate.barrier_steps.assign(a.layout.n_b, 0);
    aggregate.constraint_steps.assign(a.layout.n_c, 0);
    int episodes_with_barrier_violation = 0;
    int episodes_with_constraint_violation = 0;
    int failures = 0;

    for (int e = 0; e < cfg.eval_episodes; ++e) {
      const Vector x0 = a.x0_box.sample(rng);
      const Vector psi = a.psi_spec.sample(rng);
      const sim::EpisodeTrace trace = sim::run_episode(
          a.pair, cfg.variant, a.setup, policy.get(), weights, opts, x0, psi);

      auto comments = stamp(cfg);
      comments.push_back("episode=" + std::to_string(e));
      write_file(fs::path(cfg.out_dir) /
                     ("trace_ep" + std::string(e < 10 ? "00" : e < 100 ? "0" : "") +
                      std::to_string(e) + ".csv"),
                 sim::trace_to_csv(trace, comments));

      const sim::ViolationCounts v = sim::count_violations(trace, a.setup.clf.rate());
      aggregate.clf_steps += v.clf_steps;
      aggregate.infeasible_steps += v.infeasible_steps;
      aggregate.total_steps += v.total_steps;
      for (int i = 0; i < a.layout.n_b; ++i) aggregate.barrier_steps[i] += v.barrier_steps[i];
      for (int j = 0; j < a.layout.n_c; ++j)
        aggregate.constraint_steps[j] += v.constraint_steps[j];
      episodes_with_barrier_violation += v.barrier_violated ? 1 : 0;
      episodes_with_constraint_violation += v.constraint_violated ? 1 : 0;
      failures += v.failure ? 1 : 0;

      ordered_json ej = violations_json(v);
      ej["episode"] = e;
      ej["termination"] = sim::to_string(trace.cause);
      ej["total_reward"] = trace.total_reward();
      per_episode.push_back(ej);
    }

    ordered_json summary;
    summary["config_hash"] = cfg.config_hash;
    summary["seed"] = cfg.seed;
    summary["variant"] = ctrl::to_string(cfg.variant);
    summary["uncertainty"] = dyn::to_string(cfg.uncertainty);
    summary["episodes"] = cfg.eval_episodes;
    summary["failures"] = failures;
    summary["episodes_with_barrier_violation"] = episodes_with_barrier_violation;
    summary["episodes_with_constraint_violation"] = episodes_with_constraint_violation;
    summary["aggregate"] = violations_json(aggregate);
    summary["infeasibility_rate"] = aggregate.infeasibility_rate();
    summary["per_episode"] = per_episode;
    write_file(fs::path(cfg.out_dir) / "eval_summary.json", summary.dump(1) + "\n");
    return 0;
  });
}

int cmd_compare(const CommonFlags& flags) {
  return guard([&]() -> int {
    const RunConfig base = load_config(flags.config_path, flags.seed, flags.out_dir,
                                       flags.episodes);
    std::vector<std::string> variants = base.compare_variants;
    if (variants.empty()) variants.push_back(ctrl::to_string(base.variant));
    fs::create_directories(base.out_dir);

    struct Arm {
      std::string name;
      ctrl::ControllerVariant variant;
      ctrl::EstimatorPtr policy;
    };
    Assembled a = assemble(base);
    std::vector<Arm> arms;
    for (size_t i = 0; i < variants.size(); ++i) {
      Arm arm;
      arm.name = variants[i];
      arm.variant = ctrl::variant_from_string(variants[i]);
      std::optional<std::string> path;
      if (i < base.compare_policies.size() && !base.compare_policies[i].empty())
        path = base.compare_policies[i];
      RunConfig cfg = base;
      cfg.variant = arm.variant;
      arm.policy = make_policy(cfg, a, path);
      arms.push_back(std::move(arm));
    }

    sim::EpisodeOptions opts = a.episode;
    opts.sigma_mu = 0.0;
    const learn::RewardWeights weights = base.training.weights;
    const int episodes = flags.episodes.value_or(5);

    ordered_json summary;
    summary["config_hash"] = base.config_hash;
    summary["seed"] = base.seed;
    ordered_json arm_meta = ordered_json::array();
    std::vector<ordered_json> arm_totals(arms.size());
    for (size_t v = 0; v < arms.size(); ++v) {
      arm_totals[v]["variant"] = arms[v].name;
      arm_totals[v]["seed"] = base.seed;  // identical across variants by construction
      arm_totals[v]["failures"] = 0;
      arm_totals[v]["barrier_violations"] = 0;
      arm_totals[v]["constraint_violations"] = 0;
      arm_totals[v]["clf_violations"] = 0;
      arm_totals[v]["infeasible_steps"] = 0;
    }

    for (int e = 0; e < episodes; ++e) {
      std::mt19937_64 rng(base.seed + std::uint64_t(e));
      const Vector x0 = a.x0_box.sample(rng);
      const Vector psi = a.psi_spec.sample(rng);

      std::vector<sim::EpisodeTrace> traces;
      for (const auto& arm : arms)
        traces.push_back(sim::run_episode(a.pair, arm.variant, a.setup, arm.policy.get(),
                                          weights, opts, x0, psi));

      int max_steps = 0;
      for (const auto& t : traces) max_steps = std::max(max_steps, t.steps());

      std::string csv;
      for (const auto& c : stamp(base)) csv += "# " + c + "\n";
      csv += "# episode=" + std::to_string(e) + "\n";
      csv += "time";
      for (const auto& arm : arms)
        csv += ",eta_norm__" + arm.name + ",vdot_margin__" + arm.name + ",min_B__" +
               arm.name + ",max_zeta__" + arm.name;
      csv += "\n";
      for (int k = 0; k < max_steps; ++k) {
        csv += fmt(k * opts.ts);
        for (const auto& t : traces) {
          if (k < t.steps()) {
            const double eta_norm =
                clf::transverse(*a.pair.nominal_plant, t.x[k]).eta.norm();
            const double margin =
                k > 0 ? t.vdot_meas[k] + a.setup.clf.rate() * t.V[k - 1]
                      : std::numeric_limits<double>::quiet_NaN();
            const double min_b =
                t.B[k].size() > 0 ? t.B[k].minCoeff() : std::numeric_limits<double>::quiet_NaN();
            double max_z = std::numeric_limits<double>::quiet_NaN();
            if (t.zeta_meas[k].size() > 0 && k > 0) max_z = t.zeta_meas[k].maxCoeff();
            csv += "," + fmt(eta_norm) + "," + fmt(margin) + "," + fmt(min_b) + "," +
                   fmt(max_z);
          } else {
            csv += ",nan,nan,nan,nan";
          }
        }
        csv += "\n";
      }
      write_file(fs::path(base.out_dir) /
                     ("compare_ep" + std::string(e < 10 ? "00" : e < 100 ? "0" : "") +
                      std::to_string(e) + ".csv"),
                 csv);

      for (size_t v = 0; v < arms.size(); ++v) {
        const sim::ViolationCounts vc = sim::count_violations(traces[v], a.setup.clf.rate());
        arm_totals[v]["failures"] = int(arm_totals[v]["failures"]) + (vc.failure ? 1 : 0);
        int bsum = 0;
        for (int b : vc.barrier_steps) bsum += b;
        int csum = 0;
        for (int c : vc.constraint_steps) csum += c;
        arm_totals[v]["barrier_violations"] =
            int(arm_totals[v]["barrier_violations"]) + bsum;
        arm_totals[v]["constraint_violations"] =
            int(arm_totals[v]["constraint_violations"]) + csum;
        arm_totals[v]["clf_violations"] = int(arm_totals[v]["clf_violations"]) + vc.clf_steps;
        arm_totals[v]["infeasible_steps"] =
            int(arm_totals[v]["infeasible_steps"]) + vc.infeasible_steps;
      }
    }

    for (auto& t : arm_totals) arm_meta.push_back(t);
    summary["episodes"] = episodes;
    summary["variants"] = arm_meta;
    write_file(fs::path(base.out_dir) / "compare_summary.json", summary.dump(1) + "\n");
    return 0;
  });
}

int cmd_selftest() {
  try {
    const auto results = selftest::run_selftest();
    int failures = 0;
    for (const auto& r : results) {
      std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                  r.detail.c_str());
      if (!r.pass) ++failures;
    }
    return std::min(failures, 125);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "selftest error: %s\n", e.what());
    return 125;
  }
}

}  // namespace certctl::cli
