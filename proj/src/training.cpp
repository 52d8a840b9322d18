#include "certctl/training.hpp"
#include <cstdio>

#include <cmath>
#include <limits>

#include "certctl/log.hpp"

namespace certctl::learn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Exposes the agent's current deterministic action as an estimator.
class AgentActorPolicy final : public ctrl::UncertaintyEstimator {
 public:
  AgentActorPolicy(ctrl::PolicyLayout layout, const DdpgAgent& agent)
      : UncertaintyEstimator(layout), agent_(agent) {}
  ctrl::EstimatorOutputs evaluate(const Vector& x, const Vector& psi) const override {
    Vector obs(x.size() + psi.size());
    obs << x, psi;
    return ctrl::unpack_outputs(layout(), agent_.act(obs));
  }

 private:
  const DdpgAgent& agent_;
};
}  // namespace

Vector PsiSpec::sample(std::mt19937_64& rng) const {
  Vector out(dim);
  for (int i = 0; i < dim; ++i) {
    std::uniform_real_distribution<double> dist(lo, hi);
    out[i] = lo == hi ? lo : dist(rng);
  }
  return out;
}

TrainingResult run_training(const dyn::PlantPair& pair, ctrl::ControllerVariant variant,
                            const ctrl::ControllerSetup& setup,
                            const sim::EpisodeOptions& episode_opts,
                            const sim::UniformBox& x0_box, const PsiSpec& psi_spec,
                            const TrainingSettings& settings,
                            const MlpEstimatorPolicy* warm_start) {
  const int n = pair.nominal_plant->state_dim();
  const int m = pair.nominal_plant->input_dim();

  ctrl::PolicyLayout layout;
  layout.m = m;
  layout.n_b = static_cast<int>(setup.barriers.size());
  layout.n_c = static_cast<int>(setup.constraints.size());
  layout.q = psi_spec.dim;
  if (variant == ctrl::ControllerVariant::IoRlClfQp && (layout.n_b != 0 || layout.n_c != 0))
    throw std::invalid_argument("io-rl-clf-qp trains without barriers/constraint rows");

  const Vector bounds =
      action_bounds_for_layout(layout, settings.alpha_max, settings.beta_max);
  DdpgAgent agent(layout.obs_dim(n), layout.action_dim(), bounds, settings.hyper,
                  settings.seed);
  int start_episode = 0;
  if (warm_start) {
    if (warm_start->layout() != layout)
      throw std::invalid_argument("warm-start policy layout does not match configuration");
    agent.load_actor(warm_start->actor());
    if (warm_start->critic()) agent.load_critic(*warm_start->critic());
    start_episode = warm_start->episodes_trained();
  }

  ReplayBuffer buffer(settings.hyper.buffer_capacity, settings.seed + 5);
  std::mt19937_64 env_rng(settings.seed + 2);
  std::mt19937_64 mu_rng(settings.seed + 3);
  std::mt19937_64 explore_rng(settings.seed + 4);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const AgentActorPolicy rollout_policy(layout, agent);

  TrainingResult result{
      MlpEstimatorPolicy(layout, agent.actor(), settings.alpha_max, settings.beta_max),
      {},
      -std::numeric_limits<double>::infinity()};
  Mlp best_actor = agent.actor();
  Mlp best_critic = agent.critic();
  int best_episode = start_episode;
  int evals_since_improvement = 0;
  bool stop = false;

  auto evaluate_policy = [&](int episode_index) {
    const MlpEstimatorPolicy snapshot(layout, agent.actor(), settings.alpha_max,
                                      settings.beta_max);
    sim::EpisodeOptions eval_opts = episode_opts;
    eval_opts.sigma_mu = 0.0;
    std::mt19937_64 eval_rng(settings.seed + 1000 + std::uint64_t(episode_index));
    double total = 0.0;
    for (int e = 0; e < settings.eval_episodes; ++e) {
      const Vector x0 = x0_box.sample(eval_rng);
      const Vector psi = psi_spec.sample(eval_rng);
      const sim::EpisodeTrace trace = sim::run_episode(
          pair, variant, setup, &snapshot, settings.weights, eval_opts, x0, psi);
      total += trace.total_reward();
    }
    return total / std::max(1, settings.eval_episodes);
  };

  for (int e = 0; e < settings.episodes && !stop; ++e) {
    const int episode = start_episode + e;
    const double decay = std::pow(settings.noise_decay, double(episode));

    sim::EpisodeOptions opts = episode_opts;
    opts.sigma_mu = settings.sigma_mu * decay;

    const Vector x0 = x0_box.sample(env_rng);
    const Vector psi = psi_spec.sample(env_rng);

    double sum_l_v = 0.0, sum_l_b = 0.0, sum_l_c = 0.0;
    int loss_samples = 0;

    sim::RolloutHooks hooks;
    hooks.perturb_action = [&](int, const Vector&, const Vector& action) {
      Vector noisy = action;
      const double scale = settings.action_noise * decay;
      for (int i = 0; i < noisy.size(); ++i)
        noisy[i] += scale * bounds[i] * gauss(explore_rng);
      return noisy.cwiseMax(-bounds).cwiseMin(bounds);
    };
    hooks.on_transition = [&](int, const Transition& t, const StepLosses& losses) {
      buffer.push(t);
      if (losses.valid) {
        ++loss_samples;
        sum_l_v += losses.l_v;
        for (double v : losses.l_b) sum_l_b += v;
        for (double v : losses.l_c) sum_l_c += v;
      }
      if (buffer.size() >= std::size_t(std::max(settings.warmup_steps, settings.hyper.batch))) {
        const auto stats = agent.update(buffer);
        if (!stats.ok) {
          result.nan_flagged = true;
          log_warn("NaN gradient: update aborted, run flagged");
        }
      }
    };

    if (e < 2) {  // TODO remove debug
      const Vector dbg_act = ctrl::pack_outputs(layout, rollout_policy.evaluate(x0, psi));
      std::fprintf(stderr, "DBG ep=%d bounds=[%g %g] base_act=[%g %g] sigma=%g anoise=%g\n",
                   episode, bounds[0], bounds[1], dbg_act[0], dbg_act[1], opts.sigma_mu,
                   settings.action_noise);
    }
    const sim::EpisodeTrace trace =
        sim::run_episode(pair, variant, setup, &rollout_policy, settings.weights, opts,
                         x0, psi, &mu_rng, &hooks);

    EpisodeLogRow row;
    row.episode = episode;
    row.steps = trace.steps();
    row.total_reward = trace.total_reward();
    row.mean_l_v = loss_samples > 0 ? sum_l_v / loss_samples : kNaN;
    row.mean_l_b = loss_samples > 0 ? sum_l_b / loss_samples : kNaN;
    row.mean_l_c = loss_samples > 0 ? sum_l_c / loss_samples : kNaN;
    row.failed = trace.cause == sim::TerminationCause::Failure ||
                 trace.cause == sim::TerminationCause::Divergence ||
                 trace.cause == sim::TerminationCause::InfeasibilityAbort;
    for (const auto s : trace.status)
      if (s != linalg::QpStatus::Optimal) ++row.infeasible_steps;
    row.sigma = opts.sigma_mu;
    row.eval_reward = kNaN;

    const bool last = e + 1 == settings.episodes;
    if ((episode + 1) % settings.eval_every == 0 || last) {
      row.eval_reward = evaluate_policy(episode);
      if (row.eval_reward > result.best_eval_reward) {
        result.best_eval_reward = row.eval_reward;
        best_actor = agent.actor();
        best_critic = agent.critic();
        best_episode = episode + 1;
        row.is_best = true;
        evals_since_improvement = 0;
      } else if (settings.early_stop_patience > 0 &&
                 ++evals_since_improvement >= settings.early_stop_patience) {
        stop = true;
      }
    }
    result.log.push_back(row);
    ++result.episodes_run;
  }

  MlpEstimatorPolicy best(layout, best_actor, settings.alpha_max, settings.beta_max,
                          best_episode);
  best.critic() = best_critic;
  result.policy = std::move(best);
  // Resume bookkeeping counts every episode run, not just up to the best one.
  result.policy.set_episodes_trained(start_episode + result.episodes_run);
  return result;
}

}  // namespace certctl::learn
