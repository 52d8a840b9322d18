#pragma once

#include "certctl/ddpg.hpp"
#include "certctl/episode.hpp"
#include "certctl/policy.hpp"

namespace certctl::learn {

/// Per-episode CBF parameter: dim 0 means no psi, otherwise uniform draws.
struct PsiSpec {
  int dim = 0;
  double lo = 0.0, hi = 0.0;
  Vector sample(std::mt19937_64& rng) const;
};

struct TrainingSettings {
  int episodes = 300;
  DdpgHyper hyper;
  double alpha_max = 5.0;
  double beta_max = 20.0;
  double sigma_mu = 0.1;      // omega ~ N(0, sigma^2) added to mu
  double action_noise = 0.1;  // fraction of the action bounds
  double noise_decay = 0.995; // per-episode, both noises
  int warmup_steps = 1000;    // transitions before updates start
  int eval_every = 10;
  int eval_episodes = 3;
  int early_stop_patience = 0;  // evaluations without improvement; 0 disables
  std::uint64_t seed = 0;
  RewardWeights weights;
};

struct EpisodeLogRow {
  int episode = 0;
  int steps = 0;
  double total_reward = 0.0;
  double mean_l_v = 0.0;
  double mean_l_b = 0.0;
  double mean_l_c = 0.0;
  int infeasible_steps = 0;
  bool failed = false;
  double sigma = 0.0;
  double eval_reward = 0.0;  // NaN when no evaluation ran this episode
  bool is_best = false;
};

struct TrainingResult {
  MlpEstimatorPolicy policy;  // best snapshot by evaluation reward
  std::vector<EpisodeLogRow> log;
  double best_eval_reward = 0.0;
  bool nan_flagged = false;
  int episodes_run = 0;
};

/// Episodic DDPG loop per the configured controller variant. The true plant
/// is touched only through simulation; losses come from measured traces.
/// `warm_start` resumes from saved weights and continues episode numbering.
TrainingResult run_training(const dyn::PlantPair& pair, ctrl::ControllerVariant variant,
                            const ctrl::ControllerSetup& setup,
                            const sim::EpisodeOptions& episode_opts,
                            const sim::UniformBox& x0_box, const PsiSpec& psi_spec,
                            const TrainingSettings& settings,
                            const MlpEstimatorPolicy* warm_start = nullptr);

}  // namespace certctl::learn
