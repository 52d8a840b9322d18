#pragma once

#include <functional>
#include <optional>
#include <random>

#include "certctl/controllers.hpp"
#include "certctl/losses.hpp"
#include "certctl/replay.hpp"
#include "certctl/trace.hpp"

namespace certctl::sim {

struct UniformBox {
  Vector lo, hi;
  Vector sample(std::mt19937_64& rng) const;
};

struct EpisodeOptions {
  double horizon = 5.0;
  double ts = 0.01;
  double sigma_mu = 0.0;  // stddev of the white noise omega added to mu
  int max_consec_infeasible = 25;
  double divergence_norm = 1e6;
};

/// Optional per-step callbacks for training.
struct RolloutHooks {
  // Receives the policy's action for this step, returns the executed one.
  std::function<Vector(int k, const Vector& obs, const Vector& action)> perturb_action;
  // Called after the step with the stored transition and its losses.
  std::function<void(int k, const learn::Transition& t, const learn::StepLosses& losses)>
      on_transition;
};

/// Thrown when the controller itself errors mid-episode.
struct EpisodeError : std::runtime_error {
  EpisodeError(const std::string& msg, EpisodeTrace trace_so_far)
      : std::runtime_error(msg), trace(std::move(trace_so_far)) {}
  EpisodeTrace trace;
};

/// Rolls the true plant under the configured controller built on the nominal
/// model. The controller sees only (x, psi). Terminates on the failure
/// predicate, divergence, repeated infeasibility, or the horizon. On QP
/// infeasibility the previous input is held (zero-order hold) and the step
/// is flagged.
EpisodeTrace run_episode(const dyn::PlantPair& pair, ctrl::ControllerVariant variant,
                         const ctrl::ControllerSetup& setup,
                         const ctrl::UncertaintyEstimator* policy,
                         const learn::RewardWeights& weights, const EpisodeOptions& opts,
                         const Vector& x0, const Vector& psi,
                         std::mt19937_64* noise_rng = nullptr,
                         const RolloutHooks* hooks = nullptr);

}  // namespace certctl::sim
