#pragma once

#include "certctl/mlp.hpp"
#include "certctl/replay.hpp"

namespace certctl::learn {

struct DdpgHyper {
  int batch = 64;
  std::size_t buffer_capacity = 100000;
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::vector<int> hidden = {64, 64};
};

/// Deterministic policy gradient agent. The actor outputs raw values z and
/// the executed action is bounds .* tanh(z); the critic scores (obs, action).
class DdpgAgent {
 public:
  DdpgAgent(int obs_dim, int action_dim, Vector action_bounds, const DdpgHyper& hyper,
            std::uint64_t seed);

  Vector act(const Vector& obs) const;

  struct UpdateStats {
    bool ok = true;  // false when a NaN gradient aborted the update
    double critic_loss = 0.0;
    double actor_objective = 0.0;
  };

  /// One critic TD step + one actor ascent step + soft target updates.
  UpdateStats update(ReplayBuffer& buffer);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Vector& action_bounds() const { return bounds_; }
  void load_actor(const Mlp& actor);
  void load_critic(const Mlp& critic);

  /// Critic TD loss over an explicit batch (exposed for gradient checks).
  double critic_loss(const std::vector<std::size_t>& idx, const ReplayBuffer& buffer) const;
  Mlp critic_loss_gradient(const std::vector<std::size_t>& idx,
                           const ReplayBuffer& buffer) const;

 private:
  Vector scale_action(const Vector& raw) const;

  DdpgHyper hyper_;
  Vector bounds_;
  Mlp actor_, critic_, actor_target_, critic_target_;
  Adam actor_opt_, critic_opt_;
};

}  // namespace certctl::learn
