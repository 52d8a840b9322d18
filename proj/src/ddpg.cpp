#include "certctl/ddpg.hpp"

#include <cmath>
#include <stdexcept>

namespace certctl::learn {

namespace {
std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}
}  // namespace

DdpgAgent::DdpgAgent(int obs_dim, int action_dim, Vector action_bounds,
                     const DdpgHyper& hyper, std::uint64_t seed)
    : hyper_(hyper),
      bounds_(std::move(action_bounds)),
      actor_(layer_sizes(obs_dim, hyper.hidden, action_dim), seed + 10),
      critic_(layer_sizes(obs_dim + action_dim, hyper.hidden, 1), seed + 11),
      actor_target_(actor_),
      critic_target_(critic_),
      actor_opt_(actor_, hyper.actor_lr),
      critic_opt_(critic_, hyper.critic_lr) {
  if (bounds_.size() != action_dim)
    throw std::invalid_argument("action bounds size must match action dim");
  if ((bounds_.array() <= 0).any())
    throw std::invalid_argument("action bounds must be positive");
}

Vector DdpgAgent::scale_action(const Vector& raw) const {
  return bounds_.cwiseProduct(raw.array().tanh().matrix());
}

Vector DdpgAgent::act(const Vector& obs) const { return scale_action(actor_.forward(obs)); }

void DdpgAgent::load_actor(const Mlp& actor) {
  actor_ = actor;
  actor_target_ = actor;
  actor_opt_ = Adam(actor_, hyper_.actor_lr);
}

void DdpgAgent::load_critic(const Mlp& critic) {
  critic_ = critic;
  critic_target_ = critic;
  critic_opt_ = Adam(critic_, hyper_.critic_lr);
}

double DdpgAgent::critic_loss(const std::vector<std::size_t>& idx,
                              const ReplayBuffer& buffer) const {
  double loss = 0.0;
  for (std::size_t i : idx) {
    const Transition& t = buffer.at(i);
    Vector next_action = bounds_.cwiseProduct(actor_target_.forward(t.next_obs).array().tanh().matrix());
    Vector next_in(t.next_obs.size() + next_action.size());
    next_in << t.next_obs, next_action;
    const double q_next = critic_target_.forward(next_in)(0);
    const double y = t.reward + (t.terminal ? 0.0 : hyper_.gamma * q_next);
    Vector in(t.obs.size() + t.action.size());
    in << t.obs, t.action;
    const double q = critic_.forward(in)(0);
    loss += (q - y) * (q - y);
  }
  return loss / double(idx.size());
}

Mlp DdpgAgent::critic_loss_gradient(const std::vector<std::size_t>& idx,
                                    const ReplayBuffer& buffer) const {
  Mlp grads = critic_.like();
  const double scale = 2.0 / double(idx.size());
  for (std::size_t i : idx) {
    const Transition& t = buffer.at(i);
    Vector next_action = bounds_.cwiseProduct(actor_target_.forward(t.next_obs).array().tanh().matrix());
    Vector next_in(t.next_obs.size() + next_action.size());
    next_in << t.next_obs, next_action;
    const double q_next = critic_target_.forward(next_in)(0);
    const double y = t.reward + (t.terminal ? 0.0 : hyper_.gamma * q_next);

    Vector in(t.obs.size() + t.action.size());
    in << t.obs, t.action;
    Mlp::Workspace ws;
    const double q = critic_.forward(in, ws)(0);
    Vector grad_out(1);
    grad_out[0] = scale * (q - y);
    critic_.backward(ws, grad_out, grads);
  }
  return grads;
}

DdpgAgent::UpdateStats DdpgAgent::update(ReplayBuffer& buffer) {
  UpdateStats stats;
  const auto idx = buffer.sample_indices(std::size_t(hyper_.batch));

  // Critic TD step.
  Mlp critic_grads = critic_loss_gradient(idx, buffer);
  stats.critic_loss = critic_loss(idx, buffer);

  // Actor ascent on Q(s, pi(s)).
  Mlp actor_grads = actor_.like();
  double j = 0.0;
  const double inv_batch = 1.0 / double(idx.size());
  for (std::size_t i : idx) {
    const Transition& t = buffer.at(i);
    Mlp::Workspace actor_ws;
    const Vector raw = actor_.forward(t.obs, actor_ws);
    const Vector tanh_raw = raw.array().tanh().matrix();
    const Vector action = bounds_.cwiseProduct(tanh_raw);

    Vector in(t.obs.size() + action.size());
    in << t.obs, action;
    Mlp::Workspace critic_ws;
    j += critic_.forward(in, critic_ws)(0);

    Vector grad_out(1);
    grad_out[0] = -inv_batch;  // descend on -Q
    Mlp scratch = critic_.like();
    const Vector grad_in = critic_.backward(critic_ws, grad_out, scratch);
    const Vector grad_action = grad_in.tail(action.size());
    const Vector grad_raw =
        grad_action.cwiseProduct(bounds_).cwiseProduct(
            (Vector::Ones(raw.size()) - tanh_raw.cwiseProduct(tanh_raw)));
    actor_.backward(actor_ws, grad_raw, actor_grads);
  }
  stats.actor_objective = j * inv_batch;

  if (!critic_grads.finite() || !actor_grads.finite() || !std::isfinite(stats.critic_loss)) {
    stats.ok = false;
    return stats;
  }

  critic_opt_.step(critic_, critic_grads);
  actor_opt_.step(actor_, actor_grads);
  critic_target_.soft_update_from(critic_, hyper_.tau);
  actor_target_.soft_update_from(actor_, hyper_.tau);
  return stats;
}

}  // namespace certctl::learn
