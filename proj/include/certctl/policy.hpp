#pragma once

#include <optional>
#include <string>

#include "certctl/estimator.hpp"
#include "certctl/mlp.hpp"

namespace certctl::learn {

/// Bounds vector matching the packed action layout: alpha entries get
/// alpha_max, beta entries beta_max.
Vector action_bounds_for_layout(const ctrl::PolicyLayout& layout, double alpha_max,
                                double beta_max);

/// Network-backed estimator: obs = [x; psi], outputs tanh-scaled to the
/// configured box and unpacked per the layout.
class MlpEstimatorPolicy final : public ctrl::UncertaintyEstimator {
 public:
  MlpEstimatorPolicy(ctrl::PolicyLayout layout, Mlp actor, double alpha_max,
                     double beta_max, int episodes_trained = 0);

  ctrl::EstimatorOutputs evaluate(const Vector& x, const Vector& psi) const override;
  Vector action(const Vector& obs) const;

  const Mlp& actor() const { return actor_; }
  double alpha_max() const { return alpha_max_; }
  double beta_max() const { return beta_max_; }
  int episodes_trained() const { return episodes_trained_; }
  void set_episodes_trained(int n) { episodes_trained_ = n; }
  std::optional<Mlp>& critic() { return critic_; }
  const std::optional<Mlp>& critic() const { return critic_; }

  nlohmann::ordered_json to_json() const;
  static MlpEstimatorPolicy from_json(const nlohmann::json& j);

  void save(const std::string& path) const;
  /// Throws std::runtime_error on unreadable or malformed files.
  static MlpEstimatorPolicy load(const std::string& path);

 private:
  Mlp actor_;
  Vector bounds_;
  double alpha_max_, beta_max_;
  int episodes_trained_ = 0;
  std::optional<Mlp> critic_;  // carried for training resume only
};

}  // namespace certctl::learn
