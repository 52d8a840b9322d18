#include "certctl/policy.hpp"

#include <fstream>
#include <stdexcept>

namespace certctl::learn {

Vector action_bounds_for_layout(const ctrl::PolicyLayout& layout, double alpha_max,
                                double beta_max) {
  Vector bounds(layout.action_dim());
  int at = 0;
  for (int g = 0; g < 1 + layout.n_b + layout.n_c; ++g) {
    for (int i = 0; i < layout.m; ++i) bounds[at++] = alpha_max;
    bounds[at++] = beta_max;
  }
  return bounds;
}

MlpEstimatorPolicy::MlpEstimatorPolicy(ctrl::PolicyLayout layout, Mlp actor,
                                       double alpha_max, double beta_max,
                                       int episodes_trained)
    : UncertaintyEstimator(layout),
      actor_(std::move(actor)),
      bounds_(action_bounds_for_layout(layout, alpha_max, beta_max)),
      alpha_max_(alpha_max),
      beta_max_(beta_max),
      episodes_trained_(episodes_trained) {
  if (actor_.output_dim() != layout.action_dim())
    throw std::invalid_argument("actor output dim does not match policy layout");
}

Vector MlpEstimatorPolicy::action(const Vector& obs) const {
  return bounds_.cwiseProduct(actor_.forward(obs).array().tanh().matrix());
}

ctrl::EstimatorOutputs MlpEstimatorPolicy::evaluate(const Vector& x, const Vector& psi) const {
  const ctrl::PolicyLayout& l = layout();
  if (psi.size() != l.q)
    throw std::invalid_argument("psi size does not match policy layout");
  Vector obs(x.size() + psi.size());
  obs << x, psi;
  return ctrl::unpack_outputs(l, action(obs));
}

nlohmann::ordered_json MlpEstimatorPolicy::to_json() const {
  const ctrl::PolicyLayout& l = layout();
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["layout"] = {{"m", l.m}, {"n_b", l.n_b}, {"n_c", l.n_c}, {"q", l.q}};
  j["alpha_max"] = alpha_max_;
  j["beta_max"] = beta_max_;
  j["episodes_trained"] = episodes_trained_;
  j["actor"] = actor_.to_json();
  if (critic_) j["critic"] = critic_->to_json();
  return j;
}

MlpEstimatorPolicy MlpEstimatorPolicy::from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported policy format version");
  ctrl::PolicyLayout layout;
  layout.m = j.at("layout").at("m").get<int>();
  layout.n_b = j.at("layout").at("n_b").get<int>();
  layout.n_c = j.at("layout").at("n_c").get<int>();
  layout.q = j.at("layout").at("q").get<int>();
  MlpEstimatorPolicy policy(layout, Mlp::from_json(j.at("actor")),
                            j.at("alpha_max").get<double>(), j.at("beta_max").get<double>(),
                            j.value("episodes_trained", 0));
  if (j.contains("critic")) policy.critic_ = Mlp::from_json(j.at("critic"));
  return policy;
}

void MlpEstimatorPolicy::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy file: " + path);
  out << to_json().dump(1) << "\n";
}

MlpEstimatorPolicy MlpEstimatorPolicy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read policy file: " + path);
  nlohmann::json j;
  try {
    in >> j;
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed policy file " + path + ": " + e.what());
  }
}

}  // namespace certctl::learn
