#include "certctl/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace certctl::learn {

Mlp::Mlp(std::vector<int> sizes, std::uint64_t seed) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least two layer sizes");
  std::mt19937_64 rng(seed);
  const int layers = static_cast<int>(sizes_.size()) - 1;
  weights_.resize(layers);
  biases_.resize(layers);
  for (int l = 0; l < layers; ++l) {
    const int fan_in = sizes_[l];
    const double bound = (l == layers - 1) ? 3e-3 : 1.0 / std::sqrt(double(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    weights_[l] = Matrix::NullaryExpr(sizes_[l + 1], fan_in, [&]() { return dist(rng); });
    biases_[l] = Vector::NullaryExpr(sizes_[l + 1], [&]() { return dist(rng); });
  }
}

Vector Mlp::forward(const Vector& in) const {
  Workspace ws;
  return forward(in, ws);
}

Vector Mlp::forward(const Vector& in, Workspace& ws) const {
  if (in.size() != input_dim()) throw std::invalid_argument("Mlp::forward: input size mismatch");
  const int layers = num_layers();
  ws.input = in;
  ws.pre.resize(layers);
  ws.act.resize(layers);
  Vector a = in;
  for (int l = 0; l < layers; ++l) {
    ws.pre[l] = weights_[l] * a + biases_[l];
    if (l + 1 < layers) {
      ws.act[l] = ws.pre[l].array().tanh();
    } else {
      ws.act[l] = ws.pre[l];
    }
    a = ws.act[l];
  }
  return a;
}

Vector Mlp::backward(const Workspace& ws, const Vector& grad_out, Mlp& grads) const {
  const int layers = num_layers();
  Vector delta = grad_out;
  for (int l = layers - 1; l >= 0; --l) {
    if (l + 1 < layers) {
      // Through tanh: act = tanh(pre) so d pre = (1 - act^2) d act.
      delta = delta.cwiseProduct(Vector::Ones(delta.size()) - ws.act[l].cwiseProduct(ws.act[l]));
    }
    const Vector& below = (l == 0) ? ws.input : ws.act[l - 1];
    grads.weights_[l].noalias() += delta * below.transpose();
    grads.biases_[l] += delta;
    delta = (weights_[l].transpose() * delta).eval();
  }
  return delta;
}

Mlp Mlp::like() const {
  Mlp z;
  z.sizes_ = sizes_;
  z.weights_.resize(weights_.size());
  z.biases_.resize(biases_.size());
  for (size_t l = 0; l < weights_.size(); ++l) {
    z.weights_[l] = Matrix::Zero(weights_[l].rows(), weights_[l].cols());
    z.biases_[l] = Vector::Zero(biases_[l].size());
  }
  return z;
}

void Mlp::set_zero() {
  for (auto& w : weights_) w.setZero();
  for (auto& b : biases_) b.setZero();
}

void Mlp::axpy(double scale, const Mlp& other) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] += scale * other.weights_[l];
    biases_[l] += scale * other.biases_[l];
  }
}

void Mlp::soft_update_from(const Mlp& src, double tau) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = tau * src.weights_[l] + (1.0 - tau) * weights_[l];
    biases_[l] = tau * src.biases_[l] + (1.0 - tau) * biases_[l];
  }
}

double Mlp::max_abs_param() const {
  double m = 0.0;
  for (const auto& w : weights_) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : biases_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

bool Mlp::finite() const {
  for (const auto& w : weights_)
    if (!w.allFinite()) return false;
  for (const auto& b : biases_)
    if (!b.allFinite()) return false;
  return true;
}

nlohmann::ordered_json Mlp::to_json() const {
  nlohmann::ordered_json j;
  j["sizes"] = sizes_;
  std::vector<std::string> acts;
  for (int l = 0; l < num_layers(); ++l)
    acts.push_back(l + 1 < num_layers() ? "tanh" : "linear");
  j["activations"] = acts;
  nlohmann::ordered_json ws = nlohmann::ordered_json::array();
  nlohmann::ordered_json bs = nlohmann::ordered_json::array();
  for (int l = 0; l < num_layers(); ++l) {
    std::vector<double> flat(weights_[l].size());
    // row-major serialization
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c)
        flat[r * weights_[l].cols() + c] = weights_[l](r, c);
    ws.push_back(flat);
    bs.push_back(std::vector<double>(biases_[l].data(), biases_[l].data() + biases_[l].size()));
  }
  j["weights"] = ws;
  j["biases"] = bs;
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp net;
  net.sizes_ = j.at("sizes").get<std::vector<int>>();
  if (net.sizes_.size() < 2) throw std::invalid_argument("Mlp::from_json: bad sizes");
  const auto acts = j.at("activations").get<std::vector<std::string>>();
  if (acts.size() != net.sizes_.size() - 1)
    throw std::invalid_argument("Mlp::from_json: activation count mismatch");
  for (size_t l = 0; l + 1 < acts.size(); ++l)
    if (acts[l] != "tanh") throw std::invalid_argument("Mlp::from_json: unsupported hidden activation");
  if (acts.back() != "linear")
    throw std::invalid_argument("Mlp::from_json: unsupported output activation");
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  const int layers = static_cast<int>(net.sizes_.size()) - 1;
  if (static_cast<int>(ws.size()) != layers || static_cast<int>(bs.size()) != layers)
    throw std::invalid_argument("Mlp::from_json: layer count mismatch");
  net.weights_.resize(layers);
  net.biases_.resize(layers);
  for (int l = 0; l < layers; ++l) {
    const auto flat = ws[l].get<std::vector<double>>();
    const int rows = net.sizes_[l + 1], cols = net.sizes_[l];
    if (static_cast<int>(flat.size()) != rows * cols)
      throw std::invalid_argument("Mlp::from_json: weight size mismatch");
    net.weights_[l].resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) net.weights_[l](r, c) = flat[r * cols + c];
    const auto bias = bs[l].get<std::vector<double>>();
    if (static_cast<int>(bias.size()) != rows)
      throw std::invalid_argument("Mlp::from_json: bias size mismatch");
    net.biases_[l] = Eigen::Map<const Vector>(bias.data(), rows);
  }
  return net;
}

Adam::Adam(const Mlp& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.like()), v_(net.like()) {}

void Adam::step(Mlp& params, const Mlp& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  auto update = [&](Matrix& p, Matrix& m, Matrix& v, const Matrix& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    p.array() -= lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps_);
  };
  for (size_t l = 0; l < params.weights().size(); ++l) {
    update(params.weights()[l], m_.weights()[l], v_.weights()[l], grads.weights()[l]);
    Matrix pb = params.biases()[l], mb = m_.biases()[l], vb = v_.biases()[l];
    update(pb, mb, vb, grads.biases()[l]);
    params.biases()[l] = pb;
    m_.biases()[l] = mb;
    v_.biases()[l] = vb;
  }
}

}  // namespace certctl::learn
