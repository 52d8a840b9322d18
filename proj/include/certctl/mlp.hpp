#pragma once

#include <cstdint>
#include <vector>

#include "certctl/types.hpp"
#include "json.hpp"

namespace certctl::learn {

/// Fully connected network, tanh hidden layers, linear output, explicit
/// forward/backward passes (no autodiff).
class Mlp {
 public:
  Mlp() = default;
  /// sizes = [in, hidden..., out]; weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
  /// final layer U(-3e-3, 3e-3).
  Mlp(std::vector<int> sizes, std::uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(weights_.size()); }

  struct Workspace {
    Vector input;
    std::vector<Vector> pre;  // pre-activations per layer
    std::vector<Vector> act;  // post-activations per layer
  };

  Vector forward(const Vector& in) const;
  Vector forward(const Vector& in, Workspace& ws) const;

  /// Backpropagates dL/d(output); accumulates parameter gradients into
  /// `grads` (same architecture, zero-initialized by caller via like()) and
  /// returns dL/d(input).
  Vector backward(const Workspace& ws, const Vector& grad_out, Mlp& grads) const;

  /// Zero-valued network with this architecture (gradient accumulator).
  Mlp like() const;
  void set_zero();
  void axpy(double scale, const Mlp& other);             // this += scale * other
  void soft_update_from(const Mlp& src, double tau);     // this = tau src + (1-tau) this
  double max_abs_param() const;
  bool finite() const;

  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }

  nlohmann::ordered_json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// Adam optimizer over an Mlp's parameters.
class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  /// One descent step: params -= lr * adam(grads).
  void step(Mlp& params, const Mlp& grads);

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t t_ = 0;
  Mlp m_, v_;
};

}  // namespace certctl::learn
