#pragma once

#include <memory>
#include <string>
#include <utility>

#include "certctl/types.hpp"

namespace certctl::dyn {

/// Control-affine plant  x' = f(x) + g(x) u,  y = h(x)  with hand-derived
/// Lie derivatives up to the vector relative degree r.
class ControlAffinePlant {
 public:
  ControlAffinePlant(std::string id, int n, int m, int r)
      : id_(std::move(id)), n_(n), m_(m), r_(r) {}
  virtual ~ControlAffinePlant() = default;

  const std::string& id() const { return id_; }
  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  int output_dim() const { return m_; }
  int relative_degree() const { return r_; }

  virtual Vector f(const Vector& x) const = 0;
  virtual Matrix g(const Vector& x) const = 0;
  virtual Vector h(const Vector& x) const = 0;

  /// L_f^k h(x) for k = 1..r.
  virtual Vector lf_h(const Vector& x, int k) const = 0;
  /// Decoupling matrix L_g L_f^{r-1} h(x), m x m.
  virtual Matrix lg_lf_h(const Vector& x) const = 0;

  /// Failure predicate used to terminate episodes.
  virtual bool failure(const Vector& x) const { return x.norm() > 1e3; }

  /// Box used to sample the operating domain D in tests and configs.
  virtual std::pair<Vector, Vector> domain() const = 0;

 private:
  std::string id_;
  int n_, m_, r_;
};

using PlantPtr = std::shared_ptr<const ControlAffinePlant>;

/// (true plant, nominal model); both share n, m and the relative degree.
struct PlantPair {
  PlantPtr true_plant;
  PlantPtr nominal_plant;

  PlantPair(PlantPtr truth, PlantPtr nominal);
};

/// Exact model-mismatch terms of the input-output channel.
struct MismatchTerms {
  Vector delta1;  // bias in y^(r)
  Matrix delta2;  // input-gain error
  Matrix delta3;  // delta2 + I
};

struct LieDerivatives {
  Vector lf_r_h;     // L_f^r h(x)
  Matrix lg_lf_r1_h; // L_g L_f^{r-1} h(x)
};

/// Top-order Lie derivatives; throws std::runtime_error("lost relative
/// degree") when the decoupling matrix is singular at x.
LieDerivatives lie_derivatives(const ControlAffinePlant& plant, const Vector& x);

/// Feedforward u*(x) = -(L_g L_f^{r-1} h)^{-1} L_f^r h.
Vector feedforward_input(const ControlAffinePlant& plant, const Vector& x);

/// delta1 = Lf_r_h - LgLf_h (LgLf_h~)^{-1} Lf_r_h~,  delta2 = LgLf_h (LgLf_h~)^{-1} - I.
MismatchTerms mismatch_oracle(const PlantPair& pair, const Vector& x);

/// f(x) + g(x) u.
Vector true_derivative(const ControlAffinePlant& plant, const Vector& x, const Vector& u);

}  // namespace certctl::dyn
