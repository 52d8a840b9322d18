#pragma once

#include <memory>
#include <string>
#include <vector>

#include "certctl/plant.hpp"
#include "certctl/types.hpp"

namespace certctl::cbf {

/// K_b gain row from real negative poles: coefficients of the monic
/// polynomial with those roots, constant term first, so that
/// mu_b + K_b eta_b >= 0 gives exponential barrier dynamics.
RowVector pole_place_kb(const std::vector<double>& poles);

/// Exponential control barrier function of relative degree r_b, possibly
/// depending on a parameter vector psi. Lie derivatives are evaluated
/// against a supplied plant, so the same barrier serves nominal and true
/// models. Implementations here assume the mechanical structure
/// x = [q, qdot] with f = [x1, .] and g = [0, .].
class Ecbf {
 public:
  Ecbf(std::string name, int r_b, int param_dim, RowVector k_b)
      : name_(std::move(name)), r_b_(r_b), q_(param_dim), k_b_(std::move(k_b)) {}
  virtual ~Ecbf() = default;

  const std::string& name() const { return name_; }
  int relative_degree() const { return r_b_; }
  int param_dim() const { return q_; }
  const RowVector& k_b() const { return k_b_; }

  virtual double value(const Vector& x, const Vector& psi) const = 0;
  /// L_f^k B(x, psi) for k = 1..r_b against the given plant.
  virtual double lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                      const Vector& psi, int k) const = 0;
  /// L_g L_f^{r_b-1} B(x, psi), 1 x m.
  virtual RowVector lg_lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                            const Vector& psi) const = 0;

 private:
  std::string name_;
  int r_b_, q_;
  RowVector k_b_;
};

using EcbfPtr = std::shared_ptr<const Ecbf>;

struct BarrierRow {
  Vector eta_b;      // [B, L_f B, ..., L_f^{r_b-1} B]
  double lf_rb_b = 0.0;
  RowVector lg_lf_b;  // 1 x m
};

/// eta_b(x) stacked from B and its Lie derivatives against `plant`.
Vector barrier_eta(const Ecbf& ecbf, const dyn::ControlAffinePlant& plant,
                   const Vector& x, const Vector& psi);

/// (L_f^{r_b} B, L_g L_f^{r_b-1} B): B^(r_b) = first + second * u for `plant`.
std::pair<double, RowVector> barrier_virtual_terms(const Ecbf& ecbf,
                                                   const dyn::ControlAffinePlant& plant,
                                                   const Vector& x, const Vector& psi);

/// B = sign * (x0 - bound). sign=+1 keeps the position above the bound,
/// sign=-1 keeps it below (wall). When `bound_from_psi` the bound is psi[0]
/// (param_dim 1), otherwise the fixed value given at construction.
class PositionBoundBarrier final : public Ecbf {
 public:
  PositionBoundBarrier(double sign, double fixed_bound, bool bound_from_psi,
                       RowVector k_b, std::string name = "position_bound");
  double value(const Vector& x, const Vector& psi) const override;
  double lf_b(const dyn::ControlAffinePlant& plant, const Vector& x, const Vector& psi,
              int k) const override;
  RowVector lg_lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                    const Vector& psi) const override;

 private:
  double bound(const Vector& psi) const;
  double sign_;
  double fixed_bound_;
  bool from_psi_;
};

/// B = theta_max^2 - theta^2 for plants with x = [theta, theta_dot].
class AngleBoxBarrier final : public Ecbf {
 public:
  AngleBoxBarrier(double theta_max, RowVector k_b);
  double value(const Vector& x, const Vector& psi) const override;
  double lf_b(const dyn::ControlAffinePlant& plant, const Vector& x, const Vector& psi,
              int k) const override;
  RowVector lg_lf_b(const dyn::ControlAffinePlant& plant, const Vector& x,
                    const Vector& psi) const override;

 private:
  double theta_max_;
};

/// Known types: "position_max" (wall, B = bound - x0), "position_min"
/// (B = x0 - bound), "angle_box". `bound_from_psi` applies to the position
/// barriers only.
EcbfPtr make_barrier(const std::string& type, double bound, bool bound_from_psi,
                     const std::vector<double>& poles);

}  // namespace certctl::cbf
