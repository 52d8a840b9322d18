#pragma once

#include <memory>
#include <string>
#include <vector>

#include "certctl/plant.hpp"
#include "certctl/types.hpp"

namespace certctl::ctrl {

/// One control-affine constraint row zeta(x, mu) = a(x) mu + b(x) <= 0.
/// The physical quantity is evaluated against `plant` (true or nominal),
/// while the mu parameterization always goes through the nominal
/// pre-control u = u~(x, mu); that is what makes the row affine in mu.
class AffineConstraintSpec {
 public:
  explicit AffineConstraintSpec(std::string name) : name_(std::move(name)) {}
  virtual ~AffineConstraintSpec() = default;
  const std::string& name() const { return name_; }

  struct Row {
    RowVector a;  // 1 x m
    double b = 0.0;
  };

  virtual Row evaluate(const dyn::ControlAffinePlant& plant,
                       const dyn::ControlAffinePlant& nominal, const Vector& x) const = 0;

  /// Constraint value measured from trajectory data alone (no plant fields),
  /// e.g. via a backward difference of the recorded velocity.
  virtual double measure(const Vector& x_prev, const Vector& x_curr, double ts) const = 0;

 private:
  std::string name_;
};

using ConstraintPtr = std::shared_ptr<const AffineConstraintSpec>;

/// sign * y^(r) - a_max <= 0 on a relative-degree-2 output: bounds the output
/// acceleration. `make_accel_bound_rows` emits the symmetric +/- pair.
class OutputAccelBound final : public AffineConstraintSpec {
 public:
  OutputAccelBound(double sign, double a_max);
  Row evaluate(const dyn::ControlAffinePlant& plant,
               const dyn::ControlAffinePlant& nominal, const Vector& x) const override;
  double measure(const Vector& x_prev, const Vector& x_curr, double ts) const override;

 private:
  double sign_, a_max_;
};

std::vector<ConstraintPtr> make_accel_bound_rows(double a_max);

}  // namespace certctl::ctrl
