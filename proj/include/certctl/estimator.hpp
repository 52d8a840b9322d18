#pragma once

#include <memory>
#include <vector>

#include "certctl/barrier.hpp"
#include "certctl/constraint.hpp"
#include "certctl/fblin.hpp"
#include "certctl/plant.hpp"

namespace certctl::ctrl {

/// Output layout of an estimator policy:
/// [alpha_v (m), beta_v (1), {alpha_Bi (m), beta_Bi (1)}_i, {alpha_Cj (m), beta_Cj (1)}_j]
struct PolicyLayout {
  int m = 1;
  int n_b = 0;
  int n_c = 0;
  int q = 0;  // psi dimension appended to the observation

  int action_dim() const { return (m + 1) * (1 + n_b + n_c); }
  int obs_dim(int state_dim) const { return state_dim + q; }
  bool operator==(const PolicyLayout&) const = default;
};

struct EstimatorOutputs {
  Vector alpha_v;
  double beta_v = 0.0;
  std::vector<Vector> alpha_b;
  std::vector<double> beta_b;
  std::vector<Vector> alpha_c;
  std::vector<double> beta_c;
};

Vector pack_outputs(const PolicyLayout& layout, const EstimatorOutputs& out);
EstimatorOutputs unpack_outputs(const PolicyLayout& layout, const Vector& action);

/// Produces the affine corrections added to the nominal constraint rows.
class UncertaintyEstimator {
 public:
  explicit UncertaintyEstimator(PolicyLayout layout) : layout_(layout) {}
  virtual ~UncertaintyEstimator() = default;
  const PolicyLayout& layout() const { return layout_; }

  virtual EstimatorOutputs evaluate(const Vector& x, const Vector& psi) const = 0;

 private:
  PolicyLayout layout_;
};

using EstimatorPtr = std::shared_ptr<const UncertaintyEstimator>;

class ZeroEstimator final : public UncertaintyEstimator {
 public:
  explicit ZeroEstimator(PolicyLayout layout) : UncertaintyEstimator(layout) {}
  EstimatorOutputs evaluate(const Vector& x, const Vector& psi) const override;
};

/// Exact analytic mismatch terms computed from the plant pair; test-only
/// ground truth, never available to the controller or learner in training.
class OracleEstimator final : public UncertaintyEstimator {
 public:
  OracleEstimator(PolicyLayout layout, dyn::PlantPair pair, clf::ResClf clf,
                  std::vector<cbf::EcbfPtr> barriers, std::vector<ConstraintPtr> constraints);
  EstimatorOutputs evaluate(const Vector& x, const Vector& psi) const override;

 private:
  dyn::PlantPair pair_;
  clf::ResClf clf_;
  std::vector<cbf::EcbfPtr> barriers_;
  std::vector<ConstraintPtr> constraints_;
};

/// Fixed outputs decoded from an action vector; used during training rollouts
/// where the action (not the network) defines the step's estimates.
class FixedActionEstimator final : public UncertaintyEstimator {
 public:
  FixedActionEstimator(PolicyLayout layout, const Vector& action)
      : UncertaintyEstimator(layout), outputs_(unpack_outputs(layout, action)) {}
  EstimatorOutputs evaluate(const Vector&, const Vector&) const override { return outputs_; }

 private:
  EstimatorOutputs outputs_;
};

}  // namespace certctl::ctrl
