#include "certctl/plant.hpp"

#include <stdexcept>

namespace certctl::dyn {

PlantPair::PlantPair(PlantPtr truth, PlantPtr nominal)
    : true_plant(std::move(truth)), nominal_plant(std::move(nominal)) {
  if (!true_plant || !nominal_plant)
    throw std::invalid_argument("PlantPair: null plant");
  if (true_plant->state_dim() != nominal_plant->state_dim() ||
      true_plant->input_dim() != nominal_plant->input_dim() ||
      true_plant->relative_degree() != nominal_plant->relative_degree())
    throw std::invalid_argument("PlantPair: plants must share (n, m, r)");
}

namespace {

Matrix invert_decoupling(const Matrix& d) {
  Eigen::FullPivLU<Matrix> lu(d);
  if (!lu.isInvertible()) throw std::runtime_error("lost relative degree");
  return lu.inverse();
}

}  // namespace

LieDerivatives lie_derivatives(const ControlAffinePlant& plant, const Vector& x) {
  LieDerivatives out;
  out.lf_r_h = plant.lf_h(x, plant.relative_degree());
  out.lg_lf_r1_h = plant.lg_lf_h(x);
  Eigen::FullPivLU<Matrix> lu(out.lg_lf_r1_h);
  if (!lu.isInvertible()) throw std::runtime_error("lost relative degree");
  return out;
}

Vector feedforward_input(const ControlAffinePlant& plant, const Vector& x) {
  const LieDerivatives ld = lie_derivatives(plant, x);
  return -invert_decoupling(ld.lg_lf_r1_h) * ld.lf_r_h;
}

MismatchTerms mismatch_oracle(const PlantPair& pair, const Vector& x) {
  const LieDerivatives truth = lie_derivatives(*pair.true_plant, x);
  const LieDerivatives nom = lie_derivatives(*pair.nominal_plant, x);
  const Matrix nom_inv = invert_decoupling(nom.lg_lf_r1_h);
  const int m = pair.true_plant->input_dim();

  MismatchTerms d;
  d.delta2 = truth.lg_lf_r1_h * nom_inv - Matrix::Identity(m, m);
  d.delta1 = truth.lf_r_h - truth.lg_lf_r1_h * nom_inv * nom.lf_r_h;
  d.delta3 = d.delta2 + Matrix::Identity(m, m);
  return d;
}

Vector true_derivative(const ControlAffinePlant& plant, const Vector& x, const Vector& u) {
  if (x.size() != plant.state_dim() || u.size() != plant.input_dim())
    throw std::invalid_argument("true_derivative: dimension mismatch");
  return plant.f(x) + plant.g(x) * u;
}

}  // namespace certctl::dyn
