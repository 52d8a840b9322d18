#include "certctl/selftest.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "certctl/episode.hpp"
#include "certctl/integrate.hpp"
#include "certctl/linalg.hpp"

namespace certctl::selftest {

double pgd_qp_objective(const linalg::QpProblem& qp, int iters, bool* feasible) {
  if (feasible) *feasible = true;
  const Eigen::LDLT<Matrix> h_fac(qp.H + 1e-12 * Matrix::Identity(qp.dim(), qp.dim()));
  auto primal = [&](const Vector& lam) -> Vector {
    return h_fac.solve(-(qp.c + qp.A_in.transpose() * lam));
  };
  const int mc = qp.num_constraints();
  if (mc == 0) {
    const Vector v = h_fac.solve(-qp.c);
    return 0.5 * v.dot(qp.H * v) + qp.c.dot(v);
  }

  // Lipschitz constant of the dual gradient.
  const Matrix aha = qp.A_in * h_fac.solve(Matrix(qp.A_in.transpose()));
  const double lipschitz =
      std::max(1e-12, linalg::eig_sym(0.5 * (aha + aha.transpose())).maxCoeff());
  const double step = 1.0 / lipschitz;

  Vector lam = Vector::Zero(mc);
  Vector y = lam;
  double t_momentum = 1.0;
  for (int k = 0; k < iters; ++k) {
    const Vector v = primal(y);
    const Vector grad = qp.A_in * v - qp.b_in;  // ascent direction on the dual
    Vector lam_next = (y + step * grad).cwiseMax(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    y = lam_next + ((t_momentum - 1.0) / t_next) * (lam_next - lam);
    lam = lam_next;
    t_momentum = t_next;
    if (lam.norm() > 1e9) {
      if (feasible) *feasible = false;
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  const Vector v = primal(lam);
  return 0.5 * v.dot(qp.H * v) + qp.c.dot(v);
}

double zero_policy_gap(const cli::Assembled& a, ctrl::ControllerVariant rl_variant,
                       int samples, std::uint64_t seed) {
  const ctrl::ZeroEstimator zero(a.layout);
  std::mt19937_64 rng(seed);
  const auto [lo, hi] = a.pair.nominal_plant->domain();
  sim::UniformBox box{lo, hi};
  std::uniform_real_distribution<double> psi_dist(a.psi_spec.lo, a.psi_spec.hi);

  const ctrl::ControllerVariant nominal_variant =
      rl_variant == ctrl::ControllerVariant::RlCbfClfQp ? ctrl::ControllerVariant::CbfClfQp
                                                        : ctrl::ControllerVariant::ClfQp;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = box.sample(rng);
    Vector psi(a.psi_spec.dim);
    for (int i = 0; i < a.psi_spec.dim; ++i) psi[i] = psi_dist(rng);
    const auto rl = ctrl::run_controller(rl_variant, a.setup, &zero, x, psi);
    const auto nom = ctrl::run_controller(nominal_variant, a.setup, nullptr, x, psi);
    if (rl.qp_status != nom.qp_status) return std::numeric_limits<double>::infinity();
    if (rl.qp_status != linalg::QpStatus::Optimal) continue;
    worst = std::max(worst, (rl.mu - nom.mu).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

double max_abs_second_diff(const std::vector<double>& series, double ts) {
  double worst = 0.0;
  for (size_t k = 1; k + 1 < series.size(); ++k) {
    const double sd = (series[k + 1] - 2.0 * series[k] + series[k - 1]) / (ts * ts);
    worst = std::max(worst, std::abs(sd));
  }
  return worst;
}

}  // namespace

OracleCheck check_oracle_estimators(const cli::Assembled& a,
                                    ctrl::ControllerVariant variant, int episodes,
                                    std::uint64_t seed) {
  const dyn::ControlAffinePlant& nominal = *a.pair.nominal_plant;
  const ctrl::OracleEstimator oracle(a.layout, a.pair, a.setup.clf, a.setup.barriers,
                                     a.setup.constraints);
  learn::RewardWeights weights;
  sim::EpisodeOptions opts = a.episode;
  opts.sigma_mu = 0.0;

  std::mt19937_64 rng(seed);
  OracleCheck check;

  for (int e = 0; e < episodes; ++e) {
    const Vector x0 = a.x0_box.sample(rng);
    Vector psi(a.psi_spec.dim);
    for (int i = 0; i < a.psi_spec.dim; ++i) {
      std::uniform_real_distribution<double> dist(a.psi_spec.lo, a.psi_spec.hi);
      psi[i] = a.psi_spec.lo == a.psi_spec.hi ? a.psi_spec.lo : dist(rng);
    }
    const sim::EpisodeTrace trace =
        sim::run_episode(a.pair, variant, a.setup, &oracle, weights, opts, x0, psi);
    const int n = trace.steps();
    if (n < 3) continue;

    // Rebuild the sampled series, terminal snapshot included.
    std::vector<double> v_series(trace.V);
    v_series.push_back(trace.V_final);
    const int n_b = trace.num_barriers();
    const int n_c = trace.num_constraints();
    std::vector<std::vector<double>> bdot_series(n_b);
    for (int i = 0; i < n_b; ++i) {
      const auto& ecbf = *a.setup.barriers[i];
      const int rb = ecbf.relative_degree();
      for (int k = 0; k < n; ++k)
        bdot_series[i].push_back(rb == 1 ? ecbf.value(trace.x[k], psi)
                                         : ecbf.lf_b(nominal, trace.x[k], psi, rb - 1));
      bdot_series[i].push_back(rb == 1 ? ecbf.value(trace.x_final, psi)
                                       : ecbf.lf_b(nominal, trace.x_final, psi, rb - 1));
    }
    std::vector<double> vel_series;
    for (int k = 0; k < n; ++k) vel_series.push_back(trace.x[k][1]);
    vel_series.push_back(trace.x_final[1]);

    const double v_bound = std::max(1e-12, trace.ts * max_abs_second_diff(v_series, trace.ts));
    check.v_bound = std::max(check.v_bound, v_bound);
    std::vector<double> b_bounds(n_b);
    for (int i = 0; i < n_b; ++i) {
      b_bounds[i] = std::max(1e-12, trace.ts * max_abs_second_diff(bdot_series[i], trace.ts));
      check.b_bound = std::max(check.b_bound, b_bounds[i]);
    }
    const double c_bound =
        std::max(1e-12, trace.ts * max_abs_second_diff(vel_series, trace.ts));
    check.c_bound = std::max(check.c_bound, c_bound);

    for (int k = 0; k < n; ++k) {
      if (trace.status[k] != linalg::QpStatus::Optimal) continue;
      const double v_next = (k + 1 < n) ? trace.V[k + 1] : trace.V_final;
      const double vdot_truth = (v_next - trace.V[k]) / trace.ts;
      const double vdot_est =
          ctrl::estimate_vdot(oracle, a.setup.clf, nominal, trace.x[k], trace.mu[k], psi);
      check.max_v_err = std::max(check.max_v_err, std::abs(vdot_truth - vdot_est));

      for (int i = 0; i < n_b; ++i) {
        const double truth = (bdot_series[i][k + 1] - bdot_series[i][k]) / trace.ts;
        const double est = ctrl::estimate_b_deriv(oracle, *a.setup.barriers[i], i, nominal,
                                                  trace.x[k], psi, trace.mu[k]);
        check.max_b_err = std::max(check.max_b_err, std::abs(truth - est));
      }
      for (int j = 0; j < n_c; ++j) {
        const Vector& x_next = (k + 1 < n) ? trace.x[k + 1] : trace.x_final;
        const double truth = a.setup.constraints[j]->measure(trace.x[k], x_next, trace.ts);
        const double est = ctrl::estimate_constraint_row(oracle, *a.setup.constraints[j], j,
                                                         nominal, trace.x[k], trace.mu[k], psi);
        check.max_c_err = std::max(check.max_c_err, std::abs(truth - est));
      }
      ++check.checked_steps;
    }
  }
  if (a.setup.barriers.empty()) check.b_bound = std::max(check.b_bound, 1e-12);
  if (a.setup.constraints.empty()) check.c_bound = std::max(check.c_bound, 1e-12);
  return check;
}

namespace {

cli::RunConfig pendulum_scale2_config() {
  cli::RunConfig cfg;
  cfg.plant_id = "inverted_pendulum";
  cfg.uncertainty = dyn::UncertaintyMode::Scale;
  cfg.scale = 2.0;
  cfg.variant = ctrl::ControllerVariant::RlCbfClfQp;
  cfg.barriers.push_back({"angle_box", 1.2, "fixed", 0, 0, {-2.0, -4.0}});
  cfg.constraints.push_back({"output_accel_bound", 30.0});
  cfg.x0_min = {-0.4, -0.2};
  cfg.x0_max = {0.4, 0.2};
  cfg.horizon = 3.0;
  cfg.sigma = 0.0;
  return cfg;
}

linalg::QpProblem random_feasible_qp(std::mt19937_64& rng, int dim, int rows) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a = Matrix::NullaryExpr(dim, dim, [&]() { return gauss(rng); });
  linalg::QpProblem qp;
  qp.H = a.transpose() * a + 0.1 * Matrix::Identity(dim, dim);
  qp.c = Vector::NullaryExpr(dim, [&]() { return gauss(rng); });
  qp.A_in = Matrix::NullaryExpr(rows, dim, [&]() { return gauss(rng); });
  const Vector interior = Vector::NullaryExpr(dim, [&]() { return gauss(rng); });
  std::uniform_real_distribution<double> slack(0.0, 2.0);
  qp.b_in.resize(rows);
  for (int i = 0; i < rows; ++i) qp.b_in[i] = (qp.A_in.row(i) * interior)(0) + slack(rng);
  return qp;
}

}  // namespace

std::vector<PropertyResult> run_selftest() {
  std::vector<PropertyResult> results;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  };

  {  // Lyapunov residuals on random Hurwitz systems.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    bool pd = true;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + int(trial % 5);
      Matrix a = Matrix::NullaryExpr(n, n, [&]() { return gauss(rng); });
      a -= (linalg::max_eigenvalue_real_part(a) + 0.5) * Matrix::Identity(n, n);
      Matrix qb = Matrix::NullaryExpr(n, n, [&]() { return gauss(rng); });
      const Matrix q = qb.transpose() * qb + 0.1 * Matrix::Identity(n, n);
      const Matrix p = linalg::solve_lyapunov(a, q);
      worst = std::max(worst,
                       (a.transpose() * p + p * a + q).cwiseAbs().maxCoeff());
      pd = pd && linalg::eig_sym(p).minCoeff() > 0;
    }
    std::ostringstream d;
    d << "max residual " << worst;
    add("lyapunov_residual", worst <= 1e-10 && pd, d.str());
  }

  {  // QP vs projected-gradient oracle.
    std::mt19937_64 rng(12);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const linalg::QpProblem qp = random_feasible_qp(rng, 3 + trial % 4, 5 + trial % 4);
      const auto sol = linalg::solve_qp(qp);
      if (sol.status != linalg::QpStatus::Optimal) {
        worst = std::numeric_limits<double>::infinity();
        break;
      }
      const double oracle = pgd_qp_objective(qp, 200000);
      worst = std::max(worst, std::abs(sol.objective(qp) - oracle));
    }
    std::ostringstream d;
    d << "max objective gap " << worst;
    add("qp_oracle_agreement", worst <= 1e-5, d.str());
  }

  {  // Analytic Lie derivatives vs finite differences along flows.
    double worst = 0.0;
    for (const std::string id : {"inverted_pendulum", "double_integrator", "planar_cart"}) {
      const auto plant = dyn::make_plant(id, {});
      std::mt19937_64 rng(13);
      const auto [lo, hi] = plant->domain();
      sim::UniformBox box{lo, hi};
      // RK4 with signed dt so the flow can run backward.
      const auto flow = [&](const Vector& x, double dt) {
        const Vector u0 = Vector::Zero(plant->input_dim());
        auto deriv = [&](const Vector& s) { return dyn::true_derivative(*plant, s, u0); };
        const Vector k1 = deriv(x);
        const Vector k2 = deriv(x + 0.5 * dt * k1);
        const Vector k3 = deriv(x + 0.5 * dt * k2);
        const Vector k4 = deriv(x + dt * k3);
        return Vector(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
      };
      for (int s = 0; s < 20; ++s) {
        const Vector x = box.sample(rng);
        const double dt = 1e-4;
        const Vector xp = flow(x, dt);
        const Vector xm = flow(x, -dt);
        const double fd1 = ((plant->h(xp) - plant->h(xm)) / (2 * dt))(0);
        const double an1 = plant->lf_h(x, 1)(0);
        worst = std::max(worst, std::abs(fd1 - an1) / std::max(1.0, std::abs(an1)));
        const double fd2 = ((plant->h(xp) - 2 * plant->h(x) + plant->h(xm)) / (dt * dt))(0);
        const double an2 = plant->lf_h(x, 2)(0);
        worst = std::max(worst, std::abs(fd2 - an2) / std::max(1.0, std::abs(an2)));
      }
    }
    std::ostringstream d;
    d << "max relative error " << worst;
    add("lie_derivatives_fd", worst <= 1e-5, d.str());
  }

  {  // Identical plants make the mismatch oracle exactly zero.
    bool ok = true;
    for (const std::string id : {"inverted_pendulum", "double_integrator", "planar_cart"}) {
      const dyn::PlantPair pair =
          dyn::make_plant_pair(id, {}, dyn::UncertaintyMode::None, 0.0);
      std::mt19937_64 rng(14);
      const auto [lo, hi] = pair.nominal_plant->domain();
      sim::UniformBox box{lo, hi};
      for (int s = 0; s < 20; ++s) {
        const auto d = dyn::mismatch_oracle(pair, box.sample(rng));
        ok = ok && d.delta1.cwiseAbs().maxCoeff() == 0.0 &&
             d.delta2.cwiseAbs().maxCoeff() == 0.0;
      }
    }
    add("mismatch_identical_zero", ok, ok ? "exact zeros" : "nonzero mismatch");
  }

  {  // Zero-output policies reduce to the nominal controllers.
    cli::RunConfig cfg = pendulum_scale2_config();
    const cli::Assembled a = cli::assemble(cfg);
    const double gap_full = zero_policy_gap(a, ctrl::ControllerVariant::RlCbfClfQp, 25, 15);
    cfg.barriers.clear();
    cfg.constraints.clear();
    cfg.variant = ctrl::ControllerVariant::RlClfQp;
    const cli::Assembled a2 = cli::assemble(cfg);
    const double gap_clf = zero_policy_gap(a2, ctrl::ControllerVariant::RlClfQp, 25, 16);
    std::ostringstream d;
    d << "max |mu| gap " << std::max(gap_full, gap_clf);
    add("zero_policy_equivalence", std::max(gap_full, gap_clf) <= 1e-6, d.str());
  }

  {  // Oracle-policy estimators match differentiated truth.
    const cli::Assembled a = cli::assemble(pendulum_scale2_config());
    const auto check =
        check_oracle_estimators(a, ctrl::ControllerVariant::RlCbfClfQp, 2, 17);
    std::ostringstream d;
    d << "V " << check.max_v_err << "/" << check.v_bound << ", B " << check.max_b_err
      << "/" << check.b_bound << ", C " << check.max_c_err << "/" << check.c_bound;
    add("oracle_estimator_soundness", check.pass() && check.checked_steps > 0, d.str());
  }

  {  // Same seed, same bytes.
    const cli::Assembled a = cli::assemble(pendulum_scale2_config());
    learn::RewardWeights weights;
    Vector x0(2);
    x0 << 0.3, 0.0;
    auto run = [&]() {
      return sim::trace_to_csv(sim::run_episode(a.pair, ctrl::ControllerVariant::CbfClfQp,
                                                a.setup, nullptr, weights, a.episode, x0,
                                                Vector()));
    };
    const bool ok = run() == run();
    add("trace_determinism", ok, ok ? "byte-identical" : "traces differ");
  }

  return results;
}

}  // namespace certctl::selftest
