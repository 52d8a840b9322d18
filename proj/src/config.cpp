#include "certctl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "certctl/toml_lite.hpp"

namespace certctl::cli {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

const json& table(const json& j, const std::string& key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError("[" + key + "] must be a table");
  return j.at(key);
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override,
                      std::optional<std::string> out_override,
                      std::optional<int> episodes_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string raw = buf.str();

  json j;
  try {
    j = parse_toml(raw);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  RunConfig cfg;
  cfg.schema_version = get_or<int>(j, "schema_version", 1);
  check(cfg.schema_version == 1, "unsupported schema_version");
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "out");

  const json& plant = table(j, "plant");
  cfg.plant_id = get_or<std::string>(plant, "id", "");
  check(!cfg.plant_id.empty(), "missing [plant] id");
  cfg.plant_params.mass = get_or<double>(plant, "mass", 1.0);
  cfg.plant_params.length = get_or<double>(plant, "length", 1.0);
  cfg.plant_params.gravity = get_or<double>(plant, "gravity", 9.8);
  cfg.plant_params.friction = get_or<double>(plant, "friction", 0.5);
  cfg.plant_params.target = get_or<double>(plant, "target", 0.0);
  cfg.plant_params.fail_angle = get_or<double>(plant, "fail_angle", M_PI / 2);
  check(cfg.plant_params.mass > 0, "plant mass must be positive");

  const json& unc = table(j, "uncertainty");
  try {
    cfg.uncertainty =
        dyn::uncertainty_mode_from_string(get_or<std::string>(unc, "mode", "none"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.scale = get_or<double>(unc, "scale", 2.0);
  cfg.payload = get_or<double>(unc, "payload", 0.5);
  check(cfg.scale > 0, "uncertainty scale must be positive");

  const json& con = table(j, "controller");
  try {
    cfg.variant = ctrl::variant_from_string(get_or<std::string>(con, "variant", "clf-qp"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.relax_penalty = get_or<double>(con, "relax_penalty", 1e3);
  check(cfg.relax_penalty > 0, "relax_penalty must be positive");
  const double u_max = get_or<double>(con, "u_max", 20.0);
  cfg.u_max = u_max > 0 ? std::optional<double>(u_max) : std::nullopt;

  const json& clf = table(j, "clf");
  cfg.epsilon = get_or<double>(clf, "epsilon", 0.8);
  check(cfg.epsilon > 0 && cfg.epsilon <= 1.0, "epsilon must be in (0, 1]");
  cfg.lambda = get_or<double>(clf, "lambda", 0.0);
  cfg.clf_poles = get_or<std::vector<double>>(clf, "poles", {-2.0, -4.0});
  cfg.q_diag = get_or<std::vector<double>>(clf, "q_diag", {});
  for (double p : cfg.clf_poles) check(p < 0, "CLF poles must be negative reals");
  for (double q : cfg.q_diag) check(q > 0, "q_diag entries must be positive");

  if (j.contains("barriers")) {
    check(j.at("barriers").is_array(), "[[barriers]] must be an array of tables");
    for (const auto& b : j.at("barriers")) {
      BarrierConfig bc;
      bc.type = get_or<std::string>(b, "type", "position_max");
      bc.bound = get_or<double>(b, "bound", 1.0);
      bc.psi_source = get_or<std::string>(b, "psi_source", "fixed");
      bc.psi_min = get_or<double>(b, "psi_min", 0.8);
      bc.psi_max = get_or<double>(b, "psi_max", 1.2);
      bc.poles = get_or<std::vector<double>>(b, "poles", {-2.0, -4.0});
      check(bc.psi_source == "fixed" || bc.psi_source == "episode",
            "barrier psi_source must be fixed|episode");
      check(bc.psi_min <= bc.psi_max, "barrier psi range is empty");
      for (double p : bc.poles) check(p < 0, "barrier poles must be negative reals");
      cfg.barriers.push_back(bc);
    }
  }
  int psi_count = 0;
  for (const auto& b : cfg.barriers)
    if (b.psi_source == "episode") ++psi_count;
  check(psi_count <= 1, "at most one barrier may draw psi per episode");

  if (j.contains("constraints")) {
    check(j.at("constraints").is_array(), "[[constraints]] must be an array of tables");
    for (const auto& c : j.at("constraints")) {
      ConstraintConfig cc;
      cc.type = get_or<std::string>(c, "type", "output_accel_bound");
      cc.a_max = get_or<double>(c, "a_max", 3.0);
      check(cc.type == "output_accel_bound", "unknown constraint type: " + cc.type);
      check(cc.a_max > 0, "a_max must be positive");
      cfg.constraints.push_back(cc);
    }
  }

  const json& ep = table(j, "episode");
  cfg.horizon = get_or<double>(ep, "horizon", 5.0);
  cfg.ts = get_or<double>(ep, "ts", 0.01);
  check(cfg.ts > 0, "ts must be positive");
  check(cfg.horizon > 0, "horizon must be positive");
  const double steps = cfg.horizon / cfg.ts;
  check(std::abs(steps - std::lround(steps)) < 1e-9,
        "horizon must be an integral multiple of ts");
  cfg.x0_min = get_or<std::vector<double>>(ep, "x0_min", {});
  cfg.x0_max = get_or<std::vector<double>>(ep, "x0_max", {});
  cfg.sigma = get_or<double>(ep, "sigma", 0.1);
  check(cfg.sigma >= 0, "sigma must be nonnegative");
  cfg.max_consec_infeasible = get_or<int>(ep, "max_consec_infeasible", 25);

  const json& lr = table(j, "learning");
  auto& t = cfg.training;
  t.episodes = get_or<int>(lr, "episodes", 300);
  t.hyper.batch = get_or<int>(lr, "batch", 64);
  t.hyper.buffer_capacity = get_or<std::size_t>(lr, "buffer", 100000);
  t.hyper.gamma = get_or<double>(lr, "gamma", 0.99);
  t.hyper.tau = get_or<double>(lr, "tau", 0.005);
  t.hyper.actor_lr = get_or<double>(lr, "actor_lr", 1e-4);
  t.hyper.critic_lr = get_or<double>(lr, "critic_lr", 1e-3);
  {
    const auto hidden = get_or<std::vector<int>>(lr, "hidden", {64, 64});
    check(!hidden.empty(), "hidden layer list must be nonempty");
    t.hyper.hidden = hidden;
  }
  t.alpha_max = get_or<double>(lr, "alpha_max", 5.0);
  t.beta_max = get_or<double>(lr, "beta_max", 20.0);
  t.sigma_mu = cfg.sigma;
  t.action_noise = get_or<double>(lr, "action_noise", 0.1);
  t.noise_decay = get_or<double>(lr, "noise_decay", 0.995);
  t.warmup_steps = get_or<int>(lr, "warmup_steps", 1000);
  t.eval_every = get_or<int>(lr, "eval_every", 10);
  t.eval_episodes = get_or<int>(lr, "eval_episodes", 3);
  t.early_stop_patience = get_or<int>(lr, "early_stop_patience", 0);
  t.weights.w_v = get_or<double>(lr, "w_v", 1.0);
  t.weights.w_b = get_or<std::vector<double>>(lr, "w_b", {});
  t.weights.w_c = get_or<std::vector<double>>(lr, "w_c", {});
  t.weights.failure_penalty = get_or<double>(lr, "failure_penalty", 100.0);
  t.weights.infeasible_penalty = get_or<double>(lr, "infeasible_penalty", 1.0);
  check(t.episodes > 0, "learning episodes must be positive");
  check(t.hyper.batch > 0, "batch must be positive");
  check(t.alpha_max > 0 && t.beta_max > 0, "action bounds must be positive");
  check(t.eval_every > 0, "eval_every must be positive");
  check(t.eval_episodes > 0, "eval_episodes must be positive");

  const json& ev = table(j, "eval");
  cfg.eval_episodes = get_or<int>(ev, "episodes", 50);
  check(cfg.eval_episodes > 0, "eval episodes must be positive");

  const json& cmp = table(j, "compare");
  cfg.compare_variants = get_or<std::vector<std::string>>(cmp, "variants", {});
  cfg.compare_policies = get_or<std::vector<std::string>>(cmp, "policies", {});
  for (const auto& v : cfg.compare_variants) {
    try {
      (void)ctrl::variant_from_string(v);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  check(cfg.compare_policies.empty() ||
            cfg.compare_policies.size() == cfg.compare_variants.size(),
        "compare policies must align with compare variants");

  // Plant id is validated here so unknown ids fail at load time.
  try {
    (void)dyn::make_plant(cfg.plant_id, cfg.plant_params);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  // Overrides, folded into the hash.
  if (seed_override) cfg.seed = *seed_override;
  if (out_override) cfg.out_dir = *out_override;
  if (episodes_override) {
    check(*episodes_override > 0, "episodes override must be positive");
    cfg.training.episodes = *episodes_override;
    cfg.eval_episodes = *episodes_override;
  }
  cfg.training.seed = cfg.seed;

  std::ostringstream hash_src;
  hash_src << raw << "|seed=" << cfg.seed << "|episodes="
           << (episodes_override ? *episodes_override : -1);
  cfg.config_hash = hash_hex(fnv1a(hash_src.str()));
  return cfg;
}

Assembled assemble(const RunConfig& cfg) {
  const double amount =
      cfg.uncertainty == dyn::UncertaintyMode::Scale ? cfg.scale : cfg.payload;
  dyn::PlantPair pair =
      dyn::make_plant_pair(cfg.plant_id, cfg.plant_params, cfg.uncertainty, amount);
  const int n = pair.nominal_plant->state_dim();
  const int m = pair.nominal_plant->input_dim();
  const int r = pair.nominal_plant->relative_degree();

  Matrix q = Matrix::Identity(m * r, m * r);
  if (!cfg.q_diag.empty()) {
    if (static_cast<int>(cfg.q_diag.size()) != m * r)
      throw ConfigError("q_diag must have m*r entries");
    for (int i = 0; i < m * r; ++i) q(i, i) = cfg.q_diag[i];
  }
  if (static_cast<int>(cfg.clf_poles.size()) != r)
    throw ConfigError("CLF pole list must have r entries");

  ctrl::ControllerSetup setup;
  setup.nominal = pair.nominal_plant;
  setup.clf = clf::build_res_clf(m, r, cfg.clf_poles, cfg.epsilon, cfg.lambda, q);
  setup.relax_penalty = cfg.relax_penalty;
  setup.u_max = cfg.u_max;

  learn::PsiSpec psi_spec;
  for (const auto& bc : cfg.barriers) {
    const bool from_psi = bc.psi_source == "episode";
    setup.barriers.push_back(cbf::make_barrier(bc.type, bc.bound, from_psi, bc.poles));
    if (from_psi) {
      psi_spec.dim = 1;
      psi_spec.lo = bc.psi_min;
      psi_spec.hi = bc.psi_max;
    }
  }
  for (const auto& cc : cfg.constraints) {
    for (auto& row : ctrl::make_accel_bound_rows(cc.a_max)) setup.constraints.push_back(row);
  }

  ctrl::PolicyLayout layout;
  layout.m = m;
  layout.n_b = static_cast<int>(setup.barriers.size());
  layout.n_c = static_cast<int>(setup.constraints.size());
  layout.q = psi_spec.dim;
  if (cfg.variant == ctrl::ControllerVariant::IoRlClfQp && (layout.n_b || layout.n_c))
    throw ConfigError("io-rl-clf-qp does not take barriers or constraint rows");

  sim::EpisodeOptions episode;
  episode.horizon = cfg.horizon;
  episode.ts = cfg.ts;
  episode.sigma_mu = cfg.sigma;
  episode.max_consec_infeasible = cfg.max_consec_infeasible;

  sim::UniformBox x0_box;
  if (cfg.x0_min.empty() && cfg.x0_max.empty()) {
    x0_box.lo = Vector::Zero(n);
    x0_box.hi = Vector::Zero(n);
  } else {
    if (static_cast<int>(cfg.x0_min.size()) != n ||
        static_cast<int>(cfg.x0_max.size()) != n)
      throw ConfigError("x0_min/x0_max must have n entries");
    x0_box.lo = Eigen::Map<const Vector>(cfg.x0_min.data(), n);
    x0_box.hi = Eigen::Map<const Vector>(cfg.x0_max.data(), n);
    if (((x0_box.hi - x0_box.lo).array() < 0).any())
      throw ConfigError("x0_min must be <= x0_max");
  }

  return Assembled{std::move(pair), std::move(setup), layout, episode, x0_box, psi_spec};
}

}  // namespace certctl::cli
