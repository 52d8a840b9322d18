#pragma once

#include <optional>
#include <string>
#include <vector>

#include "certctl/controllers.hpp"
#include "certctl/plants.hpp"
#include "certctl/training.hpp"

namespace certctl::cli {

/// Config problems map to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BarrierConfig {
  std::string type = "position_max";
  double bound = 1.0;
  std::string psi_source = "fixed";  // fixed | episode
  double psi_min = 0.8, psi_max = 1.2;
  std::vector<double> poles{-2.0, -4.0};
};

struct ConstraintConfig {
  std::string type = "output_accel_bound";
  double a_max = 3.0;
};

struct RunConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  std::string plant_id = "inverted_pendulum";
  dyn::PlantParams plant_params;

  dyn::UncertaintyMode uncertainty = dyn::UncertaintyMode::None;
  double scale = 2.0;
  double payload = 0.5;

  ctrl::ControllerVariant variant = ctrl::ControllerVariant::ClfQp;
  double relax_penalty = 1e3;
  std::optional<double> u_max = 20.0;

  double epsilon = 0.8;
  double lambda = 0.0;  // <= 0 selects the documented default
  std::vector<double> clf_poles{-2.0, -4.0};
  std::vector<double> q_diag;  // empty -> identity

  std::vector<BarrierConfig> barriers;
  std::vector<ConstraintConfig> constraints;

  double horizon = 5.0;
  double ts = 0.01;
  std::vector<double> x0_min, x0_max;
  double sigma = 0.1;
  int max_consec_infeasible = 25;

  learn::TrainingSettings training;
  int eval_episodes = 50;

  std::vector<std::string> compare_variants;
  std::vector<std::string> compare_policies;  // aligned; "" means zero policy

  std::string config_hash;  // filled by load_config
};

/// Parses and validates; throws ConfigError on unknown ids or out-of-range
/// values. Overrides (from CLI flags) are folded into the hash.
RunConfig load_config(const std::string& path,
                      std::optional<std::uint64_t> seed_override = {},
                      std::optional<std::string> out_override = {},
                      std::optional<int> episodes_override = {});

/// Everything assembled and cross-checked, ready to run.
struct Assembled {
  dyn::PlantPair pair;
  ctrl::ControllerSetup setup;
  ctrl::PolicyLayout layout;
  sim::EpisodeOptions episode;
  sim::UniformBox x0_box;
  learn::PsiSpec psi_spec;
};

Assembled assemble(const RunConfig& config);

std::uint64_t fnv1a(const std::string& data);
std::string hash_hex(std::uint64_t h);

}  // namespace certctl::cli
