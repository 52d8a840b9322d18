#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "certctl/cli.hpp"
#include "certctl/log.hpp"

int main(int argc, char** argv) {
  certctl::init_logging_from_env();

  CLI::App app{"certctl - safety-critical QP controllers with learned model uncertainty"};
  app.require_subcommand(1);

  certctl::cli::CommonFlags flags;
  std::string config_path, policy_path, out_dir;
  std::uint64_t seed = 0;
  int episodes = 0;

  auto add_common = [&](CLI::App* sub, bool needs_policy) {
    sub->add_option("--config", config_path, "TOML run configuration")->required();
    if (needs_policy) sub->add_option("--policy", policy_path, "policy weights JSON");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_option("--episodes", episodes, "override the episode count");
  };

  CLI::App* train = app.add_subcommand("train", "train an estimator policy");
  add_common(train, true);
  CLI::App* eval = app.add_subcommand("eval", "run evaluation episodes");
  add_common(eval, true);
  CLI::App* compare = app.add_subcommand("compare", "run controller variants side by side");
  add_common(compare, false);
  app.add_subcommand("selftest", "run the built-in property suites");

  CLI11_PARSE(app, argc, argv);

  auto fill = [&](CLI::App* sub) {
    flags.config_path = config_path;
    if (sub->count("--policy") && !policy_path.empty()) flags.policy_path = policy_path;
    if (sub->count("--seed")) flags.seed = seed;
    if (sub->count("--out") && !out_dir.empty()) flags.out_dir = out_dir;
    if (sub->count("--episodes")) flags.episodes = episodes;
  };

  if (train->parsed()) {
    fill(train);
    return certctl::cli::cmd_train(flags);
  }
  if (eval->parsed()) {
    fill(eval);
    return certctl::cli::cmd_eval(flags);
  }
  if (compare->parsed()) {
    fill(compare);
    return certctl::cli::cmd_compare(flags);
  }
  return certctl::cli::cmd_selftest();
}
