#pragma once

#include <optional>
#include <string>

#include "certctl/config.hpp"

namespace certctl::cli {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> policy_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> episodes;
};

// Exit codes: 0 success, 1 runtime failure, 2 config error.
int cmd_train(const CommonFlags& flags);
int cmd_eval(const CommonFlags& flags);
int cmd_compare(const CommonFlags& flags);
int cmd_selftest();

}  // namespace certctl::cli
