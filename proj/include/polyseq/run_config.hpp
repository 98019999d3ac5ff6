#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polyseq/dataset.hpp"
#include "polyseq/planner.hpp"
#include "polyseq/serialize.hpp"

namespace polyseq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a command needs: planner, optimizer, generator and reward
/// settings. `seed`, `res` and `extrude_length` feed both the planner and the
/// generator.
struct RunConfig {
  PlannerConfig planner{};
  GenConfig gen{};
  std::filesystem::path out;

  Resolution resolution() const { return gen.resolution; }
  /// Throws ConfigError when any module's invariants are violated.
  void validate() const;
};

/// Known keys, in the order run_config_to_json emits them.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Throws ConfigError for unknown keys or
/// unparsable values.
void set_option(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. The result is validated.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

Json run_config_to_json(const RunConfig& cfg);

Resolution parse_resolution(std::string_view text);
RewardWeights parse_weights(std::string_view text);

}  // namespace polyseq
