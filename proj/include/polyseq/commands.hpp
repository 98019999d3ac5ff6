#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polyseq/frames.hpp"
#include "polyseq/run_config.hpp"

namespace polyseq::cli {

enum ExitCode : int { kOk = 0, kIoError = 2, kConfigError = 3, kEmptyInput = 4, kReplayMismatch = 5 };

enum class Variant { Simple, Complex };

/// Flags shared by every subcommand. Unset optionals leave the config file (or
/// built-in default) value untouched.
struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> res;
  std::optional<std::string> weights;
  std::optional<std::filesystem::path> out;
};

/// Config file first, then flag overrides, then validation. Throws ConfigError.
RunConfig resolve_config(const CommonOptions& opts);

/// Search from default_initial_rect of the target's resolution.
ConstructionSequence solve_target(const Image& target, const RunConfig& cfg);
/// Pure inverse estimation from the rectangle (simple) or 3 x 3 grid (complex),
/// recorded as one step with a no-op topological action.
ConstructionSequence baseline_dr(const Image& target, Variant variant, const RunConfig& cfg);

struct EvalRow {
  std::string shape;
  double r_sm = 0.0;
  double r_sc = 0.0;
  double r_si = 0.0;
  double r_all = 0.0;
  bool operator==(const EvalRow&) const = default;
};

/// Pairs results_dir/<stem>.json with dataset_dir/<stem>.png, replays each
/// sequence and rescores its final mesh with the weights echoed in the file.
/// Rows are sorted by shape name. Throws ReplayMismatch.
std::vector<EvalRow> evaluate(const std::filesystem::path& dataset_dir, const std::filesystem::path& results_dir);
EvalRow mean_row(const std::vector<EvalRow>& rows);
/// Header, one line per row, then the "mean" line.
std::string eval_csv(const std::vector<EvalRow>& rows);
std::string eval_table(const std::vector<EvalRow>& rows);
/// Per-shape rows of a file written by eval_csv (the mean line is dropped).
std::vector<EvalRow> load_eval_csv(const std::filesystem::path& path);

int cmd_solve(const std::filesystem::path& target_path, const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_baseline_dr(const std::filesystem::path& target_path, Variant variant, const CommonOptions& opts,
                    std::ostream& out, std::ostream& err);
int cmd_eval(const std::filesystem::path& dataset_dir, const std::filesystem::path& results_dir,
             const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_render(const std::filesystem::path& sequence_path, FrameFormat format, const CommonOptions& opts,
               std::ostream& out, std::ostream& err);
int cmd_gen(const CommonOptions& opts, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polyseq::cli
