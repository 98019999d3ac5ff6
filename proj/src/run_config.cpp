#include "polyseq/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace polyseq {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("invalid value for '" + std::string(key) + "': " + std::string(text));
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': " + std::string(text));
}

std::string estimator_name(RolloutEstimator e) { return e == RolloutEstimator::TpsFast ? "tps_fast" : "dr_fast"; }

}  // namespace

Resolution parse_resolution(std::string_view text) {
  const auto x = text.find('x');
  if (x == std::string_view::npos) throw ConfigError("resolution must look like WxH: " + std::string(text));
  const Resolution r{parse_number<int>("res", text.substr(0, x)), parse_number<int>("res", text.substr(x + 1))};
  if (r.width <= 0 || r.height <= 0) throw ConfigError("resolution must be positive");
  return r;
}

RewardWeights parse_weights(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(parse_number<double>("weights", trim(text.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw ConfigError("weights must be sm,sc,si");
  return {parts[0], parts[1], parts[2]};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "seed",          "res",          "sigma",          "outer_steps",   "mcts_iterations",
      "exploration",   "rollout_depth", "rollout_estimator", "stop_iou",   "stop_on_no_gain",
      "w_sm",          "w_sc",         "w_si",           "iterations",    "eta",
      "min_eta",       "max_step",     "fast_iterations", "tps_grid",     "tps_iterations",
      "extrude_length", "gen_steps",   "gen_jitter",     "gen_count",     "out"};
  return keys;
}

void set_option(RunConfig& cfg, std::string_view key, std::string_view value) {
  PlannerConfig& p = cfg.planner;
  if (key == "seed") {
    p.seed = parse_number<std::uint64_t>(key, value);
    cfg.gen.seed = p.seed;
  } else if (key == "res") {
    cfg.gen.resolution = parse_resolution(value);
  } else if (key == "sigma") {
    p.optim.sigma = parse_number<double>(key, value);
  } else if (key == "outer_steps") {
    p.outer_steps = parse_number<int>(key, value);
  } else if (key == "mcts_iterations") {
    p.mcts_iterations = parse_number<int>(key, value);
  } else if (key == "exploration") {
    p.exploration = parse_number<double>(key, value);
  } else if (key == "rollout_depth") {
    p.rollout_depth = parse_number<int>(key, value);
  } else if (key == "rollout_estimator") {
    if (value == "dr_fast")
      p.estimator = RolloutEstimator::DrFast;
    else if (value == "tps_fast")
      p.estimator = RolloutEstimator::TpsFast;
    else
      throw ConfigError("rollout_estimator must be dr_fast or tps_fast");
  } else if (key == "stop_iou") {
    p.stop_iou = parse_number<double>(key, value);
  } else if (key == "stop_on_no_gain") {
    p.stop_on_no_gain = parse_bool(key, value);
  } else if (key == "w_sm") {
    p.weights.w_sm = parse_number<double>(key, value);
  } else if (key == "w_sc") {
    p.weights.w_sc = parse_number<double>(key, value);
  } else if (key == "w_si") {
    p.weights.w_si = parse_number<double>(key, value);
  } else if (key == "weights") {
    p.weights = parse_weights(value);
  } else if (key == "iterations") {
    p.optim.iterations = parse_number<int>(key, value);
  } else if (key == "eta") {
    p.optim.eta = parse_number<double>(key, value);
  } else if (key == "min_eta") {
    p.optim.min_eta = parse_number<double>(key, value);
  } else if (key == "max_step") {
    p.optim.max_step = parse_number<double>(key, value);
  } else if (key == "fast_iterations") {
    p.fast_iterations = parse_number<int>(key, value);
  } else if (key == "tps_grid") {
    p.tps.grid_size = parse_number<int>(key, value);
  } else if (key == "tps_iterations") {
    p.tps.iterations = parse_number<int>(key, value);
  } else if (key == "extrude_length") {
    p.extrude_length = parse_number<double>(key, value);
    cfg.gen.extrude_length = p.extrude_length;
  } else if (key == "gen_steps") {
    cfg.gen.steps = parse_number<int>(key, value);
  } else if (key == "gen_jitter") {
    cfg.gen.jitter = parse_number<double>(key, value);
  } else if (key == "gen_count") {
    cfg.gen.count = parse_number<int>(key, value);
  } else if (key == "out") {
    cfg.out = std::filesystem::path(std::string(value));
  } else {
    throw ConfigError("unknown config key: " + std::string(key));
  }
}

void RunConfig::validate() const {
  try {
    planner.validate();
    gen.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_option(base, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  base.validate();
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

Json run_config_to_json(const RunConfig& cfg) {
  const PlannerConfig& p = cfg.planner;
  const Resolution r = cfg.resolution();
  return Json{{"seed", p.seed},
              {"res", std::to_string(r.width) + "x" + std::to_string(r.height)},
              {"sigma", p.optim.sigma},
              {"outer_steps", p.outer_steps},
              {"mcts_iterations", p.mcts_iterations},
              {"exploration", p.exploration},
              {"rollout_depth", p.rollout_depth},
              {"rollout_estimator", estimator_name(p.estimator)},
              {"stop_iou", p.stop_iou},
              {"stop_on_no_gain", p.stop_on_no_gain},
              {"w_sm", p.weights.w_sm},
              {"w_sc", p.weights.w_sc},
              {"w_si", p.weights.w_si},
              {"iterations", p.optim.iterations},
              {"eta", p.optim.eta},
              {"min_eta", p.optim.min_eta},
              {"max_step", p.optim.max_step},
              {"fast_iterations", p.fast_iterations},
              {"tps_grid", p.tps.grid_size},
              {"tps_iterations", p.tps.iterations},
              {"extrude_length", p.extrude_length},
              {"gen_steps", cfg.gen.steps},
              {"gen_jitter", cfg.gen.jitter},
              {"gen_count", cfg.gen.count}};
}

}  // namespace polyseq
