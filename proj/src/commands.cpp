#include "polyseq/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "polyseq/dataset.hpp"
#include "polyseq/inverse.hpp"

namespace polyseq::cli {

namespace fs = std::filesystem;

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig cfg = opts.config ? load_run_config(*opts.config) : RunConfig{};
  if (opts.seed) set_option(cfg, "seed", std::to_string(*opts.seed));
  if (opts.res) set_option(cfg, "res", *opts.res);
  if (opts.weights) set_option(cfg, "weights", *opts.weights);
  if (opts.out) cfg.out = *opts.out;
  cfg.validate();
  return cfg;
}

ConstructionSequence solve_target(const Image& target, const RunConfig& cfg) {
  return solve(default_initial_rect(target.resolution()), target, cfg.planner);
}

ConstructionSequence baseline_dr(const Image& target, Variant variant, const RunConfig& cfg) {
  const Mesh2D initial = variant == Variant::Simple ? default_initial_rect(target.resolution())
                                                    : default_initial_grid(target.resolution());
  const TopoAction none{TopoKind::None, 0};
  const GeomAction geom = estimate(initial, target, cfg.planner.optim).geom;
  const Mesh2D final_mesh = apply_geom(apply_topo(initial, none), geom);
  return {initial, {{none, geom, compute_reward(final_mesh, target, cfg.planner.weights)}}, final_mesh};
}

namespace {

RewardWeights echoed_weights(const Json& seq) {
  RewardWeights w;
  if (!seq.contains("config_echo")) return w;
  const Json& echo = seq.at("config_echo");
  if (echo.contains("w_sm")) w.w_sm = echo.at("w_sm").get<double>();
  if (echo.contains("w_sc")) w.w_sc = echo.at("w_sc").get<double>();
  if (echo.contains("w_si")) w.w_si = echo.at("w_si").get<double>();
  return w;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<EvalRow> evaluate(const fs::path& dataset_dir, const fs::path& results_dir) {
  std::vector<fs::path> results;
  if (fs::is_directory(results_dir))
    for (const auto& entry : fs::directory_iterator(results_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json" &&
          fs::exists(dataset_dir / (entry.path().stem().string() + ".png")))
        results.push_back(entry.path());
  std::sort(results.begin(), results.end());
  std::vector<EvalRow> rows;
  for (const fs::path& path : results) {
    const Json j = read_json(path);
    const ConstructionSequence seq = sequence_from_json(j);
    const Mesh2D final_mesh = replay_states(seq).back();
    const Image target = load_silhouette(dataset_dir / (path.stem().string() + ".png"));
    const RewardBreakdown r = compute_reward(final_mesh, target, echoed_weights(j));
    rows.push_back({path.stem().string(), r.r_sm, r.r_sc, r.r_si, r.r_all});
  }
  return rows;
}

EvalRow mean_row(const std::vector<EvalRow>& rows) {
  EvalRow m{"mean"};
  if (rows.empty()) return m;
  for (const EvalRow& r : rows) {
    m.r_sm += r.r_sm;
    m.r_sc += r.r_sc;
    m.r_si += r.r_si;
    m.r_all += r.r_all;
  }
  const double n = static_cast<double>(rows.size());
  m.r_sm /= n;
  m.r_sc /= n;
  m.r_si /= n;
  m.r_all /= n;
  return m;
}

std::string eval_csv(const std::vector<EvalRow>& rows) {
  std::ostringstream out;
  out << "shape,r_sm,r_sc,r_si,r_all\n";
  auto line = [&](const EvalRow& r) {
    out << r.shape << ',' << format_double(r.r_sm) << ',' << format_double(r.r_sc) << ',' << format_double(r.r_si)
        << ',' << format_double(r.r_all) << '\n';
  };
  for (const EvalRow& r : rows) line(r);
  line(mean_row(rows));
  return out.str();
}

std::string eval_table(const std::vector<EvalRow>& rows) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-12s %8s %8s %8s %10s\n", "shape", "r_sm", "r_sc", "r_si", "r_all");
  out << buf;
  auto line = [&](const EvalRow& r) {
    std::snprintf(buf, sizeof buf, "%-12s %8.4f %8.2f %8.2f %10.3f\n", r.shape.c_str(), r.r_sm, r.r_sc, r.r_si,
                  r.r_all);
    out << buf;
  };
  for (const EvalRow& r : rows) line(r);
  line(mean_row(rows));
  return out.str();
}

std::vector<EvalRow> load_eval_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "shape,r_sm,r_sc,r_si,r_all") throw std::runtime_error("unexpected CSV header in " + path.string());
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    EvalRow r;
    std::string cell;
    std::getline(fields, r.shape, ',');
    double* slots[] = {&r.r_sm, &r.r_sc, &r.r_si, &r.r_all};
    for (double* slot : slots) {
      if (!std::getline(fields, cell, ',')) throw std::runtime_error("short CSV line in " + path.string());
      *slot = std::stod(cell);
    }
    if (r.shape != "mean") rows.push_back(r);
  }
  return rows;
}

namespace {

// Maps exceptions to exit codes; every command body runs through this.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ReplayMismatch& e) {
    err << "replay mismatch: " << e.what() << '\n';
    return kReplayMismatch;
  } catch (const ImageIoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const Json::exception& e) {
    err << "malformed JSON: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  }
}

std::string metrics_line(const RewardBreakdown& r) {
  return Json{{"r_sm", r.r_sm}, {"r_sc", r.r_sc}, {"r_si", r.r_si}, {"r_all", r.r_all}}.dump();
}

int write_sequence(const ConstructionSequence& seq, const Image& target, const RunConfig& cfg,
                   const fs::path& out_path, std::ostream& out) {
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_json(sequence_to_json(seq, run_config_to_json(cfg), cfg.planner.seed), out_path);
  out << metrics_line(compute_reward(seq.final_mesh, target, cfg.planner.weights)) << '\n';
  return kOk;
}

fs::path default_out(const RunConfig& cfg, const fs::path& fallback) { return cfg.out.empty() ? fallback : cfg.out; }

Resolution echoed_resolution(const Json& j, Resolution fallback) {
  if (!j.contains("config_echo")) return fallback;
  const Json& echo = j.at("config_echo");
  if (echo.contains("res")) return parse_resolution(echo.at("res").get<std::string>());
  if (echo.contains("resolution")) return {echo.at("resolution").at(0).get<int>(), echo.at("resolution").at(1).get<int>()};
  return fallback;
}

}  // namespace

int cmd_solve(const fs::path& target_path, const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const Image target = load_silhouette(target_path);
    const ConstructionSequence seq = solve_target(target, cfg);
    return write_sequence(seq, target, cfg, default_out(cfg, target_path.stem().string() + ".json"), out);
  });
}

int cmd_baseline_dr(const fs::path& target_path, Variant variant, const CommonOptions& opts, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const Image target = load_silhouette(target_path);
    const ConstructionSequence seq = baseline_dr(target, variant, cfg);
    return write_sequence(seq, target, cfg, default_out(cfg, target_path.stem().string() + ".json"), out);
  });
}

int cmd_eval(const fs::path& dataset_dir, const fs::path& results_dir, const CommonOptions& opts, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const std::vector<EvalRow> rows = evaluate(dataset_dir, results_dir);
    if (rows.empty()) {
      err << "no result files in " << results_dir.string() << " match targets in " << dataset_dir.string() << '\n';
      return static_cast<int>(kEmptyInput);
    }
    const fs::path csv_path = default_out(cfg, results_dir / "eval.csv");
    std::ofstream csv(csv_path, std::ios::binary);
    csv << eval_csv(rows);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    out << eval_table(rows);
    return static_cast<int>(kOk);
  });
}

int cmd_render(const fs::path& sequence_path, FrameFormat format, const CommonOptions& opts, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const Json j = read_json(sequence_path);
    const ConstructionSequence seq = sequence_from_json(j);
    const Resolution res = opts.res ? cfg.resolution() : echoed_resolution(j, cfg.resolution());
    const auto paths = write_frames(seq, res, default_out(cfg, "frames"), format);
    out << Json{{"frames", paths.size()}}.dump() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_gen(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const Json manifest = gen_dataset(cfg.gen, default_out(cfg, "dataset"));
    out << Json{{"shapes", manifest.at("shapes").size()}}.dump() << '\n';
    return static_cast<int>(kOk);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recover polygon-mesh construction sequences from silhouette images"};
  app.require_subcommand(1);
  CommonOptions opts;
  std::string config, res, weights, out_path;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key = value run configuration file");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--res", res, "resolution WxH");
    sub->add_option("--out", out_path, "output file or directory");
    sub->add_option("--weights", weights, "reward weights sm,sc,si");
  };

  std::string target, dataset_dir, results_dir, sequence, variant = "simple", format = "svg";
  CLI::App* solve_cmd = app.add_subcommand("solve", "search for a construction sequence");
  solve_cmd->add_option("target", target, "silhouette PNG or PGM")->required();
  add_common(solve_cmd);

  CLI::App* base_cmd = app.add_subcommand("baseline-dr", "inverse estimation without topology changes");
  base_cmd->add_option("target", target, "silhouette PNG or PGM")->required();
  base_cmd->add_option("--variant", variant, "simple|complex")->check(CLI::IsMember({"simple", "complex"}));
  add_common(base_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "score result sequences against a dataset");
  eval_cmd->add_option("dataset_dir", dataset_dir)->required();
  eval_cmd->add_option("results_dir", results_dir)->required();
  add_common(eval_cmd);

  CLI::App* render_cmd = app.add_subcommand("render", "write one frame per construction step");
  render_cmd->add_option("sequence", sequence, "sequence JSON")->required();
  render_cmd->add_option("--format", format, "svg|png")->check(CLI::IsMember({"svg", "png"}));
  add_common(render_cmd);

  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random synthetic dataset");
  add_common(gen_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  auto given = [](const CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  CLI::App* active = app.get_subcommands().front();
  if (given(active, "--config")) opts.config = config;
  if (given(active, "--seed")) opts.seed = seed;
  if (given(active, "--res")) opts.res = res;
  if (given(active, "--weights")) opts.weights = weights;
  if (given(active, "--out")) opts.out = out_path;

  if (active == solve_cmd) return cmd_solve(target, opts, out, err);
  if (active == base_cmd)
    return cmd_baseline_dr(target, variant == "complex" ? Variant::Complex : Variant::Simple, opts, out, err);
  if (active == eval_cmd) return cmd_eval(dataset_dir, results_dir, opts, out, err);
  if (active == render_cmd) return cmd_render(sequence, format == "png" ? FrameFormat::Png : FrameFormat::Svg, opts, out, err);
  return cmd_gen(opts, out, err);
}

}  // namespace polyseq::cli
