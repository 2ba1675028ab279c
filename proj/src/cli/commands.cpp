// Copyright 2026 The convduel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convduel/cli/commands.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "convduel/cli/config.hpp"
#include "convduel/cli/output.hpp"
#include "convduel/data_ingest.hpp"

namespace convduel::cli {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

struct SynthArgs {
  SyntheticConfig config;
  std::string link = "sigmoid";
  std::uint64_t seed = 1;
  std::string out;
};

struct PrepArgs {
  std::vector<std::string> inputs;
  PrepareOptions options;
  std::string link = "sigmoid";
  std::uint64_t seed = 1;
  std::string out;
};

struct PlotArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string title = "Cumulative regret";
};

// Flags of run/sweep are kept as raw strings so that a config file and the
// command line share one parser; flags are applied last and win.
struct RunArgs {
  std::string config_path;
  std::map<std::string, std::string> flags;
};

std::string out_path(const std::string& given, const std::string& fallback_name) {
  if (!given.empty()) return given;
  return (fs::path(default_output_dir()) / fallback_name).string();
}

Json environment_summary(const Environment& env) {
  return Json{{"num_users", env.num_users()},
              {"num_arms", env.num_arms()},
              {"num_keyterms", env.num_keyterms()},
              {"d", env.dim()},
              {"link", std::string(to_string(env.link.kind))},
              {"checksum", "sha256:" + environment_checksum(env)}};
}

int cmd_synth(const SynthArgs& args, std::ostream& out) {
  SyntheticConfig config = args.config;
  config.link = parse_link_kind(args.link);
  const Environment env = gen_synthetic(config, args.seed);
  const std::string path = out_path(args.out, "synthetic_env.json");
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  export_environment(env, path);
  Json summary = environment_summary(env);
  summary["file"] = path;
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_prep(const PrepArgs& args, std::ostream& out, std::ostream& err) {
  PrepareOptions options = args.options;
  options.link = parse_link_kind(args.link);
  const RawInteractions raw = parse_hetrec(args.inputs);
  err << "parsed " << raw.raw_records << " records (" << raw.triples.size() << " unique)\n";
  const PreparedDataset ds = build_environment(raw, options, args.seed);
  const std::string path = out_path(args.out, "prepared_env.json");
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  export_environment(ds.env, path);
  Json summary = environment_summary(ds.env);
  summary["file"] = path;
  summary["raw_records"] = raw.raw_records;
  summary["degenerate_items"] = ds.env.provenance.at("degenerate_items");
  out << summary.dump(2) << "\n";
  return kExitOk;
}

RunConfig resolve_run_config(const RunArgs& args) {
  RunConfig config;
  if (!args.config_path.empty()) {
    for (const auto& [key, value] : read_config_file(args.config_path)) apply_setting(config, key, value);
  }
  for (const auto& [key, value] : args.flags) apply_setting(config, key, value);
  if (config.out_dir.empty()) config.out_dir = default_output_dir();
  validate(config);
  return config;
}

Environment load_environment(const RunConfig& config, std::optional<Index> dim = std::nullopt) {
  if (!config.env_path.empty()) return import_environment(config.env_path);
  SyntheticConfig synth = config.synth;
  if (dim) synth.dim = *dim;
  return gen_synthetic(synth, config.synth_seed);
}

// Runs one algorithm and writes <name>.csv and <name>_aggregate.csv.
Json run_and_write(const Environment& env, const Spanner* spanner, const ExperimentConfig& experiment,
                   const std::string& name, const std::string& out_dir, std::ostream& err) {
  const RegretTrace trace = run_experiment(env, spanner, experiment, [&](std::size_t done, std::size_t total) {
    err << "[" << name << "] " << done << "/" << total << " runs\n";
  });
  const std::string runs_path = (fs::path(out_dir) / (name + ".csv")).string();
  const std::string agg_path = (fs::path(out_dir) / (name + "_aggregate.csv")).string();
  write_text_file(runs_path, runs_csv(trace));
  write_text_file(agg_path, aggregate_csv(trace));
  return Json{{"name", name},
              {"algorithm", trace.algorithm},
              {"fingerprint", trace.fingerprint},
              {"runs", trace.runs.size()},
              {"horizon", trace.horizon()},
              {"final_mean_cum_regret", trace.final_mean()},
              {"final_stderr_cum_regret", trace.final_stderr()},
              {"csv", runs_path},
              {"aggregate_csv", agg_path}};
}

void finish_summary(Json summary, const std::string& out_dir, std::ostream& out) {
  write_text_file((fs::path(out_dir) / "summary.json").string(), summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig config = resolve_run_config(args);
  const Environment env = load_environment(config);
  std::optional<Spanner> spanner;
  Json results = Json::array();
  for (PolicyKind kind : config.algorithms) {
    if (needs_spanner(kind) && !spanner) spanner = build_spanner(env.keyterms);
    results.push_back(run_and_write(env, spanner ? &*spanner : nullptr, experiment_config(config, kind),
                                    std::string(to_string(kind)), config.out_dir, err));
  }
  finish_summary(Json{{"command", "run"}, {"environment", environment_summary(env)}, {"results", results}},
                 config.out_dir, out);
  return kExitOk;
}

std::string value_label(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

int cmd_sweep(const RunArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig config = resolve_run_config(args);
  Json results = Json::array();
  Json environments = Json::array();
  if (config.axis == "frequency") {
    const std::vector<double> values = config.axis_values.empty() ? std::vector<double>{1, 5, 10, 20} : config.axis_values;
    const Environment env = load_environment(config);
    environments.push_back(environment_summary(env));
    std::optional<Spanner> spanner;
    for (PolicyKind kind : config.algorithms) {
      if (needs_spanner(kind) && !spanner) spanner = build_spanner(env.keyterms);
      for (const char* family : {"linear", "log"}) {
        for (double n : values) {
          ExperimentConfig experiment = experiment_config(config, kind);
          experiment.schedule = parse_schedule(std::string(family) + ":" + value_label(n));
          const std::string name = std::string(to_string(kind)) + "_" + family + "-" + value_label(n);
          results.push_back(run_and_write(env, spanner ? &*spanner : nullptr, experiment, name, config.out_dir, err));
        }
      }
    }
  } else if (config.axis == "dimension") {
    if (!config.env_path.empty()) throw ConfigError("the dimension sweep regenerates synthetic data; drop 'env'");
    const std::vector<double> values = config.axis_values.empty() ? std::vector<double>{20, 30, 40, 50} : config.axis_values;
    for (double dv : values) {
      const auto d = static_cast<Index>(dv);
      if (static_cast<double>(d) != dv || d < 1) throw ConfigError("dimension values must be positive integers");
      const Environment env = load_environment(config, d);
      environments.push_back(environment_summary(env));
      std::optional<Spanner> spanner;
      for (PolicyKind kind : config.algorithms) {
        if (needs_spanner(kind) && !spanner) spanner = build_spanner(env.keyterms);
        const std::string name = std::string(to_string(kind)) + "_d" + std::to_string(d);
        results.push_back(run_and_write(env, spanner ? &*spanner : nullptr, experiment_config(config, kind), name,
                                        config.out_dir, err));
      }
    }
  } else {
    throw ConfigError("sweep needs axis = frequency or dimension");
  }
  finish_summary(Json{{"command", "sweep"}, {"axis", config.axis}, {"environments", environments},
                      {"results", results}},
                 config.out_dir, out);
  return kExitOk;
}

int cmd_plot(const PlotArgs& args, std::ostream& out) {
  std::vector<CurveSeries> series;
  for (const auto& path : args.inputs) series.push_back(read_aggregate_csv(path));
  const std::string path = out_path(args.out, "regret.svg");
  write_text_file(path, render_svg(series, args.title));
  out << Json{{"file", path}, {"series", series.size()}}.dump(2) << "\n";
  return kExitOk;
}

void add_run_flags(CLI::App* app, RunArgs& args) {
  app->add_option("--config", args.config_path, "flat key = value config file (flags override it)");
  for (const auto& key : run_keys()) {
    app->add_option_function<std::string>("--" + key, [&args, key](const std::string& v) { args.flags[key] = v; },
                                           "see README");
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conversational dueling bandit simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic environment file");
  synth_cmd->add_option("--users", synth.config.num_users)->capture_default_str();
  synth_cmd->add_option("--keyterms", synth.config.num_keyterms)->capture_default_str();
  synth_cmd->add_option("--arms", synth.config.num_arms)->capture_default_str();
  synth_cmd->add_option("--dim", synth.config.dim)->capture_default_str();
  synth_cmd->add_option("--max-arms", synth.config.max_arms_per_keyterm, "M: max arms per key-term")->capture_default_str();
  synth_cmd->add_option("--link", synth.link, "sigmoid or clamped-linear")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "output file");

  PrepArgs prep;
  auto* prep_cmd = app.add_subcommand("prep", "build an environment from HetRec tag files");
  prep_cmd->add_option("--input", prep.inputs, "tag assignment file(s)")->required();
  prep_cmd->add_option("--items", prep.options.max_items)->capture_default_str();
  prep_cmd->add_option("--users", prep.options.max_users)->capture_default_str();
  prep_cmd->add_option("--tags-per-item", prep.options.max_tags_per_item)->capture_default_str();
  prep_cmd->add_option("--dim", prep.options.dim)->capture_default_str();
  prep_cmd->add_option("--link", prep.link)->capture_default_str();
  prep_cmd->add_option("--seed", prep.seed)->capture_default_str();
  prep_cmd->add_option("--out", prep.out, "output file");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run algorithms and write regret CSVs");
  add_run_flags(run_cmd, run);

  RunArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep conversation frequency or dimension");
  add_run_flags(sweep_cmd, sweep);

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "render aggregate CSVs as an SVG chart");
  plot_cmd->add_option("inputs", plot.inputs, "aggregate CSV files")->required();
  plot_cmd->add_option("--out", plot.out, "output SVG");
  plot_cmd->add_option("--title", plot.title)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*prep_cmd) return cmd_prep(prep, out, err);
    if (*run_cmd) return cmd_run(run, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep, out, err);
    if (*plot_cmd) return cmd_plot(plot, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace convduel::cli
