#include "expgap/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "expgap/error.hpp"
#include "expgap/experiment.hpp"
#include "expgap/log_io.hpp"
#include "expgap/svg_plot.hpp"

namespace expgap {

namespace {

std::string curve_csv_text(std::span<const CurveRow> rows, std::string_view digest) {
  std::ostringstream out;
  write_curve_csv(rows, out, digest);
  return out.str();
}

std::vector<CurveRow> load_curve(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return read_curve_csv(in);
}

void sort_rows(std::vector<CurveRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    return a.seed != b.seed ? a.seed < b.seed : a.global_step < b.global_step;
  });
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

std::string run_file_stem(const RunConfig& config, std::int64_t seed) {
  return std::string(env_kind_name(config.env.kind)) + "_" + algorithm_name(config.agent) + "_seed" +
         std::to_string(seed);
}

std::vector<SeedOutputs> cmd_run(const RunConfig& config, std::size_t jobs) {
  std::filesystem::create_directories(config.output_dir);
  const std::string digest = config_digest(config);
  write_file_atomic(config.output_dir / "run.cfg", render_config(config));

  ExperimentOptions options;
  options.n_episodes = config.n_episodes;
  options.eval_every = config.eval_every;
  options.greedy_eval = config.greedy_eval;
  options.eval_episodes = config.eval_episodes;
  options.tracker = config.tracker;

  std::vector<SeedOutputs> outputs(config.seeds.size());
  const auto work = [&](std::size_t i) {
    const std::int64_t seed = config.seeds[i];
    const RunLog log = run_experiment(env_for_seed(config, seed), agent_for_seed(config, seed), options, digest);
    const std::string stem = run_file_stem(config, seed);
    SeedOutputs& o = outputs[i];
    o.seed = seed;
    o.log_path = config.output_dir / (stem + ".jsonl");
    o.curve_path = config.output_dir / (stem + ".csv");
    write_log_file(log.episodes, o.log_path);
    write_file_atomic(o.curve_path, curve_csv_text(log.curve, digest));
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, config.seeds.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) work(i);
    return outputs;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(mutex);
          if (next >= config.seeds.size() || failure) return;
          i = next++;
        }
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return outputs;
}

std::vector<CurveRow> cmd_analyze(const std::vector<std::filesystem::path>& logs, const TrackerConfig& tracker,
                                  std::size_t eval_every) {
  if (logs.empty()) throw Error(ErrorCode::kEmptyInput, "no logs given");
  std::vector<CurveRow> rows;
  for (const auto& path : logs) {
    const std::vector<EpisodeRecord> episodes = read_log(path);
    if (episodes.empty()) throw Error(ErrorCode::kEmptyInput, "log " + path.string() + " has no episodes");
    const CurveBuilder curve = replay_curve(episodes, tracker, eval_every, episodes.front().run_seed);
    rows.insert(rows.end(), curve.rows().begin(), curve.rows().end());
  }
  sort_rows(rows);
  return rows;
}

AggregateOutcome cmd_aggregate(const std::vector<TaskCurves>& tasks, GapVariant variant,
                               const BootstrapOptions& options, double epsilon) {
  if (tasks.empty()) throw Error(ErrorCode::kEmptyInput, "no tasks given");
  AggregateOutcome outcome;
  for (const TaskCurves& task : tasks) {
    if (task.curve_paths.empty()) throw Error(ErrorCode::kEmptyInput, "task '" + task.task_name + "' has no curves");
    for (const auto& path : task.curve_paths) {
      std::vector<CurveRow> rows = load_curve(path);
      if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "curve " + path.string() + " has no rows");
      sort_rows(rows);
      std::map<std::int64_t, CurveRow> last_by_seed;
      for (const CurveRow& r : rows) last_by_seed[r.seed] = r;
      for (const auto& [seed, r] : last_by_seed) {
        outcome.runs.push_back({task.task_name, variant == GapVariant::kRecent ? r.v_top5_recent : r.v_top5_ever,
                                r.v_learned, r.v_initial, seed});
      }
    }
  }
  outcome.report = aggregate_report(outcome.runs, variant, options, epsilon);
  return outcome;
}

std::string format_breakdown_csv(const std::vector<TaskResult>& runs, double epsilon) {
  std::ostringstream out;
  out << "task,seed,v_expert,v_learned,v_initial,normalized_gap,valid\n";
  for (const TaskResult& t : runs) {
    const auto gap = normalized_gap(t, epsilon);
    out << t.task_name << ',' << t.seed << ',' << format_double(t.v_expert) << ',' << format_double(t.v_learned)
        << ',' << format_double(t.v_initial) << ',' << (gap ? format_double(*gap) : "nan") << ','
        << (gap ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string format_report_csv(const std::string& label, const AggregateReport& r) {
  std::ostringstream out;
  out << "label,variant,point_estimate,ci_low,ci_high,n_tasks,n_seeds,invalid_tasks\n"
      << label << ',' << gap_variant_name(r.variant) << ',' << format_double(r.point_estimate) << ','
      << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ',' << r.n_tasks << ',' << r.n_seeds << ',';
  for (std::size_t i = 0; i < r.invalid_tasks.size(); ++i) out << (i ? ";" : "") << r.invalid_tasks[i];
  out << '\n';
  return out.str();
}

std::vector<LabeledReport> read_report_csv(std::istream& in) {
  std::vector<LabeledReport> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("label,", 0) == 0) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 8) throw SchemaError(line_no, "row", "expected 8 cells");
    LabeledReport r;
    r.label = cells[0];
    r.report.variant = parse_gap_variant(cells[1]);
    r.report.point_estimate = std::stod(cells[2]);
    r.report.ci_low = std::stod(cells[3]);
    r.report.ci_high = std::stod(cells[4]);
    r.report.n_tasks = std::stoul(cells[5]);
    r.report.n_seeds = std::stoul(cells[6]);
    if (!cells[7].empty()) r.report.invalid_tasks = split(cells[7], ';');
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

void emit(std::ostream& out, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

struct TrackerFlags {
  TrackerConfig tracker;
  std::size_t eval_every = 50;
  std::string config_path;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Take tracker knobs, eval_every and the digest from this run config");
    app->add_option("--eval-every", eval_every, "Training episodes between snapshots")->capture_default_str();
    app->add_option("--recent-window", tracker.recent_window, "W: episodes in the recent pool")->capture_default_str();
    app->add_option("--eval-window", tracker.eval_window, "W_eval: episodes averaged for the learned value")->capture_default_str();
    app->add_option("--top-capacity", tracker.top_capacity, "C: full episodes kept")->capture_default_str();
    app->add_option("--initial-episodes", tracker.initial_episodes, "M: episodes defining the initial policy value")->capture_default_str();
    app->add_option("--fraction", tracker.fraction, "Top-k fraction")->capture_default_str();
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Practical sub-optimality diagnostics for reinforcement-learning runs"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Train reference agents and write per-seed logs and curves");
  std::string run_config;
  std::string run_output_dir;
  std::size_t run_jobs = 1;
  run->add_option("--config", run_config, "Run configuration file")->required();
  run->add_option("--output-dir", run_output_dir, "Override run.output_dir");
  run->add_option("--jobs", run_jobs, "Seeds to run concurrently")->capture_default_str();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Recompute estimator curves from episode logs");
  std::vector<std::string> analyze_logs;
  std::string analyze_out;
  TrackerFlags analyze_flags;
  analyze->add_option("--log", analyze_logs, "JSONL episode log (.gz accepted)")->required();
  analyze->add_option("--out", analyze_out, "Output CSV (stdout if omitted)");
  analyze_flags.attach(analyze);

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "Normalized practical sub-optimality across tasks");
  std::vector<std::string> agg_tasks;
  std::string agg_variant = "ever";
  std::string agg_out;
  std::string agg_report;
  std::string agg_label = "aggregate";
  double agg_epsilon = kDefaultGapEpsilon;
  BootstrapOptions agg_boot;
  agg->add_option("--task", agg_tasks, "NAME=curve.csv[,curve.csv...]; repeat per task")->required();
  agg->add_option("--variant", agg_variant, "Expert estimate: ever or recent")->capture_default_str();
  agg->add_option("--resamples", agg_boot.n_resamples, "Bootstrap resamples")->capture_default_str();
  agg->add_option("--confidence", agg_boot.confidence, "Interval confidence level")->capture_default_str();
  agg->add_option("--seed", agg_boot.rng_seed, "Bootstrap seed")->capture_default_str();
  agg->add_option("--epsilon", agg_epsilon, "Denominator guard")->capture_default_str();
  agg->add_option("--label", agg_label, "Label written into the report")->capture_default_str();
  agg->add_option("--out", agg_out, "Per-run breakdown CSV");
  agg->add_option("--report", agg_report, "Report CSV (stdout if omitted)");

  // replay
  auto* replay = app.add_subcommand("replay", "Replay a logged episode in its environment");
  std::string replay_log;
  std::string replay_episode = "best";
  std::string replay_config;
  std::string replay_env;
  EnvSpec replay_spec;
  std::size_t replay_count = 100;
  std::uint64_t replay_seed = 0;
  replay->add_option("--log", replay_log, "JSONL episode log")->required();
  replay->add_option("--episode", replay_episode, "'best' or an episode id")->capture_default_str();
  replay->add_option("--config", replay_config, "Take the environment from this run config");
  replay->add_option("--env", replay_env, "Environment name (instead of --config)");
  replay->add_option("--size", replay_spec.size, "Environment size")->capture_default_str();
  replay->add_option("--slip", replay_spec.stochastic_slip, "Sticky-action probability")->capture_default_str();
  replay->add_option("--max-steps", replay_spec.max_steps, "Step limit (0: default)")->capture_default_str();
  replay->add_option("--replays", replay_count, "Monte Carlo replays for stochastic envs")->capture_default_str();
  replay->add_option("--replay-seed", replay_seed, "Seed of the Monte Carlo slip streams")->capture_default_str();

  // plot
  auto* plot = app.add_subcommand("plot", "Render curves or aggregate reports as SVG");
  std::vector<std::string> plot_curves;
  std::vector<std::string> plot_reports;
  std::string plot_out;
  std::string plot_title;
  plot->add_option("--curve", plot_curves, "Curve CSV(s); seeds are averaged");
  plot->add_option("--report", plot_reports, "Aggregate report CSV(s)");
  plot->add_option("--out", plot_out, "Output SVG")->required();
  plot->add_option("--title", plot_title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run) {
      RunConfig config = load_config(run_config);
      if (!run_output_dir.empty()) config.output_dir = run_output_dir;
      for (const SeedOutputs& o : cmd_run(config, run_jobs)) {
        out << "seed " << o.seed << ": " << o.log_path.string() << ' ' << o.curve_path.string() << '\n';
      }
      return 0;
    }
    if (*analyze) {
      std::string digest;
      if (!analyze_flags.config_path.empty()) {
        const RunConfig config = load_config(analyze_flags.config_path);
        analyze_flags.tracker = config.tracker;
        analyze_flags.eval_every = config.eval_every;
        digest = config_digest(config);
      }
      std::vector<std::filesystem::path> logs(analyze_logs.begin(), analyze_logs.end());
      const auto rows = cmd_analyze(logs, analyze_flags.tracker, analyze_flags.eval_every);
      emit(out, analyze_out, curve_csv_text(rows, digest));
      return 0;
    }
    if (*agg) {
      std::vector<TaskCurves> tasks;
      for (const std::string& spec : agg_tasks) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::kConfigError, "--task expects NAME=file[,file]");
        TaskCurves t{spec.substr(0, eq), {}};
        for (const auto& p : split(spec.substr(eq + 1), ',')) {
          if (!p.empty()) t.curve_paths.emplace_back(p);
        }
        tasks.push_back(std::move(t));
      }
      const AggregateOutcome outcome = cmd_aggregate(tasks, parse_gap_variant(agg_variant), agg_boot, agg_epsilon);
      if (!agg_out.empty()) write_file_atomic(agg_out, format_breakdown_csv(outcome.runs, agg_epsilon));
      emit(out, agg_report, format_report_csv(agg_label, outcome.report));
      for (const auto& name : outcome.report.invalid_tasks) err << "warning: task '" << name << "' has invalid runs\n";
      return 0;
    }
    if (*replay) {
      EnvSpec spec = replay_spec;
      if (!replay_config.empty()) {
        spec = load_config(replay_config).env;
      } else if (!replay_env.empty()) {
        spec.kind = parse_env_kind(replay_env);
      } else {
        throw Error(ErrorCode::kConfigError, "replay needs --config or --env");
      }
      const std::vector<EpisodeRecord> episodes = read_log(replay_log);
      const EpisodeRecord* chosen = nullptr;
      if (replay_episode == "best") {
        chosen = &best_single(episodes);
      } else {
        const EpisodeId id = std::stoull(replay_episode);
        for (const auto& e : episodes) {
          if (e.episode_id == id) chosen = &e;
        }
        if (chosen == nullptr) throw Error(ErrorCode::kNoEpisodes, "episode " + replay_episode + " not in log");
      }
      spec.seed = static_cast<std::int64_t>(chosen->env_seed);
      validate(spec);
      if (spec.stochastic_slip == 0.0) {
        try {
          const double achieved = replay_verify(spec, *chosen);
          out << "PASS episode=" << chosen->episode_id << " achieved=" << format_double(achieved)
              << " recorded=" << format_double(chosen->return_extrinsic) << '\n';
          return 0;
        } catch (const ReplayError& e) {
          out << "FAIL episode=" << chosen->episode_id << " step=" << e.step() << ' '
              << error_code_name(e.code()) << '\n';
          err << e.what() << '\n';
          return 1;
        }
      }
      const ReplaySummary s = replay_monte_carlo(spec, *chosen, replay_count, replay_seed);
      out << "SUMMARY episode=" << chosen->episode_id << " replays=" << s.replays
          << " recorded=" << format_double(s.recorded) << " mean=" << format_double(s.mean)
          << " stddev=" << format_double(s.stddev) << " min=" << format_double(s.min)
          << " max=" << format_double(s.max) << '\n';
      return 0;
    }
    if (*plot) {
      if (plot_curves.empty() == plot_reports.empty()) {
        throw Error(ErrorCode::kEmptyInput, "plot needs either --curve or --report inputs");
      }
      std::string svg;
      if (!plot_curves.empty()) {
        std::vector<CurveRow> rows;
        for (const auto& p : plot_curves) {
          const auto part = load_curve(p);
          rows.insert(rows.end(), part.begin(), part.end());
        }
        svg = render_curve_svg(rows, plot_title.empty() ? "practical sub-optimality" : plot_title);
      } else {
        std::vector<LabeledReport> reports;
        for (const auto& p : plot_reports) {
          std::ifstream in(p);
          if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + p);
          const auto part = read_report_csv(in);
          reports.insert(reports.end(), part.begin(), part.end());
        }
        svg = render_aggregate_svg(reports, plot_title.empty() ? "aggregate practical sub-optimality" : plot_title);
      }
      write_file_atomic(plot_out, svg);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace expgap
