// morphevo: evolve generalist neural controllers over morphology grids,
// sweep them across variation lattices, and compare groups statistically.
//
// Subcommands: evolve, sweep, stats, schedule-compare, render.
// Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>

#include "morphevo/archive_io.hpp"
#include "morphevo/config.hpp"
#include "morphevo/generalist.hpp"
#include "morphevo/metrics.hpp"
#include "morphevo/parallel.hpp"
#include "morphevo/rng.hpp"
#include "morphevo/stats.hpp"
#include "morphevo/svg.hpp"

namespace fs = std::filesystem;
using namespace morphevo;

namespace {

std::mutex print_mutex;
bool quiet_flag = false;

void say(const std::string& line) {
  if (quiet_flag) return;
  std::lock_guard<std::mutex> lock(print_mutex);
  std::fputs((line + "\n").c_str(), stdout);
  std::fflush(stdout);
}

std::string run_dir_name(int run_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03d", run_index);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  write_text_file(tmp, text);
  fs::rename(tmp, path);
}

ArchiveDocument document_for_run(const ExperimentConfig& cfg,
                                 const GeneralistRun& run,
                                 std::uint64_t run_seed, double satisfaction) {
  ArchiveDocument doc;
  doc.config_hash = cfg.hash();
  doc.env_name = cfg.env_name;
  if (cfg.env_name == "synthetic") doc.x_split = cfg.resolved_x_split();
  doc.archive = run.archive();
  doc.run_seed = run_seed;
  doc.generations_used = run.generations_used();
  doc.schedule = Schedule::kind_to_string(cfg.schedule);
  doc.walk_step = cfg.walk_step;
  doc.sigma0 = cfg.sigma0;
  doc.max_generations = cfg.max_generations;
  doc.stagnation_window = cfg.stagnation_window;
  doc.satisfaction_target = satisfaction;
  doc.outlier_std_multiplier = cfg.outlier_std_multiplier;
  for (const auto& e : doc.archive.entries) {
    doc.branch_generations.push_back(e.generations_used);
  }
  return doc;
}

RunSummaryRow summarize_run(const ExperimentConfig& cfg, const Environment& env,
                            const ArchiveDocument& doc, const std::string& group,
                            int run_index) {
  const MorphologyGrid global = cfg.global_grid();
  const MorphologyGrid training = cfg.training_grid(env.spec().default_morphology);
  const TestSets sets = build_test_sets(training, global,
                                        env.spec().default_morphology,
                                        static_cast<int>(cfg.local_distance));
  const MetricSummary m =
      summarize(env, doc.archive, sets, cfg.n_eval,
                derive_seed(doc.run_seed, SeedStream::kMetrics), cfg.eval_threads);
  RunSummaryRow row;
  row.group = group;
  row.run_index = run_index;
  row.seed = doc.run_seed;
  row.set_size = cfg.set_size;
  row.schedule = Schedule::kind_to_string(cfg.schedule) +
                 (cfg.schedule == Schedule::Kind::kRandomWalk
                      ? "_" + std::to_string(cfg.walk_step)
                      : "");
  row.default_fitness = m.default_fitness;
  row.local_mean = m.local_mean;
  row.global_mean = m.global_mean;
  row.sufficiency_count = m.sufficiency.count;
  row.sufficiency_fraction = m.sufficiency.fraction;
  row.n_entries = static_cast<int>(doc.archive.entries.size());
  row.generations_used = doc.generations_used;
  row.uncovered = static_cast<int>(doc.archive.uncovered.size());
  return row;
}

// Runs (or resumes) one evolutionary run. Returns the summary row, or
// nullopt when the run was paused by stop_after_generations.
std::optional<RunSummaryRow> execute_run(const ExperimentConfig& cfg,
                                         const Environment& env,
                                         const std::string& group, int run_index,
                                         const fs::path& out_dir) {
  const fs::path run_dir = out_dir / run_dir_name(run_index);
  fs::create_directories(run_dir);
  const std::string archive_path = (run_dir / "archive.json").string();
  const std::string trace_path = (run_dir / "trace.jsonl").string();
  const std::string checkpoint_path = (run_dir / "checkpoint.json").string();
  const std::uint64_t run_seed =
      derive_seed(cfg.base_seed, SeedStream::kRun,
                  static_cast<std::uint64_t>(run_index));

  if (fs::exists(archive_path)) {
    // completed earlier; just recompute the summary row
    const ArchiveDocument doc = load_archive(archive_path);
    say("[" + group + "/" + run_dir_name(run_index) + "] already complete");
    return summarize_run(cfg, env, doc, group, run_index);
  }

  const double satisfaction =
      cfg.satisfaction_target.value_or(env.spec().satisfaction_target);

  RunConfig rc;
  rc.topology = {env.spec().observation_dim, cfg.hidden, env.spec().action_dim};
  rc.grid = cfg.training_grid(env.spec().default_morphology);
  rc.schedule_kind = cfg.schedule;
  rc.walk_step = cfg.walk_step;
  rc.sigma0 = cfg.sigma0;
  rc.budget.max_generations = cfg.max_generations;
  rc.budget.stagnation_window = cfg.stagnation_window;
  rc.budget.satisfaction_target = satisfaction;
  rc.budget.outlier_std_multiplier = cfg.outlier_std_multiplier;
  rc.run_seed = run_seed;
  rc.eval_threads = cfg.eval_threads;

  bool resumed = false;
  nlohmann::json resume_state;
  if (fs::exists(checkpoint_path)) {
    const nlohmann::json wrapper = nlohmann::json::parse(read_text_file(checkpoint_path));
    if (wrapper.value("config_hash", std::uint64_t{0}) != cfg.hash()) {
      throw ConfigError("config error: checkpoint " + checkpoint_path +
                        " was written by a different config");
    }
    resume_state = wrapper.at("state");
    TraceWriter::truncate_lines(trace_path, wrapper.at("trace_lines").get<long>());
    resumed = true;
  }

  TraceWriter trace(trace_path, /*append=*/resumed);
  GeneralistRun run(env, rc, [&trace](const TraceRecord& r) { trace.write(r); });
  if (resumed) {
    run.restore(resume_state);
    say("[" + group + "/" + run_dir_name(run_index) + "] resumed at generation " +
        std::to_string(run.generations_used()));
  }

  const auto save_checkpoint = [&] {
    nlohmann::json wrapper;
    wrapper["config_hash"] = cfg.hash();
    wrapper["run_seed"] = run_seed;
    wrapper["trace_lines"] = trace.lines();
    wrapper["state"] = run.checkpoint();
    write_file_atomic(checkpoint_path, wrapper.dump() + "\n");
  };

  long executed_here = 0;
  long since_checkpoint = 0;
  while (run.step()) {
    ++executed_here;
    if (++since_checkpoint >= cfg.checkpoint_every) {
      save_checkpoint();
      since_checkpoint = 0;
    }
    if (cfg.stop_after_generations > 0 &&
        executed_here >= cfg.stop_after_generations && !run.finished()) {
      save_checkpoint();
      say("[" + group + "/" + run_dir_name(run_index) + "] paused after " +
          std::to_string(executed_here) + " generations (checkpoint written)");
      return std::nullopt;
    }
  }

  const ArchiveDocument doc = document_for_run(cfg, run, run_seed, satisfaction);
  save_archive(doc, archive_path);
  std::error_code ec;
  fs::remove(checkpoint_path, ec);

  say("[" + group + "/" + run_dir_name(run_index) + "] finished: " +
      std::to_string(doc.archive.entries.size()) + " cluster(s), " +
      std::to_string(doc.generations_used) + " generations");
  return summarize_run(cfg, env, doc, group, run_index);
}

// Shared by evolve and schedule-compare: all runs of one config.
std::optional<std::vector<RunSummaryRow>> run_experiment(
    const ExperimentConfig& cfg, const std::string& group, const fs::path& out_dir,
    int jobs) {
  fs::create_directories(out_dir);
  const auto env = make_environment(
      cfg.env_name,
      cfg.env_name == "synthetic" ? std::optional<double>(cfg.resolved_x_split())
                                  : std::nullopt);
  std::vector<std::optional<RunSummaryRow>> rows(static_cast<std::size_t>(cfg.n_runs));
  parallel_for(cfg.n_runs, jobs, [&](int r) {
    rows[static_cast<std::size_t>(r)] = execute_run(cfg, *env, group, r, out_dir);
  });
  std::vector<RunSummaryRow> done;
  for (auto& row : rows) {
    if (!row) return std::nullopt;  // paused
    done.push_back(*row);
  }
  return done;
}

std::vector<SampleGroup> group_samples(const std::vector<RunSummaryRow>& rows,
                                       const std::string& group_by,
                                       double RunSummaryRow::*metric) {
  std::map<std::string, std::vector<double>> byg;
  for (const auto& r : rows) {
    const std::string key = group_by == "schedule" ? r.schedule
                            : group_by == "set_size"
                                ? std::to_string(r.set_size)
                                : r.group;
    byg[key].push_back(r.*metric);
  }
  // numeric-aware label order
  std::vector<std::string> labels;
  for (const auto& [k, v] : byg) labels.push_back(k);
  std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
    try {
      std::size_t pa = 0, pb = 0;
      const double da = std::stod(a, &pa);
      const double db = std::stod(b, &pb);
      if (pa == a.size() && pb == b.size()) return da < db;
    } catch (...) {
    }
    return a < b;
  });
  std::vector<SampleGroup> groups;
  for (const auto& label : labels) groups.push_back({label, byg[label]});
  return groups;
}

std::string format_stats_report(const std::string& metric_name,
                                const std::vector<SampleGroup>& groups,
                                double alpha, PAdjust adjust) {
  const KruskalResult kw = kruskal_wallis(groups);
  const auto pairs = dunn_posthoc(groups, alpha, adjust);
  const auto medians = group_medians(groups);

  char buf[256];
  std::string out;
  out += "== metric: " + metric_name + " ==\n";
  for (const auto& [label, med] : medians) {
    std::snprintf(buf, sizeof(buf), "  median[%s] = %.6g\n", label.c_str(), med);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "  Kruskal-Wallis: H = %.6g, df = %d, p = %.6g\n", kw.h, kw.df, kw.p);
  out += buf;
  out += "  Dunn post hoc (" + p_adjust_to_string(adjust) + " adjustment, alpha = " +
         std::to_string(alpha) + "):\n";
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof(buf), "    %s -- %s : z = %+.4f  p = %.6g %s\n",
                  groups[static_cast<std::size_t>(p.group_a)].label.c_str(),
                  groups[static_cast<std::size_t>(p.group_b)].label.c_str(), p.z,
                  p.p_adjusted, p.significant ? "*" : "");
    out += buf;
  }
  return out;
}

std::string stats_csv(const std::string& metric_name,
                      const std::vector<SampleGroup>& groups, double alpha,
                      PAdjust adjust) {
  const auto pairs = dunn_posthoc(groups, alpha, adjust);
  const KruskalResult kw = kruskal_wallis(groups);
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%s,kruskal_wallis,H,%.17g,df,%d,p,%.17g\n",
                metric_name.c_str(), kw.h, kw.df, kw.p);
  out += buf;
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof(buf), "%s,dunn,%s,%s,z,%.17g,p_raw,%.17g,p_adj,%.17g,%d\n",
                  metric_name.c_str(),
                  groups[static_cast<std::size_t>(p.group_a)].label.c_str(),
                  groups[static_cast<std::size_t>(p.group_b)].label.c_str(), p.z,
                  p.p_raw, p.p_adjusted, p.significant ? 1 : 0);
    out += buf;
  }
  return out;
}

int cmd_evolve(const std::string& config_path,
               std::optional<std::uint64_t> seed_override,
               std::optional<int> runs_override,
               std::optional<std::string> out_override,
               std::optional<int> jobs_override) {
  ExperimentConfig cfg = load_config_file(config_path);
  if (seed_override) cfg.base_seed = *seed_override;
  if (runs_override) cfg.n_runs = *runs_override;
  if (out_override) cfg.out_dir = *out_override;
  const int jobs = jobs_override.value_or(cfg.jobs);

  const auto rows =
      run_experiment(cfg, std::to_string(cfg.set_size), cfg.out_dir, jobs);
  if (!rows) {
    say("experiment paused; rerun the same command to continue");
    return 0;
  }
  const std::string summary_path = (fs::path(cfg.out_dir) / "summary.csv").string();
  write_text_file(summary_path, summary_to_csv(*rows));
  say("wrote " + summary_path);
  return 0;
}

int cmd_sweep(const std::string& archive_path, std::optional<int> nx,
              std::optional<int> ny, std::optional<double> origin_x,
              std::optional<double> origin_y, std::optional<double> step_x,
              std::optional<double> step_y, int n_eval, std::uint64_t seed,
              const std::string& out_dir, int jobs) {
  const ArchiveDocument doc = load_archive(archive_path);
  const auto env = environment_for(doc);
  const MorphologyGrid& training = doc.archive.grid;
  MorphologyGrid lattice = MorphologyGrid::make_rect(
      origin_x.value_or(training.origin_x), origin_y.value_or(training.origin_y),
      step_x.value_or(training.step_x), step_y.value_or(training.step_y),
      nx.value_or(training.nx), ny.value_or(training.ny));
  if (doc.env_name == "synthetic") {
    const double split = doc.x_split.value_or(synthetic::kDefaultXSplit);
    for (const auto& c : lattice.cells) {
      if (std::abs(c.x - split) <= 1e-9 * std::max(1.0, std::abs(split))) {
        throw ConfigError("config error: sweep lattice touches the synthetic sign boundary");
      }
    }
  }
  if (doc.archive.entries.empty()) {
    throw ConfigError("config error: archive has no controllers to sweep");
  }

  fs::create_directories(out_dir);
  const FitnessGrid fg = sweep(*env, doc.archive, lattice, n_eval, seed, jobs);
  const std::string csv_path = (fs::path(out_dir) / "sweep.csv").string();
  const std::string svg_path = (fs::path(out_dir) / "sweep.svg").string();
  write_text_file(csv_path, fitness_grid_to_csv(fg));
  write_text_file(svg_path, render_heatmap_svg(fg));
  say("wrote " + csv_path + " and " + svg_path);
  return 0;
}

int cmd_stats(const std::vector<std::string>& inputs, const std::string& metric,
              const std::string& group_by, double alpha, const std::string& adjust,
              const std::string& out_dir) {
  std::vector<RunSummaryRow> rows;
  for (const auto& path : inputs) {
    const auto more = summary_from_csv(read_text_file(path));
    rows.insert(rows.end(), more.begin(), more.end());
  }
  if (rows.empty()) throw ConfigError("config error: no summary rows found");
  const PAdjust padj = p_adjust_from_string(adjust);

  std::vector<std::pair<std::string, double RunSummaryRow::*>> metrics;
  if (metric == "default" || metric == "all")
    metrics.emplace_back("default", &RunSummaryRow::default_fitness);
  if (metric == "local" || metric == "all")
    metrics.emplace_back("local", &RunSummaryRow::local_mean);
  if (metric == "global" || metric == "all")
    metrics.emplace_back("global", &RunSummaryRow::global_mean);
  if (metrics.empty()) {
    throw ConfigError("config error: metric must be default, local, global, or all");
  }

  std::string report, csv;
  for (const auto& [name, member] : metrics) {
    const auto groups = group_samples(rows, group_by, member);
    if (groups.size() < 2) {
      throw ConfigError("config error: statistics need at least 2 groups, found " +
                        std::to_string(groups.size()));
    }
    report += format_stats_report(name, groups, alpha, padj);
    csv += stats_csv(name, groups, alpha, padj);
  }

  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "stats.txt").string(), report);
  write_text_file((fs::path(out_dir) / "stats.csv").string(), csv);
  if (!quiet_flag) std::fputs(report.c_str(), stdout);
  return 0;
}

int cmd_schedule_compare(const std::string& config_path,
                         std::optional<std::uint64_t> seed_override,
                         std::optional<int> runs_override,
                         std::optional<std::string> out_override,
                         std::optional<int> jobs_override) {
  ExperimentConfig base = load_config_file(config_path);
  if (seed_override) base.base_seed = *seed_override;
  if (runs_override) base.n_runs = *runs_override;
  if (out_override) base.out_dir = *out_override;
  const int jobs = jobs_override.value_or(base.jobs);

  struct Variant {
    std::string label;
    Schedule::Kind kind;
    int walk_step;
  };
  const Variant variants[] = {
      {"incremental", Schedule::Kind::kIncremental, 1},
      {"random", Schedule::Kind::kRandom, 1},
      {"random_walk_1", Schedule::Kind::kRandomWalk, 1},
      {"random_walk_5", Schedule::Kind::kRandomWalk, 5},
  };

  std::vector<RunSummaryRow> all_rows;
  MorphologyGrid reference_grid;
  bool have_reference = false;
  for (const auto& v : variants) {
    ExperimentConfig cfg = base;
    cfg.schedule = v.kind;
    cfg.walk_step = v.walk_step;
    // matched seeds: same base_seed in every variant
    const auto env_probe = make_environment(
        cfg.env_name, cfg.env_name == "synthetic"
                          ? std::optional<double>(cfg.resolved_x_split())
                          : std::nullopt);
    const MorphologyGrid grid =
        cfg.training_grid(env_probe->spec().default_morphology);
    if (!have_reference) {
      reference_grid = grid;
      have_reference = true;
    } else if (!grid.same_lattice(reference_grid)) {
      throw std::runtime_error("schedule variants disagree on the morphology grid");
    }
    const auto rows = run_experiment(cfg, v.label, fs::path(base.out_dir) / v.label, jobs);
    if (!rows) {
      say("experiment paused; rerun the same command to continue");
      return 0;
    }
    all_rows.insert(all_rows.end(), rows->begin(), rows->end());
  }

  const std::string summary_path = (fs::path(base.out_dir) / "summary.csv").string();
  write_text_file(summary_path, summary_to_csv(all_rows));

  const auto groups = group_samples(all_rows, "group", &RunSummaryRow::global_mean);
  std::string report = format_stats_report("global", groups, base.alpha, base.p_adjust);
  write_text_file((fs::path(base.out_dir) / "schedule_compare.txt").string(), report);
  if (!quiet_flag) std::fputs(report.c_str(), stdout);
  say("wrote " + summary_path);
  return 0;
}

int cmd_render(const std::string& csv_path, const std::string& svg_path,
               const std::string& title) {
  const FitnessGrid fg = fitness_grid_from_csv(read_text_file(csv_path));
  write_text_file(svg_path, render_heatmap_svg(fg, title));
  say("wrote " + svg_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"morphevo: generalist controller evolution over morphology grids"};
  app.require_subcommand(1);

  std::string config_path, archive_path, csv_path, svg_path, out_dir = "out";
  std::string metric = "all", group_by = "group", adjust = "none", title;
  std::vector<std::string> stat_inputs;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> runs_override, jobs_override;
  std::optional<std::string> out_override;
  std::optional<int> nx, ny;
  std::optional<double> origin_x, origin_y, step_x, step_y;
  int n_eval = 3, sweep_jobs = 1;
  std::uint64_t sweep_seed = 1;
  double alpha = 0.05;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--quiet", quiet_flag, "suppress progress output");
  };

  CLI::App* evolve = app.add_subcommand("evolve", "run seeded evolutionary runs");
  evolve->add_option("--config", config_path, "experiment config file")->required();
  evolve->add_option("--seed", [&](const std::vector<std::string>& v) {
    try { seed_override = std::stoull(v.at(0)); } catch (...) { return false; }
    return true;
  }, "override experiment.base_seed");
  evolve->add_option("--runs", [&](const std::vector<std::string>& v) {
    try { runs_override = std::stoi(v.at(0)); } catch (...) { return false; }
    return true;
  }, "override experiment.n_runs");
  evolve->add_option("--out", [&](const std::vector<std::string>& v) {
    out_override = v.at(0);
    return true;
  }, "override experiment.out_dir");
  evolve->add_option("--jobs", [&](const std::vector<std::string>& v) {
    try { jobs_override = std::stoi(v.at(0)); } catch (...) { return false; }
    return true;
  }, "parallel runs");
  add_common(evolve);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "fitness heatmap of a saved archive");
  sweep_cmd->add_option("--archive", archive_path, "archive.json")->required();
  sweep_cmd->add_option("--nx", [&](const std::vector<std::string>& v) { try { nx = std::stoi(v.at(0)); } catch (...) { return false; } return true; }, "lattice cells along x");
  sweep_cmd->add_option("--ny", [&](const std::vector<std::string>& v) { try { ny = std::stoi(v.at(0)); } catch (...) { return false; } return true; }, "lattice cells along y");
  sweep_cmd->add_option("--origin-x", [&](const std::vector<std::string>& v) { try { origin_x = std::stod(v.at(0)); } catch (...) { return false; } return true; }, "lattice origin x");
  sweep_cmd->add_option("--origin-y", [&](const std::vector<std::string>& v) { try { origin_y = std::stod(v.at(0)); } catch (...) { return false; } return true; }, "lattice origin y");
  sweep_cmd->add_option("--step-x", [&](const std::vector<std::string>& v) { try { step_x = std::stod(v.at(0)); } catch (...) { return false; } return true; }, "lattice step x");
  sweep_cmd->add_option("--step-y", [&](const std::vector<std::string>& v) { try { step_y = std::stod(v.at(0)); } catch (...) { return false; } return true; }, "lattice step y");
  sweep_cmd->add_option("--n-eval", n_eval, "episodes per cell");
  sweep_cmd->add_option("--seed", sweep_seed, "sweep seed root");
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel episode evaluation");
  sweep_cmd->add_option("--out", out_dir, "output directory");
  add_common(sweep_cmd);

  CLI::App* stats_cmd = app.add_subcommand("stats", "Kruskal-Wallis + Dunn report");
  stats_cmd->add_option("--in", stat_inputs, "run-summary CSV file(s)")->required();
  stats_cmd->add_option("--metric", metric, "default | local | global | all");
  stats_cmd->add_option("--group-by", group_by, "group | set_size | schedule");
  stats_cmd->add_option("--alpha", alpha, "significance level");
  stats_cmd->add_option("--adjust", adjust, "none | bonferroni | holm");
  stats_cmd->add_option("--out", out_dir, "output directory");
  add_common(stats_cmd);

  CLI::App* compare = app.add_subcommand(
      "schedule-compare", "matched-seed comparison of the four training schedules");
  compare->add_option("--config", config_path, "experiment config template")->required();
  compare->add_option("--seed", [&](const std::vector<std::string>& v) {
    try { seed_override = std::stoull(v.at(0)); } catch (...) { return false; }
    return true;
  }, "override experiment.base_seed");
  compare->add_option("--runs", [&](const std::vector<std::string>& v) {
    try { runs_override = std::stoi(v.at(0)); } catch (...) { return false; }
    return true;
  }, "override experiment.n_runs");
  compare->add_option("--out", [&](const std::vector<std::string>& v) {
    out_override = v.at(0);
    return true;
  }, "override experiment.out_dir");
  compare->add_option("--jobs", [&](const std::vector<std::string>& v) {
    try { jobs_override = std::stoi(v.at(0)); } catch (...) { return false; }
    return true;
  }, "parallel runs");
  add_common(compare);

  CLI::App* render = app.add_subcommand("render", "re-render an SVG heatmap from CSV");
  render->add_option("--csv", csv_path, "fitness grid CSV")->required();
  render->add_option("--out", svg_path, "output SVG path")->required();
  render->add_option("--title", title, "heatmap title");
  add_common(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are config errors
  }

  try {
    if (*evolve) {
      return cmd_evolve(config_path, seed_override, runs_override, out_override,
                        jobs_override);
    }
    if (*sweep_cmd) {
      return cmd_sweep(archive_path, nx, ny, origin_x, origin_y, step_x, step_y,
                       n_eval, sweep_seed, out_dir, sweep_jobs);
    }
    if (*stats_cmd) {
      return cmd_stats(stat_inputs, metric, group_by, alpha, adjust, out_dir);
    }
    if (*compare) {
      return cmd_schedule_compare(config_path, seed_override, runs_override,
                                  out_override, jobs_override);
    }
    if (*render) {
      return cmd_render(csv_path, svg_path, title);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
