#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>

#include "morphevo/archive_io.hpp"
#include "morphevo/metrics.hpp"

using namespace morphevo;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

std::string cli_binary() {
  const char* path = std::getenv("MORPHEVO_CLI");
  REQUIRE_MESSAGE(path != nullptr, "MORPHEVO_CLI must point at the CLI binary");
  return path;
}

CliResult run_cli(const std::string& args) {
  const std::string command = cli_binary() + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) {
    result.output += buf.data();
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "morphevo_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small synthetic experiment that finishes in a couple of seconds.
std::string small_config(const fs::path& dir, const std::string& extra = "") {
  const fs::path path = dir / "exp.ini";
  write_text_file(path.string(),
                  "[env]\n"
                  "name = synthetic\n"
                  "[experiment]\n"
                  "n_runs = 2\n"
                  "base_seed = 4242\n"
                  "out_dir = " + (dir / "out").string() + "\n"
                  "[net]\n"
                  "hidden = 8\n"
                  "[training]\n"
                  "set_size = 16\n"
                  "[evolution]\n"
                  "max_generations = 400\n"
                  "outlier_std_multiplier = 0.5\n"
                  "[evaluation]\n"
                  "n_eval = 1\n"
                  "global_nx = 8\n"
                  "global_ny = 8\n" +
                  extra);
  return path.string();
}

}  // namespace

TEST_CASE("config errors exit with code 2 and name the problem") {
  const auto dir = fresh_dir("config_errors");
  SUBCASE("missing env name") {
    const fs::path path = dir / "bad.ini";
    write_text_file(path.string(), "[training]\nset_size = 16\n");
    const CliResult r = run_cli("evolve --config " + path.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("env.name") != std::string::npos);
  }
  SUBCASE("unknown key") {
    const fs::path path = dir / "bad2.ini";
    write_text_file(path.string(), "[env]\nname = cartpole\nwheels = 4\n");
    const CliResult r = run_cli("evolve --config " + path.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("env.wheels") != std::string::npos);
  }
  SUBCASE("missing config file") {
    const CliResult r = run_cli("evolve --config /nonexistent/x.ini");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("evolve produces archives, traces, and a summary; reruns are idempotent") {
  const auto dir = fresh_dir("evolve");
  const std::string config = small_config(dir);
  const CliResult r = run_cli("evolve --config " + config + " --jobs 2 --quiet");
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);

  const fs::path out = dir / "out";
  REQUIRE(fs::exists(out / "run_000" / "archive.json"));
  REQUIRE(fs::exists(out / "run_001" / "archive.json"));
  REQUIRE(fs::exists(out / "run_000" / "trace.jsonl"));
  REQUIRE(fs::exists(out / "summary.csv"));
  CHECK_FALSE(fs::exists(out / "run_000" / "checkpoint.json"));

  const auto rows = summary_from_csv(read_text_file((out / "summary.csv").string()));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].set_size == 16);
  CHECK(rows[0].schedule == "incremental");
  CHECK(rows[0].seed != rows[1].seed);

  SUBCASE("the same base seed reproduces archives byte for byte") {
    const auto dir2 = fresh_dir("evolve_repeat");
    const std::string config2 = small_config(dir2);
    const CliResult r2 = run_cli("evolve --config " + config2 + " --jobs 1 --quiet");
    REQUIRE_MESSAGE(r2.exit_code == 0, r2.output);
    CHECK(read_text_file((out / "run_000" / "archive.json").string()) ==
          read_text_file((dir2 / "out" / "run_000" / "archive.json").string()));
    CHECK(read_text_file((out / "run_001" / "archive.json").string()) ==
          read_text_file((dir2 / "out" / "run_001" / "archive.json").string()));
  }

  SUBCASE("rerunning a finished experiment only refreshes the summary") {
    const std::string before =
        read_text_file((out / "run_000" / "archive.json").string());
    const CliResult r2 = run_cli("evolve --config " + config + " --quiet");
    CHECK(r2.exit_code == 0);
    CHECK(read_text_file((out / "run_000" / "archive.json").string()) == before);
  }
}

TEST_CASE("interrupted runs resume from the checkpoint to the identical archive") {
  // reference: uninterrupted
  const auto ref_dir = fresh_dir("resume_ref");
  const std::string ref_config = small_config(ref_dir);
  REQUIRE(run_cli("evolve --config " + ref_config + " --runs 1 --quiet").exit_code == 0);

  // paused: stop every 60 generations and rerun until done
  const auto dir = fresh_dir("resume");
  const std::string config = small_config(
      dir, "[evolution]\nstop_after_generations = 60\ncheckpoint_every = 25\n");
  int rounds = 0;
  while (!fs::exists(dir / "out" / "run_000" / "archive.json")) {
    REQUIRE(rounds < 50);
    const CliResult r = run_cli("evolve --config " + config + " --runs 1 --quiet");
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    ++rounds;
  }
  CHECK(rounds > 1);  // it did pause at least once

  CHECK(read_text_file((dir / "out" / "run_000" / "archive.json").string()) ==
        read_text_file((ref_dir / "out" / "run_000" / "archive.json").string()));
  // trace replay matches too
  CHECK(read_text_file((dir / "out" / "run_000" / "trace.jsonl").string()) ==
        read_text_file((ref_dir / "out" / "run_000" / "trace.jsonl").string()));
}

TEST_CASE("sweep and render work from saved artifacts") {
  const auto dir = fresh_dir("sweep");
  const std::string config = small_config(dir);
  REQUIRE(run_cli("evolve --config " + config + " --runs 1 --quiet").exit_code == 0);
  const std::string archive_path = (dir / "out" / "run_000" / "archive.json").string();

  const auto sweep_dir = dir / "sweep_out";
  const CliResult r = run_cli("sweep --archive " + archive_path + " --nx 8 --ny 8 " +
                              "--n-eval 1 --seed 5 --out " + sweep_dir.string() +
                              " --quiet");
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  const std::string csv = read_text_file((sweep_dir / "sweep.csv").string());

  SUBCASE("CSV row count equals the lattice size") {
    long rows = -1;  // header
    for (char c : csv) rows += c == '\n' ? 1 : 0;
    CHECK(rows == 64);
  }

  SUBCASE("the sweep matches the in-process computation exactly") {
    const ArchiveDocument doc = load_archive(archive_path);
    const auto env = environment_for(doc);
    const auto lattice = MorphologyGrid::make_rect(
        doc.archive.grid.origin_x, doc.archive.grid.origin_y,
        doc.archive.grid.step_x, doc.archive.grid.step_y, 8, 8);
    const FitnessGrid fg = sweep(*env, doc.archive, lattice, 1, 5);
    CHECK(fitness_grid_to_csv(fg) == csv);
  }

  SUBCASE("render reproduces the sweep's SVG byte for byte") {
    const std::string svg_path = (dir / "rerender.svg").string();
    const CliResult rr = run_cli("render --csv " + (sweep_dir / "sweep.csv").string() +
                                 " --out " + svg_path);
    REQUIRE_MESSAGE(rr.exit_code == 0, rr.output);
    CHECK(read_text_file(svg_path) ==
          read_text_file((sweep_dir / "sweep.svg").string()));
  }

  SUBCASE("a lattice touching the synthetic sign boundary is rejected") {
    const ArchiveDocument doc = load_archive(archive_path);
    REQUIRE(doc.x_split.has_value());
    char split[32];
    std::snprintf(split, sizeof(split), "%.17g", *doc.x_split);
    const CliResult bad = run_cli("sweep --archive " + archive_path +
                                  " --origin-x " + split + " --nx 2 --ny 2 --out " +
                                  (dir / "bad").string());
    CHECK(bad.exit_code == 2);
  }
}

TEST_CASE("stats subcommand") {
  const auto dir = fresh_dir("stats");
  // synthetic summary rows with known group structure (golden dataset B)
  std::vector<RunSummaryRow> rows;
  const std::vector<std::pair<std::string, std::vector<double>>> groups = {
      {"1", {-420.05, -500.0, -380.25, -420.05, -610.5}},
      {"16", {-764.73, -800.0, -764.73, -690.1, -733.33, -764.73}},
      {"49", {-1000.0, -960.0, -1000.0, -940.5}},
      {"64", {-500.0, -610.5, -733.33, -800.0, -690.1}}};
  for (const auto& [label, values] : groups) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      RunSummaryRow r;
      r.group = label;
      r.run_index = static_cast<int>(k);
      r.set_size = std::stoi(label);
      r.schedule = "incremental";
      r.global_mean = values[k];
      r.local_mean = values[k] / 2;
      r.default_fitness = values[k] / 3;
      rows.push_back(r);
    }
  }
  const std::string summary_path = (dir / "summary.csv").string();
  write_text_file(summary_path, summary_to_csv(rows));

  SUBCASE("the report matches the statistics oracle") {
    const CliResult r = run_cli("stats --in " + summary_path +
                                " --metric global --out " + (dir / "rep").string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    const std::string report = read_text_file((dir / "rep" / "stats.txt").string());
    CHECK(report.find("H = 15.4485") != std::string::npos);
    CHECK(report.find("p = 0.00147086") != std::string::npos);
    // group order is numeric
    CHECK(report.find("median[1]") < report.find("median[16]"));
    CHECK(report.find("median[16]") < report.find("median[49]"));
    const std::string csv = read_text_file((dir / "rep" / "stats.csv").string());
    CHECK(csv.find("global,kruskal_wallis,H,15.448483699772") != std::string::npos);
  }

  SUBCASE("a single group is refused with a clear message") {
    std::vector<RunSummaryRow> one;
    for (int k = 0; k < 5; ++k) {
      RunSummaryRow r;
      r.group = "64";
      r.run_index = k;
      r.global_mean = -700.0 - k;
      one.push_back(r);
    }
    const std::string one_path = (dir / "one.csv").string();
    write_text_file(one_path, summary_to_csv(one));
    const CliResult r = run_cli("stats --in " + one_path + " --out " + (dir / "rep2").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("at least 2 groups") != std::string::npos);
  }

  SUBCASE("unequal group sizes are accepted") {
    const CliResult r = run_cli("stats --in " + summary_path +
                                " --metric all --out " + (dir / "rep3").string());
    CHECK(r.exit_code == 0);
  }

  SUBCASE("malformed CSV reports the line number") {
    const std::string broken_path = (dir / "broken.csv").string();
    write_text_file(broken_path,
                    read_text_file(summary_path) + "not,a,valid,row\n");
    const CliResult r = run_cli("stats --in " + broken_path + " --out " + (dir / "rep4").string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("line") != std::string::npos);
  }
}

TEST_CASE("schedule-compare emits exactly four matched groups") {
  const auto dir = fresh_dir("compare");
  // very small budget: the point here is the output contract
  const std::string config = small_config(dir, "");
  const CliResult r =
      run_cli("schedule-compare --config " + config + " --runs 2 --jobs 2 --out " +
              (dir / "cmp").string() + " --quiet");
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);

  const auto rows = summary_from_csv(read_text_file((dir / "cmp" / "summary.csv").string()));
  CHECK(rows.size() == 8);  // 4 schedules x 2 runs
  std::set<std::string> groups;
  std::set<std::uint64_t> seeds_incremental, seeds_walk5;
  for (const auto& row : rows) {
    groups.insert(row.group);
    if (row.group == "incremental") seeds_incremental.insert(row.seed);
    if (row.group == "random_walk_5") seeds_walk5.insert(row.seed);
  }
  CHECK(groups == std::set<std::string>{"incremental", "random", "random_walk_1",
                                        "random_walk_5"});
  CHECK(seeds_incremental == seeds_walk5);  // matched seeds
  CHECK(fs::exists(dir / "cmp" / "schedule_compare.txt"));
}
