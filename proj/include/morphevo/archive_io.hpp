#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "morphevo/generalist.hpp"
#include "morphevo/metrics.hpp"

namespace morphevo {

inline constexpr int kArchiveFormatVersion = 1;
inline constexpr int kTraceFormatVersion = 1;

// Self-contained archive document: enough to reload and re-evaluate the
// ensemble without the original config. Parameters roundtrip exactly
// (shortest-exact JSON doubles).
struct ArchiveDocument {
  int format_version = kArchiveFormatVersion;
  std::uint64_t config_hash = 0;
  std::string env_name;
  std::optional<double> x_split;  // synthetic env
  GeneralistArchive archive;
  std::uint64_t run_seed = 0;
  long generations_used = 0;
  std::string schedule;
  int walk_step = 1;
  double sigma0 = 0.1;
  long max_generations = 0;
  int stagnation_window = 0;
  double satisfaction_target = 0.0;
  double outlier_std_multiplier = 1.0;
  std::vector<long> branch_generations;
};

nlohmann::json archive_to_json(const ArchiveDocument& doc);
ArchiveDocument archive_from_json(const nlohmann::json& j);  // rejects version mismatch

void save_archive(const ArchiveDocument& doc, const std::string& path);
ArchiveDocument load_archive(const std::string& path);

std::unique_ptr<Environment> environment_for(const ArchiveDocument& doc);

// Line-delimited trace records (one JSON object per generation) with a
// schema version on every line. truncate_lines rewrites the file with its
// first n lines when a resumed run replays past a checkpoint.
class TraceWriter {
 public:
  explicit TraceWriter(std::string path, bool append = false);
  void write(const TraceRecord& record);
  long lines() const { return lines_; }
  void flush();
  static void truncate_lines(const std::string& path, long keep);
  static long count_lines(const std::string& path);

 private:
  std::string path_;
  long lines_ = 0;
};

nlohmann::json trace_to_json(const TraceRecord& record);

// One row per finished run; the stats subcommand consumes these files.
struct RunSummaryRow {
  std::string group;  // grouping label (training size or schedule)
  int run_index = 0;
  std::uint64_t seed = 0;
  int set_size = 0;
  std::string schedule;
  double default_fitness = 0.0;
  double local_mean = 0.0;
  double global_mean = 0.0;
  int sufficiency_count = 0;
  double sufficiency_fraction = 0.0;
  int n_entries = 0;
  long generations_used = 0;
  int uncovered = 0;
};

std::string summary_to_csv(const std::vector<RunSummaryRow>& rows);
std::vector<RunSummaryRow> summary_from_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace morphevo
