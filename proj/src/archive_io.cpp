#include "morphevo/archive_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace morphevo {

using nlohmann::json;

static json grid_to_json(const MorphologyGrid& g) {
  return {{"origin_x", g.origin_x}, {"origin_y", g.origin_y},
          {"step_x", g.step_x},     {"step_y", g.step_y},
          {"nx", g.nx},             {"ny", g.ny},
          {"cells_x", [&] {
             std::vector<double> xs;
             for (const auto& c : g.cells) xs.push_back(c.x);
             return xs;
           }()},
          {"cells_y", [&] {
             std::vector<double> ys;
             for (const auto& c : g.cells) ys.push_back(c.y);
             return ys;
           }()}};
}

static MorphologyGrid grid_from_json(const json& j) {
  MorphologyGrid g;
  g.origin_x = j.at("origin_x").get<double>();
  g.origin_y = j.at("origin_y").get<double>();
  g.step_x = j.at("step_x").get<double>();
  g.step_y = j.at("step_y").get<double>();
  g.nx = j.at("nx").get<int>();
  g.ny = j.at("ny").get<int>();
  const auto xs = j.at("cells_x").get<std::vector<double>>();
  const auto ys = j.at("cells_y").get<std::vector<double>>();
  if (xs.size() != ys.size() ||
      static_cast<int>(xs.size()) != g.nx * g.ny) {
    throw std::invalid_argument("archive grid cells are inconsistent");
  }
  for (std::size_t k = 0; k < xs.size(); ++k) {
    g.cells.push_back({xs[k], ys[k], static_cast<int>(k)});
  }
  return g;
}

json archive_to_json(const ArchiveDocument& doc) {
  json j;
  j["kind"] = "morphevo-archive";
  j["format_version"] = doc.format_version;
  j["config_hash"] = doc.config_hash;
  j["env"] = {{"name", doc.env_name}};
  if (doc.x_split) j["env"]["x_split"] = *doc.x_split;
  j["topology"] = {{"inputs", doc.archive.topology.inputs},
                   {"hidden", doc.archive.topology.hidden},
                   {"outputs", doc.archive.topology.outputs}};
  j["grid"] = grid_to_json(doc.archive.grid);
  j["run"] = {{"seed", doc.run_seed},
              {"generations_used", doc.generations_used},
              {"schedule", doc.schedule},
              {"walk_step", doc.walk_step},
              {"sigma0", doc.sigma0},
              {"max_generations", doc.max_generations},
              {"stagnation_window", doc.stagnation_window},
              {"satisfaction_target", doc.satisfaction_target},
              {"outlier_std_multiplier", doc.outlier_std_multiplier},
              {"branch_generations", doc.branch_generations}};
  json entries = json::array();
  for (const auto& e : doc.archive.entries) {
    entries.push_back({{"cluster_cells", e.cluster},
                       {"params", e.params},
                       {"mean_fitness", e.mean_fitness},
                       {"generations_used", e.generations_used}});
  }
  j["entries"] = std::move(entries);
  j["uncovered_cells"] = doc.archive.uncovered;
  return j;
}

ArchiveDocument archive_from_json(const json& j) {
  if (!j.is_object() || j.value("kind", "") != "morphevo-archive") {
    throw std::invalid_argument("not a morphevo archive document");
  }
  if (j.value("format_version", -1) != kArchiveFormatVersion) {
    throw std::invalid_argument(
        "archive format version mismatch: expected " +
        std::to_string(kArchiveFormatVersion) + ", found " +
        std::to_string(j.value("format_version", -1)));
  }
  ArchiveDocument doc;
  doc.config_hash = j.at("config_hash").get<std::uint64_t>();
  doc.env_name = j.at("env").at("name").get<std::string>();
  if (j.at("env").contains("x_split")) {
    doc.x_split = j.at("env").at("x_split").get<double>();
  }
  doc.archive.topology = {j.at("topology").at("inputs").get<int>(),
                          j.at("topology").at("hidden").get<int>(),
                          j.at("topology").at("outputs").get<int>()};
  doc.archive.grid = grid_from_json(j.at("grid"));
  const json& run = j.at("run");
  doc.run_seed = run.at("seed").get<std::uint64_t>();
  doc.generations_used = run.at("generations_used").get<long>();
  doc.schedule = run.at("schedule").get<std::string>();
  doc.walk_step = run.at("walk_step").get<int>();
  doc.sigma0 = run.at("sigma0").get<double>();
  doc.max_generations = run.at("max_generations").get<long>();
  doc.stagnation_window = run.at("stagnation_window").get<int>();
  doc.satisfaction_target = run.at("satisfaction_target").get<double>();
  doc.outlier_std_multiplier = run.at("outlier_std_multiplier").get<double>();
  doc.branch_generations = run.at("branch_generations").get<std::vector<long>>();
  for (const json& e : j.at("entries")) {
    ArchiveEntry entry;
    entry.cluster = e.at("cluster_cells").get<std::vector<int>>();
    entry.params = e.at("params").get<std::vector<double>>();
    entry.mean_fitness = e.at("mean_fitness").get<double>();
    entry.generations_used = e.at("generations_used").get<long>();
    doc.archive.entries.push_back(std::move(entry));
  }
  doc.archive.uncovered = j.at("uncovered_cells").get<std::vector<int>>();
  return doc;
}

void save_archive(const ArchiveDocument& doc, const std::string& path) {
  write_text_file(path, archive_to_json(doc).dump(2) + "\n");
}

ArchiveDocument load_archive(const std::string& path) {
  return archive_from_json(json::parse(read_text_file(path)));
}

std::unique_ptr<Environment> environment_for(const ArchiveDocument& doc) {
  return make_environment(doc.env_name, doc.x_split);
}

TraceWriter::TraceWriter(std::string path, bool append) : path_(std::move(path)) {
  if (append) {
    lines_ = count_lines(path_);
  } else {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open trace file " + path_);
  }
}

json trace_to_json(const TraceRecord& r) {
  json j;
  j["v"] = kTraceFormatVersion;
  j["branch"] = r.branch;
  j["gen"] = r.generation;
  j["branch_gen"] = r.branch_generation;
  j["cell"] = r.cell;
  j["f_best"] = r.f_best;
  j["f_prime"] = r.f_prime;
  j["f_hat"] = std::isfinite(r.f_hat) ? json(r.f_hat) : json(nullptr);
  j["stagnation"] = r.stagnation_counter;
  if (!r.removed_cells.empty()) {
    j["removed"] = r.removed_cells;
    j["removed_fitness"] = r.removed_fitness;
    j["removal_threshold"] = r.removal_threshold;
  }
  if (!r.end_reason.empty()) j["end"] = r.end_reason;
  return j;
}

void TraceWriter::write(const TraceRecord& record) {
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot append to trace file " + path_);
  out << trace_to_json(record).dump() << "\n";
  ++lines_;
}

void TraceWriter::flush() {}

long TraceWriter::count_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  long n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

void TraceWriter::truncate_lines(const std::string& path, long keep) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string kept;
  std::string line;
  long n = 0;
  while (n < keep && std::getline(in, line)) {
    kept += line;
    kept += "\n";
    ++n;
  }
  in.close();
  write_text_file(path, kept);
}

static const char* kSummaryHeader =
    "group,run_index,seed,set_size,schedule,default_fitness,local_mean,"
    "global_mean,sufficiency_count,sufficiency_fraction,n_entries,"
    "generations_used,uncovered";

std::string summary_to_csv(const std::vector<RunSummaryRow>& rows) {
  std::string out = kSummaryHeader;
  out += "\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%llu,%d,%s,%.17g,%.17g,%.17g,%d,%.17g,%d,%ld,%d\n",
                  r.group.c_str(), r.run_index,
                  static_cast<unsigned long long>(r.seed), r.set_size,
                  r.schedule.c_str(), r.default_fitness, r.local_mean,
                  r.global_mean, r.sufficiency_count, r.sufficiency_fraction,
                  r.n_entries, r.generations_used, r.uncovered);
    out += buf;
  }
  return out;
}

std::vector<RunSummaryRow> summary_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("summary CSV: empty file");
  if (line != kSummaryHeader) {
    throw std::invalid_argument("summary CSV: unexpected header at line 1");
  }
  std::vector<RunSummaryRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 13) {
      throw std::invalid_argument("summary CSV: expected 13 fields at line " +
                                  std::to_string(line_no));
    }
    try {
      RunSummaryRow r;
      r.group = fields[0];
      r.run_index = std::stoi(fields[1]);
      r.seed = std::stoull(fields[2]);
      r.set_size = std::stoi(fields[3]);
      r.schedule = fields[4];
      r.default_fitness = std::stod(fields[5]);
      r.local_mean = std::stod(fields[6]);
      r.global_mean = std::stod(fields[7]);
      r.sufficiency_count = std::stoi(fields[8]);
      r.sufficiency_fraction = std::stod(fields[9]);
      r.n_entries = std::stoi(fields[10]);
      r.generations_used = std::stol(fields[11]);
      r.uncovered = std::stoi(fields[12]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw std::invalid_argument("summary CSV: parse error at line " +
                                  std::to_string(line_no));
    }
  }
  return rows;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace morphevo
