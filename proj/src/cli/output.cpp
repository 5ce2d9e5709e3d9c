#include <cmath>
#include <cstdio>
#include <fstream>

#include "pinlab/cli.hpp"

namespace pinlab::cli {
namespace {

nlohmann::json header(const ExperimentConfig& cfg, const RunManifest& m) {
  return {{"toolkit", "pinlab"},
          {"version", m.version},
          {"command", m.command},
          {"config_hash", cfg.hash()},
          {"seed", cfg.seed}};
}

nlohmann::json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string cell_csv(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / name, std::ios::binary);
  if (!out) throw ConfigError("output.dir", "cannot write " + (cfg.out_dir / name).string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const ExperimentConfig& cfg, RunManifest& manifest, const std::string& stem,
                 const Table& table) {
  const std::string name = stem + (cfg.format == Format::csv ? ".csv" : ".json");
  std::ofstream out = open_output(cfg, name);
  if (cfg.format == Format::csv) {
    out << "# pinlab " << manifest.version << " command=" << manifest.command
        << " config_hash=" << cfg.hash() << " seed=" << cfg.seed << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_csv(row[i]);
      out << "\n";
    }
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json r = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(r));
    }
    nlohmann::json doc = {{"manifest", header(cfg, manifest)},
                          {"columns", table.columns},
                          {"rows", std::move(rows)}};
    out << doc.dump(2) << "\n";
  }
  manifest.outputs.push_back(name);
}

void write_json(const ExperimentConfig& cfg, RunManifest& manifest, const std::string& name,
                const nlohmann::json& payload) {
  std::ofstream out = open_output(cfg, name);
  nlohmann::json doc = {{"manifest", header(cfg, manifest)}, {"result", payload}};
  out << doc.dump(2) << "\n";
  manifest.outputs.push_back(name);
}

void write_manifest(const ExperimentConfig& cfg, const RunManifest& m) {
  std::ofstream out = open_output(cfg, "run_manifest.json");
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [op, seconds] : m.timings) timings[op] = seconds;
  nlohmann::json doc = header(cfg, m);
  doc["outputs"] = m.outputs;
  doc["timings_seconds"] = timings;
  doc["warnings"] = m.warnings;
  doc["exit_code"] = m.exit_code;
  doc["config"] = cfg.document;
  out << doc.dump(2) << "\n";
}

}  // namespace pinlab::cli
