#pragma once

// pinlab command-line frontend: configuration, tabular output and subcommands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pinlab/disorder_laws.hpp"
#include "pinlab/renewal_kernels.hpp"

namespace pinlab::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kInvariantFailure = 3, kUndecided = 4 };

// Invalid configuration; `field()` is a JSON-pointer-like path such as
// "phase_diagram.beta_grid".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& detail)
      : std::runtime_error(field + ": " + detail), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Format { csv, json };

struct ExperimentConfig {
  nlohmann::json document;  // effective configuration (seed override applied)
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  Format format = Format::csv;
  unsigned threads = 1;

  // Section of the document, or an empty object when absent.
  const nlohmann::json& section(const std::string& name) const;
  RenewalKernel kernel() const;
  DisorderLaw disorder() const;
  std::string hash() const;  // 16 hex digits, FNV-1a of the compact dump
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
};

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides);
ExperimentConfig make_config(nlohmann::json document, const Overrides& overrides);

// Reads `section.key` as a list of numbers, either an explicit array or
// {"start", "stop", "count"} spaced linearly.
std::vector<double> read_grid(const nlohmann::json& section, const std::string& section_name,
                              const std::string& key, std::optional<std::vector<double>> fallback);

template <typename T>
T read_value(const nlohmann::json& section, const std::string& section_name,
             const std::string& key, std::optional<T> fallback) {
  if (!section.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(section_name + "." + key, "required field missing");
  }
  try {
    return section.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(section_name + "." + key, e.what());
  }
}

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct RunManifest {
  std::string command;
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> warnings;
  int exit_code = 0;
};

// %.17g for doubles; "inf", "-inf", "nan" spelled out.
std::string format_double(double v);

// Writes `stem`.csv or `stem`.json under the output directory and records it.
void write_table(const ExperimentConfig& cfg, RunManifest& manifest, const std::string& stem,
                 const Table& table);
void write_json(const ExperimentConfig& cfg, RunManifest& manifest, const std::string& name,
                const nlohmann::json& payload);
void write_manifest(const ExperimentConfig& cfg, const RunManifest& manifest);

int cmd_homopolymer(const ExperimentConfig& cfg, RunManifest& manifest);
int cmd_annealed_curve(const ExperimentConfig& cfg, RunManifest& manifest);
int cmd_phase_diagram(const ExperimentConfig& cfg, RunManifest& manifest);
int cmd_relevance(const ExperimentConfig& cfg, RunManifest& manifest);
int cmd_chi(const ExperimentConfig& cfg, RunManifest& manifest);
int cmd_validate(const ExperimentConfig& cfg, RunManifest& manifest);

int run(int argc, char** argv);

}  // namespace pinlab::cli
