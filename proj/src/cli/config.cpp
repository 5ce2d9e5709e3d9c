#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "pinlab/cli.hpp"
#include "pinlab/errors.hpp"

namespace pinlab::cli {

const nlohmann::json& ExperimentConfig::section(const std::string& name) const {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!document.contains(name)) return empty;
  const auto& s = document.at(name);
  if (!s.is_object()) throw ConfigError(name, "must be an object");
  return s;
}

RenewalKernel ExperimentConfig::kernel() const {
  if (!document.contains("kernel")) throw ConfigError("kernel", "required field missing");
  try {
    return kernel_from_json(document.at("kernel"));
  } catch (const InvalidParameter& e) {
    throw ConfigError("kernel", e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("kernel", e.what());
  }
}

DisorderLaw ExperimentConfig::disorder() const {
  if (!document.contains("disorder")) throw ConfigError("disorder", "required field missing");
  try {
    return disorder_from_json(document.at("disorder"));
  } catch (const InvalidParameter& e) {
    throw ConfigError("disorder", e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("disorder", e.what());
  }
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : document.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig make_config(nlohmann::json document, const Overrides& o) {
  if (!document.is_object()) throw ConfigError("config", "top level must be a JSON object");
  ExperimentConfig cfg;
  if (o.seed) {
    cfg.seed = *o.seed;
  } else if (document.contains("seed")) {
    const auto& sj = document.at("seed");
    if (!sj.is_number_integer() || (!sj.is_number_unsigned() && sj.get<std::int64_t>() < 0)) {
      throw ConfigError("seed", "must be a non-negative integer");
    }
    cfg.seed = document.at("seed").get<std::uint64_t>();
  } else {
    throw ConfigError("seed", "required field missing (or pass --seed)");
  }
  document["seed"] = cfg.seed;

  const nlohmann::json output = document.contains("output") ? document.at("output")
                                                             : nlohmann::json::object();
  if (!output.is_object()) throw ConfigError("output", "must be an object");
  if (o.out_dir) {
    cfg.out_dir = *o.out_dir;
  } else if (const char* env = std::getenv("PINLAB_OUT_DIR"); env && *env) {
    cfg.out_dir = env;
  } else {
    cfg.out_dir = read_value<std::string>(output, "output", "dir", std::string("pinlab_out"));
  }
  const std::string fmt =
      o.format ? *o.format : read_value<std::string>(output, "output", "format", std::string("csv"));
  if (fmt == "csv") {
    cfg.format = Format::csv;
  } else if (fmt == "json") {
    cfg.format = Format::json;
  } else {
    throw ConfigError("output.format", "expected csv or json, got '" + fmt + "'");
  }
  cfg.threads = o.threads ? *o.threads : read_value<unsigned>(document, "config", "threads", 1u);
  if (cfg.threads == 0) throw ConfigError("threads", "must be >= 1");
  cfg.document = std::move(document);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return make_config(std::move(document), overrides);
}

std::vector<double> read_grid(const nlohmann::json& section, const std::string& section_name,
                              const std::string& key, std::optional<std::vector<double>> fallback) {
  const std::string field = section_name + "." + key;
  if (!section.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(field, "required field missing");
  }
  const auto& g = section.at(key);
  std::vector<double> out;
  try {
    if (g.is_array()) {
      out = g.get<std::vector<double>>();
    } else if (g.is_object()) {
      const double start = g.at("start").get<double>();
      const double stop = g.at("stop").get<double>();
      const auto count = g.at("count").get<std::size_t>();
      if (count == 0) throw ConfigError(field + ".count", "must be >= 1");
      for (std::size_t i = 0; i < count; ++i) {
        out.push_back(count == 1 ? start
                                 : start + (stop - start) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
      }
    } else {
      throw ConfigError(field, "expected an array or {start, stop, count}");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(field, e.what());
  }
  if (out.empty()) throw ConfigError(field, "grid is empty");
  return out;
}

}  // namespace pinlab::cli
