#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>

#include "pinlab/cli.hpp"
#include "pinlab/errors.hpp"
#include "pinlab/homopolymer.hpp"
#include "pinlab/quenched.hpp"
#include "pinlab/relevance.hpp"
#include "pinlab/rng.hpp"

#ifndef PINLAB_VERSION
#define PINLAB_VERSION "0.0.0"
#endif

namespace pinlab::cli {
namespace {

class Stopwatch {
 public:
  Stopwatch(RunManifest& m, std::string op)
      : manifest_(m), op_(std::move(op)), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    const auto dt = std::chrono::steady_clock::now() - start_;
    manifest_.timings.emplace_back(op_, std::chrono::duration<double>(dt).count());
  }

 private:
  RunManifest& manifest_;
  std::string op_;
  std::chrono::steady_clock::time_point start_;
};

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

const char* status_name(PhaseStatus s) { return s == PhaseStatus::pinned ? "pinned" : "unpinned"; }

const char* chi_status_name(ChiStatus s) {
  switch (s) {
    case ChiStatus::finite:
      return "finite";
    case ChiStatus::infinite:
      return "infinite";
    case ChiStatus::undecided:
      return "undecided";
  }
  return "undecided";
}

const char* localization_name(Localization v) {
  switch (v) {
    case Localization::localized:
      return "localized";
    case Localization::delocalized:
      return "delocalized";
    case Localization::undecided:
      return "undecided";
  }
  return "undecided";
}

std::vector<std::size_t> read_sizes(const nlohmann::json& s, const std::string& section,
                                    const std::string& key, std::vector<std::size_t> fallback) {
  const auto v = read_value<std::vector<std::size_t>>(s, section, key, fallback);
  if (v.empty()) throw ConfigError(section + "." + key, "must not be empty");
  return v;
}

void require_positive(std::size_t v, const std::string& field) {
  if (v == 0) throw ConfigError(field, "must be >= 1");
}

}  // namespace

int cmd_homopolymer(const ExperimentConfig& cfg, RunManifest& manifest) {
  const auto& s = cfg.section("homopolymer");
  const RenewalKernel kernel = cfg.kernel();
  const auto grid = read_grid(s, "homopolymer", "lambda_grid", std::vector<double>{0.0, 0.5, 1.0, 2.0});
  const double tol = read_value<double>(s, "homopolymer", "tol", 1e-12);
  Table t{{"lambda", "f", "residual", "status"}, {}};
  {
    Stopwatch sw(manifest, "homopolymer_free_energy");
    for (double l : grid) {
      const HomopolymerResult r = homopolymer_free_energy(kernel, l, tol);
      t.rows.push_back({r.lambda, r.f, r.residual, std::string(status_name(r.status))});
    }
  }
  write_table(cfg, manifest, "homopolymer", t);
  return kSuccess;
}

int cmd_annealed_curve(const ExperimentConfig& cfg, RunManifest& manifest) {
  const auto& s = cfg.section("annealed_curve");
  const RenewalKernel kernel = cfg.kernel();
  const DisorderLaw disorder = cfg.disorder();
  const auto grid = read_grid(s, "annealed_curve", "beta_grid", std::vector<double>{0.0, 0.5, 1.0, 2.0});
  std::vector<AnnealedCurvePoint> curve;
  {
    Stopwatch sw(manifest, "annealed_critical_curve");
    curve = annealed_critical_curve(kernel, disorder, grid);
  }
  Table t{{"beta", "h_c_ann", "bisection_h"}, {}};
  for (const auto& p : curve) t.rows.push_back({p.beta, p.h_c_ann, p.bisection_h});
  write_table(cfg, manifest, "annealed_curve", t);
  return kSuccess;
}

int cmd_phase_diagram(const ExperimentConfig& cfg, RunManifest& manifest) {
  const std::string name = "phase_diagram";
  const auto& s = cfg.section(name);
  const RenewalKernel kernel = cfg.kernel();
  const DisorderLaw disorder = cfg.disorder();
  const auto grid = read_grid(s, name, "beta_grid", std::vector<double>{0.0, 0.5, 1.0});
  QuenchedSearchConfig q;
  q.n = read_value<std::size_t>(s, name, "n", std::size_t{4096});
  q.replicas = read_value<std::size_t>(s, name, "replicas", std::size_t{64});
  q.width = read_value<double>(s, name, "width", 0.01);
  q.c_fs = read_value<double>(s, name, "c_fs", 5.0);
  q.max_iterations = read_value<int>(s, name, "max_iterations", 60);
  q.doubled_n_diagnostic = read_value<bool>(s, name, "doubled_n_diagnostic", true);
  q.base_seed = cfg.seed;
  q.threads = cfg.threads;
  require_positive(q.n, name + ".n");
  require_positive(q.replicas, name + ".replicas");
  for (double b : grid) {
    if (!(b >= 0.0)) throw ConfigError(name + ".beta_grid", "beta must be >= 0");
  }

  Table rows{{"beta", "h_c_ann", "h_que_lo", "h_que_hi", "finite_size_shift", "verdict"}, {}};
  Table diag{{"beta", "stage", "h", "n", "mean", "stderr", "verdict"}, {}};
  bool undecided = false;
  for (double beta : grid) {
    QuenchedBracket b;
    {
      Stopwatch sw(manifest, "quenched_critical_point beta=" + format_double(beta));
      b = quenched_critical_point(kernel, disorder, beta, q);
    }
    const double hc = disorder.log_mgf(beta);
    rows.rows.push_back({beta, hc, b.h_lo, b.h_hi, b.finite_size_shift,
                         std::string(b.undecided ? "undecided" : "bracketed")});
    if (b.undecided) {
      undecided = true;
      manifest.warnings.push_back("beta=" + format_double(beta) + ": quenched bracket undecided");
    }
    if (b.h_hi > hc + (b.h_hi - b.h_lo)) {
      manifest.warnings.push_back("beta=" + format_double(beta) +
                                  ": quenched upper end exceeds annealed curve plus width");
    }
    for (const auto& st : b.steps) {
      diag.rows.push_back({beta, std::string("search"), st.h, as_int(st.n), st.mean, st.stderr_,
                           std::string(localization_name(st.verdict))});
    }
    for (const auto& st : b.diagnostics) {
      diag.rows.push_back({beta, std::string("doubled-n"), st.h, as_int(st.n), st.mean, st.stderr_,
                           std::string(localization_name(st.verdict))});
    }
  }
  write_table(cfg, manifest, "phase_diagram", rows);
  write_table(cfg, manifest, "phase_diagram_diagnostics", diag);
  return undecided ? kUndecided : kSuccess;
}

int cmd_relevance(const ExperimentConfig& cfg, RunManifest& manifest) {
  const std::string name = "relevance";
  const auto& s = cfg.section(name);
  const RenewalKernel kernel = cfg.kernel();
  const DisorderLaw disorder = cfg.disorder();
  const auto betas = read_grid(s, name, "beta_grid", std::vector<double>{1.5});
  const auto trs = read_sizes(s, name, "tr_schedule", {8, 16, 32, 64});
  const auto n_per_tr = read_value<std::size_t>(s, name, "n_per_tr", std::size_t{256});
  const auto replicas = read_value<std::size_t>(s, name, "replicas", std::size_t{64});
  require_positive(n_per_tr, name + ".n_per_tr");
  require_positive(replicas, name + ".replicas");
  for (std::size_t tr : trs) require_positive(tr, name + ".tr_schedule");

  CriticalTemperatureBounds bounds;
  {
    Stopwatch sw(manifest, "critical_temperature_bounds");
    bounds = critical_temperature_bounds(kernel, disorder);
  }
  nlohmann::json bj = to_json(bounds);
  bj["kernel"] = to_json(kernel);
  bj["disorder"] = to_json(disorder);
  write_json(cfg, manifest, "relevance_bounds.json", bj);

  Table t{{"beta", "tr", "m_tr", "estimate", "stderr", "lower", "upper", "verdict"}, {}};
  int code = kSuccess;
  for (double beta : betas) {
    if (!(beta >= 0.0)) throw ConfigError(name + ".beta_grid", "beta must be >= 0");
    std::vector<RelevanceReport> reports;
    {
      Stopwatch sw(manifest, "entropy_estimator beta=" + format_double(beta));
      for (std::size_t tr : trs) {
        reports.push_back(entropy_estimator(kernel, disorder, beta, tr, n_per_tr * tr, replicas,
                                            cfg.seed, cfg.threads));
      }
    }
    const RelevanceVerdict v = relevance_verdict(reports);
    if (v == RelevanceVerdict::undecided) {
      manifest.warnings.push_back("beta=" + format_double(beta) + ": relevance verdict undecided");
      if (code == kSuccess) code = kUndecided;
    }
    for (const auto& r : reports) {
      if (!r.sandwich_ok) {
        manifest.warnings.push_back("beta=" + format_double(beta) + " tr=" + std::to_string(r.tr) +
                                    ": sandwich bounds violated");
        code = kInvariantFailure;
      }
      t.rows.push_back({r.beta, as_int(r.tr), r.m_tr, r.entropy_estimate, r.stderr_, r.lower_bound,
                        r.upper_bound, std::string(to_string(v))});
    }
  }
  write_table(cfg, manifest, "relevance", t);
  return code;
}

int cmd_chi(const ExperimentConfig& cfg, RunManifest& manifest) {
  const auto& s = cfg.section("chi");
  const RenewalKernel kernel = cfg.kernel();
  const double tol = read_value<double>(s, "chi", "tolerance", 1e-6);
  const auto horizon = read_value<std::size_t>(s, "chi", "horizon", std::size_t{1} << 16);
  const auto max_horizon = read_value<std::size_t>(s, "chi", "max_horizon", std::size_t{1} << 17);
  ChiResult c;
  {
    Stopwatch sw(manifest, "chi");
    c = chi(kernel, tol, horizon, max_horizon);
  }
  const LambdaZero l0 = lambda0(c);
  Table t{{"status", "chi", "truncation_error", "fitted_alpha", "decay_exponent", "horizon", "lambda0"},
          {}};
  t.rows.push_back({std::string(chi_status_name(c.status)), c.value, c.truncation_error,
                    c.fitted_alpha, c.decay_exponent, as_int(c.horizon), l0.value});
  write_table(cfg, manifest, "chi", t);
  if (c.status == ChiStatus::undecided) {
    manifest.warnings.push_back("chi convergence undecided");
    return kUndecided;
  }
  return kSuccess;
}

int cmd_validate(const ExperimentConfig& cfg, RunManifest& manifest) {
  const std::string name = "validate";
  const auto& s = cfg.section(name);
  const auto suite = read_value<std::vector<std::string>>(
      s, name, "suite",
      std::vector<std::string>{"replica-identity", "dp-brute-force", "annealed-identity",
                               "kernel-tables"});
  const RenewalKernel kernel =
      cfg.document.contains("kernel") ? cfg.kernel() : RenewalKernel::power(0.5);
  RngStream stream = derive_stream(cfg.seed, 0);
  Table t{{"check", "case", "error", "tolerance", "result"}, {}};
  bool failed = false;
  auto report = [&](const std::string& check, const std::string& label, double err, double tol,
                    bool pass, const std::string& why = "") {
    const std::string result = pass ? "PASS" : (why.empty() ? "FAIL" : "FAIL(" + why + ")");
    std::cout << result << "  " << check << "  " << label << "  error=" << format_double(err)
              << "\n";
    t.rows.push_back({check, label, err, tol, result});
    failed = failed || !pass;
  };

  Stopwatch sw(manifest, "validate");
  for (const std::string& check : suite) {
    if (check == "replica-identity") {
      const DisorderLaw rad = DisorderLaw::rademacher();
      for (int b = 0; b < 3; ++b) {
        const double beta = 2.0 * stream.uniform01();
        for (std::size_t tr = 1; tr <= 4; ++tr) {
          const RenewalKernel ktr = truncate_kernel(kernel, tr);
          for (std::size_t n = 1; n <= 6; ++n) {
            const ReplicaCheck r = replica_identity_check(ktr, rad, beta, n);
            report(check, "beta=" + format_double(beta) + " tr=" + std::to_string(tr) +
                              " n=" + std::to_string(n),
                   r.max_relative_error, 1e-12, r.max_relative_error <= 1e-12);
          }
        }
      }
    } else if (check == "dp-brute-force") {
      for (int i = 0; i < 20; ++i) {
        const double beta = 2.0 * stream.uniform01();
        const double h = 2.0 * stream.uniform01() - 1.0;
        std::vector<double> omega(12);
        for (double& w : omega) w = stream.normal();
        double worst = 0.0;
        for (std::size_t n = 1; n <= 12; ++n) {
          const double dp = pinned_log_partitions(kernel, omega, beta, h, n)[n];
          const double bf = enumerate_partition_log(kernel, omega, beta, h, n);
          worst = std::max(worst, std::fabs(dp - bf) / std::max(1.0, std::fabs(bf)));
        }
        report(check, "instance=" + std::to_string(i) + " n<=12", worst, 1e-12, worst <= 1e-12);
      }
    } else if (check == "annealed-identity") {
      const DisorderLaw rad = DisorderLaw::rademacher();
      for (int i = 0; i < 3; ++i) {
        const double beta = 2.0 * stream.uniform01();
        const double h = 2.0 * stream.uniform01() - 1.0;
        for (std::size_t n = 1; n <= 10; ++n) {
          const AnnealedCheck a = annealed_partition_check(kernel, rad, beta, h, n, 1e-10);
          report(check, "beta=" + format_double(beta) + " h=" + format_double(h) +
                            " n=" + std::to_string(n),
                 a.relative_error, 1e-10, a.pass);
        }
      }
    } else if (check == "kernel-tables") {
      const auto tables = read_value<nlohmann::json>(s, name, "kernel_tables", nlohmann::json::array());
      for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::string label = tables[i].value("name", "table " + std::to_string(i));
        try {
          RenewalKernel::table(tables[i].at("masses").get<std::vector<double>>());
          report(check, label, 0.0, 1e-12, true);
        } catch (const InvariantViolation& e) {
          std::cerr << "invariant violated: " << e.what() << "\n";
          report(check, label, 0.0, 1e-12, false, e.invariant());
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(name + ".kernel_tables", e.what());
        }
      }
    } else {
      throw ConfigError(name + ".suite", "unknown check '" + check + "'");
    }
  }
  write_table(cfg, manifest, "validate", t);
  return failed ? kInvariantFailure : kSuccess;
}

int run(int argc, char** argv) {
  CLI::App app{"pinlab: random pinning model toolkit"};
  app.set_version_flag("--version", PINLAB_VERSION);
  app.fallthrough();
  std::string config_path;
  Overrides o;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir;
  std::string format;
  app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "base seed, overrides the config");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* format_opt =
      app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  using Command = int (*)(const ExperimentConfig&, RunManifest&);
  const std::vector<std::pair<std::string, Command>> commands = {
      {"homopolymer", cmd_homopolymer},   {"annealed-curve", cmd_annealed_curve},
      {"phase-diagram", cmd_phase_diagram}, {"relevance", cmd_relevance},
      {"chi", cmd_chi},                   {"validate", cmd_validate}};
  for (const auto& [cmd, fn] : commands) app.add_subcommand(cmd, "run " + cmd);
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }
  if (*seed_opt) o.seed = seed;
  if (*out_opt) o.out_dir = out_dir;
  if (*threads_opt) o.threads = threads;
  if (*format_opt) o.format = format;

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  RunManifest manifest;
  manifest.version = PINLAB_VERSION;
  manifest.config_hash = cfg.hash();
  manifest.seed = cfg.seed;
  Command fn = nullptr;
  for (const auto& [cmd, f] : commands) {
    if (app.got_subcommand(cmd)) {
      manifest.command = cmd;
      fn = f;
    }
  }

  int code = kSuccess;
  try {
    code = fn(cfg, manifest);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    code = kConfigError;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    code = kConfigError;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.invariant() << " (" << e.what() << ")\n";
    manifest.warnings.push_back("invariant " + e.invariant());
    code = kInvariantFailure;
  } catch (const PrecisionError& e) {
    std::cerr << "precision failure: " << e.what() << "\n";
    manifest.warnings.push_back(std::string("precision: ") + e.what());
    code = kInvariantFailure;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    manifest.warnings.push_back(std::string("domain: ") + e.what());
    code = kInvariantFailure;
  }
  manifest.exit_code = code;
  if (code != kConfigError) {
    try {
      write_manifest(cfg, manifest);
    } catch (const std::exception& e) {
      std::cerr << "cannot write manifest: " << e.what() << "\n";
    }
  }
  for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
  return code;
}

}  // namespace pinlab::cli
