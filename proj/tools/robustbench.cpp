// Command-line benchmark driver: runs a config file's experiment and writes
// results.csv (always) plus results.svg (estimator scenarios) into the
// output directory. --json additionally prints the rows, and for the
// concentration scenario the tail-fit reports, to stdout.
//
// Exit codes: 0 success, 2 configuration or I/O problem, 3 every trial of
// the experiment failed.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robust/bench.hpp"
#include "robust/errors.hpp"
#include "robust/orderstats.hpp"
#include "robust/rng.hpp"

namespace {

nlohmann::json row_json(const robust::ResultRow& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["estimator"] = r.estimator;
  j["N"] = r.n;
  j["d"] = r.d;
  j["eps"] = r.eps;
  j["trial"] = r.trial;
  if (std::isnan(r.error))
    j["error"] = "NaN";
  else
    j["error"] = r.error;
  j["runtime_ms"] = r.runtime_ms;
  j["seed"] = r.seed;
  j["tag"] = r.tag;
  return j;
}

robust::TailDist dist_of(const std::string& name) {
  if (name == "gaussian") return robust::TailDist::kGaussian;
  if (name == "half_normal") return robust::TailDist::kHalfNormal;
  return robust::TailDist::kChi2One;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robustbench: seeded estimator benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;  // 0: ROBUST_THREADS, then hardware
  bool as_json = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config file")
        ->required();
    cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_flag("--json", as_json, "print rows as JSON to stdout");
  };
  CLI::App* c_mean = app.add_subcommand("mean-est", "mean estimator runs");
  CLI::App* c_cov = app.add_subcommand("cov-est", "covariance estimator runs");
  CLI::App* c_conc =
      app.add_subcommand("concentration", "order statistic concentration lab");
  CLI::App* c_sweep = app.add_subcommand("sweep", "full estimator sweep");
  for (CLI::App* c : {c_mean, c_cov, c_conc, c_sweep}) add_common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit cleanly; anything else is a usage problem.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    robust::ExperimentConfig cfg = robust::load_config(config_path);
    if (app.got_subcommand(c_mean)) cfg.scenario = robust::Scenario::kMean;
    if (app.got_subcommand(c_cov)) cfg.scenario = robust::Scenario::kCov;
    if (app.got_subcommand(c_conc))
      cfg.scenario = robust::Scenario::kConcentration;
    if (app.got_subcommand(c_sweep)) cfg.scenario = robust::Scenario::kSweep;
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";

    const std::vector<robust::ResultRow> rows =
        robust::run_experiment(cfg, threads);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec)
      throw robust::IoError("cannot create output directory: " + cfg.out_dir);
    const std::string csv_path = cfg.out_dir + "/results.csv";
    robust::emit_csv(rows, csv_path);

    nlohmann::json out;
    out["rows"] = nlohmann::json::array();
    for (const auto& r : rows) out["rows"].push_back(row_json(r));

    if (cfg.scenario == robust::Scenario::kConcentration) {
      // The full lab fit for each grid point, written next to the CSV.
      out["reports"] = nlohmann::json::array();
      for (int n : cfg.grid_n)
        for (double eps : cfg.grid_eps) {
          std::string rep_text;
          try {
            rep_text = robust::quantile_concentration_experiment(
                           dist_of(cfg.dist), eps, n, cfg.trials,
                           robust::RngStream(cfg.seed, 1), threads)
                           .to_json();
          } catch (const robust::Error& e) {
            // The per-trial rows stand on their own; a fit that needs more
            // trials than configured is reported, not fatal.
            std::cerr << "tail fit skipped for N=" << n << " eps=" << eps
                      << ": " << e.what() << "\n";
            out["reports"].push_back(
                nlohmann::json{{"N", n}, {"eps", eps}, {"error", e.what()}});
            continue;
          }
          const std::string rep_path =
              cfg.out_dir + "/tailfit_N" + std::to_string(n) + "_eps" +
              std::to_string(eps).substr(0, 5) + ".json";
          std::ofstream f(rep_path, std::ios::binary);
          if (!f) throw robust::IoError("cannot write report: " + rep_path);
          f << rep_text << "\n";
          out["reports"].push_back(nlohmann::json::parse(rep_text));
        }
    } else {
      const std::string x =
          cfg.grid_eps.size() > cfg.grid_n.size() ? "eps" : "N";
      robust::emit_svg_lines(rows, x, "error", "estimator",
                             cfg.out_dir + "/results.svg");
    }

    if (as_json) std::cout << out.dump(2) << "\n";

    bool all_failed = !rows.empty();
    for (const auto& r : rows)
      if (r.tag.empty()) {
        all_failed = false;
        break;
      }
    if (all_failed) {
      std::cerr << "every trial failed; see " << csv_path << "\n";
      return 3;
    }
    if (!as_json)
      std::cout << rows.size() << " rows -> " << csv_path << "\n";
    return 0;
  } catch (const robust::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
