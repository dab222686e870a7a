#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robust/contamination.hpp"

namespace robust {

// Experiment harness: a config names a scenario, grids of problem sizes,
// an adversary, and a set of estimators; run_experiment scores every
// estimator on every grid point against the ground truth and returns one
// row per (estimator, grid point, trial). Everything is deterministic for
// a fixed seed, independent of the thread count.

enum class Scenario { kMean, kCov, kConcentration, kSweep };

// Estimator families. Mean-family estimators are scored by the l2 error
// against the model mean, covariance-family by the operator-norm error
// against the model covariance. The sets are disjoint and together they
// are exactly the names run_experiment accepts.
bool is_mean_estimator(const std::string& name);
bool is_cov_estimator(const std::string& name);

struct ExperimentConfig {
  Scenario scenario = Scenario::kMean;
  std::vector<int> grid_n = {1000};     // observations per sample
  std::vector<int> grid_d = {2};        // dimensions
  std::vector<double> grid_eps = {0.0}; // contamination rates; for the
                                        // concentration scenario, quantile
                                        // offsets (the 1/2+eps quantile)
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> estimators;  // sorted, duplicate-free
  AdversarySpec adversary;              // epsilon field ignored; grid wins
  Eigen::VectorXd mu;                   // empty: zero mean
  Eigen::VectorXd sigma_diag;           // empty: identity; one entry:
                                        // spherical; else one entry per
                                        // coordinate (fixes the d grid)
  double delta = 0.1;                   // confidence knob passed through
  std::string dist = "gaussian";        // concentration population:
                                        // gaussian | half_normal | chi2_1
  bool wallclock = false;               // fill runtime_ms from the clock;
                                        // documented to break byte-identical
                                        // reruns
  std::string out_dir;                  // default output directory

  // Structural checks; throws ConfigError naming the offending key.
  void validate() const;
};

// Flat key=value config text: one pair per line, '#' starts a comment,
// blank lines ignored, repeated keys append to list-valued fields, unknown
// keys are errors. See parse_config_text's implementation for the key
// table. load_config reads a file (IoError with the path on failure).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// One scored estimate. CSV columns appear in declaration order with the
// header exactly: scenario,estimator,N,d,eps,trial,error,runtime_ms,seed,tag
struct ResultRow {
  std::string scenario;
  std::string estimator;
  int n = 0;
  int d = 0;
  double eps = 0.0;
  int trial = 0;
  double error = 0.0;      // NaN when the estimator failed
  double runtime_ms = 0.0; // 0 unless the config opted into wall-clock
  std::uint64_t seed = 0;  // stream id that reproduces the trial's data
  std::string tag;         // empty on success, else the failure message

  // Field-wise equality with NaN == NaN, so parsed output compares equal
  // to what was emitted.
  bool operator==(const ResultRow& o) const;
};

// Runs the config: for each grid point and trial, draw a clean sample,
// contaminate it at the grid eps, run every estimator on the same data,
// and score against the truth. A failing estimator yields a row with
// error = NaN and the message in tag; the sweep never aborts. Rows come
// back sorted by (scenario, estimator, N, d, eps, trial) and are unique
// on that key. threads <= 0 resolves via ROBUST_THREADS, then hardware.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      int threads = 1);

// RFC-4180 CSV with the fixed header above; doubles print with 17
// significant digits so parsing returns the exact value, NaN prints as
// the literal NaN. parse_csv_text inverts csv_string exactly.
std::string csv_string(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_csv_text(const std::string& text);

// Self-contained SVG line chart: rows grouped by group_field, one polyline
// per group through (x_field, median of y_field at that x) points, in x
// order. Rows whose y is NaN are skipped. Axes are log-log when every
// plotted value is positive, linear otherwise. x_field and y_field must
// be numeric fields; emit requires at least one row and an openable path.
std::string svg_string(const std::vector<ResultRow>& rows,
                       const std::string& x_field, const std::string& y_field,
                       const std::string& group_field);
void emit_svg_lines(const std::vector<ResultRow>& rows,
                    const std::string& x_field, const std::string& y_field,
                    const std::string& group_field, const std::string& path);

}  // namespace robust
