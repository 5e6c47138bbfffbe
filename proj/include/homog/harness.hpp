#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homog/io.hpp"
#include "homog/resolvent.hpp"

namespace homog {

/// Right-hand side description: {"seed": s, "degree": p} for a seeded unit-norm
/// trig polynomial, a field dump (object or bare coefficient list), or a string
/// "seed:<s>" / path to a field dump.
PeriodicField make_rhs(const json& spec, int d, const std::filesystem::path& base = {});

struct SweepConfig {
  std::string problem = "1d-m1-harmonic";  ///< built-in name or problem file
  std::vector<int> ks{4, 8, 16, 32, 64};
  std::optional<double> lambda;            ///< unset selects 1 + 2 lambda2
  json f = json{{"seed", 1}, {"degree", 4}};
  int cell_cutoff = -1;
  double cell_tol = 1e-10;
  double solve_tol = 1e-10;
  std::filesystem::path output_dir;        ///< empty: nothing written
  std::uint64_t seed = 1;
  int width = 1;                           ///< rows solved concurrently
  std::vector<std::string> required{"l2_u"};
  double slope_threshold = 0.9;
  bool negative_control = false;
  bool plot = true;
  bool use_cache = true;
  std::filesystem::path base_dir;          ///< relative paths resolve against this
  bool naive_mean = false;                 ///< \hat a := <a>, no corrector (control runs)

  void validate() const;
};

SweepConfig sweep_config_from_json(const json& j, const std::filesystem::path& base_dir = {});
json sweep_config_to_json(const SweepConfig& cfg);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;  ///< RMS of the log-log residuals
  double ci95 = 0.0;          ///< half-width of the 95% interval for the slope
  int points = 0;
};

/// Least squares on (log eps, log error). Needs >= 3 points, every error > floor.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points, double floor = 0.0);

struct SweepRow {
  int k = 0;
  int cutoff = 0;
  bool ok = false;
  std::string status;
  ErrorReport errors;
  int iterations = 0;
  double residual = 0.0;
};

struct ColumnFit {
  bool ok = false;
  SlopeFit fit;
  std::string note;
};

struct ControlSummary {
  std::map<std::string, ColumnFit> slopes;
  std::vector<SweepRow> rows;
  double real_slope = 0.0;
  double control_slope = 0.0;
  bool passed = false;
};

struct ConvergenceReport {
  std::string problem;
  std::string problem_hash;
  std::string version = kVersion;
  int d = 0;
  int m = 0;
  double lambda = 0.0;
  double lambda_floor = 0.0;
  bool lambda_override = false;
  int cell_cutoff = 0;
  double cell_tol = 0.0;
  double solve_tol = 0.0;
  std::uint64_t seed = 0;
  double slope_threshold = 0.9;
  double f_norm = 0.0;
  std::vector<SweepRow> rows;
  std::map<std::string, ColumnFit> slopes;
  std::map<std::string, bool> pass_flags;
  std::optional<ControlSummary> control;

  bool passed() const;
  json to_json() const;
  std::string to_csv() const;
  std::string to_svg() const;
};

inline const std::vector<std::string>& error_columns() {
  static const std::vector<std::string> cols{"l2_u", "hm_vhat", "hm_steklov", "hm_v"};
  return cols;
}
double column_value(const ErrorReport& e, const std::string& column);

/// Cache directory: HOMOG_CACHE_DIR if set, else ".homog-cache".
std::filesystem::path cache_root();
std::string cell_cache_key(const CoefficientMatrix& a, int cutoff, double tol);
/// Reuses a cached cell solution set when the key and matrix fingerprint match;
/// otherwise solves and writes field dumps plus a manifest.
CellSolutionSet load_or_solve_cells(const CoefficientMatrix& a, int cutoff, double tol, const std::filesystem::path& root,
                                    bool* hit = nullptr);
json cell_manifest(const CoefficientMatrix& a, const CellSolutionSet& cells, const HomogenizedMatrix& ahat);
json homogenized_to_json(const HomogenizedMatrix& ahat);

ConvergenceReport run_sweep(const SweepConfig& cfg);
ConvergenceReport run_sweep(const CoefficientMatrix& a, const SweepConfig& cfg);
/// Reruns the sweep with the naive mean matrix; PASSED iff real - control slope >= 0.5.
ControlSummary negative_control(const CoefficientMatrix& a, const SweepConfig& cfg, const ConvergenceReport& real);

/// report.csv, report.json and (if cfg.plot) report.svg under dir.
void write_report(const ConvergenceReport& report, const std::filesystem::path& dir, bool plot = true);

}  // namespace homog
