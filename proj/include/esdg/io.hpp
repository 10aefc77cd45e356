#pragma once

#include <map>
#include <string>
#include <vector>

#include "esdg/analysis.hpp"
#include "esdg/kelvin_helmholtz.hpp"
#include "esdg/solver.hpp"
#include "esdg/time_integration.hpp"

namespace esdg {

inline constexpr const char* kCodeVersion = "esdg 1.0.0";

/// Configuration or input-file problems; mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One simulation: scheme + time control + seeded shear-layer problem.
struct RunSetup {
  SchemeConfig scheme{};
  TimeConfig time{.cfl = 1.3, .t_end = 2.0};
  int resolution = 32;
  std::uint64_t seed = 20220119;
  double epsilon = 0.01;
  int modes = 10;
  std::string output_dir = "out";
};

struct StudySetup {
  RunSetup base;
  std::vector<int> resolutions{32, 64, 128};  ///< strictly doubling ladder
  int reference = 256;                        ///< 2x the last ladder entry
  std::vector<Variable> variables{Variable::Density, Variable::MomentumX, Variable::Entropy};
};

/// Flat key-value config file with [scheme], [time], [problem], [output] and
/// (for studies) [study] sections. Unknown sections or keys are rejected.
RunSetup parse_run_config(const std::string& path);
StudySetup parse_study_config(const std::string& path);

/// Canonical one-line description of everything that determines the numbers a
/// run produces; cache hits require an exact match.
std::string run_signature(const RunSetup& setup);

/// Drift and monotonicity summary of a completed run, kept in the manifest so
/// cached studies can answer the structural questions without replaying.
struct RunSummary {
  long steps = 0;
  double wall_time_s = 0.0;
  std::array<double, 4> initial_totals{};  ///< mass, mom_x, mom_y, energy at t = 0
  std::array<double, 4> max_abs_drift{};   ///< max |Q(t) - Q(0)| over the series
  double initial_entropy = 0.0;
  double final_entropy = 0.0;
  double max_entropy_step_increase = 0.0;  ///< max over steps of eta_k - eta_{k-1}
  double integrated_weak_bv = 0.0;
  double min_theta = 1.0;
};

RunSummary summarize(const RunResult& result);

/// Lossless binary container for a solution field: 8-byte magic "ESDGFLD1",
/// u32 version, u32 n, u32 degree, f64 gamma, then the nodal data as 64-bit
/// little-endian floats in element-major, node-minor, component-minor order.
void dump_field(const std::string& path, const SolutionField& u, double gamma);
SolutionField load_field(const std::string& path, double* gamma = nullptr);

/// Round-trip-exact decimal formatting used by every CSV writer.
std::string format_double(double v);

void write_timeseries_csv(const std::string& path, const std::vector<StepRecord>& series);
void write_error_table_csv(const std::string& path, const ErrorTable& table);

/// Executes one simulation and writes manifest.json, timeseries.csv and
/// final.field into the output directory.
struct RunArtifacts {
  RunSummary summary;
  std::string field_path;
  std::string manifest_path;
};
RunArtifacts execute_run(const RunSetup& setup);

/// Like execute_run, but reuses the outputs already in the directory when
/// their manifest signature matches the setup exactly.
RunArtifacts execute_run_cached(const RunSetup& setup);

/// Runs the resolution ladder (reusing cached members whose manifest
/// signature matches), then produces the per-variable error tables and the
/// log-log plot data.
struct StudyOutcome {
  std::vector<int> resolutions;              ///< ladder plus reference
  std::map<Variable, ErrorTable> tables;
  std::map<int, RunSummary> run_summaries;   ///< keyed by resolution
  std::vector<std::string> table_paths;
};
StudyOutcome execute_study(const StudySetup& setup);

/// CLI entry points; they print diagnostics and map failures onto the exit
/// codes 0 (ok), 2 (configuration), 3 (simulation).
int cli_run(const std::string& config_path);
int cli_study(const std::string& config_path);
int cli_export_vtk(const std::string& field_path, const std::string& out_path);

}  // namespace esdg
