#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbdf/engine.hpp"
#include "sbdf/harness/config.hpp"

namespace sbdf::harness {

StepConfig step_config(const RunConfig& cfg);

struct Trajectory {
  Field final_field;
  int steps = 0;
  long long iterations = 0;  // main steps only
  double seconds = 0.0;      // bootstrap + march, callbacks included
  double max_linf = 0.0;
  BootstrapReport boot;
};

/// Called for every time level n = 0..steps, bootstrap levels included.
using LevelCallback = std::function<void(int n, double t, const Field& u)>;

/// Marches `steps` steps of size dt. Solver failures are rethrown as
/// SolverError with the step index in the message.
Trajectory simulate(const NonlinearModel& model, const Field& u0, int k, double dt, int steps,
                    const StepConfig& cfg, const LevelCallback& on_level = {});

struct RunSummary {
  int steps = 0;
  long long iterations = 0;
  double max_linf = 0.0;
  std::size_t iteration_checks = 0;
  std::size_t iteration_violations = 0;
  std::size_t iteration_violations_algorithmic = 0;  // algorithmic increment in place of delta
  std::size_t step_violations = 0;
  double seconds = 0.0;
  Field final_field;
  std::vector<std::filesystem::path> outputs;
};

/// Single Allen-Cahn run: final snapshot, traces and manifest in cfg.out_dir.
RunSummary run(const RunConfig& cfg);

struct ConvergenceRow {
  double dt = 0.0;
  double error = 0.0;
  std::optional<double> order;  // from the second row on
  long long iters = 0;
  double seconds = 0.0;
};

struct ConvergenceTable {
  int k = 0;
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceResult {
  double reference_dt = 0.0;
  std::vector<ConvergenceTable> tables;
  std::vector<std::filesystem::path> outputs;
};

/// Temporal errors against an sBDF4 reference on the same grid.
ConvergenceResult converge(const RunConfig& cfg);

/// Observed order between consecutive rows: log(e_prev / e) / log(dt_prev / dt).
void fill_orders(std::vector<ConvergenceRow>& rows);

struct ComparisonResult {
  static constexpr std::array<const char*, 4> kMethods{"etd1", "sbdf1", "etdrk2", "sbdf2"};
  double reference_dt = 0.0;
  double setup_seconds = 0.0;  // eigendecomposition
  std::array<std::vector<ConvergenceRow>, 4> methods;
  std::vector<std::filesystem::path> outputs;
};

/// ETD1 / sBDF1 and ETDRK2 / sBDF2 side by side; the grid must fit the
/// dense oracle (rejected with ConfigError otherwise).
ComparisonResult compare_etd(const RunConfig& cfg);

struct MbpRun {
  int k = 0;
  double dt = 0.0;
  int steps = 0;
  double linf0 = 0.0;
  double max_linf = 0.0;
  std::filesystem::path trace;
};

struct MbpResult {
  std::vector<MbpRun> runs;
  std::vector<std::filesystem::path> outputs;
};

MbpResult mbp_longrun(const RunConfig& cfg);

struct ProstateSummary {
  int steps = 0;
  long long iterations = 0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  bool all_finite = true;
  std::vector<double> grad_phi_sq;  // one entry per time level
  double B_phi = 0.0;
  bool lipschitz_warning = false;
  double seconds = 0.0;
  std::vector<std::filesystem::path> outputs;
};

ProstateSummary prostate_run(const RunConfig& cfg);

}  // namespace sbdf::harness
