#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mac/analysis.hpp"
#include "mac/scheme.hpp"
#include "mac/solver.hpp"

namespace mac {

enum class ExperimentKind { Manufactured, Gresho, Custom };

// "aligned": for a sweep with smallest resolution n0, every run takes
//   N(n) = ceil(T n0 / C_dt) * n / n0 steps of size T / N(n), so dt is exactly
//   proportional to h and all step times nest.
// "fixed": dt = C_dt h and N = ceil(T / dt); the run ends at N dt >= T.
enum class TimeStepRule { Aligned, Fixed };

enum class DumpFormat { None, Vtk, Csv, Both };

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::Manufactured;
    int dim = 2;
    std::vector<int> resolutions{32};
    double gamma = 1.4;
    double a = 1.0;
    double mu = 1.0;
    double lambda = 0.0;
    double alpha = 1.6;
    double dt_factor = 1.0;
    double end_time = 0.1;
    TimeStepRule time_step_rule = TimeStepRule::Aligned;
    double decay_rate = 0.01;  // manufactured k
    int reference_resolution = 256;  // gresho n_fine
    std::string custom_initial = "gresho";  // custom: gresho | vortex_array | rest
    double custom_density_amplitude = 0.0;
    SolverConfig solver;
    std::filesystem::path output_dir = "out";
    DumpFormat dump = DumpFormat::None;
    // Field dumps every this many steps (the final step is always dumped).
    int dump_stride = 1;

    // Stable hash of every setting that affects results (not output options).
    std::string hash() const;
};

// Parses and validates; throws ConfigError with a message naming the bad key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Grid/params/solver checks that would otherwise fail mid-run.
// Returns non-fatal warnings.
std::vector<std::string> check_config(const RunConfig& config);

struct StepLog {
    int n = 0;
    int step = 0;
    double time = 0.0;
    double mass_drift = 0.0;
    double min_density = 0.0;
    double energy = 0.0;
    double energy_slack = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;
};

struct TimeGrid {
    double dt = 0.0;
    int steps = 0;
};

TimeGrid time_grid(const RunConfig& config, int n);

struct SimulationOptions {
    // Which steps to keep in the history; empty keeps every step.
    std::function<bool(int step)> keep;
    bool check_energy = true;
    std::function<void(const StepLog&)> on_step;
};

struct Simulation {
    std::vector<State> history;
    std::vector<StepLog> log;
};

// Runs `steps` backward Euler steps from `initial`. Throws SolverFailure on a
// failed step and InvariantViolation when mass drifts by more than
// cell_count * newton_tol, density is not positive, or (if checked) the
// energy slack drops below -10 * newton_tol.
Simulation simulate(const SchemeParams& params, const SolverConfig& solver, const State& initial,
                    int steps, const SimulationOptions& options);

SchemeParams scheme_params(const RunConfig& config, double dt);
State initial_state(const RunConfig& config, const StaggeredGrid& grid);

struct SweepEntry {
    int n = 0;
    ErrorReport report;
};

struct ExperimentResult {
    std::vector<SweepEntry> sweep;
    std::vector<StepLog> log;
};

// Runs the configured sweep and writes eoc.csv (reference experiments),
// run_log.csv and optional dumps into out_dir. On solver failure a
// failure.json report is written before rethrowing.
ExperimentResult run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                                std::ostream* progress = nullptr);

// Legacy VTK structured points with cell data rho, p and the cell-averaged velocity.
void write_vtk(const std::filesystem::path& path, const GasLaw& law, const State& s);

} // namespace mac
