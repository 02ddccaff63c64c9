#include "mac/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"

namespace mac {

using nlohmann::json;

namespace {

template <class T>
T read_value(const json& j, const char* key, T fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError("unknown config key '" + key + "' in " + where);
        }
    }
}

const json& section(const json& j, const char* key)
{
    static const json empty = json::object();
    return j.contains(key) ? j.at(key) : empty;
}

const char* experiment_name(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::Manufactured: return "manufactured";
    case ExperimentKind::Gresho: return "gresho";
    case ExperimentKind::Custom: return "custom";
    }
    return "";
}

const char* linear_kind_name(LinearSolverKind k)
{
    switch (k) {
    case LinearSolverKind::Automatic: return "auto";
    case LinearSolverKind::Direct: return "direct";
    case LinearSolverKind::Iterative: return "iterative";
    }
    return "";
}

// FNV-1a, 64 bit.
std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

int ceil_steps(double x)
{
    // Guards against T / dt landing a hair above an integer.
    return static_cast<int>(std::ceil(x - 1e-9));
}

} // namespace

std::string RunConfig::hash() const
{
    json j;
    j["experiment"] = experiment_name(experiment);
    j["dim"] = dim;
    j["n"] = resolutions;
    j["gamma"] = gamma;
    j["a"] = a;
    j["mu"] = mu;
    j["lambda"] = lambda;
    j["alpha"] = alpha;
    j["dt_factor"] = dt_factor;
    j["T"] = end_time;
    j["time_step_rule"] = time_step_rule == TimeStepRule::Aligned ? "aligned" : "fixed";
    j["k"] = decay_rate;
    j["n_fine"] = reference_resolution;
    j["initial"] = custom_initial;
    j["density_amplitude"] = custom_density_amplitude;
    j["solver"] = {{"newton_tol", solver.newton_tol},
                   {"max_newton_iters", solver.max_newton_iters},
                   {"damping", solver.damping},
                   {"positivity_fraction", solver.positivity_fraction},
                   {"max_backtracks", solver.max_backtracks},
                   {"linear",
                    {{"kind", linear_kind_name(solver.linear.kind)},
                     {"tolerance", solver.linear.tolerance},
                     {"max_iterations", solver.linear.max_iterations},
                     {"direct_max_n", solver.linear.direct_max_cells_per_axis}}}};
    return fnv1a_hex(j.dump());
}

RunConfig parse_config(const json& j)
{
    reject_unknown(j,
                   {"experiment", "dim", "n", "gamma", "a", "mu", "lambda", "alpha", "dt_factor", "T",
                    "time_step_rule", "manufactured", "gresho", "custom", "solver", "output"},
                   "config");
    RunConfig c;
    const auto experiment = read_value<std::string>(j, "experiment", "manufactured");
    if (experiment == "manufactured") {
        c.experiment = ExperimentKind::Manufactured;
    } else if (experiment == "gresho") {
        c.experiment = ExperimentKind::Gresho;
    } else if (experiment == "custom") {
        c.experiment = ExperimentKind::Custom;
    } else {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    c.dim = read_value(j, "dim", c.dim);
    if (j.contains("n")) {
        if (j.at("n").is_array()) {
            c.resolutions = read_value<std::vector<int>>(j, "n", {});
        } else {
            c.resolutions = {read_value<int>(j, "n", 0)};
        }
    }
    c.gamma = read_value(j, "gamma", c.gamma);
    c.a = read_value(j, "a", c.a);
    c.mu = read_value(j, "mu", c.mu);
    c.lambda = read_value(j, "lambda", c.lambda);
    c.alpha = read_value(j, "alpha", c.alpha);
    c.dt_factor = read_value(j, "dt_factor", c.dt_factor);
    c.end_time = read_value(j, "T", c.end_time);
    const auto rule = read_value<std::string>(j, "time_step_rule", "aligned");
    if (rule == "aligned") {
        c.time_step_rule = TimeStepRule::Aligned;
    } else if (rule == "fixed") {
        c.time_step_rule = TimeStepRule::Fixed;
    } else {
        throw ConfigError("time_step_rule must be 'aligned' or 'fixed'");
    }

    const json& ms = section(j, "manufactured");
    reject_unknown(ms, {"k"}, "manufactured");
    c.decay_rate = read_value(ms, "k", c.decay_rate);

    const json& gr = section(j, "gresho");
    reject_unknown(gr, {"n_fine"}, "gresho");
    c.reference_resolution = read_value(gr, "n_fine", c.reference_resolution);

    const json& cu = section(j, "custom");
    reject_unknown(cu, {"initial", "density_amplitude"}, "custom");
    c.custom_initial = read_value(cu, "initial", c.custom_initial);
    c.custom_density_amplitude = read_value(cu, "density_amplitude", c.custom_density_amplitude);

    const json& so = section(j, "solver");
    reject_unknown(so, {"newton_tol", "max_newton_iters", "damping", "positivity_fraction", "max_backtracks", "linear"},
                   "solver");
    c.solver.newton_tol = read_value(so, "newton_tol", c.solver.newton_tol);
    c.solver.max_newton_iters = read_value(so, "max_newton_iters", c.solver.max_newton_iters);
    c.solver.damping = read_value(so, "damping", c.solver.damping);
    c.solver.positivity_fraction = read_value(so, "positivity_fraction", c.solver.positivity_fraction);
    c.solver.max_backtracks = read_value(so, "max_backtracks", c.solver.max_backtracks);
    const json& li = section(so, "linear");
    reject_unknown(li, {"kind", "tolerance", "max_iterations", "direct_max_n"}, "solver.linear");
    const auto kind = read_value<std::string>(li, "kind", "auto");
    if (kind == "auto") {
        c.solver.linear.kind = LinearSolverKind::Automatic;
    } else if (kind == "direct") {
        c.solver.linear.kind = LinearSolverKind::Direct;
    } else if (kind == "iterative") {
        c.solver.linear.kind = LinearSolverKind::Iterative;
    } else {
        throw ConfigError("solver.linear.kind must be auto, direct or iterative");
    }
    c.solver.linear.tolerance = read_value(li, "tolerance", c.solver.linear.tolerance);
    c.solver.linear.max_iterations = read_value(li, "max_iterations", c.solver.linear.max_iterations);
    c.solver.linear.direct_max_cells_per_axis =
        read_value(li, "direct_max_n", c.solver.linear.direct_max_cells_per_axis);

    const json& out = section(j, "output");
    reject_unknown(out, {"dir", "dump", "dump_stride"}, "output");
    c.output_dir = read_value<std::string>(out, "dir", c.output_dir.string());
    const auto dump = read_value<std::string>(out, "dump", "none");
    if (dump == "none") {
        c.dump = DumpFormat::None;
    } else if (dump == "vtk") {
        c.dump = DumpFormat::Vtk;
    } else if (dump == "csv") {
        c.dump = DumpFormat::Csv;
    } else if (dump == "both") {
        c.dump = DumpFormat::Both;
    } else {
        throw ConfigError("output.dump must be none, vtk, csv or both");
    }
    c.dump_stride = read_value(out, "dump_stride", c.dump_stride);

    check_config(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot read config " + path.string());
    }
    json j;
    try {
        j = json::parse(is, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

std::vector<std::string> check_config(const RunConfig& c)
{
    if (c.resolutions.empty()) {
        throw ConfigError("at least one resolution n is required");
    }
    for (int n : c.resolutions) {
        StaggeredGrid(c.dim, n);
    }
    for (std::size_t i = 1; i < c.resolutions.size(); ++i) {
        if (c.resolutions[i] <= c.resolutions[i - 1]) {
            throw ConfigError("resolution sweep must be strictly increasing");
        }
    }
    if (!(c.dt_factor > 0.0)) {
        throw ConfigError("dt_factor must be positive");
    }
    if (!(c.end_time > 0.0)) {
        throw ConfigError("end time T must be positive");
    }
    if (c.dump_stride < 1) {
        throw ConfigError("output.dump_stride must be at least 1");
    }
    const int n0 = c.resolutions.front();
    if (c.time_step_rule == TimeStepRule::Aligned) {
        for (int n : c.resolutions) {
            if (n % n0 != 0) {
                throw ConfigError("aligned time steps need every n to be a multiple of " + std::to_string(n0));
            }
        }
    }
    if (c.experiment == ExperimentKind::Manufactured || c.experiment == ExperimentKind::Gresho) {
        if (c.dim != 2) {
            throw ConfigError("the manufactured and gresho experiments are two-dimensional");
        }
    }
    if (c.experiment == ExperimentKind::Gresho) {
        for (std::size_t i = 1; i < c.resolutions.size(); ++i) {
            if (c.resolutions[i] % c.resolutions[i - 1] != 0) {
                throw ConfigError("gresho sweep needs each n to divide the next");
            }
        }
        if (c.reference_resolution <= c.resolutions.back() ||
            c.reference_resolution % c.resolutions.back() != 0) {
            throw ConfigError("gresho n_fine must be a proper multiple of the finest sweep resolution");
        }
        if (c.time_step_rule == TimeStepRule::Aligned && c.reference_resolution % n0 != 0) {
            throw ConfigError("gresho n_fine must be a multiple of the coarsest resolution");
        }
    }
    if (c.experiment == ExperimentKind::Custom) {
        if (c.custom_initial != "gresho" && c.custom_initial != "vortex_array" && c.custom_initial != "rest") {
            throw ConfigError("custom.initial must be gresho, vortex_array or rest");
        }
        if (c.custom_initial != "rest" && c.dim != 2) {
            throw ConfigError("custom initial '" + c.custom_initial + "' is two-dimensional");
        }
        if (!(std::abs(c.custom_density_amplitude) < 1.0)) {
            throw ConfigError("custom.density_amplitude must lie in (-1, 1) to keep the density positive");
        }
    }
    validate(c.solver);
    GasLaw law(c.a, c.gamma);
    std::vector<std::string> warnings;
    for (int n : c.resolutions) {
        const auto tg = time_grid(c, n);
        SchemeParams p = scheme_params(c, tg.dt);
        p.end_time = std::max(c.end_time, tg.dt);
        for (auto& w : validate(p, c.dim)) {
            if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) {
                warnings.push_back(std::move(w));
            }
        }
    }
    return warnings;
}

TimeGrid time_grid(const RunConfig& c, int n)
{
    const double h = 1.0 / static_cast<double>(n);
    if (c.time_step_rule == TimeStepRule::Fixed) {
        const double dt = c.dt_factor * h;
        return {dt, ceil_steps(c.end_time / dt)};
    }
    const int n0 = c.resolutions.front();
    const int base = ceil_steps(c.end_time * n0 / c.dt_factor);
    const int steps = base * (n / n0);
    return {c.end_time / steps, steps};
}

SchemeParams scheme_params(const RunConfig& c, double dt)
{
    SchemeParams p;
    p.law = GasLaw(c.a, c.gamma);
    p.mu = c.mu;
    p.lambda = c.lambda;
    p.alpha = c.alpha;
    p.dt = dt;
    p.end_time = c.end_time;
    if (c.experiment == ExperimentKind::Manufactured) {
        const ManufacturedSolution ms{c.decay_rate, c.mu};
        p.forcing = [ms](double t, const Point& x) { return ms.forcing(t, x); };
    }
    return p;
}

State initial_state(const RunConfig& c, const StaggeredGrid& grid)
{
    State s{CellField(grid, 1.0), FaceField(grid), 0, 0.0};
    std::string initial;
    switch (c.experiment) {
    case ExperimentKind::Manufactured: initial = "vortex_array"; break;
    case ExperimentKind::Gresho: initial = "gresho"; break;
    case ExperimentKind::Custom: initial = c.custom_initial; break;
    }
    if (initial == "vortex_array") {
        const ManufacturedSolution ms{c.decay_rate, c.mu};
        s.density = project_cells(grid, [&](const Point& x) { return ms.density(0.0, x); });
        s.velocity = project_faces(grid, [&](const Point& x) { return ms.velocity(0.0, x); });
    } else if (initial == "gresho") {
        const GreshoVortex gv{c.gamma};
        s.velocity = project_faces(grid, [&](const Point& x) { return gv.velocity(x); });
    }
    if (c.experiment == ExperimentKind::Custom && c.custom_density_amplitude != 0.0) {
        const double amp = c.custom_density_amplitude;
        s.density = project_cells(grid, [amp](const Point& x) {
            return 1.0 + amp * std::sin(2.0 * std::numbers::pi * x[0]);
        });
    }
    return s;
}

Simulation simulate(const SchemeParams& params, const SolverConfig& solver, const State& initial,
                    int steps, const SimulationOptions& options)
{
    const auto& grid = initial.density.grid();
    const SparseOperators ops(grid);
    LinearSolverCache cache;
    const double mass0 = integrate_cells(initial.density);
    const double mass_tol = static_cast<double>(grid.cell_count()) * solver.newton_tol;
    const double slack_tol = -10.0 * solver.newton_tol;

    Simulation sim;
    State current = initial;
    for (int k = 1; k <= steps; ++k) {
        const double t = k * params.dt;
        StepResult step = newton_step_solve(ops, params, solver, current, t, &cache);
        const StepDiagnostics diag = diagnostics(params, step.state, current);

        StepLog row;
        row.n = grid.cells_per_axis();
        row.step = k;
        row.time = t;
        row.mass_drift = diag.mass - mass0;
        row.min_density = diag.min_density;
        row.energy = diag.energy;
        row.energy_slack = diag.energy_slack;
        row.newton_iterations = step.newton_iterations;
        row.residual = step.final_residual;
        sim.log.push_back(row);
        if (options.on_step) {
            options.on_step(row);
        }

        std::ostringstream why;
        if (!(diag.min_density > 0.0)) {
            why << "density not positive (min " << diag.min_density << ")";
        } else if (!(std::abs(row.mass_drift) <= mass_tol)) {
            why << "mass drift " << row.mass_drift << " exceeds " << mass_tol;
        } else if (options.check_energy && !(diag.energy_slack >= slack_tol)) {
            why << "energy slack " << diag.energy_slack << " below " << slack_tol;
        }
        if (!why.str().empty()) {
            throw InvariantViolation("n=" + std::to_string(row.n) + " step " + std::to_string(k) + ": " +
                                     why.str());
        }

        current = std::move(step.state);
        if (!options.keep || options.keep(k)) {
            sim.history.push_back(current);
        }
    }
    return sim;
}

void write_vtk(const std::filesystem::path& path, const GasLaw& law, const State& s)
{
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    const auto& grid = s.density.grid();
    const int n = grid.cells_per_axis();
    const double h = grid.h();
    const bool three = grid.dim() == 3;
    os << "# vtk DataFile Version 3.0\n";
    os << "MAC state step " << s.step << " t=" << std::setprecision(17) << s.time << "\n";
    os << "ASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << n + 1 << ' ' << n + 1 << ' ' << (three ? n + 1 : 1) << "\n";
    os << "ORIGIN 0 0 0\n";
    os << "SPACING " << h << ' ' << h << ' ' << (three ? h : 1.0) << "\n";
    os << "CELL_DATA " << grid.cell_count() << "\n";
    os << "SCALARS density double 1\nLOOKUP_TABLE default\n";
    for (double r : s.density.values()) {
        os << r << '\n';
    }
    os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (double r : s.density.values()) {
        os << law.pressure(r) << '\n';
    }
    const auto bar = cell_average_velocity(s.velocity);
    os << "VECTORS velocity double\n";
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        os << bar[0][K] << ' ' << bar[1][K] << ' ' << (three ? bar[2][K] : 0.0) << '\n';
    }
    if (!os) {
        throw IoError("write failed for " + path.string());
    }
}

namespace {

std::ofstream open_or_throw(const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return os;
}

void write_log(std::ostream& os, const std::vector<StepLog>& log, const std::string& hash)
{
    os << "n,step,time,mass_drift,min_density,energy,energy_slack,newton_iterations,residual,config_hash\n";
    os << std::setprecision(10) << std::scientific;
    for (const auto& r : log) {
        os << r.n << ',' << r.step << ',' << r.time << ',' << r.mass_drift << ',' << r.min_density << ','
           << r.energy << ',' << r.energy_slack << ',' << r.newton_iterations << ',' << r.residual << ','
           << hash << '\n';
    }
}

void dump_history(const RunConfig& c, const std::filesystem::path& dir, const GasLaw& law,
                  const std::vector<State>& history, int last_step)
{
    if (c.dump == DumpFormat::None) {
        return;
    }
    std::filesystem::create_directories(dir);
    for (const auto& s : history) {
        if (s.step % c.dump_stride != 0 && s.step != last_step) {
            continue;
        }
        const std::string stem = "n" + std::to_string(s.density.grid().cells_per_axis()) + "_step" +
                                 std::to_string(s.step);
        if (c.dump == DumpFormat::Vtk || c.dump == DumpFormat::Both) {
            write_vtk(dir / (stem + ".vtk"), law, s);
        }
        if (c.dump == DumpFormat::Csv || c.dump == DumpFormat::Both) {
            write_csv(dir / (stem + "_density.csv"), s.density);
            write_csv(dir / (stem + "_velocity.csv"), s.velocity);
        }
    }
}

} // namespace

ExperimentResult run_experiment(const RunConfig& c, const std::filesystem::path& out_dir, std::ostream* progress)
{
    check_config(c);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    }
    const std::string hash = c.hash();
    ExperimentResult result;

    auto on_step = [progress](const StepLog& r) {
        if (progress != nullptr) {
            *progress << "  n=" << r.n << " step " << r.step << " t=" << r.time << " newton=" << r.newton_iterations
                      << " min_rho=" << r.min_density << " slack=" << r.energy_slack << '\n';
        }
    };
    auto flush_log = [&]() {
        auto os = open_or_throw(out_dir / "run_log.csv");
        write_log(os, result.log, hash);
    };
    auto run = [&](const StaggeredGrid& grid, const TimeGrid& tg, std::function<bool(int)> keep) {
        SchemeParams params = scheme_params(c, tg.dt);
        params.end_time = tg.dt * tg.steps;
        SimulationOptions opts;
        opts.keep = std::move(keep);
        opts.check_energy = c.experiment != ExperimentKind::Manufactured;
        opts.on_step = [&](const StepLog& r) {
            result.log.push_back(r);
            on_step(r);
        };
        try {
            return simulate(params, c.solver, initial_state(c, grid), tg.steps, opts);
        } catch (const SolverFailure& e) {
            flush_log();
            auto os = open_or_throw(out_dir / "failure.json");
            os << e.report().to_json() << '\n';
            throw;
        } catch (const InvariantViolation&) {
            flush_log();
            throw;
        }
    };

    const GasLaw law(c.a, c.gamma);
    std::vector<State> fine_history;
    TimeGrid fine_tg;
    if (c.experiment == ExperimentKind::Gresho) {
        const StaggeredGrid fine(c.dim, c.reference_resolution);
        fine_tg = time_grid(c, c.reference_resolution);
        // The fine run must cover every coarse step time.
        std::set<long> ratios;
        int needed = 0;
        for (int n : c.resolutions) {
            const auto tg = time_grid(c, n);
            const long ratio = std::lround(tg.dt / fine_tg.dt);
            if (ratio < 1 || std::abs(tg.dt - ratio * fine_tg.dt) > 1e-9 * tg.dt) {
                throw ConfigError("gresho reference time step does not nest into n=" + std::to_string(n));
            }
            ratios.insert(ratio);
            needed = std::max(needed, static_cast<int>(tg.steps * ratio));
        }
        fine_tg.steps = needed;
        if (progress != nullptr) {
            *progress << "reference run n=" << c.reference_resolution << " (" << needed << " steps)\n";
        }
        auto keep = [ratios](int step) {
            return std::any_of(ratios.begin(), ratios.end(), [step](long r) { return step % r == 0; });
        };
        fine_history = run(fine, fine_tg, keep).history;
    }

    for (int n : c.resolutions) {
        const StaggeredGrid grid(c.dim, n);
        const TimeGrid tg = time_grid(c, n);
        if (progress != nullptr) {
            *progress << "run n=" << n << " dt=" << tg.dt << " (" << tg.steps << " steps)\n";
        }
        Simulation sim = run(grid, tg, {});
        dump_history(c, out_dir / "fields", law, sim.history, tg.steps);

        if (c.experiment == ExperimentKind::Manufactured) {
            const ManufacturedSolution ms{c.decay_rate, c.mu};
            const auto ref = analytic_reference(
                grid, [ms](double t, const Point& x) { return ms.density(t, x); },
                [ms](double t, const Point& x) { return ms.velocity(t, x); });
            result.sweep.push_back({n, error_norms(law, tg.dt, sim.history, ref)});
        } else if (c.experiment == ExperimentKind::Gresho) {
            const auto ref = restricted_reference(fine_history, fine_tg.dt, grid, tg.dt);
            result.sweep.push_back({n, error_norms(law, tg.dt, sim.history, ref)});
        }
    }

    flush_log();
    if (!result.sweep.empty()) {
        auto os = open_or_throw(out_dir / "eoc.csv");
        os << csv_header() << '\n';
        for (std::size_t i = 0; i < result.sweep.size(); ++i) {
            const ErrorReport* coarser = i == 0 ? nullptr : &result.sweep[i - 1].report;
            os << csv_row(result.sweep[i].report, coarser, hash) << '\n';
        }
        if (!os) {
            throw IoError("write failed for eoc.csv");
        }
    }
    return result;
}

} // namespace mac
