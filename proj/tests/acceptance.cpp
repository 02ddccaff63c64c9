// Acceptance criteria 1-6. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mac/analysis.hpp"
#include "mac/errors.hpp"
#include "mac/experiments.hpp"
#include "mac/runner.hpp"
#include "mac/scheme.hpp"
#include "mac/selftest.hpp"

using namespace mac;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::filesystem::path config_path(const std::string& name)
{
    return std::filesystem::path(MAC_CONFIG_DIR) / name;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("mac_acceptance_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string fmt(double v, const char* spec = "%.3g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

Outcome operator_identities()
{
    const auto t0 = Clock::now();
    auto checks = operator_identity_suite(20240601u, 1e-12);
    const double elapsed = seconds_since(t0);
    bool ok = !checks.empty() && elapsed < 5.0;
    double worst = 0.0;
    std::string failed;
    for (const auto& c : checks) {
        worst = std::max(worst, c.relative_error);
        if (!c.passed) {
            ok = false;
            failed += " " + c.name + "(d=" + std::to_string(c.dim) + ",n=" + std::to_string(c.n) + ")";
        }
    }
    return {ok, std::to_string(checks.size()) + " checks, worst rel err " + fmt(worst) + ", " +
                    fmt(elapsed, "%.2f") + " s" + (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome gresho_invariants()
{
    const auto t0 = Clock::now();
    RunConfig c = load_config(config_path("gresho_invariants.json"));
    const int n = c.resolutions.front();
    const StaggeredGrid grid(c.dim, n);
    const TimeGrid tg = time_grid(c, n);
    SchemeParams params = scheme_params(c, tg.dt);
    params.end_time = tg.dt * tg.steps;

    double drift = 0.0, min_rho = 1e300, min_slack = 1e300;
    SimulationOptions opts;
    opts.keep = [](int) { return false; };
    // Observe rather than abort so the line reports the measured margins.
    opts.check_energy = false;
    opts.on_step = [&](const StepLog& r) {
        drift = std::max(drift, std::abs(r.mass_drift));
        min_rho = std::min(min_rho, r.min_density);
        min_slack = std::min(min_slack, r.energy_slack);
    };
    try {
        simulate(params, c.solver, initial_state(c, grid), tg.steps, opts);
    } catch (const std::exception& e) {
        return {false, std::string("run aborted: ") + e.what()};
    }
    const double elapsed = seconds_since(t0);
    const bool ok = drift <= 1024 * 1e-10 && min_rho > 0.0 && min_slack >= -1e-9 && elapsed < 300.0;
    return {ok, "n=" + std::to_string(n) + " dt=" + fmt(tg.dt) + " steps=" + std::to_string(tg.steps) +
                    ": max mass drift " + fmt(drift) + ", min rho " + fmt(min_rho, "%.6f") +
                    ", min slack " + fmt(min_slack) + ", " + fmt(elapsed, "%.1f") + " s"};
}

// Published Experiment 1 errors at h = 1/32, 1/64, 1/128 for gamma = 1.4, 1.67, 2,
// columns e_E, e_gradu, e_rho, e_u, e_p.
struct PublishedRow {
    double e[5];
};
const PublishedRow kTable1[3][3] = {
    {{{1.34e-02, 5.03e-01, 3.90e-03, 4.31e-02, 9.73e-02}},
     {{3.44e-03, 2.53e-01, 1.93e-03, 2.16e-02, 5.03e-02}},
     {{8.71e-04, 1.27e-01, 9.57e-04, 1.08e-02, 2.55e-02}}},
    {{{1.39e-02, 5.02e-01, 3.86e-03, 4.28e-02, 1.15e-01}},
     {{3.58e-03, 2.53e-01, 1.91e-03, 2.15e-02, 5.93e-02}},
     {{9.07e-04, 1.27e-01, 9.50e-04, 1.08e-02, 3.00e-02}}},
    {{{1.45e-02, 5.00e-01, 3.82e-03, 4.26e-02, 1.36e-01}},
     {{3.75e-03, 2.52e-01, 1.90e-03, 2.14e-02, 7.02e-02}},
     {{9.50e-04, 1.26e-01, 9.41e-04, 1.07e-02, 3.56e-02}}},
};

std::array<double, 5> errors_of(const ErrorReport& r)
{
    return {r.e_energy, r.e_grad_u, r.e_rho, r.e_u, r.e_p};
}

const char* kNames[5] = {"e_E", "e_gradu", "e_rho", "e_u", "e_p"};

Outcome manufactured_eoc()
{
    const auto t0 = Clock::now();
    const char* configs[3] = {"manufactured_gamma1.4.json", "manufactured_gamma1.67.json",
                              "manufactured_gamma2.json"};
    bool ok = true;
    std::ostringstream detail;
    for (int g = 0; g < 3; ++g) {
        RunConfig c = load_config(config_path(configs[g]));
        if (c.resolutions != std::vector<int>{32, 64, 128}) {
            return {false, std::string(configs[g]) + " does not sweep {32, 64, 128}"};
        }
        ExperimentResult res;
        try {
            res = run_experiment(c, scratch_dir("manufactured_" + std::to_string(g)));
        } catch (const std::exception& e) {
            return {false, std::string(configs[g]) + " failed: " + e.what()};
        }
        detail << "\n    gamma=" << c.gamma << ":";
        for (int k = 0; k < 5; ++k) {
            detail << ' ' << kNames[k] << " EOC";
            const double lo = k == 0 ? 1.7 : 0.7;
            const double hi = k == 0 ? 2.3 : 1.3;
            for (std::size_t i = 1; i < res.sweep.size(); ++i) {
                auto rate = eoc(errors_of(res.sweep[i - 1].report)[k], errors_of(res.sweep[i].report)[k]);
                const bool in = rate && *rate >= lo && *rate <= hi;
                ok = ok && in;
                detail << ' ' << (rate ? fmt(*rate, "%.2f") : std::string("n/a")) << (in ? "" : "*");
            }
            detail << ';';
        }
        detail << "\n      magnitude vs published (ratio ours/published, * = outside [0.1, 10]):";
        for (std::size_t i = 0; i < res.sweep.size(); ++i) {
            detail << " n=" << res.sweep[i].n;
            for (int k = 0; k < 5; ++k) {
                const double ratio = errors_of(res.sweep[i].report)[k] / kTable1[g][i].e[k];
                const bool in = ratio >= 0.1 && ratio <= 10.0;
                ok = ok && in;
                detail << ' ' << fmt(ratio, "%.1e") << (in ? "" : "*");
            }
            detail << ';';
        }
    }
    const double elapsed = seconds_since(t0);
    ok = ok && elapsed <= 1800.0;
    return {ok, fmt(elapsed, "%.0f") + " s (* = outside band)" + detail.str()};
}

Outcome gresho_eoc()
{
    const auto t0 = Clock::now();
    RunConfig c = load_config(config_path("gresho_gamma2.json"));
    if (c.gamma != 2.0 || c.resolutions != std::vector<int>{32, 64} || c.reference_resolution != 256) {
        return {false, "gresho_gamma2.json must be gamma=2, n={32,64}, n_fine=256"};
    }
    ExperimentResult res;
    try {
        res = run_experiment(c, scratch_dir("gresho"));
    } catch (const std::exception& e) {
        return {false, std::string("run failed: ") + e.what()};
    }
    const auto coarse = errors_of(res.sweep[0].report);
    const auto fine = errors_of(res.sweep[1].report);
    bool ok = true;
    std::ostringstream detail;
    for (int k = 0; k < 5; ++k) {
        const bool dec = fine[k] < coarse[k];
        ok = ok && dec;
        detail << ' ' << kNames[k] << ' ' << fmt(coarse[k]) << "->" << fmt(fine[k]) << (dec ? "" : "*");
    }
    auto rate = eoc(coarse[0], fine[0]);
    ok = ok && rate && *rate >= 1.2;
    const double elapsed = seconds_since(t0);
    ok = ok && elapsed <= 1800.0;
    return {ok, "EOC e_E " + (rate ? fmt(*rate, "%.2f") : std::string("n/a")) + ";" + detail.str() +
                    "; " + fmt(elapsed, "%.0f") + " s"};
}

Outcome jacobian_fd()
{
    std::mt19937_64 rng(5150);
    const StaggeredGrid g(2, 4);
    const SparseOperators ops(g);
    SchemeParams p;
    p.law = GasLaw(1.0, 1.4);
    p.dt = 0.05;
    p.lambda = 0.2;
    std::uniform_real_distribution<double> rho(0.5, 1.5);
    std::uniform_real_distribution<double> mag(0.2, 1.0);
    std::bernoulli_distribution sign(0.5);
    State prev{CellField(g), FaceField(g)};
    State trial{CellField(g), FaceField(g)};
    for (State* s : {&prev, &trial}) {
        for (auto& v : s->density.values()) v = rho(rng);
        for (int a = 0; a < 2; ++a) {
            // Bounded away from zero: no upwind sign flips under the perturbation.
            for (auto& v : s->velocity.component(a)) v = sign(rng) ? mag(rng) : -mag(rng);
        }
    }
    const SparseMatrix J = assemble_jacobian(ops, p, prev, trial);
    const Eigen::VectorXd x0 = pack(trial.density, trial.velocity);
    auto eval = [&](const Eigen::VectorXd& x) {
        State s = trial;
        unpack(x, s.density, s.velocity);
        return pack(residual(p, prev, s, p.dt));
    };
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd dir(x0.size());
        for (auto& v : dir) v = nd(rng);
        const double eps = 1e-6 * std::max(1.0, x0.norm()) / dir.norm();
        const Eigen::VectorXd fd = (eval(x0 + eps * dir) - eval(x0 - eps * dir)) / (2 * eps);
        const Eigen::VectorXd jd = J * dir;
        worst = std::max(worst, (fd - jd).norm() / jd.norm());
    }
    return {worst <= 1e-5, "100 directions, worst relative error " + fmt(worst)};
}

Outcome residual_consistency(bool proxies_pass)
{
    const ManufacturedSolution ms{0.01, 1.0};
    std::vector<double> logh, logr;
    std::ostringstream detail;
    for (int n : {32, 64, 128}) {
        const StaggeredGrid g(2, n);
        SchemeParams p;
        p.law = GasLaw(1.0, 1.4);
        p.dt = g.h();
        p.forcing = [ms](double t, const Point& x) { return ms.forcing(t, x); };
        auto at = [&](double t) {
            return State{project_cells(g, [&](const Point& x) { return ms.density(t, x); }),
                         project_faces(g, [&](const Point& x) { return ms.velocity(t, x); })};
        };
        const double t = 0.05;
        const Residual r = residual(p, at(t - p.dt), at(t), t);
        const double norm = std::max(r.mass.max_abs(), r.momentum.max_abs());
        logh.push_back(std::log(g.h()));
        logr.push_back(std::log(norm));
        detail << " n=" << n << ':' << fmt(norm);
    }
    const double k = static_cast<double>(logh.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logh.size(); ++i) {
        sx += logh[i];
        sy += logr[i];
        sxx += logh[i] * logh[i];
        sxy += logh[i] * logr[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / k;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < logh.size(); ++i) {
        const double f = icpt + slope * logh[i];
        ss_res += (logr[i] - f) * (logr[i] - f);
        ss_tot += (logr[i] - sy / k) * (logr[i] - sy / k);
    }
    const double r2 = 1.0 - ss_res / ss_tot;
    const bool fit_ok = slope >= 1.0 && r2 >= 0.95;
    return {fit_ok && proxies_pass, "residual max norm" + detail.str() + ", fitted order " +
                                        fmt(slope, "%.4f") + ", R^2 " + fmt(r2, "%.5f") +
                                        (fit_ok ? "" : " (fit fails)") +
                                        (proxies_pass ? "; proxies 2-4 pass" : "; proxies 2-4 do not all pass")};
}

void report(int id, const std::string& title, const Outcome& o)
{
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " | " << o.detail
              << std::endl;
}

} // namespace

int main()
{
    std::vector<Outcome> out;
    auto run = [&](int id, const std::string& title, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        report(id, title, o);
        out.push_back(o);
    };
    run(1, "operator identity suite", operator_identities);
    run(2, "Gresho structural invariants", gresho_invariants);
    run(3, "manufactured-solution EOC", manufactured_eoc);
    run(4, "Gresho EOC against restricted fine reference", gresho_eoc);
    run(5, "Jacobian finite-difference check", jacobian_fd);
    const bool proxies = out[1].pass && out[2].pass && out[3].pass;
    run(6, "convergence proxies and residual consistency", [&] { return residual_consistency(proxies); });

    int failed = 0;
    for (const auto& o : out) failed += o.pass ? 0 : 1;
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
    return failed == 0 ? 0 : 1;
}
