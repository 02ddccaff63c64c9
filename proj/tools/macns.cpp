// Command-line front end: run / check / operators-selftest.
#include <cstdio>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"

#include "mac/errors.hpp"
#include "mac/runner.hpp"
#include "mac/selftest.hpp"
#include "mac/solver.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kSolverFailure = 3,
    kInvariantViolation = 4,
    kIoError = 5,
};

void print_table(const mac::ExperimentResult& result)
{
    std::cout << std::left << std::setw(8) << "n" << std::setw(12) << "e_E" << std::setw(8) << "EOC"
              << std::setw(12) << "e_gradu" << std::setw(8) << "EOC" << std::setw(12) << "e_rho"
              << std::setw(8) << "EOC" << std::setw(12) << "e_u" << std::setw(8) << "EOC" << std::setw(12)
              << "e_p" << "EOC\n";
    const mac::ErrorReport* prev = nullptr;
    for (const auto& entry : result.sweep) {
        const auto& r = entry.report;
        auto rate = [&](double fine, double mac::ErrorReport::*m) -> std::string {
            if (prev == nullptr) {
                return "--";
            }
            const auto v = mac::eoc(prev->*m, fine);
            if (!v) {
                return "--";
            }
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.2f", *v);
            return buf;
        };
        std::cout << std::setw(8) << entry.n << std::scientific << std::setprecision(2) << std::setw(12)
                  << r.e_energy << std::setw(8) << rate(r.e_energy, &mac::ErrorReport::e_energy) << std::setw(12)
                  << r.e_grad_u << std::setw(8) << rate(r.e_grad_u, &mac::ErrorReport::e_grad_u) << std::setw(12)
                  << r.e_rho << std::setw(8) << rate(r.e_rho, &mac::ErrorReport::e_rho) << std::setw(12) << r.e_u
                  << std::setw(8) << rate(r.e_u, &mac::ErrorReport::e_u) << std::setw(12) << r.e_p
                  << rate(r.e_p, &mac::ErrorReport::e_p) << '\n'
                  << std::defaultfloat;
        prev = &r;
    }
}

int run_guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const mac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const mac::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n' << e.report().to_json() << '\n';
        return kSolverFailure;
    } catch (const mac::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kInvariantViolation;
    } catch (const mac::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Implicit MAC scheme for compressible isentropic Navier-Stokes on the periodic torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Path to the JSON config")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    run->add_flag("-q,--quiet", quiet, "Suppress per-step progress");

    auto* check = app.add_subcommand("check", "Validate a config file without running");
    check->add_option("config", config_path, "Path to the JSON config")->required();

    std::uint64_t seed = 20240601;
    auto* selftest = app.add_subcommand("operators-selftest", "Check the exact discrete operator identities");
    selftest->add_option("--seed", seed, "Random seed for the test fields");

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        return run_guarded([&] {
            mac::RunConfig config = mac::load_config(config_path);
            for (const auto& w : mac::check_config(config)) {
                std::cerr << "warning: " << w << '\n';
            }
            const std::filesystem::path dir = out_dir.empty() ? config.output_dir : std::filesystem::path(out_dir);
            const auto result = mac::run_experiment(config, dir, quiet ? nullptr : &std::cout);
            if (!result.sweep.empty()) {
                print_table(result);
            }
            std::cout << "wrote " << dir.string() << '\n';
            return static_cast<int>(kOk);
        });
    }
    if (*check) {
        return run_guarded([&] {
            const mac::RunConfig config = mac::load_config(config_path);
            for (const auto& w : mac::check_config(config)) {
                std::cout << "warning: " << w << '\n';
            }
            std::cout << "config ok (hash " << config.hash() << ")\n";
            return static_cast<int>(kOk);
        });
    }
    if (*selftest) {
        const auto checks = mac::operator_identity_suite(seed);
        bool ok = true;
        for (const auto& c : checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << "d=" << c.dim << " n=" << c.n << "  " << std::left
                      << std::setw(52) << c.name << " rel.err " << std::scientific << std::setprecision(2)
                      << c.relative_error << std::defaultfloat << '\n';
            ok = ok && c.passed;
        }
        return ok ? kOk : kInvariantViolation;
    }
    return kOk;
}
