#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mac/scheme.hpp"

namespace mac {

enum class LinearSolverKind { Automatic, Direct, Iterative };

struct LinearSolverConfig {
    LinearSolverKind kind = LinearSolverKind::Automatic;
    double tolerance = 1e-10;
    int max_iterations = 1000;
    // Automatic picks the direct solver for cells_per_axis <= this (d = 2 only).
    int direct_max_cells_per_axis = 32;
    double ilut_drop_tolerance = 1e-3;
    int ilut_fill_factor = 5;
};

struct SolverConfig {
    double newton_tol = 1e-10;
    int max_newton_iters = 30;
    double damping = 0.5;
    double positivity_fraction = 0.9;
    int max_backtracks = 30;
    LinearSolverConfig linear;
};

// Throws ConfigError on nonpositive tolerances, caps < 1, or fractions outside (0,1).
void validate(const SolverConfig& config);

class LinearSolveError : public std::runtime_error {
public:
    enum class Kind { Breakdown, NonConvergence };
    LinearSolveError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

struct LinearSolveResult {
    Eigen::VectorXd x;
    double relative_residual = 0.0;
    int iterations = 0;
};

// Incomplete LU factors kept across Newton iterations and time steps. They are
// rebuilt only when BiCGSTAB stops converging quickly with the lagged factors.
class LinearSolverCache {
public:
    LinearSolverCache();
    ~LinearSolverCache();
    LinearSolverCache(const LinearSolverCache&) = delete;
    LinearSolverCache& operator=(const LinearSolverCache&) = delete;

    int factorizations() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    friend struct LinearSolverCacheAccess;
};

// Solves J x = rhs. Throws LinearSolveError on breakdown or non-convergence.
// With a cache, the iterative path first tries the cached preconditioner.
LinearSolveResult linear_solve(const SparseMatrix& J, const Eigen::VectorXd& rhs,
                               const LinearSolverConfig& config, bool direct,
                               LinearSolverCache* cache = nullptr);

struct FailureReport {
    int step = 0;
    double time = 0.0;
    std::string reason;
    std::vector<double> residual_history;
    double min_density = 0.0;

    std::string to_json() const;
};

class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(FailureReport report);
    const FailureReport& report() const noexcept { return report_; }

private:
    FailureReport report_;
};

struct StepResult {
    State state;
    int newton_iterations = 0;
    std::vector<double> residual_history;
    // Recomputed from the accepted state, not taken from the iteration.
    double final_residual = 0.0;
};

// Advances prev by one backward Euler step to time t. Starts Newton from prev,
// damps updates to keep rho >= (1 - positivity_fraction) * rho cellwise, and
// backtracks while the scaled residual norm does not decrease.
// Throws SolverFailure when the step cannot be completed.
StepResult newton_step_solve(const SparseOperators& ops, const SchemeParams& params,
                             const SolverConfig& config, const State& prev, double t,
                             LinearSolverCache* cache = nullptr);

} // namespace mac
