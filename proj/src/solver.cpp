#include "mac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include "json.hpp"

#include "mac/errors.hpp"

namespace mac {

void validate(const SolverConfig& config)
{
    if (!(config.newton_tol > 0.0) || !(config.linear.tolerance > 0.0)) {
        throw ConfigError("solver tolerances must be positive");
    }
    if (config.max_newton_iters < 1 || config.max_backtracks < 1 || config.linear.max_iterations < 1) {
        throw ConfigError("solver iteration caps must be at least 1");
    }
    if (!(config.damping > 0.0 && config.damping < 1.0)) {
        throw ConfigError("damping factor must lie in (0, 1)");
    }
    if (!(config.positivity_fraction > 0.0 && config.positivity_fraction < 1.0)) {
        throw ConfigError("positivity fraction must lie in (0, 1)");
    }
}

namespace {

// Applies shared incomplete LU factors; compute() leaves them untouched so
// BiCGSTAB can run against a newer matrix.
class SharedIlut {
public:
    using Factors = Eigen::IncompleteLUT<double>;

    void set(std::shared_ptr<const Factors> f) { factors_ = std::move(f); }

    template <typename M>
    SharedIlut& analyzePattern(const M&) { return *this; }
    template <typename M>
    SharedIlut& factorize(const M&) { return *this; }
    template <typename M>
    SharedIlut& compute(const M&) { return *this; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return factors_->solve(b); }
    Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
    std::shared_ptr<const Factors> factors_;
};

struct KrylovOutcome {
    Eigen::VectorXd x;
    int iterations = 0;
    bool numerical_issue = false;
};

KrylovOutcome bicgstab(const SparseMatrix& J, const Eigen::VectorXd& rhs,
                       std::shared_ptr<const SharedIlut::Factors> factors, double tol, int max_iterations)
{
    Eigen::BiCGSTAB<SparseMatrix, SharedIlut> krylov;
    krylov.preconditioner().set(std::move(factors));
    krylov.setTolerance(tol);
    krylov.setMaxIterations(max_iterations);
    krylov.compute(J);
    KrylovOutcome out;
    out.x = krylov.solve(rhs);
    out.iterations = static_cast<int>(krylov.iterations());
    out.numerical_issue = krylov.info() == Eigen::NumericalIssue;
    return out;
}

} // namespace

struct LinearSolverCache::Impl {
    std::shared_ptr<const SharedIlut::Factors> factors;
    Eigen::Index rows = 0;
    int fresh_iterations = 0;
    int factorizations = 0;
};

struct LinearSolverCacheAccess {
    static LinearSolverCache::Impl& get(LinearSolverCache& c) { return *c.impl_; }
};

LinearSolverCache::LinearSolverCache() : impl_(std::make_unique<Impl>()) {}
LinearSolverCache::~LinearSolverCache() = default;
int LinearSolverCache::factorizations() const noexcept { return impl_->factorizations; }

LinearSolveResult linear_solve(const SparseMatrix& J, const Eigen::VectorXd& rhs,
                               const LinearSolverConfig& config, bool direct, LinearSolverCache* cache)
{
    using Kind = LinearSolveError::Kind;
    if (!rhs.allFinite()) {
        throw LinearSolveError(Kind::Breakdown, "right-hand side is not finite");
    }
    const double rhs_norm = rhs.norm();
    LinearSolveResult result;
    if (rhs_norm == 0.0) {
        result.x = Eigen::VectorXd::Zero(rhs.size());
        return result;
    }
    const double iterative_accept = 10.0 * config.tolerance;
    auto relative_residual = [&](const Eigen::VectorXd& x) { return (J * x - rhs).norm() / rhs_norm; };

    if (direct) {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) {
            throw LinearSolveError(Kind::Breakdown, "sparse LU factorization failed: " + lu.lastErrorMessage());
        }
        result.x = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !result.x.allFinite()) {
            throw LinearSolveError(Kind::Breakdown, "sparse LU solve produced a non-finite update");
        }
        result.relative_residual = relative_residual(result.x);
        // A direct solve of a singular system returns garbage rather than an error flag.
        if (!(result.relative_residual <= std::max(1e-8, config.tolerance))) {
            throw LinearSolveError(Kind::Breakdown, "direct solve residual " +
                                                        std::to_string(result.relative_residual) +
                                                        " indicates a singular system");
        }
        return result;
    }

    auto* state = cache != nullptr ? &LinearSolverCacheAccess::get(*cache) : nullptr;
    if (state != nullptr && state->factors && state->rows == J.rows()) {
        const int cap = std::min(config.max_iterations, std::max(20, 4 * state->fresh_iterations));
        KrylovOutcome lagged = bicgstab(J, rhs, state->factors, config.tolerance, cap);
        if (lagged.x.allFinite() && !lagged.numerical_issue) {
            const double rel = relative_residual(lagged.x);
            if (rel <= iterative_accept) {
                result.x = std::move(lagged.x);
                result.iterations = lagged.iterations;
                result.relative_residual = rel;
                return result;
            }
        }
    }

    auto factors = std::make_shared<SharedIlut::Factors>();
    factors->setDroptol(config.ilut_drop_tolerance);
    factors->setFillfactor(config.ilut_fill_factor);
    factors->compute(J);
    if (factors->info() != Eigen::Success) {
        throw LinearSolveError(Kind::Breakdown, "incomplete LU preconditioner failed");
    }
    KrylovOutcome fresh = bicgstab(J, rhs, factors, config.tolerance, config.max_iterations);
    if (state != nullptr) {
        state->factors = factors;
        state->rows = J.rows();
        state->fresh_iterations = fresh.iterations;
        ++state->factorizations;
    }
    if (!fresh.x.allFinite()) {
        throw LinearSolveError(Kind::Breakdown, "BiCGSTAB produced a non-finite update");
    }
    if (fresh.numerical_issue) {
        throw LinearSolveError(Kind::Breakdown, "BiCGSTAB broke down");
    }
    result.x = std::move(fresh.x);
    result.iterations = fresh.iterations;
    result.relative_residual = relative_residual(result.x);
    if (!(result.relative_residual <= iterative_accept)) {
        throw LinearSolveError(Kind::NonConvergence, "BiCGSTAB reached relative residual " +
                                                         std::to_string(result.relative_residual) +
                                                         " after " + std::to_string(result.iterations) +
                                                         " iterations");
    }
    return result;
}

std::string FailureReport::to_json() const
{
    nlohmann::json j;
    j["step"] = step;
    j["time"] = time;
    j["reason"] = reason;
    j["residual_history"] = residual_history;
    j["min_density"] = min_density;
    return j.dump();
}

SolverFailure::SolverFailure(FailureReport report)
    : std::runtime_error("step " + std::to_string(report.step) + " failed: " + report.reason),
      report_(std::move(report))
{
}

namespace {

bool use_direct(const LinearSolverConfig& cfg, const StaggeredGrid& grid)
{
    switch (cfg.kind) {
    case LinearSolverKind::Direct:
        return true;
    case LinearSolverKind::Iterative:
        return false;
    case LinearSolverKind::Automatic:
        break;
    }
    return grid.dim() == 2 && grid.cells_per_axis() <= cfg.direct_max_cells_per_axis;
}

// Largest theta in (0, 1] with rho + theta * drho >= (1 - fraction) * rho.
double positivity_limit(const CellField& rho, const Eigen::VectorXd& update, double fraction)
{
    double theta = 1.0;
    for (std::size_t K = 0; K < rho.size(); ++K) {
        const double drho = update[static_cast<Eigen::Index>(K)];
        if (drho < 0.0) {
            theta = std::min(theta, fraction * rho[K] / -drho);
        }
    }
    return theta;
}

} // namespace

StepResult newton_step_solve(const SparseOperators& ops, const SchemeParams& params,
                             const SolverConfig& config, const State& prev, double t,
                             LinearSolverCache* cache)
{
    const auto& grid = ops.grid();
    require_same_grid(grid, prev.density.grid());

    StepResult out{prev, 0, {}, 0.0};
    State& trial = out.state;
    trial.step = prev.step + 1;
    trial.time = t;

    auto fail = [&](const std::string& reason) {
        FailureReport report;
        report.step = trial.step;
        report.time = t;
        report.reason = reason;
        report.residual_history = out.residual_history;
        report.min_density = trial.density.min();
        throw SolverFailure(std::move(report));
    };

    if (!(prev.density.min() > 0.0)) {
        fail("previous density is not positive");
    }

    const bool direct = use_direct(config.linear, grid);
    Residual res = residual(params, prev, trial, t);
    double norm = scaled_residual_norm(params, res);
    out.residual_history.push_back(norm);

    while (norm > config.newton_tol) {
        if (out.newton_iterations >= config.max_newton_iters) {
            fail("Newton did not converge in " + std::to_string(config.max_newton_iters) + " iterations");
        }
        ++out.newton_iterations;

        const SparseMatrix J = assemble_jacobian(ops, params, prev, trial);
        Eigen::VectorXd update;
        try {
            update = linear_solve(J, -pack(res), config.linear, direct, cache).x;
        } catch (const LinearSolveError& e) {
            fail(std::string("linear solver: ") + e.what());
        }

        const Eigen::VectorXd base = pack(trial.density, trial.velocity);
        double theta = positivity_limit(trial.density, update, config.positivity_fraction);
        bool accepted = false;
        for (int bt = 0; bt < config.max_backtracks; ++bt, theta *= config.damping) {
            State candidate = trial;
            unpack(base + theta * update, candidate.density, candidate.velocity);
            if (!(candidate.density.min() > 0.0)) {
                continue;
            }
            Residual cand_res = residual(params, prev, candidate, t);
            const double cand_norm = scaled_residual_norm(params, cand_res);
            if (std::isfinite(cand_norm) && cand_norm < norm) {
                trial = std::move(candidate);
                res = std::move(cand_res);
                norm = cand_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            fail("line search could not reduce the residual below " + std::to_string(norm));
        }
        out.residual_history.push_back(norm);
    }

    // Re-verify the accepted state from scratch.
    out.final_residual = scaled_residual_norm(params, residual(params, prev, trial, t));
    if (!(out.final_residual <= config.newton_tol)) {
        fail("recomputed residual " + std::to_string(out.final_residual) + " exceeds tolerance");
    }
    if (!(trial.density.min() > 0.0)) {
        fail("accepted density is not positive");
    }
    return out;
}

} // namespace mac
