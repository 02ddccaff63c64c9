#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "json.hpp"

#include "mac/errors.hpp"
#include "mac/experiments.hpp"
#include "mac/solver.hpp"
#include "test_support.hpp"

using namespace mac;

namespace {

SparseMatrix shifted_laplacian(const SparseOperators& ops, double shift)
{
    return SparseMatrix(shift * ops.identity() - ops.laplace());
}

LinearSolverConfig linear(LinearSolverKind kind)
{
    LinearSolverConfig c;
    c.kind = kind;
    return c;
}

} // namespace

TEST(LinearSolve, IdentityReturnsRhs)
{
    StaggeredGrid g(2, 4);
    SparseOperators ops(g);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Eigen::VectorXd b(16);
    for (auto& v : b) v = nd(rng);
    for (bool direct : {true, false}) {
        auto res = linear_solve(ops.identity(), b, linear(LinearSolverKind::Automatic), direct);
        EXPECT_LE((res.x - b).lpNorm<Eigen::Infinity>(), 1e-14);
    }
}

TEST(LinearSolve, ShiftedLaplacianRecoversKnownSolution)
{
    StaggeredGrid g(2, 16);
    SparseOperators ops(g);
    SparseMatrix A = shifted_laplacian(ops, 1.0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    Eigen::VectorXd x(static_cast<Eigen::Index>(g.cell_count()));
    for (auto& v : x) v = nd(rng);
    Eigen::VectorXd b = A * x;
    for (bool direct : {true, false}) {
        auto cfg = linear(LinearSolverKind::Automatic);
        auto res = linear_solve(A, b, cfg, direct);
        EXPECT_LE((A * res.x - b).norm(), 10 * cfg.tolerance * b.norm());
        EXPECT_LE((res.x - x).norm(), 1e-6 * x.norm());
    }
}

TEST(LinearSolve, CacheReusesFactorsForNearbyMatrices)
{
    StaggeredGrid g(2, 16);
    SparseOperators ops(g);
    LinearSolverCache cache;
    LinearSolverConfig cfg = linear(LinearSolverKind::Iterative);
    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(g.cell_count()), -1.0, 1.0);
    for (double shift : {1.0, 1.01, 1.02}) {
        SparseMatrix A = shifted_laplacian(ops, shift);
        auto res = linear_solve(A, b, cfg, false, &cache);
        EXPECT_LE((A * res.x - b).norm(), 10 * cfg.tolerance * b.norm());
    }
    EXPECT_EQ(cache.factorizations(), 1);

    // A system of another size forces a fresh factorization.
    SparseOperators other(StaggeredGrid(2, 8));
    SparseMatrix A8 = shifted_laplacian(other, 1.0);
    Eigen::VectorXd b8 = Eigen::VectorXd::Ones(64);
    auto res = linear_solve(A8, b8, cfg, false, &cache);
    EXPECT_LE((A8 * res.x - b8).norm(), 10 * cfg.tolerance * b8.norm());
    EXPECT_EQ(cache.factorizations(), 2);
}

TEST(LinearSolve, SingularLaplacianBreaksDown)
{
    StaggeredGrid g(2, 8);
    SparseOperators ops(g);
    SparseMatrix A = -ops.laplace();
    Eigen::VectorXd b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.cell_count()));
    try {
        linear_solve(A, b, linear(LinearSolverKind::Direct), true);
        FAIL() << "expected a breakdown";
    } catch (const LinearSolveError& e) {
        EXPECT_EQ(e.kind(), LinearSolveError::Kind::Breakdown);
    }
}

TEST(SolverConfig, Validation)
{
    SolverConfig c;
    EXPECT_NO_THROW(validate(c));
    c.newton_tol = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SolverConfig{};
    c.max_newton_iters = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SolverConfig{};
    c.damping = 1.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = SolverConfig{};
    c.positivity_fraction = 0.0;
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Newton, ConstantStateConvergesImmediately)
{
    StaggeredGrid g(2, 8);
    SparseOperators ops(g);
    SchemeParams p;
    p.dt = 0.125;
    p.end_time = 1.0;
    State s{CellField(g, 1.0), FaceField(g)};
    StepResult r = newton_step_solve(ops, p, SolverConfig{}, s, p.dt);
    EXPECT_LE(r.newton_iterations, 1);
    EXPECT_LE(r.final_residual, 1e-10);
    EXPECT_NEAR(r.state.time, p.dt, 1e-15);
}

TEST(Newton, ManufacturedStepsConvergeQuickly)
{
    StaggeredGrid g(2, 32);
    SparseOperators ops(g);
    ManufacturedSolution ms{0.01, 1.0};
    SchemeParams p;
    p.law = GasLaw(1.0, 1.4);
    p.dt = 0.025;
    p.end_time = 0.1;
    p.forcing = [ms](double t, const Point& x) { return ms.forcing(t, x); };
    State s{project_cells(g, [&](const Point& x) { return ms.density(0.0, x); }),
            project_faces(g, [&](const Point& x) { return ms.velocity(0.0, x); })};
    for (int n = 1; n <= 4; ++n) {
        StepResult r = newton_step_solve(ops, p, SolverConfig{}, s, n * p.dt);
        EXPECT_LE(r.newton_iterations, 8);
        EXPECT_LE(r.final_residual, 1e-10);
        EXPECT_EQ(r.state.step, n);
        s = r.state;
    }
}

TEST(Newton, HugeStepNeverReturnsNonpositiveDensity)
{
    StaggeredGrid g(2, 16);
    SparseOperators ops(g);
    GreshoVortex gv{2.0, 0.2};
    SchemeParams p;
    p.law = GasLaw(1.0, 2.0);
    p.dt = 100.0;
    p.end_time = 100.0;
    State s{CellField(g, 1.0), project_faces(g, [&](const Point& x) { return gv.velocity(x); })};
    try {
        StepResult r = newton_step_solve(ops, p, SolverConfig{}, s, p.dt);
        EXPECT_GT(r.state.density.min(), 0.0);
        EXPECT_LE(r.final_residual, 1e-10);
    } catch (const SolverFailure& f) {
        EXPECT_FALSE(f.report().reason.empty());
        auto j = nlohmann::json::parse(f.report().to_json());
        EXPECT_TRUE(j.contains("residual_history"));
    }
}

TEST(FailureReport, JsonFields)
{
    FailureReport r{3, 0.3, "stalled", {1.0, 0.5}, 0.9};
    auto j = nlohmann::json::parse(r.to_json());
    EXPECT_EQ(j["step"], 3);
    EXPECT_EQ(j["reason"], "stalled");
    EXPECT_EQ(j["residual_history"].size(), 2u);
    EXPECT_DOUBLE_EQ(j["min_density"].get<double>(), 0.9);
}
