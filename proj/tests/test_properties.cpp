#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mac/operators.hpp"
#include "mac/runner.hpp"
#include "mac/scheme.hpp"
#include "mac/solver.hpp"
#include "test_support.hpp"

using namespace mac;
using mac::testing::random_cells;
using mac::testing::random_faces;

namespace {

// Cyclic shift by one cell along `axis`.
CellField shift(const CellField& r, int axis)
{
    const auto& g = r.grid();
    CellField out(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i) out[g.neighbor(i, axis, +1)] = r[i];
    return out;
}

FaceField shift(const FaceField& u, int axis)
{
    const auto& g = u.grid();
    FaceField out(g);
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            out.component(a)[g.neighbor(i, axis, +1)] = u.component(a)[i];
        }
    }
    return out;
}

class RandomUnforcedRun : public ::testing::TestWithParam<std::uint64_t> {};

} // namespace

TEST_P(RandomUnforcedRun, ConservesMassKeepsPositivityDissipatesEnergy)
{
    std::mt19937_64 rng(GetParam());
    const int d = GetParam() % 3 == 0 ? 3 : 2;
    StaggeredGrid g(d, d == 3 ? 6 : 12);
    SchemeParams p;
    std::uniform_real_distribution<double> gam(1.2, 2.5);
    p.law = GasLaw(1.0, gam(rng));
    p.mu = 0.5;
    p.lambda = 0.1;
    p.dt = 0.02;
    p.end_time = 0.1;
    State s0{random_cells(g, rng, 0.3, 2.0), random_faces(g, rng, -1.0, 1.0)};

    SolverConfig solver;
    Simulation sim = simulate(p, solver, s0, 5, SimulationOptions{});
    ASSERT_EQ(sim.history.size(), 5u);
    const double m0 = integrate_cells(s0.density);
    double energy = total_energy(p.law, s0);
    for (const auto& s : sim.history) {
        EXPECT_LE(std::abs(integrate_cells(s.density) - m0), g.cell_count() * solver.newton_tol);
        EXPECT_GT(s.density.min(), 0.0);
        const double e = total_energy(p.law, s);
        EXPECT_LE(e, energy + 1e-9);
        energy = e;
    }
    for (const auto& row : sim.log) EXPECT_GE(row.energy_slack, -10 * solver.newton_tol);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomUnforcedRun, ::testing::Values(1u, 2u, 3u, 4u, 5u, 6u));

TEST(Properties, ResidualCommutesWithTranslation)
{
    std::mt19937_64 rng(77);
    for (int d : {2, 3}) {
        StaggeredGrid g(d, 5);
        SchemeParams p;
        p.dt = 0.03;
        State prev{random_cells(g, rng, 0.5, 1.5), random_faces(g, rng)};
        State trial{random_cells(g, rng, 0.5, 1.5), random_faces(g, rng)};
        Residual r = residual(p, prev, trial, p.dt);
        for (int axis = 0; axis < d; ++axis) {
            State ps{shift(prev.density, axis), shift(prev.velocity, axis)};
            State ts{shift(trial.density, axis), shift(trial.velocity, axis)};
            Residual rs = residual(p, ps, ts, p.dt);
            EXPECT_LT((rs.mass - shift(r.mass, axis)).max_abs(), 1e-11);
            EXPECT_LT((rs.momentum - shift(r.momentum, axis)).max_abs(), 1e-10);
        }
    }
}

TEST(Properties, UpwindDivergenceNonnegativityPreservation)
{
    // (I + dt div_Up[., u]) is an M-matrix in density: a positive rhs gives a positive solution.
    std::mt19937_64 rng(79);
    StaggeredGrid g(2, 8);
    SparseOperators ops(g);
    for (int t = 0; t < 5; ++t) {
        SchemeParams p;
        p.dt = 0.5;
        State prev{random_cells(g, rng, 0.01, 1.0), random_faces(g, rng, -3.0, 3.0)};
        State trial{prev.density, random_faces(g, rng, -3.0, 3.0)};
        SparseMatrix J = assemble_jacobian(ops, p, prev, trial);
        const int nc = static_cast<int>(g.cell_count());
        SparseMatrix A = J.topLeftCorner(nc, nc);
        Eigen::VectorXd b(nc);
        for (int i = 0; i < nc; ++i) b(i) = prev.density[static_cast<std::size_t>(i)] / p.dt;
        LinearSolverConfig lin;
        lin.kind = LinearSolverKind::Direct;
        Eigen::VectorXd x = linear_solve(A, b, lin, true).x;
        EXPECT_GT(x.minCoeff(), 0.0);
    }
}
