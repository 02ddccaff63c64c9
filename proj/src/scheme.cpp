#include "mac/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mac/errors.hpp"
#include "mac/operators.hpp"

namespace mac {

namespace {

using ConstMap = Eigen::Map<const Eigen::VectorXd>;

ConstMap as_vector(std::span<const double> s)
{
    return ConstMap(s.data(), static_cast<Eigen::Index>(s.size()));
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double artificial_coefficient(const SchemeParams& params, const StaggeredGrid& grid)
{
    return std::pow(grid.h(), params.alpha);
}

CellField pointwise_product(const CellField& a, const CellField& b)
{
    CellField out(a.grid());
    for (std::size_t K = 0; K < a.size(); ++K) {
        out[K] = a[K] * b[K];
    }
    return out;
}

void require_positive_density(const CellField& rho)
{
    const double m = rho.min();
    if (!(m > 0.0)) {
        throw DomainError("trial density is not positive (min " + std::to_string(m) + ")");
    }
}

// d/dv of the upwind flux r_K v^+ + r_L v^- in the form {r} v - h/2 |v| d_E r,
// with d|v|/dv = sign(v) and sign(0) = 0.
Eigen::VectorXd upwind_velocity_derivative(const CellField& r, std::span<const double> v, int axis)
{
    const auto avg = face_average(r, axis);
    const auto grad = partial_edges(r, axis);
    const double half_h = 0.5 * r.grid().h();
    Eigen::VectorXd w(static_cast<Eigen::Index>(v.size()));
    for (std::size_t s = 0; s < v.size(); ++s) {
        w[static_cast<Eigen::Index>(s)] = avg[s] - half_h * sign0(v[s]) * grad[s];
    }
    return w;
}

// Linearization of r -> div_Up[r, v] at fixed v (linear in r).
SparseMatrix upwind_transport(const SparseOperators& ops, const FaceField& v)
{
    const auto& grid = ops.grid();
    const auto n = static_cast<Eigen::Index>(grid.cell_count());
    SparseMatrix out(n, n);
    for (int j = 0; j < grid.dim(); ++j) {
        const auto vj = v.component(j);
        Eigen::VectorXd plus(n);
        Eigen::VectorXd minus(n);
        for (Eigen::Index s = 0; s < n; ++s) {
            plus[s] = std::max(vj[static_cast<std::size_t>(s)], 0.0);
            minus[s] = std::min(vj[static_cast<std::size_t>(s)], 0.0);
        }
        SparseMatrix flux = SparseMatrix(plus.asDiagonal() * ops.identity()) +
                            SparseMatrix(minus.asDiagonal() * ops.shift_plus(j));
        out += ops.partial_cells(j) * flux;
    }
    return out;
}

void append_block(std::vector<Eigen::Triplet<double>>& trip, const SparseMatrix& block,
                  Eigen::Index row0, Eigen::Index col0)
{
    for (Eigen::Index c = 0; c < block.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(block, c); it; ++it) {
            trip.emplace_back(static_cast<int>(row0 + it.row()), static_cast<int>(col0 + it.col()),
                              it.value());
        }
    }
}

} // namespace

bool alpha_admissible(double alpha, double gamma, int dim)
{
    if (gamma >= 2.0) {
        return alpha > 1.0;
    }
    return alpha > 1.0 && alpha < 2.0 * gamma - static_cast<double>(dim) / 3.0;
}

std::vector<std::string> validate(const SchemeParams& params, int dim)
{
    if (!(params.mu > 0.0)) {
        throw ConfigError("shear viscosity mu must be positive");
    }
    if (!(params.mu + params.lambda >= 0.0)) {
        throw ConfigError("viscosities must satisfy mu + lambda >= 0");
    }
    if (!(params.dt > 0.0)) {
        throw ConfigError("time step must be positive");
    }
    if (!(params.end_time >= params.dt)) {
        throw ConfigError("end time must be at least one time step");
    }
    std::vector<std::string> warnings;
    if (!alpha_admissible(params.alpha, params.law.gamma(), dim)) {
        std::ostringstream os;
        os << "alpha = " << params.alpha << " is outside the admissible range for gamma = "
           << params.law.gamma() << ", d = " << dim;
        warnings.push_back(os.str());
    }
    return warnings;
}

CellField residual_density(const SchemeParams& params, const State& prev, const State& trial)
{
    const auto& grid = trial.density.grid();
    require_same_grid(grid, prev.density.grid());
    require_same_grid(grid, trial.velocity.grid());

    CellField out = trial.density - prev.density;
    out *= 1.0 / params.dt;
    out += upwind_divergence(trial.density, trial.velocity);
    CellField diffusion = laplace_cells(trial.density);
    diffusion *= artificial_coefficient(params, grid);
    out -= diffusion;
    return out;
}

FaceField residual_momentum(const SchemeParams& params, const State& prev, const State& trial, double t)
{
    const auto& grid = trial.density.grid();
    require_same_grid(grid, prev.density.grid());
    require_same_grid(grid, prev.velocity.grid());
    require_same_grid(grid, trial.velocity.grid());
    require_positive_density(trial.density);

    const int d = grid.dim();
    const double inv_dt = 1.0 / params.dt;
    const double art = artificial_coefficient(params, grid);
    const auto& rho = trial.density;
    const auto bar = cell_average_velocity(trial.velocity);
    const auto bar_prev = cell_average_velocity(prev.velocity);

    CellField pressure(grid);
    for (std::size_t K = 0; K < rho.size(); ++K) {
        pressure[K] = params.law.pressure(rho[K]);
    }
    const CellField divergence = div_cells(trial.velocity);
    const FaceField viscous = laplace_faces(trial.velocity);
    std::optional<FaceField> source;
    if (params.forcing) {
        const Forcing& f = *params.forcing;
        source = project_faces(grid, [&f, t](const Point& x) { return f(t, x); });
    }
    std::vector<std::vector<double>> rho_grad;
    for (int j = 0; j < d; ++j) {
        rho_grad.push_back(partial_edges(rho, j));
    }

    FaceField out(grid);
    for (int i = 0; i < d; ++i) {
        const CellField momentum = pointwise_product(rho, bar[i]);
        const CellField momentum_prev = pointwise_product(prev.density, bar_prev[i]);
        const auto m_avg = face_average(momentum, i);
        const auto m_prev_avg = face_average(momentum_prev, i);
        const auto convection = face_average(upwind_divergence(momentum, trial.velocity), i);
        const auto pressure_grad = partial_edges(pressure, i);
        const auto grad_div = partial_edges(divergence, i);

        CellField artificial(grid);
        for (int j = 0; j < d; ++j) {
            auto q = face_average(bar[i], j);
            for (std::size_t s = 0; s < q.size(); ++s) {
                q[s] *= rho_grad[j][s];
            }
            artificial += partial_cells(grid, q, j);
        }
        const auto artificial_avg = face_average(artificial, i);

        auto oi = out.component(i);
        const auto lap = viscous.component(i);
        for (std::size_t s = 0; s < oi.size(); ++s) {
            oi[s] = (m_avg[s] - m_prev_avg[s]) * inv_dt + convection[s] + pressure_grad[s] -
                    params.mu * lap[s] - (params.mu + params.lambda) * grad_div[s] - art * artificial_avg[s];
        }
        if (source) {
            const auto fi = source->component(i);
            for (std::size_t s = 0; s < oi.size(); ++s) {
                oi[s] -= fi[s];
            }
        }
    }
    return out;
}

Residual residual(const SchemeParams& params, const State& prev, const State& trial, double t)
{
    return Residual{residual_density(params, prev, trial), residual_momentum(params, prev, trial, t)};
}

double scaled_residual_norm(const SchemeParams& params, const Residual& r)
{
    return params.dt * std::max(r.mass.max_abs(), r.momentum.max_abs());
}

Eigen::VectorXd pack(const CellField& rho, const FaceField& u)
{
    const auto& grid = rho.grid();
    require_same_grid(grid, u.grid());
    const auto n = static_cast<Eigen::Index>(grid.cell_count());
    Eigen::VectorXd x((grid.dim() + 1) * n);
    x.segment(0, n) = as_vector(rho.values());
    for (int a = 0; a < grid.dim(); ++a) {
        x.segment((a + 1) * n, n) = as_vector(u.component(a));
    }
    return x;
}

Eigen::VectorXd pack(const Residual& r) { return pack(r.mass, r.momentum); }

void unpack(const Eigen::VectorXd& x, CellField& rho, FaceField& u)
{
    const auto& grid = rho.grid();
    require_same_grid(grid, u.grid());
    const auto n = static_cast<Eigen::Index>(grid.cell_count());
    if (x.size() != (grid.dim() + 1) * n) {
        throw GridMismatch("stacked vector length does not match the grid");
    }
    std::copy(x.data(), x.data() + n, rho.values().begin());
    for (int a = 0; a < grid.dim(); ++a) {
        std::copy(x.data() + (a + 1) * n, x.data() + (a + 2) * n, u.component(a).begin());
    }
}

SparseMatrix assemble_jacobian(const SparseOperators& ops, const SchemeParams& params,
                               const State& prev, const State& trial)
{
    const auto& grid = ops.grid();
    require_same_grid(grid, trial.density.grid());
    require_same_grid(grid, trial.velocity.grid());
    require_same_grid(grid, prev.density.grid());
    require_positive_density(trial.density);

    const int d = grid.dim();
    const auto n = static_cast<Eigen::Index>(grid.cell_count());
    const double inv_dt = 1.0 / params.dt;
    const double art = artificial_coefficient(params, grid);
    const auto& rho = trial.density;
    const auto& u = trial.velocity;
    const auto rho_vec = as_vector(rho.values());
    const auto bar = cell_average_velocity(u);

    std::vector<Eigen::Triplet<double>> trip;
    const SparseMatrix transport = upwind_transport(ops, u);

    // Mass rows.
    {
        SparseMatrix block = inv_dt * ops.identity() + transport - art * ops.laplace();
        append_block(trip, block, 0, 0);
        for (int a = 0; a < d; ++a) {
            const Eigen::VectorXd w = upwind_velocity_derivative(rho, u.component(a), a);
            SparseMatrix du = ops.partial_cells(a) * w.asDiagonal();
            append_block(trip, du, 0, (a + 1) * n);
        }
    }

    // Momentum rows.
    const SparseMatrix time_and_transport = inv_dt * ops.identity() + transport;
    Eigen::VectorXd dp(n);
    for (Eigen::Index K = 0; K < n; ++K) {
        dp[K] = params.law.pressure_derivative(rho[static_cast<std::size_t>(K)]);
    }
    std::vector<Eigen::VectorXd> rho_grad;
    for (int j = 0; j < d; ++j) {
        const auto g = partial_edges(rho, j);
        rho_grad.emplace_back(as_vector(g));
    }

    for (int i = 0; i < d; ++i) {
        const Eigen::Index row0 = (i + 1) * n;
        const auto bar_i = as_vector(bar[i].values());
        CellField momentum(grid);
        for (std::size_t K = 0; K < momentum.size(); ++K) {
            momentum[K] = rho[K] * bar[i][K];
        }

        // d/d rho: time + convection through m_i, pressure, artificial term.
        SparseMatrix d_rho = ops.face_average(i) * (time_and_transport * bar_i.asDiagonal());
        d_rho += ops.partial_edges(i) * dp.asDiagonal();
        SparseMatrix art_rho(n, n);
        for (int j = 0; j < d; ++j) {
            const Eigen::VectorXd bar_on_j = ops.face_average(j) * bar_i;
            art_rho += ops.partial_cells(j) * (bar_on_j.asDiagonal() * ops.partial_edges(j));
        }
        d_rho -= art * (ops.face_average(i) * art_rho);
        append_block(trip, d_rho, row0, 0);

        for (int k = 0; k < d; ++k) {
            // Convection through the transporting velocity u_k.
            const Eigen::VectorXd w = upwind_velocity_derivative(momentum, u.component(k), k);
            SparseMatrix d_u = ops.average_of_divergence(i, k) * w.asDiagonal();
            d_u -= (params.mu + params.lambda) * ops.grad_div(i, k);
            if (k == i) {
                d_u += ops.face_average(i) *
                       (time_and_transport * (rho_vec.asDiagonal() * ops.cell_average(i)));
                d_u -= params.mu * ops.laplace();
                SparseMatrix art_u(n, n);
                for (int j = 0; j < d; ++j) {
                    art_u += ops.partial_cells(j) * (rho_grad[j].asDiagonal() * ops.average_of_bar(j, i));
                }
                d_u -= art * (ops.face_average(i) * art_u);
            }
            append_block(trip, d_u, row0, (k + 1) * n);
        }
    }

    SparseMatrix J((d + 1) * n, (d + 1) * n);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    return J;
}

StepDiagnostics diagnostics(const SchemeParams& params, const State& s, const State& prev)
{
    StepDiagnostics out;
    out.mass = integrate_cells(s.density);
    out.min_density = s.density.min();
    out.energy = total_energy(params.law, s);
    const auto grad = grad_bidual(s.velocity);
    const auto div = div_cells(s.velocity);
    out.dissipation = params.dt * (params.mu * inner(grad, grad) + (params.mu + params.lambda) * inner(div, div));
    out.energy_slack = total_energy(params.law, prev) - out.energy - out.dissipation;
    return out;
}

} // namespace mac
