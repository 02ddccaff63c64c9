#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mac/fields.hpp"
#include "mac/sparse_ops.hpp"
#include "mac/thermo.hpp"

/**
 * @file scheme.hpp
 * @brief Implicit MAC scheme: residuals, Jacobian, per-step diagnostics.
 *
 * For each time level the unknowns (rho^n, u^n) solve
 *
 *   D_t rho + div_Up[rho, u] - h^alpha Delta_M rho = 0
 *   D_t {rho bar u_i}^(i) + {div_Up[rho bar u_i, u]}^(i) + d_E^(i) p(rho)
 *     - mu Delta_E u_i - (mu + lambda) d_E^(i) div_h u
 *     - h^alpha sum_j { d_M^(j)( {bar u_i}^(j) d_E^(j) rho ) }^(i) = (Pi_E f(t^n))_i
 *
 * The stacked unknown vector is [rho, u_1, ..., u_d], each block in the
 * grid's linear order.
 */

namespace mac {

using Forcing = std::function<Point(double t, const Point& x)>;

struct SchemeParams {
    GasLaw law{1.0, 1.4};
    double mu = 1.0;
    double lambda = 0.0;
    double alpha = 1.6;
    double dt = 0.01;
    double end_time = 0.1;
    std::optional<Forcing> forcing;
};

// Admissible artificial-diffusion exponents: alpha in (1, 2 gamma - d/3) for
// gamma < 2, alpha > 1 otherwise.
bool alpha_admissible(double alpha, double gamma, int dim);

// Throws ConfigError on mu <= 0, mu + lambda < 0, dt <= 0 or end_time < dt.
// Returns warnings (currently only an inadmissible alpha).
std::vector<std::string> validate(const SchemeParams& params, int dim);

struct Residual {
    CellField mass;
    FaceField momentum;
};

CellField residual_density(const SchemeParams& params, const State& prev, const State& trial);

// Throws DomainError if the trial density is not positive.
FaceField residual_momentum(const SchemeParams& params, const State& prev, const State& trial, double t);

Residual residual(const SchemeParams& params, const State& prev, const State& trial, double t);

// Max norm of dt * residual over both blocks.
double scaled_residual_norm(const SchemeParams& params, const Residual& r);

Eigen::VectorXd pack(const CellField& rho, const FaceField& u);
Eigen::VectorXd pack(const Residual& r);
void unpack(const Eigen::VectorXd& x, CellField& rho, FaceField& u);

// Jacobian of the stacked residual with respect to [rho, u]. The upwind sign
// pattern is frozen at the trial point, with sign(0) = 0.
SparseMatrix assemble_jacobian(const SparseOperators& ops, const SchemeParams& params,
                               const State& prev, const State& trial);

struct StepDiagnostics {
    double mass = 0.0;
    double min_density = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    // E(prev) - E(s) - dissipation; nonnegative for unforced runs.
    double energy_slack = 0.0;
};

StepDiagnostics diagnostics(const SchemeParams& params, const State& s, const State& prev);

} // namespace mac
