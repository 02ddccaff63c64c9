#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mac/fields.hpp"
#include "mac/thermo.hpp"

namespace mac {

// Reference solution sampled on the run's grid at its step times.
struct ReferenceSnapshot {
    CellField density;
    FaceField velocity;
};

using ReferenceProvider = std::function<ReferenceSnapshot(int step, double time)>;

using SpaceTimeScalar = std::function<double(double t, const Point& x)>;
using SpaceTimeVector = std::function<Point(double t, const Point& x)>;

// (Pi_M r(t), Pi_E U(t)) on `grid`.
ReferenceProvider analytic_reference(const StaggeredGrid& grid, SpaceTimeScalar density,
                                     SpaceTimeVector velocity);

struct ErrorReport {
    double e_energy = 0.0;
    double e_grad_u = 0.0;
    double e_rho = 0.0;
    double e_u = 0.0;
    double e_p = 0.0;
    double h = 0.0;
    double dt = 0.0;
    double gamma = 0.0;
    int steps = 0;
};

// Error norms over snapshots at steps 1..N (history[k] is step k+1):
//   e_energy = max_n relative_energy(rho^n, bar u^n | r^n, bar U^n)
//   e_grad_u = (dt sum_n |grad_eps(u^n - U^n)|_2^2)^(1/2)
//   e_rho    = dt sum_n |rho^n - r^n|_1
//   e_u      = (dt sum_n |u^n - U^n|_2^2)^(1/2)
//   e_p      = max_n max_K |p(rho^n_K) - p(r^n_K)|
// Throws ConfigError on an empty history.
ErrorReport error_norms(const GasLaw& law, double dt, const std::vector<State>& history,
                        const ReferenceProvider& reference);

// log2(coarse / fine); empty unless both errors are positive.
std::optional<double> eoc(double e_coarse, double e_fine);

// Fine-to-coarse restriction. Density: mean of the (nf/nc)^d fine cells in each
// coarse cell. Face velocity: mean of the fine i-faces on the coarse face plane.
// Throws ConfigError unless the fine resolution is an integer multiple.
CellField restrict_density(const CellField& fine, const StaggeredGrid& coarse);
FaceField restrict_velocity(const FaceField& fine, const StaggeredGrid& coarse);

// Restricts fine snapshots onto a coarse run's step times. fine_history[k] is
// fine step k+1; coarse step n maps to fine step n * ratio.
// Throws ConfigError if the time steps do not nest or snapshots are missing.
ReferenceProvider restricted_reference(const std::vector<State>& fine_history, double fine_dt,
                                       const StaggeredGrid& coarse, double coarse_dt);

// Column order of the EOC table.
std::string csv_header();
std::string csv_row(const ErrorReport& r, const ErrorReport* coarser, const std::string& config_hash);

} // namespace mac
