#pragma once

#include "mac/analysis.hpp"
#include "mac/scheme.hpp"

namespace mac {

// Divergence-free decaying vortex array on the unit square with r = 1,
//   U = (sin 2pi x cos 2pi y, -cos 2pi x sin 2pi y) e^{-kt},
// and the momentum source that makes it an exact solution.
struct ManufacturedSolution {
    double k = 0.01;
    double mu = 1.0;

    double density(double t, const Point& x) const;
    Point velocity(double t, const Point& x) const;
    // f = dU/dt + (U.grad)U - mu Delta U (pressure gradient and grad div vanish).
    Point forcing(double t, const Point& x) const;
};

// Gresho vortex of radius 0.2 centred at (0.5, 0.5), peak speed sqrt(gamma).
struct GreshoVortex {
    double gamma = 1.4;
    double radius = 0.2;

    double radial_speed(double R) const;
    Point velocity(const Point& x) const;
};

} // namespace mac
