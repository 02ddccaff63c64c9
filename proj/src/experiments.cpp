#include "mac/experiments.hpp"

#include <cmath>
#include <numbers>

namespace mac {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double ManufacturedSolution::density(double, const Point&) const { return 1.0; }

Point ManufacturedSolution::velocity(double t, const Point& x) const
{
    const double decay = std::exp(-k * t);
    return {std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]) * decay,
            -std::cos(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]) * decay, 0.0};
}

Point ManufacturedSolution::forcing(double t, const Point& x) const
{
    const Point U = velocity(t, x);
    const double decay = std::exp(-k * t);
    // (U.grad)U = pi e^{-2kt} (sin 4pi x, sin 4pi y); Delta U = -8 pi^2 U.
    const double convective = std::numbers::pi * decay * decay;
    const double linear = -k + 2.0 * kTwoPi * kTwoPi * mu;
    return {linear * U[0] + convective * std::sin(2.0 * kTwoPi * x[0]),
            linear * U[1] + convective * std::sin(2.0 * kTwoPi * x[1]), 0.0};
}

double GreshoVortex::radial_speed(double R) const
{
    double profile = 0.0;
    if (R < 0.5 * radius) {
        profile = 2.0 * R / radius;
    } else if (R < radius) {
        profile = 2.0 * (1.0 - R / radius);
    }
    return std::sqrt(gamma) * profile;
}

Point GreshoVortex::velocity(const Point& x) const
{
    const double dx = x[0] - 0.5;
    const double dy = x[1] - 0.5;
    const double R = std::hypot(dx, dy);
    if (R == 0.0) {
        return {0.0, 0.0, 0.0};
    }
    const double scale = radial_speed(R) / R;
    return {scale * dy, -scale * dx, 0.0};
}

} // namespace mac
