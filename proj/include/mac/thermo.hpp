#pragma once

#include <vector>

#include "mac/fields.hpp"

namespace mac {

// Isentropic law p = a rho^gamma.
class GasLaw {
public:
    // Throws ConfigError unless a > 0 and gamma > 1.
    GasLaw(double a, double gamma);

    double a() const noexcept { return a_; }
    double gamma() const noexcept { return gamma_; }

    double pressure(double rho) const;
    double pressure_derivative(double rho) const;

    // H(rho) = rho * int_1^rho p(z)/z^2 dz = a (rho^gamma - rho)/(gamma - 1).
    double helmholtz(double rho) const;
    double helmholtz_derivative(double rho) const;
    double helmholtz_second(double rho) const;

private:
    double a_;
    double gamma_;
};

// int ( 1/2 rho |bar u|^2 + H(rho) ) with the cell-averaged velocity.
double total_energy(const GasLaw& law, const State& s);

// Bregman divergence E(rho | r) = H(rho) - H'(r)(rho - r) - H(r).
double relative_helmholtz(const GasLaw& law, double rho, double r);

// Relative energy of s against a cell density r and cell-centred velocity U:
// int ( 1/2 rho |bar u - U|^2 + E(rho | r) ).
double relative_energy(const GasLaw& law, const State& s, const CellField& r,
                       const std::vector<CellField>& U);

} // namespace mac
