#include "mac/thermo.hpp"

#include <cmath>
#include <string>

#include "mac/errors.hpp"

namespace mac {

namespace {

void require_positive(double rho, const char* what)
{
    if (!(rho > 0.0)) {
        throw DomainError(std::string(what) + " requires a positive density, got " + std::to_string(rho));
    }
}

} // namespace

GasLaw::GasLaw(double a, double gamma) : a_(a), gamma_(gamma)
{
    if (!(a > 0.0)) {
        throw ConfigError("pressure coefficient a must be positive");
    }
    if (!(gamma > 1.0)) {
        throw ConfigError("adiabatic exponent gamma must exceed 1");
    }
}

double GasLaw::pressure(double rho) const
{
    if (rho < 0.0 || std::isnan(rho)) {
        throw DomainError("pressure of negative density " + std::to_string(rho));
    }
    return a_ * std::pow(rho, gamma_);
}

double GasLaw::pressure_derivative(double rho) const
{
    if (rho < 0.0 || std::isnan(rho)) {
        throw DomainError("pressure derivative of negative density " + std::to_string(rho));
    }
    return a_ * gamma_ * std::pow(rho, gamma_ - 1.0);
}

double GasLaw::helmholtz(double rho) const
{
    require_positive(rho, "helmholtz");
    return a_ * (std::pow(rho, gamma_) - rho) / (gamma_ - 1.0);
}

double GasLaw::helmholtz_derivative(double rho) const
{
    require_positive(rho, "helmholtz_derivative");
    return a_ * (gamma_ * std::pow(rho, gamma_ - 1.0) - 1.0) / (gamma_ - 1.0);
}

double GasLaw::helmholtz_second(double rho) const
{
    require_positive(rho, "helmholtz_second");
    return a_ * gamma_ * std::pow(rho, gamma_ - 2.0);
}

double total_energy(const GasLaw& law, const State& s)
{
    require_same_grid(s.density.grid(), s.velocity.grid());
    const auto bar = cell_average_velocity(s.velocity);
    double sum = 0.0;
    for (std::size_t K = 0; K < s.density.size(); ++K) {
        double u2 = 0.0;
        for (const auto& c : bar) {
            u2 += c[K] * c[K];
        }
        sum += 0.5 * s.density[K] * u2 + law.helmholtz(s.density[K]);
    }
    return s.density.grid().cell_volume() * sum;
}

double relative_helmholtz(const GasLaw& law, double rho, double r)
{
    return law.helmholtz(rho) - law.helmholtz_derivative(r) * (rho - r) - law.helmholtz(r);
}

double relative_energy(const GasLaw& law, const State& s, const CellField& r,
                       const std::vector<CellField>& U)
{
    const auto& grid = s.density.grid();
    require_same_grid(grid, r.grid());
    if (U.size() != static_cast<std::size_t>(grid.dim())) {
        throw GridMismatch("comparison velocity needs one cell field per axis");
    }
    for (const auto& c : U) {
        require_same_grid(grid, c.grid());
    }
    const auto bar = cell_average_velocity(s.velocity);
    double sum = 0.0;
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        double du2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double du = bar[a][K] - U[a][K];
            du2 += du * du;
        }
        sum += 0.5 * s.density[K] * du2 + relative_helmholtz(law, s.density[K], r[K]);
    }
    return grid.cell_volume() * sum;
}

} // namespace mac
