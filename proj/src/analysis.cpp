#include "mac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "mac/errors.hpp"
#include "mac/operators.hpp"

namespace mac {

ReferenceProvider analytic_reference(const StaggeredGrid& grid, SpaceTimeScalar density,
                                     SpaceTimeVector velocity)
{
    return [grid, density = std::move(density), velocity = std::move(velocity)](int, double t) {
        return ReferenceSnapshot{
            project_cells(grid, [&](const Point& x) { return density(t, x); }),
            project_faces(grid, [&](const Point& x) { return velocity(t, x); })};
    };
}

ErrorReport error_norms(const GasLaw& law, double dt, const std::vector<State>& history,
                        const ReferenceProvider& reference)
{
    if (history.empty()) {
        throw ConfigError("error norms need at least one snapshot");
    }
    const auto& grid = history.front().density.grid();
    ErrorReport report;
    report.h = grid.h();
    report.dt = dt;
    report.gamma = law.gamma();
    report.steps = static_cast<int>(history.size());

    double grad_sq = 0.0;
    double u_sq = 0.0;
    for (const auto& s : history) {
        const ReferenceSnapshot ref = reference(s.step, s.time);
        require_same_grid(grid, ref.density.grid());

        const auto ref_bar = cell_average_velocity(ref.velocity);
        report.e_energy = std::max(report.e_energy, relative_energy(law, s, ref.density, ref_bar));

        const FaceField du = s.velocity - ref.velocity;
        const auto grad = grad_bidual(du);
        grad_sq += dt * inner(grad, grad);
        u_sq += dt * inner(du, du);

        double l1 = 0.0;
        for (std::size_t K = 0; K < grid.cell_count(); ++K) {
            l1 += std::abs(s.density[K] - ref.density[K]);
            report.e_p = std::max(report.e_p,
                                  std::abs(law.pressure(s.density[K]) - law.pressure(ref.density[K])));
        }
        report.e_rho += dt * grid.cell_volume() * l1;
    }
    report.e_grad_u = std::sqrt(grad_sq);
    report.e_u = std::sqrt(u_sq);
    return report;
}

std::optional<double> eoc(double e_coarse, double e_fine)
{
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) {
        return std::nullopt;
    }
    return std::log2(e_coarse / e_fine);
}

namespace {

int refinement_ratio(const StaggeredGrid& fine, const StaggeredGrid& coarse)
{
    if (fine.dim() != coarse.dim()) {
        throw ConfigError("restriction between grids of different dimension");
    }
    const int nf = fine.cells_per_axis();
    const int nc = coarse.cells_per_axis();
    if (nf < nc || nf % nc != 0) {
        throw ConfigError("fine resolution " + std::to_string(nf) + " is not a multiple of " +
                          std::to_string(nc));
    }
    return nf / nc;
}

} // namespace

CellField restrict_density(const CellField& fine, const StaggeredGrid& coarse)
{
    const auto& fg = fine.grid();
    const int ratio = refinement_ratio(fg, coarse);
    CellField out(coarse);
    for (std::size_t k = 0; k < fg.cell_count(); ++k) {
        CellIndex K = fg.delinear(k);
        for (int a = 0; a < fg.dim(); ++a) {
            K.k[a] /= ratio;
        }
        out.at(K) += fine[k];
    }
    out *= std::pow(static_cast<double>(ratio), -fg.dim());
    return out;
}

FaceField restrict_velocity(const FaceField& fine, const StaggeredGrid& coarse)
{
    const auto& fg = fine.grid();
    const int ratio = refinement_ratio(fg, coarse);
    FaceField out(coarse);
    const double weight = std::pow(static_cast<double>(ratio), -(fg.dim() - 1));
    for (int i = 0; i < fg.dim(); ++i) {
        const auto fi = fine.component(i);
        auto ci = out.component(i);
        for (std::size_t k = 0; k < fg.cell_count(); ++k) {
            CellIndex F = fg.delinear(k);
            // Fine face plane x_i = (F_i + 1) h_f coincides with a coarse plane
            // exactly when F_i + 1 is a multiple of the ratio.
            if ((F.k[i] + 1) % ratio != 0) {
                continue;
            }
            CellIndex K;
            for (int a = 0; a < fg.dim(); ++a) {
                K.k[a] = F.k[a] / ratio;
            }
            ci[coarse.linear(K)] += weight * fi[k];
        }
    }
    return out;
}

ReferenceProvider restricted_reference(const std::vector<State>& fine_history, double fine_dt,
                                       const StaggeredGrid& coarse, double coarse_dt)
{
    const double ratio_real = coarse_dt / fine_dt;
    const long ratio = std::lround(ratio_real);
    if (ratio < 1 || std::abs(ratio_real - static_cast<double>(ratio)) > 1e-9 * ratio_real) {
        throw ConfigError("coarse time step is not an integer multiple of the fine time step");
    }
    if (fine_history.empty()) {
        throw ConfigError("fine reference has no snapshots");
    }
    refinement_ratio(fine_history.front().density.grid(), coarse);

    auto by_step = std::make_shared<std::map<int, const State*>>();
    for (const auto& s : fine_history) {
        (*by_step)[s.step] = &s;
    }
    return [by_step, ratio, coarse](int step, double) {
        const auto it = by_step->find(static_cast<int>(step * ratio));
        if (it == by_step->end()) {
            throw ConfigError("fine reference has no snapshot for coarse step " + std::to_string(step));
        }
        return ReferenceSnapshot{restrict_density(it->second->density, coarse),
                                 restrict_velocity(it->second->velocity, coarse)};
    };
}

std::string csv_header()
{
    return "h,dt,gamma,e_E,eoc_E,e_gradu,eoc_gradu,e_rho,eoc_rho,e_u,eoc_u,e_p,eoc_p,config_hash";
}

std::string csv_row(const ErrorReport& r, const ErrorReport* coarser, const std::string& config_hash)
{
    std::ostringstream os;
    os << std::setprecision(6) << std::scientific;
    auto rate = [&](double fine, double ErrorReport::*member) {
        if (coarser == nullptr) {
            return std::string();
        }
        const auto v = eoc(coarser->*member, fine);
        if (!v) {
            return std::string();
        }
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << *v;
        return s.str();
    };
    os << r.h << ',' << r.dt << ',' << r.gamma << ',';
    os << r.e_energy << ',' << rate(r.e_energy, &ErrorReport::e_energy) << ',';
    os << r.e_grad_u << ',' << rate(r.e_grad_u, &ErrorReport::e_grad_u) << ',';
    os << r.e_rho << ',' << rate(r.e_rho, &ErrorReport::e_rho) << ',';
    os << r.e_u << ',' << rate(r.e_u, &ErrorReport::e_u) << ',';
    os << r.e_p << ',' << rate(r.e_p, &ErrorReport::e_p) << ',';
    os << config_hash;
    return os.str();
}

} // namespace mac
