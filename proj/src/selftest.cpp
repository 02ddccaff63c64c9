#include "mac/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mac/operators.hpp"

namespace mac {

namespace {

double rel(double lhs, double rhs, double scale)
{
    const double s = std::max({std::abs(lhs), std::abs(rhs), scale});
    return s == 0.0 ? 0.0 : std::abs(lhs - rhs) / s;
}

} // namespace

std::vector<IdentityCheck> operator_identity_suite(std::uint64_t seed, double tolerance)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.5, 2.0);

    std::vector<IdentityCheck> out;
    const std::pair<int, int> cases[] = {{2, 4}, {2, 8}, {3, 4}};
    for (const auto& [d, n] : cases) {
        const StaggeredGrid grid(d, n);
        auto random_cells = [&](auto& dist) {
            CellField r(grid);
            for (double& x : r.values()) {
                x = dist(rng);
            }
            return r;
        };
        auto random_faces = [&]() {
            FaceField v(grid);
            for (int a = 0; a < d; ++a) {
                for (double& x : v.component(a)) {
                    x = uni(rng);
                }
            }
            return v;
        };
        const CellField r = random_cells(pos);
        const CellField phi = random_cells(uni);
        const FaceField v = random_faces();
        const FaceField w = random_faces();

        auto record = [&](const std::string& name, double err) {
            out.push_back({name, d, n, err, err <= tolerance});
        };

        {
            const double lhs = -inner(laplace_cells(r), phi);
            const double rhs = inner(grad_edges(r), grad_edges(phi));
            record("sbp: -<lap_M r, phi> = <grad_E r, grad_E phi>", rel(lhs, rhs, 0.0));
        }
        {
            const double lhs = -inner(laplace_faces(v), w);
            const double rhs = inner(grad_bidual(v), grad_bidual(w));
            record("sbp: -<lap_E v, w> = <grad_eps v, grad_eps w>", rel(lhs, rhs, 0.0));
        }
        {
            const double lhs = -inner(div_cells(v), r);
            const double rhs = inner(v, grad_edges(r));
            record("sbp: -<div_h v, r> = <v, grad_E r>", rel(lhs, rhs, 0.0));
        }
        {
            const double lhs = -inner(upwind_divergence(r, v), phi);
            const double rhs = inner(upwind_flux(r, v), grad_edges(phi));
            record("sbp: -<div_Up[r,v], phi> = sum_i <Up_i, d_E phi>", rel(lhs, rhs, 0.0));
        }
        {
            double err = 0.0;
            const FaceField flux = upwind_flux(r, v);
            for (int a = 0; a < d; ++a) {
                const auto avg = face_average(r, a);
                const auto grad = partial_edges(r, a);
                const auto va = v.component(a);
                const auto fa = flux.component(a);
                for (std::size_t s = 0; s < va.size(); ++s) {
                    const double form = avg[s] * va[s] - 0.5 * grid.h() * std::abs(va[s]) * grad[s];
                    err = std::max(err, rel(fa[s], form, 0.0));
                }
            }
            record("upwind flux = {r} v - h/2 |v| d_E r", err);
        }
        {
            const CellField div = upwind_divergence(r, v);
            double scale = 0.0;
            for (double x : div.values()) {
                scale += std::abs(x);
            }
            record("sum_K |K| div_Up[r,v]_K = 0",
                   std::abs(integrate_cells(div)) / (grid.cell_volume() * scale));
        }
        {
            const CellField lap = laplace_cells(phi);
            CellField composed(grid);
            for (int a = 0; a < d; ++a) {
                composed += partial_cells(grid, partial_edges(phi, a), a);
            }
            const double err = (lap - composed).max_abs() / lap.max_abs();
            record("lap_M = sum_i d_M^i d_E^i", err);
        }
    }
    return out;
}

} // namespace mac
