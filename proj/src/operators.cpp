#include "mac/operators.hpp"

#include <algorithm>
#include <cmath>

namespace mac {

BidualGradient::BidualGradient(const StaggeredGrid& grid) : grid_(grid)
{
    for (int i = 0; i < grid.dim(); ++i) {
        for (int j = 0; j < grid.dim(); ++j) {
            entries_[i * kMaxDim + j].assign(grid.cell_count(), 0.0);
        }
    }
}

double BidualGradient::max_abs() const
{
    double m = 0.0;
    for (const auto& e : entries_) {
        for (double x : e) {
            m = std::max(m, std::abs(x));
        }
    }
    return m;
}

double inner(const BidualGradient& a, const BidualGradient& b)
{
    require_same_grid(a.grid(), b.grid());
    const int d = a.grid().dim();
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const auto ea = a.entry(i, j);
            const auto eb = b.entry(i, j);
            for (std::size_t s = 0; s < ea.size(); ++s) {
                sum += ea[s] * eb[s];
            }
        }
    }
    return a.grid().cell_volume() * sum;
}

std::vector<double> partial_edges(const CellField& r, int axis)
{
    const auto& grid = r.grid();
    const double inv_h = 1.0 / grid.h();
    std::vector<double> out(grid.face_count(axis));
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        out[K] = (r[grid.neighbor(K, axis, +1)] - r[K]) * inv_h;
    }
    return out;
}

CellField partial_cells(const StaggeredGrid& grid, std::span<const double> w, int axis)
{
    const double inv_h = 1.0 / grid.h();
    CellField out(grid);
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        out[K] = (w[K] - w[grid.neighbor(K, axis, -1)]) * inv_h;
    }
    return out;
}

FaceField grad_edges(const CellField& r)
{
    FaceField out(r.grid());
    for (int a = 0; a < r.grid().dim(); ++a) {
        const auto g = partial_edges(r, a);
        std::copy(g.begin(), g.end(), out.component(a).begin());
    }
    return out;
}

CellField div_cells(const FaceField& v)
{
    const auto& grid = v.grid();
    CellField out(grid);
    for (int a = 0; a < grid.dim(); ++a) {
        out += partial_cells(grid, v.component(a), a);
    }
    return out;
}

CellField laplace_cells(const CellField& r)
{
    const auto& grid = r.grid();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    CellField out(grid);
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        double acc = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            acc += (r[grid.neighbor(K, a, -1)] - r[K]) + (r[grid.neighbor(K, a, +1)] - r[K]);
        }
        out[K] = acc * inv_h2;
    }
    return out;
}

FaceField laplace_faces(const FaceField& v)
{
    const auto& grid = v.grid();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    FaceField out(grid);
    for (int i = 0; i < grid.dim(); ++i) {
        const auto vi = v.component(i);
        auto oi = out.component(i);
        for (std::size_t s = 0; s < grid.face_count(i); ++s) {
            double acc = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                acc += (vi[grid.neighbor(s, a, -1)] - vi[s]) + (vi[grid.neighbor(s, a, +1)] - vi[s]);
            }
            oi[s] = acc * inv_h2;
        }
    }
    return out;
}

BidualGradient grad_bidual(const FaceField& v)
{
    const auto& grid = v.grid();
    const double inv_h = 1.0 / grid.h();
    BidualGradient out(grid);
    for (int i = 0; i < grid.dim(); ++i) {
        const auto vi = v.component(i);
        for (int j = 0; j < grid.dim(); ++j) {
            auto e = out.entry(i, j);
            for (std::size_t s = 0; s < grid.face_count(i); ++s) {
                e[s] = (vi[grid.neighbor(s, j, +1)] - vi[s]) * inv_h;
            }
        }
    }
    return out;
}

std::vector<double> upwind_flux(const CellField& r, const FaceField& v, int axis)
{
    require_same_grid(r.grid(), v.grid());
    const auto& grid = r.grid();
    const auto va = v.component(axis);
    std::vector<double> out(grid.face_count(axis));
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        const double vs = va[K];
        const double plus = std::max(vs, 0.0);
        const double minus = std::min(vs, 0.0);
        out[K] = r[K] * plus + r[grid.neighbor(K, axis, +1)] * minus;
    }
    return out;
}

FaceField upwind_flux(const CellField& r, const FaceField& v)
{
    FaceField out(r.grid());
    for (int a = 0; a < r.grid().dim(); ++a) {
        const auto f = upwind_flux(r, v, a);
        std::copy(f.begin(), f.end(), out.component(a).begin());
    }
    return out;
}

CellField upwind_divergence(const CellField& r, const FaceField& v)
{
    return div_cells(upwind_flux(r, v));
}

} // namespace mac
