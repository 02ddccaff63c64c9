#include "mac/grid.hpp"

#include <cmath>
#include <string>

#include "mac/errors.hpp"

namespace mac {

StaggeredGrid::StaggeredGrid(int dim, int n) : dim_(dim), n_(n)
{
    if (dim != 2 && dim != 3) {
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (n < 2) {
        throw ConfigError("grid needs at least 2 cells per axis, got " + std::to_string(n));
    }
    count_ = 1;
    for (int a = 0; a < dim_; ++a) {
        strides_[a] = count_;
        count_ *= static_cast<std::size_t>(n_);
    }
    volume_ = std::pow(h(), dim_);
}

std::vector<FaceIndex> StaggeredGrid::dual_neighbors(const FaceIndex& s) const
{
    std::vector<FaceIndex> out;
    out.reserve(2 * static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a) {
        out.push_back(FaceIndex{s.axis, neighbor_cell(s.owner, a, -1)});
        out.push_back(FaceIndex{s.axis, neighbor_cell(s.owner, a, +1)});
    }
    return out;
}

std::array<double, kMaxDim> StaggeredGrid::cell_center(const CellIndex& K) const noexcept
{
    std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        x[a] = (K.k[a] + 0.5) * h();
    }
    return x;
}

std::array<double, kMaxDim> StaggeredGrid::face_center(const FaceIndex& s) const noexcept
{
    auto x = cell_center(s.owner);
    x[s.axis] += 0.5 * h();
    return x;
}

} // namespace mac
