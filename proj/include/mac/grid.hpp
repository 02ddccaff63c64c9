#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

/**
 * @file grid.hpp
 * @brief Uniform periodic MAC grid on the unit torus [0,1)^d.
 *
 * Cells are addressed by a d-tuple of coordinates modulo n and linearized
 * with axis 0 fastest: idx = k0 + n*k1 + n^2*k2. Every cell owns its "+" face
 * on each axis, so face arrays have the same layout as cell arrays; the "-"
 * face of K on axis i is the "+" face of the cell below K along i.
 *
 * Axis indices are 0-based in code (axis 0 is x).
 */

namespace mac {

inline constexpr int kMaxDim = 3;

struct CellIndex {
    std::array<int, kMaxDim> k{0, 0, 0};
    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// sigma_{K,axis+}: the face on the positive side of `owner` along `axis`.
struct FaceIndex {
    int axis = 0;
    CellIndex owner;
    friend bool operator==(const FaceIndex&, const FaceIndex&) = default;
};

// Bidual face between D_sigma and D_sigma', sigma, sigma' in E_component,
// with x_sigma' - x_sigma = h e_direction. `base` is sigma.
struct BidualFaceIndex {
    int component = 0;
    int direction = 0;
    FaceIndex base;
    friend bool operator==(const BidualFaceIndex&, const BidualFaceIndex&) = default;
};

class StaggeredGrid {
public:
    // Throws ConfigError unless dim is 2 or 3 and n >= 2.
    StaggeredGrid(int dim, int n);

    int dim() const noexcept { return dim_; }
    int cells_per_axis() const noexcept { return n_; }
    double h() const noexcept { return 1.0 / static_cast<double>(n_); }
    // |K| = |D_sigma| = h^d.
    double cell_volume() const noexcept { return volume_; }

    std::size_t cell_count() const noexcept { return count_; }
    std::size_t face_count(int /*axis*/) const noexcept { return count_; }

    std::size_t linear(const CellIndex& K) const noexcept
    {
        std::size_t idx = 0;
        for (int a = dim_ - 1; a >= 0; --a) {
            idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(K.k[a]);
        }
        return idx;
    }

    CellIndex delinear(std::size_t idx) const noexcept
    {
        CellIndex K;
        for (int a = 0; a < dim_; ++a) {
            K.k[a] = static_cast<int>(idx % static_cast<std::size_t>(n_));
            idx /= static_cast<std::size_t>(n_);
        }
        return K;
    }

    std::size_t linear(const FaceIndex& s) const noexcept { return linear(s.owner); }

    CellIndex neighbor_cell(const CellIndex& K, int axis, int dir) const noexcept
    {
        CellIndex L = K;
        L.k[axis] = wrap(K.k[axis] + dir);
        return L;
    }

    // Linear index of the neighbour of cell `idx` along `axis`; dir = +1 or -1.
    std::size_t neighbor(std::size_t idx, int axis, int dir) const noexcept
    {
        const std::size_t stride = strides_[axis];
        const std::size_t span = stride * static_cast<std::size_t>(n_);
        const std::size_t coord = (idx / stride) % static_cast<std::size_t>(n_);
        if (dir > 0) {
            return coord + 1 == static_cast<std::size_t>(n_) ? idx + stride - span : idx + stride;
        }
        return coord == 0 ? idx + span - stride : idx - stride;
    }

    // Oriented pair (K, L) of sigma, with x_L - x_K = h e_axis.
    std::pair<CellIndex, CellIndex> face_cells(const FaceIndex& s) const noexcept
    {
        return {s.owner, neighbor_cell(s.owner, s.axis, +1)};
    }

    // The 2d faces of E_axis whose dual cells touch D_sigma, ordered by
    // (direction axis, -1 then +1).
    std::vector<FaceIndex> dual_neighbors(const FaceIndex& s) const;

    // Bidual face from sigma to its + neighbour along `direction`.
    std::pair<FaceIndex, FaceIndex> bidual_faces(const BidualFaceIndex& e) const noexcept
    {
        return {e.base, FaceIndex{e.base.axis, neighbor_cell(e.base.owner, e.direction, +1)}};
    }

    // Geometric positions (in [0,1)^d, possibly 1.0 for the last face).
    std::array<double, kMaxDim> cell_center(const CellIndex& K) const noexcept;
    std::array<double, kMaxDim> face_center(const FaceIndex& s) const noexcept;

    friend bool operator==(const StaggeredGrid& a, const StaggeredGrid& b) noexcept
    {
        return a.dim_ == b.dim_ && a.n_ == b.n_;
    }

private:
    int wrap(int c) const noexcept { return ((c % n_) + n_) % n_; }

    int dim_;
    int n_;
    std::size_t count_;
    double volume_;
    std::array<std::size_t, kMaxDim> strides_{1, 1, 1};
};

} // namespace mac
