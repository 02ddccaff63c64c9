#pragma once

#include <array>
#include <vector>

#include "mac/fields.hpp"

/**
 * @file operators.hpp
 * @brief Matrix-free discrete calculus on the periodic MAC grid.
 *
 * Orientation: the face sigma owned by K on axis i is K -> L with L = K + e_i.
 * Cell quantities live on primary cells, face quantities on dual cells D_sigma,
 * and the velocity gradient on bidual cells D_epsilon.
 */

namespace mac {

// Entry (i, j) holds (eth_j v_i) on the bidual faces between D_sigma and
// D_sigma + h e_j, sigma in E_i, indexed by sigma's owner cell.
class BidualGradient {
public:
    explicit BidualGradient(const StaggeredGrid& grid);

    const StaggeredGrid& grid() const noexcept { return grid_; }
    std::span<double> entry(int i, int j) noexcept { return entries_[i * kMaxDim + j]; }
    std::span<const double> entry(int i, int j) const noexcept { return entries_[i * kMaxDim + j]; }

    double max_abs() const;

private:
    StaggeredGrid grid_;
    std::array<std::vector<double>, kMaxDim * kMaxDim> entries_;
};

// <A, B> = h^d sum over (i, j, epsilon) A_ij B_ij.
double inner(const BidualGradient& a, const BidualGradient& b);

// d_E^(axis) r: (r_L - r_K)/h on the faces of E_axis.
std::vector<double> partial_edges(const CellField& r, int axis);

// d_M^(axis) w: (w_{K,axis+} - w_{K,axis-})/h for a face array w on E_axis.
CellField partial_cells(const StaggeredGrid& grid, std::span<const double> w, int axis);

// nabla_E r = (d_E^(1) r, ..., d_E^(d) r).
FaceField grad_edges(const CellField& r);

// div_h v = sum_i d_M^(i) v_i.
CellField div_cells(const FaceField& v);

// Delta_M r: (1/h^2) sum over the 2d neighbours (r_L - r_K).
CellField laplace_cells(const CellField& r);

// Delta_E v_i: (1/h^2) sum over the 2d dual neighbours (v_sigma' - v_sigma), per axis.
FaceField laplace_faces(const FaceField& v);

BidualGradient grad_bidual(const FaceField& v);

// Up_i[r, v]_sigma = r_K v^+ + r_L v^-, with 0^+ = 0^- = 0.
FaceField upwind_flux(const CellField& r, const FaceField& v);
std::vector<double> upwind_flux(const CellField& r, const FaceField& v, int axis);

// div_Up[r, v] = div_h Up[r, v].
CellField upwind_divergence(const CellField& r, const FaceField& v);

} // namespace mac
