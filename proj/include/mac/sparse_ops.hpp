#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "mac/grid.hpp"

namespace mac {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Assembled counterparts of the matrix-free operators, all n^d x n^d and in
// the grid's linear ordering. A face array on E_a is indexed by its owner cell.
class SparseOperators {
public:
    explicit SparseOperators(const StaggeredGrid& grid);

    const StaggeredGrid& grid() const noexcept { return grid_; }

    const SparseMatrix& identity() const noexcept { return identity_; }
    // (shift_plus(a) r)_K = r_{K+e_a}; shift_minus(a) is its transpose.
    const SparseMatrix& shift_plus(int a) const noexcept { return shift_plus_[a]; }
    const SparseMatrix& shift_minus(int a) const noexcept { return shift_minus_[a]; }
    // Cell -> E_a: {r}^(a).
    const SparseMatrix& face_average(int a) const noexcept { return face_average_[a]; }
    // E_a -> cell: bar v_a.
    const SparseMatrix& cell_average(int a) const noexcept { return cell_average_[a]; }
    // Cell -> E_a: d_E^(a).
    const SparseMatrix& partial_edges(int a) const noexcept { return partial_edges_[a]; }
    // E_a -> cell: d_M^(a).
    const SparseMatrix& partial_cells(int a) const noexcept { return partial_cells_[a]; }
    // Delta_M; on each face component the same stencil is Delta_E.
    const SparseMatrix& laplace() const noexcept { return laplace_; }

    // Fixed products used by the Jacobian, index (a, b) -> a * dim + b.
    // face_average(a) * partial_cells(b): E_b -> E_a.
    const SparseMatrix& average_of_divergence(int a, int b) const noexcept { return avg_div_[a * grid_.dim() + b]; }
    // partial_edges(a) * partial_cells(b): E_b -> E_a.
    const SparseMatrix& grad_div(int a, int b) const noexcept { return grad_div_[a * grid_.dim() + b]; }
    // face_average(a) * cell_average(b): E_b -> E_a.
    const SparseMatrix& average_of_bar(int a, int b) const noexcept { return avg_bar_[a * grid_.dim() + b]; }

private:
    StaggeredGrid grid_;
    SparseMatrix identity_;
    std::vector<SparseMatrix> shift_plus_;
    std::vector<SparseMatrix> shift_minus_;
    std::vector<SparseMatrix> face_average_;
    std::vector<SparseMatrix> cell_average_;
    std::vector<SparseMatrix> partial_edges_;
    std::vector<SparseMatrix> partial_cells_;
    SparseMatrix laplace_;
    std::vector<SparseMatrix> avg_div_;
    std::vector<SparseMatrix> grad_div_;
    std::vector<SparseMatrix> avg_bar_;
};

} // namespace mac
