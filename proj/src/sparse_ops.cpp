#include "mac/sparse_ops.hpp"

namespace mac {

SparseOperators::SparseOperators(const StaggeredGrid& grid) : grid_(grid)
{
    const auto n = static_cast<Eigen::Index>(grid.cell_count());
    identity_.resize(n, n);
    identity_.setIdentity();

    const double inv_h = 1.0 / grid.h();
    laplace_.resize(n, n);
    for (int a = 0; a < grid.dim(); ++a) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(grid.cell_count());
        for (std::size_t K = 0; K < grid.cell_count(); ++K) {
            trip.emplace_back(static_cast<int>(K), static_cast<int>(grid.neighbor(K, a, +1)), 1.0);
        }
        SparseMatrix plus(n, n);
        plus.setFromTriplets(trip.begin(), trip.end());
        SparseMatrix minus = plus.transpose();

        face_average_.push_back(0.5 * (identity_ + plus));
        cell_average_.push_back(0.5 * (identity_ + minus));
        partial_edges_.push_back(inv_h * (plus - identity_));
        partial_cells_.push_back(inv_h * (identity_ - minus));
        SparseMatrix lap_a = partial_cells_.back() * partial_edges_.back();
        laplace_ += lap_a;
        shift_plus_.push_back(std::move(plus));
        shift_minus_.push_back(std::move(minus));
    }
    laplace_.makeCompressed();

    for (int a = 0; a < grid.dim(); ++a) {
        for (int b = 0; b < grid.dim(); ++b) {
            avg_div_.push_back(face_average_[a] * partial_cells_[b]);
            grad_div_.push_back(partial_edges_[a] * partial_cells_[b]);
            avg_bar_.push_back(face_average_[a] * cell_average_[b]);
        }
    }
}

} // namespace mac
