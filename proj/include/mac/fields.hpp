#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "mac/grid.hpp"

namespace mac {

using Point = std::array<double, kMaxDim>;
using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Point(const Point&)>;

// One value per primary cell (X_M).
class CellField {
public:
    explicit CellField(const StaggeredGrid& grid, double value = 0.0)
        : grid_(grid), values_(grid.cell_count(), value)
    {
    }

    const StaggeredGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& at(const CellIndex& K) noexcept { return values_[grid_.linear(K)]; }
    double at(const CellIndex& K) const noexcept { return values_[grid_.linear(K)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double min() const;
    double max_abs() const;
    bool all_finite() const;

    CellField& operator+=(const CellField& o);
    CellField& operator-=(const CellField& o);
    CellField& operator*=(double s);

private:
    StaggeredGrid grid_;
    std::vector<double> values_;
};

// Per axis i, one value per face of E_i (Y_{i,E}); component i lives on E_i.
class FaceField {
public:
    explicit FaceField(const StaggeredGrid& grid, double value = 0.0);

    const StaggeredGrid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }

    std::span<double> component(int axis) noexcept { return comps_[axis]; }
    std::span<const double> component(int axis) const noexcept { return comps_[axis]; }
    double& at(const FaceIndex& s) noexcept { return comps_[s.axis][grid_.linear(s.owner)]; }
    double at(const FaceIndex& s) const noexcept { return comps_[s.axis][grid_.linear(s.owner)]; }

    double max_abs() const;
    bool all_finite() const;

    FaceField& operator+=(const FaceField& o);
    FaceField& operator-=(const FaceField& o);
    FaceField& operator*=(double s);

private:
    StaggeredGrid grid_;
    std::array<std::vector<double>, kMaxDim> comps_;
};

CellField operator+(CellField a, const CellField& b);
CellField operator-(CellField a, const CellField& b);
CellField operator*(double s, CellField a);
FaceField operator+(FaceField a, const FaceField& b);
FaceField operator-(FaceField a, const FaceField& b);
FaceField operator*(double s, FaceField a);

// Density and face velocity at one time level.
struct State {
    CellField density;
    FaceField velocity;
    int step = 0;
    double time = 0.0;
};

void require_same_grid(const StaggeredGrid& a, const StaggeredGrid& b);

// Pi_M: cell means by 2^d-point tensor Gauss quadrature.
CellField project_cells(const StaggeredGrid& grid, const ScalarFunction& phi);

// Pi_E: component i averaged over each face of E_i by 2^(d-1)-point Gauss quadrature.
FaceField project_faces(const StaggeredGrid& grid, const VectorFunction& phi);

// {r}_sigma = (r_K + r_L)/2 on every axis.
FaceField face_average(const CellField& r);

// {r}^{(axis)} only.
std::vector<double> face_average(const CellField& r, int axis);

// The bar operator: component i at K is the mean of v_i on the two i-faces of K.
std::vector<CellField> cell_average_velocity(const FaceField& v);

double integrate_cells(const CellField& r);
double integrate_faces(const FaceField& v, int axis);

// Natural L2 inner products: h^d per cell, h^d per dual cell (summed over axes).
double inner(const CellField& a, const CellField& b);
double inner(const FaceField& a, const FaceField& b);

// CSV: one row per cell in linear order: index coordinates then value(s).
void write_csv(const std::filesystem::path& path, const CellField& r);
void write_csv(const std::filesystem::path& path, const FaceField& v);

// Flat little-endian binary: int32 dim, int32 n, then doubles in linear order
// (cell field: n^d values; face field: d blocks of n^d).
void write_binary(const std::filesystem::path& path, const CellField& r);
void write_binary(const std::filesystem::path& path, const FaceField& v);
CellField read_cell_binary(const std::filesystem::path& path);
FaceField read_face_binary(const std::filesystem::path& path);

} // namespace mac
