#include "mac/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>

#include "mac/errors.hpp"

namespace mac {

namespace {

// Two-point Gauss-Legendre nodes on [0,1].
constexpr double kGaussLo = 0.5 - 0.28867513459481288225;
constexpr double kGaussHi = 0.5 + 0.28867513459481288225;

bool finite_span(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs_span(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// Averages f over the box [lo, lo + h] along every axis in `axes`, with
// the remaining coordinates taken from lo as-is.
double gauss_box_mean(const ScalarFunction& f, Point lo, double h, std::span<const int> axes)
{
    const std::size_t m = axes.size();
    const std::size_t npts = std::size_t{1} << m;
    double sum = 0.0;
    for (std::size_t p = 0; p < npts; ++p) {
        Point x = lo;
        for (std::size_t j = 0; j < m; ++j) {
            x[axes[j]] = lo[axes[j]] + h * (((p >> j) & 1U) ? kGaussHi : kGaussLo);
        }
        sum += f(x);
    }
    return sum / static_cast<double>(npts);
}

} // namespace

void require_same_grid(const StaggeredGrid& a, const StaggeredGrid& b)
{
    if (!(a == b)) {
        throw GridMismatch("fields live on different grids (d=" + std::to_string(a.dim()) +
                           ", n=" + std::to_string(a.cells_per_axis()) + " vs d=" +
                           std::to_string(b.dim()) + ", n=" + std::to_string(b.cells_per_axis()) + ")");
    }
}

double CellField::min() const
{
    return *std::min_element(values_.begin(), values_.end());
}

double CellField::max_abs() const { return max_abs_span(values_); }
bool CellField::all_finite() const { return finite_span(values_); }

CellField& CellField::operator+=(const CellField& o)
{
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += o.values_[i];
    }
    return *this;
}

CellField& CellField::operator-=(const CellField& o)
{
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= o.values_[i];
    }
    return *this;
}

CellField& CellField::operator*=(double s)
{
    for (double& x : values_) {
        x *= s;
    }
    return *this;
}

FaceField::FaceField(const StaggeredGrid& grid, double value) : grid_(grid)
{
    for (int a = 0; a < grid.dim(); ++a) {
        comps_[a].assign(grid.face_count(a), value);
    }
}

double FaceField::max_abs() const
{
    double m = 0.0;
    for (int a = 0; a < dim(); ++a) {
        m = std::max(m, max_abs_span(comps_[a]));
    }
    return m;
}

bool FaceField::all_finite() const
{
    for (int a = 0; a < dim(); ++a) {
        if (!finite_span(comps_[a])) {
            return false;
        }
    }
    return true;
}

FaceField& FaceField::operator+=(const FaceField& o)
{
    require_same_grid(grid_, o.grid_);
    for (int a = 0; a < dim(); ++a) {
        for (std::size_t i = 0; i < comps_[a].size(); ++i) {
            comps_[a][i] += o.comps_[a][i];
        }
    }
    return *this;
}

FaceField& FaceField::operator-=(const FaceField& o)
{
    require_same_grid(grid_, o.grid_);
    for (int a = 0; a < dim(); ++a) {
        for (std::size_t i = 0; i < comps_[a].size(); ++i) {
            comps_[a][i] -= o.comps_[a][i];
        }
    }
    return *this;
}

FaceField& FaceField::operator*=(double s)
{
    for (int a = 0; a < dim(); ++a) {
        for (double& x : comps_[a]) {
            x *= s;
        }
    }
    return *this;
}

CellField operator+(CellField a, const CellField& b) { return a += b; }
CellField operator-(CellField a, const CellField& b) { return a -= b; }
CellField operator*(double s, CellField a) { return a *= s; }
FaceField operator+(FaceField a, const FaceField& b) { return a += b; }
FaceField operator-(FaceField a, const FaceField& b) { return a -= b; }
FaceField operator*(double s, FaceField a) { return a *= s; }

CellField project_cells(const StaggeredGrid& grid, const ScalarFunction& phi)
{
    CellField out(grid);
    const double h = grid.h();
    const std::array<int, kMaxDim> all_axes{0, 1, 2};
    const std::span<const int> axes(all_axes.data(), static_cast<std::size_t>(grid.dim()));
    for (std::size_t idx = 0; idx < grid.cell_count(); ++idx) {
        const CellIndex K = grid.delinear(idx);
        Point lo{0.0, 0.0, 0.0};
        for (int a = 0; a < grid.dim(); ++a) {
            lo[a] = K.k[a] * h;
        }
        out[idx] = gauss_box_mean(phi, lo, h, axes);
    }
    return out;
}

FaceField project_faces(const StaggeredGrid& grid, const VectorFunction& phi)
{
    FaceField out(grid);
    const double h = grid.h();
    for (int i = 0; i < grid.dim(); ++i) {
        std::array<int, kMaxDim> tangential{};
        std::size_t m = 0;
        for (int a = 0; a < grid.dim(); ++a) {
            if (a != i) {
                tangential[m++] = a;
            }
        }
        const ScalarFunction component = [&phi, i](const Point& x) { return phi(x)[i]; };
        auto vi = out.component(i);
        for (std::size_t idx = 0; idx < grid.cell_count(); ++idx) {
            const CellIndex K = grid.delinear(idx);
            Point lo{0.0, 0.0, 0.0};
            for (int a = 0; a < grid.dim(); ++a) {
                lo[a] = K.k[a] * h;
            }
            lo[i] = (K.k[i] + 1) * h;
            vi[idx] = gauss_box_mean(component, lo, h, std::span<const int>(tangential.data(), m));
        }
    }
    return out;
}

std::vector<double> face_average(const CellField& r, int axis)
{
    const auto& grid = r.grid();
    std::vector<double> out(grid.face_count(axis));
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        out[K] = 0.5 * (r[K] + r[grid.neighbor(K, axis, +1)]);
    }
    return out;
}

FaceField face_average(const CellField& r)
{
    FaceField out(r.grid());
    for (int a = 0; a < r.grid().dim(); ++a) {
        const auto avg = face_average(r, a);
        std::copy(avg.begin(), avg.end(), out.component(a).begin());
    }
    return out;
}

std::vector<CellField> cell_average_velocity(const FaceField& v)
{
    const auto& grid = v.grid();
    std::vector<CellField> out;
    out.reserve(static_cast<std::size_t>(grid.dim()));
    for (int a = 0; a < grid.dim(); ++a) {
        CellField bar(grid);
        const auto va = v.component(a);
        for (std::size_t K = 0; K < grid.cell_count(); ++K) {
            bar[K] = 0.5 * (va[K] + va[grid.neighbor(K, a, -1)]);
        }
        out.push_back(std::move(bar));
    }
    return out;
}

double integrate_cells(const CellField& r)
{
    double sum = 0.0;
    for (double x : r.values()) {
        sum += x;
    }
    return r.grid().cell_volume() * sum;
}

double integrate_faces(const FaceField& v, int axis)
{
    double sum = 0.0;
    for (double x : v.component(axis)) {
        sum += x;
    }
    return v.grid().cell_volume() * sum;
}

double inner(const CellField& a, const CellField& b)
{
    require_same_grid(a.grid(), b.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return a.grid().cell_volume() * sum;
}

double inner(const FaceField& a, const FaceField& b)
{
    require_same_grid(a.grid(), b.grid());
    double sum = 0.0;
    for (int ax = 0; ax < a.dim(); ++ax) {
        const auto ca = a.component(ax);
        const auto cb = b.component(ax);
        for (std::size_t i = 0; i < ca.size(); ++i) {
            sum += ca[i] * cb[i];
        }
    }
    return a.grid().cell_volume() * sum;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream os(path, mode);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return os;
}

void write_index_header(std::ostream& os, int dim)
{
    static constexpr const char* names[] = {"i", "j", "k"};
    for (int a = 0; a < dim; ++a) {
        os << names[a] << ',';
    }
}

void write_index(std::ostream& os, const CellIndex& K, int dim)
{
    for (int a = 0; a < dim; ++a) {
        os << K.k[a] << ',';
    }
}

template <class T>
void put(std::ostream& os, T value)
{
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is)
{
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

StaggeredGrid read_grid_header(std::istream& is, const std::filesystem::path& path)
{
    const auto dim = get<std::int32_t>(is);
    const auto n = get<std::int32_t>(is);
    if (!is) {
        throw IoError("truncated header in " + path.string());
    }
    return StaggeredGrid(dim, n);
}

} // namespace

void write_csv(const std::filesystem::path& path, const CellField& r)
{
    auto os = open_out(path);
    const auto& grid = r.grid();
    write_index_header(os, grid.dim());
    os << "value\n" << std::setprecision(17);
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        write_index(os, grid.delinear(K), grid.dim());
        os << r[K] << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const FaceField& v)
{
    auto os = open_out(path);
    const auto& grid = v.grid();
    write_index_header(os, grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        os << "u" << a + 1 << (a + 1 == grid.dim() ? '\n' : ',');
    }
    os << std::setprecision(17);
    for (std::size_t K = 0; K < grid.cell_count(); ++K) {
        write_index(os, grid.delinear(K), grid.dim());
        for (int a = 0; a < grid.dim(); ++a) {
            os << v.component(a)[K] << (a + 1 == grid.dim() ? '\n' : ',');
        }
    }
}

void write_binary(const std::filesystem::path& path, const CellField& r)
{
    auto os = open_out(path, std::ios::binary);
    put<std::int32_t>(os, r.grid().dim());
    put<std::int32_t>(os, r.grid().cells_per_axis());
    for (double x : r.values()) {
        put(os, x);
    }
}

void write_binary(const std::filesystem::path& path, const FaceField& v)
{
    auto os = open_out(path, std::ios::binary);
    put<std::int32_t>(os, v.grid().dim());
    put<std::int32_t>(os, v.grid().cells_per_axis());
    for (int a = 0; a < v.dim(); ++a) {
        for (double x : v.component(a)) {
            put(os, x);
        }
    }
}

CellField read_cell_binary(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    CellField r(read_grid_header(is, path));
    for (double& x : r.values()) {
        x = get<double>(is);
    }
    if (!is) {
        throw IoError("truncated cell field in " + path.string());
    }
    return r;
}

FaceField read_face_binary(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    FaceField v(read_grid_header(is, path));
    for (int a = 0; a < v.dim(); ++a) {
        for (double& x : v.component(a)) {
            x = get<double>(is);
        }
    }
    if (!is) {
        throw IoError("truncated face field in " + path.string());
    }
    return v;
}

} // namespace mac
