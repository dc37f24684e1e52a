#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gkdv {

enum class GridKind { PeriodicUniform, BoundedUniform };

/// A 1D uniform grid, periodic or bounded. Periodic grids exclude the right
/// endpoint (nodes x_i = left + i*h, h = (right-left)/count); bounded grids
/// include both endpoints (h = (right-left)/(count-1)).
class Grid1D {
public:
    Grid1D(GridKind kind, double left, double right, std::size_t count);

    GridKind kind() const { return kind_; }
    double left() const { return left_; }
    double right() const { return right_; }
    std::size_t count() const { return count_; }
    double spacing() const { return spacing_; }
    bool periodic() const { return kind_ == GridKind::PeriodicUniform; }

    double node(std::size_t i) const { return left_ + spacing_ * static_cast<double>(i); }
    std::vector<double> nodes() const;
    double length() const { return right_ - left_; }

    bool operator==(const Grid1D& other) const;
    bool operator!=(const Grid1D& other) const { return !(*this == other); }

    static Grid1D periodic(double left, double right, std::size_t count) {
        return Grid1D(GridKind::PeriodicUniform, left, right, count);
    }
    static Grid1D bounded(double left, double right, std::size_t count) {
        return Grid1D(GridKind::BoundedUniform, left, right, count);
    }

private:
    GridKind kind_;
    double left_;
    double right_;
    std::size_t count_;
    double spacing_;
};

/// Sampled real function on a Grid1D. The universal carrier for all profiles
/// and solution snapshots. Samples are required to stay finite; public
/// operations call check_finite() before handing a Field back.
class Field {
public:
    Field(Grid1D grid, std::vector<double> samples);
    explicit Field(Grid1D grid);  // zero-initialized

    const Grid1D& grid() const { return grid_; }
    std::span<const double> samples() const { return samples_; }
    std::span<double> samples() { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }
    double& operator[](std::size_t i) { return samples_[i]; }

    /// Throws std::runtime_error naming `what` if any sample is NaN/Inf.
    void check_finite(const std::string& what) const;

    double max_abs() const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double a);

private:
    Grid1D grid_;
    std::vector<double> samples_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);
Field pointwise_mul(const Field& a, const Field& b);

/// Sample fn(x) at every node.
template <typename Fn>
Field make_field(const Grid1D& grid, Fn&& fn) {
    std::vector<double> s(grid.count());
    for (std::size_t i = 0; i < grid.count(); ++i) s[i] = fn(grid.node(i));
    return Field(grid, std::move(s));
}

void require_same_grid(const Field& a, const Field& b, const char* where);

}  // namespace gkdv
