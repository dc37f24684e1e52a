#include "gkdv/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gkdv {

namespace {
bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid1D::Grid1D(GridKind kind, double left, double right, std::size_t count)
    : kind_(kind), left_(left), right_(right), count_(count) {
    if (!(right > left)) throw std::invalid_argument("Grid1D: right endpoint must exceed left");
    if (count < 16) throw std::invalid_argument("Grid1D: node count must be >= 16");
    if (kind == GridKind::PeriodicUniform && !is_power_of_two(count))
        throw std::invalid_argument("Grid1D: periodic grids require a power-of-two node count");
    spacing_ = (kind == GridKind::PeriodicUniform)
                   ? (right - left) / static_cast<double>(count)
                   : (right - left) / static_cast<double>(count - 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> x(count_);
    for (std::size_t i = 0; i < count_; ++i) x[i] = node(i);
    return x;
}

bool Grid1D::operator==(const Grid1D& other) const {
    return kind_ == other.kind_ && left_ == other.left_ && right_ == other.right_ &&
           count_ == other.count_;
}

Field::Field(Grid1D grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.count())
        throw std::invalid_argument("Field: sample count does not match grid node count");
}

Field::Field(Grid1D grid) : grid_(grid), samples_(grid.count(), 0.0) {}

void Field::check_finite(const std::string& what) const {
    for (double v : samples_) {
        if (!std::isfinite(v))
            throw std::runtime_error("non-finite sample detected in " + what);
    }
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other, "Field::operator+=");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other, "Field::operator-=");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
    return *this;
}

Field& Field::operator*=(double a) {
    for (double& v : samples_) v *= a;
    return *this;
}

Field operator+(Field a, const Field& b) { a += b; return a; }
Field operator-(Field a, const Field& b) { a -= b; return a; }
Field operator*(double a, Field f) { f *= a; return f; }

Field pointwise_mul(const Field& a, const Field& b) {
    require_same_grid(a, b, "pointwise_mul");
    Field out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (a.grid() != b.grid())
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

}  // namespace gkdv
