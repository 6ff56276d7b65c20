#include "epdd/grid.hpp"

#include <algorithm>
#include <cmath>

namespace epdd {

std::string_view quantity_units(Quantity q) noexcept
{
    switch (q) {
    case Quantity::Potential: return "V";
    case Quantity::FieldMagnitude: return "V/mm";
    case Quantity::Conductivity: return "S/m";
    case Quantity::Concentration: return "a.u.";
    }
    return "";
}

ScalarField2D::ScalarField2D(std::size_t nx, std::size_t ny, double dx, double dy, Quantity q, double fill)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), quantity_(q), values_(nx * ny, fill)
{
}

bool ScalarField2D::all_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField2D::min() const noexcept
{
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double ScalarField2D::max() const noexcept
{
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

bool ScalarField2D::same_layout(const ScalarField2D& other) const noexcept
{
    return nx_ == other.nx_ && ny_ == other.ny_ && dx_ == other.dx_ && dy_ == other.dy_;
}

double weighted_sum(const ScalarField2D& f)
{
    const std::size_t nx = f.nx();
    const std::size_t ny = f.ny();
    if (nx == 0 || ny == 0)
        return 0.0;
    auto wx = [nx](std::size_t i) { return (i == 0 || i + 1 == nx) ? 0.5 : 1.0; };
    auto wy = [ny](std::size_t j) { return (j == 0 || j + 1 == ny) ? 0.5 : 1.0; };

    double total = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < nx; ++i)
            row += wx(i) * f(i, j);
        total += wy(j) * row;
    }
    return total * f.dx() * f.dy();
}

}  // namespace epdd
