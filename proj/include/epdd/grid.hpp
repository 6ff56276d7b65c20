#ifndef EPDD_GRID_HPP
#define EPDD_GRID_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace epdd {

enum class Quantity { Potential, FieldMagnitude, Conductivity, Concentration };

std::string_view quantity_units(Quantity q) noexcept;

/**
 * @brief Node-centred scalar field on a uniform rectangular grid.
 *
 * Nodes sit at x_i = i*dx, y_j = j*dy. Storage is row-major with x fastest:
 * value(i, j) lives at index j*nx + i.
 */
class ScalarField2D {
public:
    ScalarField2D() = default;
    ScalarField2D(std::size_t nx, std::size_t ny, double dx, double dy, Quantity q, double fill = 0.0);

    [[nodiscard]] std::size_t nx() const noexcept { return nx_; }
    [[nodiscard]] std::size_t ny() const noexcept { return ny_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] double dy() const noexcept { return dy_; }
    [[nodiscard]] Quantity quantity() const noexcept { return quantity_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx_ + i; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[j * nx_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[j * nx_ + i]; }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] bool all_finite() const noexcept;
    [[nodiscard]] double min() const noexcept;
    [[nodiscard]] double max() const noexcept;

    /// True when both fields share node counts and spacing.
    [[nodiscard]] bool same_layout(const ScalarField2D& other) const noexcept;

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    double dx_ = 0.0;
    double dy_ = 0.0;
    Quantity quantity_ = Quantity::Concentration;
    std::vector<double> values_;
};

/// Trapezoidal node weights (1 inside, 1/2 on edges, 1/4 on corners) times dx*dy.
double weighted_sum(const ScalarField2D& f);

}  // namespace epdd

#endif
