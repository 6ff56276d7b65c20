#include "epdd/field_solver.hpp"

#include "epdd/kinetics.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace epdd {

namespace {

Error singular(const std::string& why) { return Error(ErrorKind::SingularSystem, "singular potential system: " + why); }

}  // namespace

double sigma_floor(const TissueParams& p) noexcept { return 1e-6 * p.sigma_max; }

ScalarField2D solve_potential(const ValidatedConfig& config, const ScalarField2D& sigma, double tol,
                              double* linear_residual)
{
    const auto& c = config.config();
    const std::size_t nx = c.grid.nx;
    const std::size_t ny = c.grid.ny;
    const double dx = c.grid.dx;
    const double dy = c.grid.dy;
    const double phi0 = c.electro.phi0;
    const double phiL = c.electro.phiL;
    const double floor = sigma_floor(c.tissue);

    std::vector<double> s(nx * ny);
    bool any_positive = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        s[k] = std::max(sigma.values()[k], floor);
        any_positive = any_positive || s[k] > 0.0;
    }
    if (!any_positive)
        throw singular("conductivity is zero on the whole domain");

    // Unknowns are the rows j = 1 .. ny-2; the electrode rows are Dirichlet data.
    const std::size_t rows = ny - 2;
    const auto n = static_cast<Eigen::Index>(nx * rows);
    auto unknown = [nx](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>((j - 1) * nx + i); };
    auto node = [nx](std::size_t i, std::size_t j) { return j * nx + i; };

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);

    // Face conductances: x faces span dy, y faces span dx (halved on the insulating sides).
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const Eigen::Index row = unknown(i, j);
            const double s_here = s[node(i, j)];
            if (i + 1 < nx) {
                const double g = 0.5 * (s_here + s[node(i + 1, j)]) * dy / dx;
                const Eigen::Index east = unknown(i + 1, j);
                triplets.emplace_back(row, east, -g);
                triplets.emplace_back(east, row, -g);
                diag[static_cast<std::size_t>(row)] += g;
                diag[static_cast<std::size_t>(east)] += g;
            }
            const double width = (i == 0 || i + 1 == nx) ? 0.5 : 1.0;
            const double g_north = 0.5 * (s_here + s[node(i, j + 1)]) * width * dx / dy;
            diag[static_cast<std::size_t>(row)] += g_north;
            if (j + 2 < ny) {
                const Eigen::Index north = unknown(i, j + 1);
                triplets.emplace_back(row, north, -g_north);
                triplets.emplace_back(north, row, -g_north);
                diag[static_cast<std::size_t>(north)] += g_north;
            } else {
                rhs[row] += g_north * phiL;
            }
            if (j == 1) {
                const double g_south = 0.5 * (s_here + s[node(i, 0)]) * width * dx / dy;
                diag[static_cast<std::size_t>(row)] += g_south;
                rhs[row] += g_south * phi0;
            }
        }
    }
    for (Eigen::Index k = 0; k < n; ++k)
        triplets.emplace_back(k, k, diag[static_cast<std::size_t>(k)]);

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw singular("factorization failed");
    Eigen::VectorXd x = ldlt.solve(rhs);

    const double scale = std::max(rhs.norm(), A.diagonal().norm() * std::max(std::abs(phi0), std::abs(phiL)));
    double residual = 0.0;
    for (int refine = 0; refine < 3; ++refine) {
        const Eigen::VectorXd r = rhs - A * x;
        residual = scale > 0.0 ? r.norm() / scale : r.norm();
        if (residual <= tol)
            break;
        x += ldlt.solve(r);
    }
    if (linear_residual)
        *linear_residual = residual;

    ScalarField2D phi(nx, ny, dx, dy, Quantity::Potential);
    for (std::size_t i = 0; i < nx; ++i) {
        phi(i, 0) = phi0;
        phi(i, ny - 1) = phiL;
    }
    for (std::size_t j = 1; j + 1 < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            phi(i, j) = x[unknown(i, j)];
    return phi;
}

ScalarField2D field_magnitude(const ScalarField2D& phi)
{
    const std::size_t nx = phi.nx();
    const std::size_t ny = phi.ny();
    const double dx = phi.dx();
    const double dy = phi.dy();

    auto derivative = [](std::size_t k, std::size_t n, double h, auto&& f) {
        if (n < 3)
            return n == 2 ? (f(1) - f(0)) / h : 0.0;
        if (k == 0)
            return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
        if (k + 1 == n)
            return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
        return (f(k + 1) - f(k - 1)) / (2.0 * h);
    };

    ScalarField2D E(nx, ny, dx, dy, Quantity::FieldMagnitude);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double gx = derivative(i, nx, dx, [&](std::size_t a) { return phi(a, j); });
            const double gy = derivative(j, ny, dy, [&](std::size_t b) { return phi(i, b); });
            E(i, j) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return E;
}

ScalarField2D conductivity_field(const ScalarField2D& E, const TissueParams& p)
{
    ScalarField2D s(E.nx(), E.ny(), E.dx(), E.dy(), Quantity::Conductivity);
    for (std::size_t k = 0; k < E.size(); ++k)
        s.values()[k] = conductivity(E.values()[k], p);
    return s;
}

FieldSolution solve_field(const ValidatedConfig& config, double tol, int max_picard)
{
    if (!(tol > 0.0))
        throw Error(ErrorKind::Validation, "field tolerance must be > 0");
    const auto& c = config.config();
    const double threshold = tol * std::abs(c.electro.phiL - c.electro.phi0) / c.tissue.length_L;
    const double reference = std::abs(c.electro.phiL - c.electro.phi0) / c.tissue.length_L;

    ScalarField2D sigma(c.grid.nx, c.grid.ny, c.grid.dx, c.grid.dy, Quantity::Conductivity, c.tissue.sigma_min);
    ScalarField2D E_prev;
    double change = 0.0;
    for (int it = 1; it <= max_picard; ++it) {
        FieldSolution sol;
        sol.phi = solve_potential(config, sigma, tol, &sol.linear_residual);
        sol.E_mag = field_magnitude(sol.phi);
        sol.sigma = conductivity_field(sol.E_mag, c.tissue);
        if (it > 1) {
            change = 0.0;
            for (std::size_t k = 0; k < sol.E_mag.size(); ++k)
                change = std::max(change, std::abs(sol.E_mag.values()[k] - E_prev.values()[k]));
            if (change <= threshold) {
                sol.picard_iterations = it;
                sol.final_residual = reference > 0.0 ? change / reference : change;
                return sol;
            }
        }
        E_prev = std::move(sol.E_mag);
        sigma = std::move(sol.sigma);
    }
    throw NonConvergence(max_picard, reference > 0.0 ? change / reference : change);
}

FieldSolution solve_field(const ValidatedConfig& config)
{
    return solve_field(config, config->solver.field_tol, config->solver.max_picard);
}

}  // namespace epdd
