#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace agg {

/// Uniform periodic grid on the box [-L, L)^dim with dim in {1, 2}.
/// points_per_dim is a power of two so the spacing h = 2L/N is exact in
/// binary floating point (h * N == 2L bitwise).
struct Grid {
    int dim = 1;
    double half_length = 1.0;
    int points_per_dim = 8;
    double spacing = 0.25;

    static Grid make(int dim, double half_length, int points_per_dim);

    std::size_t cell_count() const;
    double cell_volume() const;
    /// Coordinate of grid point i along one axis: -L + i*h.
    double coord(int i) const { return -half_length + i * spacing; }
    /// Flat index of a 2D point (row-major, x outer / y inner).
    std::size_t at(int ix, int iy) const {
        return static_cast<std::size_t>(ix) * points_per_dim + iy;
    }

    bool operator==(const Grid&) const = default;
};

/// Real scalar field sampled at the grid points.
struct Field {
    Grid grid;
    std::vector<double> values;
    double time_tag = 0.0;

    static Field zeros(const Grid& g);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    bool all_finite() const;
};

/// Complex Fourier modes of a field, stored in DFT bin order (bin k along an
/// axis carries wavevector pi*k_signed/L, where k_signed wraps to [-N/2, N/2)).
struct FourierField {
    Grid grid;
    std::vector<std::complex<double>> modes;

    static FourierField zeros(const Grid& g);
    std::size_t size() const { return modes.size(); }
};

/// Sample a function of the coordinates on the grid. The callable takes one
/// double in 1D and two in 2D.
template <typename F>
Field sampled(const Grid& g, F&& f) {
    Field out = Field::zeros(g);
    const int n = g.points_per_dim;
    if constexpr (std::is_invocable_v<F, double, double>) {
        if (g.dim != 2) throw std::invalid_argument("sampled: two-coordinate callable on a 1D grid");
        for (int ix = 0; ix < n; ++ix) {
            const double x = g.coord(ix);
            for (int iy = 0; iy < n; ++iy) out.values[g.at(ix, iy)] = f(x, g.coord(iy));
        }
    } else {
        static_assert(std::is_invocable_v<F, double>, "sampled: callable must take 1 or 2 doubles");
        if (g.dim != 1) throw std::invalid_argument("sampled: one-coordinate callable on a 2D grid");
        for (int i = 0; i < n; ++i) out.values[i] = f(g.coord(i));
    }
    return out;
}

/// One isotropic Gaussian bump; sigma is the standard deviation per axis and
/// mass the integral over the whole space.
struct GaussianBump {
    double mass = 1.0;
    std::array<double, 2> center = {0.0, 0.0};
    double sigma = 1.0;
};

Field gaussian_field(const Grid& g, const std::vector<GaussianBump>& bumps);

/// Midpoint-rule L^p norm, (sum |u_i|^p h^dim)^(1/p); p = infinity gives the
/// max norm. Rejects p < 1.
double lp_norm(const Field& f, double p);

/// Quadrature mass and second moment (M, I) with I = sum |x_i|^2 u_i h^dim.
std::pair<double, double> mass_and_moment(const Field& f);

double min_value(const Field& f);
double max_abs(const Field& f);

/// Mass-preserving 2x coarsening (averages 2^dim children per parent cell).
Field coarsen_by_two(const Field& f);

/// Largest |u| over the cells touching the box seam, relative to max|u|.
/// Zero field reports zero.
double boundary_fraction(const Field& f);

/// Spectral schemes undershoot slightly; a field still counts as a density
/// while min u >= -1e-8 max|u|.
double negativity_fraction(const Field& f);
bool is_density(const Field& f, double tol_factor = 1e-8);

}  // namespace agg
