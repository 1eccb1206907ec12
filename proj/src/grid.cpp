#include "agg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agg {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid Grid::make(int dim, double half_length, int points_per_dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
    if (!(half_length > 0.0)) throw std::invalid_argument("Grid: half_length must be positive");
    if (points_per_dim < 8 || !is_power_of_two(points_per_dim))
        throw std::invalid_argument("Grid: points_per_dim must be a power of two >= 8");
    Grid g;
    g.dim = dim;
    g.half_length = half_length;
    g.points_per_dim = points_per_dim;
    g.spacing = 2.0 * half_length / points_per_dim;
    return g;
}

std::size_t Grid::cell_count() const {
    std::size_t n = static_cast<std::size_t>(points_per_dim);
    return dim == 1 ? n : n * n;
}

double Grid::cell_volume() const {
    return dim == 1 ? spacing : spacing * spacing;
}

Field Field::zeros(const Grid& g) {
    Field f;
    f.grid = g;
    f.values.assign(g.cell_count(), 0.0);
    return f;
}

bool Field::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

FourierField FourierField::zeros(const Grid& g) {
    FourierField f;
    f.grid = g;
    f.modes.assign(g.cell_count(), {0.0, 0.0});
    return f;
}

Field gaussian_field(const Grid& g, const std::vector<GaussianBump>& bumps) {
    Field out = Field::zeros(g);
    for (const GaussianBump& b : bumps) {
        if (!(b.sigma > 0.0)) throw std::invalid_argument("gaussian_field: sigma must be positive");
        const double var = b.sigma * b.sigma;
        const double norm = g.dim == 1 ? b.mass / std::sqrt(2.0 * M_PI * var)
                                       : b.mass / (2.0 * M_PI * var);
        const int n = g.points_per_dim;
        if (g.dim == 1) {
            for (int i = 0; i < n; ++i) {
                const double dx = g.coord(i) - b.center[0];
                out.values[i] += norm * std::exp(-0.5 * dx * dx / var);
            }
        } else {
            for (int ix = 0; ix < n; ++ix) {
                const double dx = g.coord(ix) - b.center[0];
                for (int iy = 0; iy < n; ++iy) {
                    const double dy = g.coord(iy) - b.center[1];
                    out.values[g.at(ix, iy)] += norm * std::exp(-0.5 * (dx * dx + dy * dy) / var);
                }
            }
        }
    }
    return out;
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double vol = f.grid.cell_volume();
    double sum = 0.0;
    if (p == 1.0) {
        for (double v : f.values) sum += std::abs(v);
        return sum * vol;
    }
    if (p == 2.0) {
        for (double v : f.values) sum += v * v;
        return std::sqrt(sum * vol);
    }
    for (double v : f.values) sum += std::pow(std::abs(v), p);
    return std::pow(sum * vol, 1.0 / p);
}

std::pair<double, double> mass_and_moment(const Field& f) {
    const Grid& g = f.grid;
    const double vol = g.cell_volume();
    const int n = g.points_per_dim;
    double mass = 0.0, moment = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            const double x = g.coord(i);
            mass += f.values[i];
            moment += x * x * f.values[i];
        }
    } else {
        for (int ix = 0; ix < n; ++ix) {
            const double x2 = g.coord(ix) * g.coord(ix);
            for (int iy = 0; iy < n; ++iy) {
                const double y = g.coord(iy);
                const double u = f.values[g.at(ix, iy)];
                mass += u;
                moment += (x2 + y * y) * u;
            }
        }
    }
    return {mass * vol, moment * vol};
}

double min_value(const Field& f) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : f.values) m = std::min(m, v);
    return m;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

Field coarsen_by_two(const Field& f) {
    const Grid& g = f.grid;
    if (g.points_per_dim < 16) throw std::invalid_argument("coarsen_by_two: grid too small");
    Grid cg = Grid::make(g.dim, g.half_length, g.points_per_dim / 2);
    Field out = Field::zeros(cg);
    out.time_tag = f.time_tag;
    const int n = cg.points_per_dim;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            out.values[i] = 0.5 * (f.values[2 * i] + f.values[2 * i + 1]);
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                out.values[cg.at(ix, iy)] =
                    0.25 * (f.values[g.at(2 * ix, 2 * iy)] + f.values[g.at(2 * ix + 1, 2 * iy)] +
                            f.values[g.at(2 * ix, 2 * iy + 1)] + f.values[g.at(2 * ix + 1, 2 * iy + 1)]);
    }
    return out;
}

double negativity_fraction(const Field& f) {
    const double peak = max_abs(f);
    if (peak == 0.0) return 0.0;
    return std::max(0.0, -min_value(f)) / peak;
}

bool is_density(const Field& f, double tol_factor) {
    return negativity_fraction(f) <= tol_factor;
}

double boundary_fraction(const Field& f) {
    const double peak = max_abs(f);
    if (peak == 0.0) return 0.0;
    const Grid& g = f.grid;
    const int n = g.points_per_dim;
    double edge = 0.0;
    if (g.dim == 1) {
        edge = std::max(std::abs(f.values[0]), std::abs(f.values[n - 1]));
    } else {
        for (int i = 0; i < n; ++i) {
            edge = std::max({edge, std::abs(f.values[g.at(0, i)]), std::abs(f.values[g.at(n - 1, i)]),
                             std::abs(f.values[g.at(i, 0)]), std::abs(f.values[g.at(i, n - 1)])});
        }
    }
    return edge / peak;
}

}  // namespace agg
