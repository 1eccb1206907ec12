#include "agg/heat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace agg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// ||G(., 1)||_{L^m} on R^n.
double heat_kernel_lm(double m, int n) {
    if (std::isinf(m)) return std::pow(4.0 * M_PI, -0.5 * n);
    return std::pow(4.0 * M_PI, -0.5 * n * (1.0 - 1.0 / m)) * std::pow(m, -0.5 * n / m);
}

/// ||grad G(., 1)||_{L^m} on R^n.
double grad_heat_kernel_lm(double m, int n) {
    if (std::isinf(m)) {
        // sup (r/2) G(r, 1) attained at r = sqrt(2)
        return std::pow(4.0 * M_PI, -0.5 * n) * std::exp(-0.5) / std::sqrt(2.0);
    }
    // integral of (r/2)^m G(r,1)^m over R^n in polar coordinates
    const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    const double log_radial = std::lgamma(0.5 * (m + n)) - std::log(2.0) +
                              0.5 * (m + n) * std::log(4.0 / m);
    const double log_total = -m * std::log(2.0) - 0.5 * n * m * std::log(4.0 * M_PI) +
                             std::log(area) + log_radial;
    return std::exp(log_total / m);
}

double conjugate_m(double p, double q) {
    // 1/m = 1 + 1/p - 1/q
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    const double inv_m = 1.0 + inv_p - inv_q;
    if (inv_m < -1e-12 || inv_m > 1.0 + 1e-12)
        throw std::invalid_argument("heat constant: need 1 <= q <= p");
    if (inv_m <= 1e-15) return kInf;
    return 1.0 / inv_m;
}

}  // namespace

double heat_kernel_value(std::span<const double> x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_kernel_value: t must be positive");
    const int n = static_cast<int>(x.size());
    double xsq = 0.0;
    for (double xi : x) xsq += xi * xi;
    return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-xsq / (4.0 * t));
}

Field apply_heat(SpectralWorkspace& ws, const Field& f, double t) {
    if (t < 0.0) throw std::invalid_argument("apply_heat: t must be nonnegative");
    if (t == 0.0) return f;
    FourierField fh = ws.forward(f);
    const Grid& g = f.grid;
    for (std::size_t i = 0; i < fh.modes.size(); ++i)
        fh.modes[i] *= std::exp(-wavevector_sq(g, i) * t);
    Field out = ws.inverse(fh);
    out.time_tag = f.time_tag + t;
    return out;
}

Field apply_heat(const Field& f, double t) {
    if (t == 0.0) return f;
    SpectralWorkspace ws(f.grid);
    return apply_heat(ws, f, t);
}

double heat_lq_norm(double t, double q, int n) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_lq_norm: t must be positive");
    if (!(q >= 1.0)) throw std::invalid_argument("heat_lq_norm: q must be >= 1");
    if (std::isinf(q)) return std::pow(4.0 * M_PI * t, -0.5 * n);
    return std::pow(4.0 * M_PI * t, -0.5 * n * (1.0 - 1.0 / q)) * std::pow(q, -0.5 * n / q);
}

double grad_heat_l1_norm(double t, int n) {
    if (!(t > 0.0)) throw std::invalid_argument("grad_heat_l1_norm: t must be positive");
    return std::tgamma(0.5 * (n + 1)) / std::tgamma(0.5 * n) / std::sqrt(t);
}

double heat_constant(double p, double q, int n) { return heat_kernel_lm(conjugate_m(p, q), n); }

double grad_heat_constant(double p, double q, int n) {
    return grad_heat_kernel_lm(conjugate_m(p, q), n);
}

HeatConstants HeatConstants::standard(int n) {
    HeatConstants hc;
    hc.dim = n;
    const double exps[] = {1.0, 1.5, 2.0, 3.0, 4.0, kInf};
    for (double q : exps) {
        for (double p : exps) {
            const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
            const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
            if (inv_q < inv_p) continue;  // need q <= p
            hc.table[{p, q}] = heat_constant(p, q, n);
            hc.grad_table[{p, q}] = grad_heat_constant(p, q, n);
        }
    }
    return hc;
}

double HeatConstants::at(double p, double q) const {
    auto it = table.find({p, q});
    return it != table.end() ? it->second : heat_constant(p, q, dim);
}

double HeatConstants::grad_at(double p, double q) const {
    auto it = grad_table.find({p, q});
    return it != grad_table.end() ? it->second : grad_heat_constant(p, q, dim);
}

}  // namespace agg
