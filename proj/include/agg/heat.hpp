#pragma once

#include <map>
#include <span>

#include "agg/grid.hpp"
#include "agg/spectral.hpp"

namespace agg {

/// G(x, t) = (4 pi t)^(-n/2) exp(-|x|^2 / (4t)); n = x.size(), t > 0.
double heat_kernel_value(std::span<const double> x, double t);

/// Heat propagator as the Fourier multiplier exp(-|xi|^2 t); t = 0 returns
/// the field unchanged. Mass is preserved exactly (zero-mode multiplier 1).
Field apply_heat(const Field& f, double t);
Field apply_heat(SpectralWorkspace& ws, const Field& f, double t);

/// Analytic ||G(., t)||_{L^q} = (4 pi t)^(-(n/2)(1-1/q)) q^(-n/(2q));
/// q = infinity gives (4 pi t)^(-n/2).
double heat_lq_norm(double t, double q, int n);

/// Analytic ||grad G(., t)||_{L^1} = t^(-1/2) Gamma((n+1)/2) / Gamma(n/2).
double grad_heat_l1_norm(double t, int n);

/// Constant C(p, q) in ||G(., t) * f||_p <= C t^(-(n/2)(1/q - 1/p)) ||f||_q
/// for q <= p, from Young's inequality: C = ||G(., 1)||_m with
/// 1/m = 1 + 1/p - 1/q. C(q, q) = 1.
double heat_constant(double p, double q, int n);

/// Gradient analogue: constant in ||grad G(., t) * f||_p <=
/// C t^(-(n/2)(1/q - 1/p) - 1/2) ||f||_q, equal to ||grad G(., 1)||_m.
double grad_heat_constant(double p, double q, int n);

/// Cached table of smoothing constants for one dimension.
struct HeatConstants {
    int dim = 1;

    static HeatConstants standard(int n);

    double at(double p, double q) const;
    double grad_at(double p, double q) const;

    std::map<std::pair<double, double>, double> table;
    std::map<std::pair<double, double>, double> grad_table;
};

}  // namespace agg
