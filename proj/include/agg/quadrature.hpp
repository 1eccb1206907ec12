#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace agg::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Rule of order n computed by Newton iteration on the Legendre polynomial.
const GaussRule& gauss_legendre(int n);

/// Integrate f over [a, b] with `panels` equal panels of an n-point rule.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 8, int points = 16);

/// Improper integral of f over (0, upper] where f may blow up at 0.
/// Sums dyadic slices [upper 2^-(j+1), upper 2^-j]; the tail is classified by
/// the ratio of successive slice contributions. A ratio that fails to decay
/// marks a divergent integral.
struct ImproperResult {
    double value = 0.0;
    bool finite = true;
};
ImproperResult integrate_to_zero(const std::function<double(double)>& f,
                                 double upper, int max_levels = 48,
                                 double divergence_ratio = 0.9);

/// Improper integral of f over [a, inf); f must decay. Maps the tail through
/// r = a/u and detects divergence the same way as integrate_to_zero.
ImproperResult integrate_to_infinity(const std::function<double(double)>& f,
                                     double a, int max_levels = 48);

/// Euler beta function B(a, b) for a, b > 0.
double beta_function(double a, double b);

}  // namespace agg::quad
