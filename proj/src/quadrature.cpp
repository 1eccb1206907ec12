#include "agg/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace agg::quad {

namespace {

GaussRule compute_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Roots of P_n by Newton from the Chebyshev initial guess; symmetric pairs.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int points) {
    const GaussRule& rule = gauss_legendre(points);
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
        }
        total += 0.5 * width * sum;
    }
    return total;
}

ImproperResult integrate_to_zero(const std::function<double(double)>& f,
                                 double upper, int max_levels,
                                 double divergence_ratio) {
    ImproperResult out;
    std::vector<double> slices;
    slices.reserve(max_levels);
    double hi = upper;
    for (int j = 0; j < max_levels; ++j) {
        const double lo = hi * 0.5;
        slices.push_back(integrate(f, lo, hi, 2, 16));
        hi = lo;
    }
    for (double s : slices) out.value += s;
    // Look at how the last slices shrink. Geometric decay with ratio rho < 1
    // gives a finite tail estimate; anything else is treated as divergent.
    const int probe = 8;
    double rho_max = 0.0;
    for (int j = max_levels - probe; j < max_levels; ++j) {
        const double prev = std::abs(slices[j - 1]);
        const double cur = std::abs(slices[j]);
        if (prev == 0.0 && cur == 0.0) continue;
        rho_max = std::max(rho_max, prev > 0.0 ? cur / prev : 1.0);
    }
    if (rho_max >= divergence_ratio) {
        out.finite = false;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value += std::abs(slices.back()) * rho_max / (1.0 - rho_max);
    return out;
}

ImproperResult integrate_to_infinity(const std::function<double(double)>& f,
                                     double a, int max_levels) {
    if (a <= 0.0) throw std::invalid_argument("integrate_to_infinity: a must be positive");
    // r = a/u maps [a, inf) to (0, 1]; the u -> 0 endpoint carries the tail.
    auto g = [&](double u) {
        const double r = a / u;
        return f(r) * a / (u * u);
    };
    return integrate_to_zero(g, 1.0, max_levels);
}

double beta_function(double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("beta_function: arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace agg::quad
