#include "agg/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "agg/quadrature.hpp"
#include "agg/spectral.hpp"

namespace agg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Trajectory kept in Fourier space; heat extension between slices is a
/// plain multiplier there.
struct SpectralTrajectory {
    std::vector<double> times;
    std::vector<FourierField> hats;

    void hat_at(const Grid& g, double s, FourierField& out) const {
        auto it = std::upper_bound(times.begin(), times.end(), s);
        std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
        const double h = std::max(0.0, s - times[k]);
        const auto& src = hats[k].modes;
        for (std::size_t i = 0; i < src.size(); ++i)
            out.modes[i] = src[i] * std::exp(-wavevector_sq(g, i) * h);
    }
};

struct DuhamelEvaluator {
    SpectralWorkspace ws;
    Grid grid;
    FourierField symbol;
    PicardOptions opts;

    DuhamelEvaluator(const Grid& g, const KernelSpec& kernel, const PicardOptions& o)
        : ws(g), grid(g), symbol(kernel_symbol_field(kernel, g)), opts(o) {}

    /// Accumulate B(u, v)(t) in Fourier space with a fixed sigma-node budget.
    FourierField bilinear_hat_fixed(const SpectralTrajectory& u, const SpectralTrajectory& v,
                                    double t, int total_nodes) {
        FourierField acc = FourierField::zeros(grid);
        if (t <= 0.0) return acc;
        const int per_panel = 8;
        const int panels = std::max(1, total_nodes / per_panel);
        const quad::GaussRule& rule = quad::gauss_legendre(per_panel);
        const int n = grid.points_per_dim;

        FourierField uh = FourierField::zeros(grid);
        FourierField vh = FourierField::zeros(grid);
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double lo = static_cast<double>(pnl) / panels;
            const double hi = static_cast<double>(pnl + 1) / panels;
            for (int q = 0; q < per_panel; ++q) {
                const double sigma = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[q];
                const double wq = 0.5 * (hi - lo) * rule.weights[q];
                const double s = t * sigma * sigma;
                const double jac = 2.0 * t * sigma;  // ds/dsigma
                u.hat_at(grid, s, uh);
                v.hat_at(grid, s, vh);

                Field ur = ws.inverse(uh);
                for (int axis = 0; axis < grid.dim; ++axis) {
                    FourierField wh = FourierField::zeros(grid);
                    for (std::size_t i = 0; i < wh.modes.size(); ++i) {
                        const int k = grid.dim == 1 ? static_cast<int>(i)
                                                    : (axis == 0 ? static_cast<int>(i) / n
                                                                 : static_cast<int>(i) % n);
                        if (signed_mode(k, n) == -n / 2) continue;
                        wh.modes[i] = std::complex<double>(0.0, wavevector(grid, k)) *
                                      symbol.modes[i] * vh.modes[i];
                    }
                    Field vel = ws.inverse(wh);
                    for (std::size_t i = 0; i < wh.modes.size(); ++i)
                        wh.modes[i] = ur.values[i] * vel.values[i];
                    ws.forward_raw(wh.modes.data());
                    // minus divergence of the heat-propagated product
                    for (std::size_t i = 0; i < acc.modes.size(); ++i) {
                        const int k = grid.dim == 1 ? static_cast<int>(i)
                                                    : (axis == 0 ? static_cast<int>(i) / n
                                                                 : static_cast<int>(i) % n);
                        if (signed_mode(k, n) == -n / 2) continue;
                        const double damp = std::exp(-wavevector_sq(grid, i) * (t - s));
                        acc.modes[i] -= wq * jac * damp *
                                        std::complex<double>(0.0, wavevector(grid, k)) * wh.modes[i];
                    }
                }
            }
        }
        return acc;
    }

    FourierField bilinear_hat(const SpectralTrajectory& u, const SpectralTrajectory& v, double t) {
        FourierField coarse = bilinear_hat_fixed(u, v, t, opts.base_quad_nodes);
        int nodes = opts.base_quad_nodes * 2;
        while (true) {
            FourierField fine = bilinear_hat_fixed(u, v, t, nodes);
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < fine.modes.size(); ++i) {
                diff = std::max(diff, std::abs(fine.modes[i] - coarse.modes[i]));
                scale = std::max(scale, std::abs(fine.modes[i]));
            }
            if (diff <= opts.quad_tol * std::max(1.0, scale) || nodes >= opts.max_quad_nodes)
                return fine;
            coarse = std::move(fine);
            nodes *= 2;
        }
    }
};

std::vector<double> slice_times(double T, int slices) {
    std::vector<double> times(slices + 1);
    for (int i = 0; i <= slices; ++i) {
        const double f = static_cast<double>(i) / slices;
        times[i] = T * f * f;
    }
    return times;
}

double slice_weight(double t, Regime regime, double q, int n) {
    if (regime == Regime::Strong || q == 1.0) return 1.0;
    return std::pow(t, 0.5 * n * (1.0 - 1.0 / q));
}

double weighted_norm_slices(const std::vector<double>& times, const std::vector<Field>& slices,
                            Regime regime, double q, int n) {
    double sup_l1 = 0.0, sup_lq = 0.0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        sup_l1 = std::max(sup_l1, lp_norm(slices[i], 1.0));
        sup_lq = std::max(sup_lq, slice_weight(times[i], regime, q, n) * lp_norm(slices[i], q));
    }
    return sup_l1 + sup_lq;
}

}  // namespace

const char* to_string(Regime r) { return r == Regime::Mild ? "mild" : "strong"; }

Field Trajectory::value_at(double s) const {
    if (times.empty()) throw std::invalid_argument("Trajectory: empty");
    if (s < times.front() - 1e-14 || s > times.back() + 1e-12)
        throw std::invalid_argument("Trajectory: time outside support");
    auto it = std::upper_bound(times.begin(), times.end(), s);
    std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    const double h = std::max(0.0, s - times[k]);
    return h == 0.0 ? slices[k] : apply_heat(slices[k], h);
}

double weighted_norm(const Trajectory& traj, Regime regime, double q) {
    if (traj.slices.empty()) return 0.0;
    return weighted_norm_slices(traj.times, traj.slices, regime, q, traj.slices.front().grid.dim);
}

LocalExistenceEstimate local_existence_time(Regime regime, double u0_l1, double u0_lq,
                                            double grad_k_norm, double q, int n) {
    if (u0_l1 < 0.0 || u0_lq < 0.0 || grad_k_norm < 0.0)
        throw std::invalid_argument("local_existence_time: norms must be nonnegative");
    if (!(q >= 1.0)) throw std::invalid_argument("local_existence_time: q must be >= 1");
    const double q_crit = n == 1 ? kInf : static_cast<double>(n) / (n - 1);
    LocalExistenceEstimate est;
    est.regime = regime;
    est.q = q;
    est.qprime = q == 1.0 ? kInf : q / (q - 1.0);
    const double grad_g_l1 = grad_heat_l1_norm(1.0, n);  // ||grad G(.,1)||_1

    if (regime == Regime::Mild) {
        if (q >= q_crit)
            throw std::invalid_argument("local_existence_time: mild regime needs q < n/(n-1)");
        const double theta = 0.5 * (1.0 - n * (1.0 - 1.0 / q));
        const double beta1 = quad::beta_function(1.0 - 0.5 * n * (1.0 - 1.0 / q), 0.5);
        const double beta2 = quad::beta_function(1.0 - n * (1.0 - 1.0 / q), 0.5);
        const double c1 = grad_g_l1 * (beta1 + beta2);
        const double cq1 = heat_constant(q, 1.0, n);
        const double denom = 8.0 * c1 * grad_k_norm * u0_l1 * (1.0 + cq1);
        est.T = denom > 0.0 ? std::pow(1.0 / denom, 1.0 / theta) : kInf;
        est.constants_ledger = {{"C1", c1},
                                {"C_q1", cq1},
                                {"beta_value", beta1},
                                {"beta_value_lq", beta2},
                                {"theta", theta},
                                {"grad_k_norm", grad_k_norm},
                                {"u0_l1", u0_l1},
                                {"u0_lq", u0_lq}};
    } else {
        if (q < q_crit && n > 1)
            throw std::invalid_argument("local_existence_time: strong regime needs q >= n/(n-1)");
        const double c = 2.0 * grad_g_l1;
        const double denom = 8.0 * c * grad_k_norm * (u0_l1 + u0_lq);
        est.T = denom > 0.0 ? 1.0 / (denom * denom) : kInf;
        est.constants_ledger = {{"C", c},
                                {"grad_k_norm", grad_k_norm},
                                {"u0_l1", u0_l1},
                                {"u0_lq", u0_lq}};
    }
    return est;
}

Field bilinear_term(const Trajectory& u, const Trajectory& v, double t, const KernelSpec& kernel,
                    const PicardOptions& opts) {
    if (u.slices.empty() || v.slices.empty()) throw std::invalid_argument("bilinear_term: empty trajectory");
    if (!(u.slices.front().grid == v.slices.front().grid))
        throw std::invalid_argument("bilinear_term: grid mismatch");
    if (t < 0.0 || t > u.times.back() + 1e-12 || t > v.times.back() + 1e-12)
        throw std::invalid_argument("bilinear_term: t outside trajectory support");
    const Grid& g = u.slices.front().grid;
    DuhamelEvaluator eval(g, kernel, opts);
    SpectralTrajectory su, sv;
    su.times = u.times;
    sv.times = v.times;
    for (const Field& f : u.slices) su.hats.push_back(eval.ws.forward(f));
    for (const Field& f : v.slices) sv.hats.push_back(eval.ws.forward(f));
    FourierField bh = eval.bilinear_hat(su, sv, t);
    Field out = eval.ws.inverse(bh);
    out.time_tag = t;
    return out;
}

PicardState picard_solve(const Field& u0, const KernelSpec& kernel, double T, double tol,
                         int max_iter, const PicardOptions& opts) {
    if (!(T > 0.0) || std::isinf(T)) throw std::invalid_argument("picard_solve: T must be positive and finite");
    if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
    const Grid& g = u0.grid;
    const int n = g.dim;
    DuhamelEvaluator eval(g, kernel, opts);

    const std::vector<double> times = slice_times(T, opts.slices);
    const std::size_t m = times.size();

    // heat part y_i = G(., t_i) * u0, all from one forward transform
    FourierField u0h = eval.ws.forward(u0);
    std::vector<FourierField> y(m, FourierField::zeros(g));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < u0h.modes.size(); ++j)
            y[i].modes[j] = u0h.modes[j] * std::exp(-wavevector_sq(g, j) * times[i]);

    auto realize = [&](const std::vector<FourierField>& hats) {
        std::vector<Field> out;
        out.reserve(hats.size());
        for (std::size_t i = 0; i < hats.size(); ++i) {
            Field f = eval.ws.inverse(hats[i]);
            f.time_tag = times[i];
            out.push_back(std::move(f));
        }
        return out;
    };
    auto distance = [&](const std::vector<FourierField>& a, const std::vector<FourierField>& b) {
        std::vector<Field> diffs;
        diffs.reserve(m);
        FourierField d = FourierField::zeros(g);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < d.modes.size(); ++j)
                d.modes[j] = a[i].modes[j] - b[i].modes[j];
            diffs.push_back(eval.ws.inverse(d));
        }
        return weighted_norm_slices(times, diffs, opts.regime, opts.q, n);
    };
    auto apply_map = [&](const std::vector<FourierField>& cur) {
        SpectralTrajectory traj;
        traj.times = times;
        traj.hats = cur;
        std::vector<FourierField> next(m, FourierField::zeros(g));
        for (std::size_t i = 0; i < m; ++i) {
            if (times[i] == 0.0) {
                next[i] = y[i];
                continue;
            }
            FourierField bh = eval.bilinear_hat(traj, traj, times[i]);
            for (std::size_t j = 0; j < bh.modes.size(); ++j)
                next[i].modes[j] = y[i].modes[j] + bh.modes[j];
        }
        return next;
    };

    PicardState state;
    std::vector<FourierField> prev(m, FourierField::zeros(g));  // zero trajectory
    std::vector<FourierField> cur = y;                          // first map application
    double d_prev = distance(cur, prev);
    state.iterate_index = 1;
    state.final_increment = d_prev;
    bool converged = d_prev < tol;

    while (!converged && state.iterate_index < max_iter) {
        std::vector<FourierField> next = apply_map(cur);
        const double d = distance(next, cur);
        if (!std::isfinite(d)) {  // diverging iteration, stop before overflow spreads
            state.contraction_ratios.push_back(kInf);
            state.converged = false;
            state.final_increment = d;
            state.residual = kInf;
            state.trajectory.times = times;
            state.trajectory.slices = realize(cur);
            state.weighted_norm = weighted_norm_slices(times, state.trajectory.slices, opts.regime, opts.q, n);
            return state;
        }
        if (d_prev > 0.0) state.contraction_ratios.push_back(d / d_prev);
        prev = std::move(cur);
        cur = std::move(next);
        d_prev = d;
        ++state.iterate_index;
        state.final_increment = d;
        converged = d < tol;
    }
    state.converged = converged;

    // one extra application measures the fixed-point residual
    std::vector<FourierField> image = apply_map(cur);
    state.residual = distance(image, cur);

    state.trajectory.times = times;
    state.trajectory.slices = realize(cur);
    state.weighted_norm = weighted_norm_slices(times, state.trajectory.slices, opts.regime, opts.q, n);
    return state;
}

double estimate_weak_young_constant(int n, double qprime, double k, double p) {
    if (n < 2) throw std::invalid_argument("estimate_weak_young_constant: n must be >= 2");
    const double a = n / qprime;  // kernel |x|^-a
    if (!(a > 0.0) || !(a < n))
        throw std::invalid_argument("estimate_weak_young_constant: need 0 < n/q' < n");
    // Fourier transform of |x|^-a: c |xi|^(a-n)
    const double c_ft = std::pow(2.0, n - a) * std::pow(M_PI, 0.5 * n) *
                        std::tgamma(0.5 * (n - a)) / std::tgamma(0.5 * a);
    const double nu = 0.5 * n - 1.0;
    const double rho_max = 20.0;

    // (g * f)(r) by radial Fourier inversion, f a standard Gaussian
    auto convolved = [&](double r) {
        auto integrand = [&](double rho) {
            const double gf = c_ft * std::pow(rho, a - n) * std::pow(2.0 * M_PI, 0.5 * n) *
                              std::exp(-0.5 * rho * rho);
            return gf * std::cyl_bessel_j(nu, r * rho) * std::pow(rho, 0.5 * n);
        };
        const int panels = std::max(32, static_cast<int>(r * rho_max / M_PI) + 1);
        const double head = quad::integrate(integrand, 1e-12, 0.5, 8, 16);
        const double body = quad::integrate(integrand, 0.5, rho_max, panels, 8);
        return std::pow(2.0 * M_PI, -0.5 * n) * std::pow(r, 1.0 - 0.5 * n) * (head + body);
    };

    const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    auto norm_integrand = [&](double r) {
        return area * std::pow(std::abs(convolved(r)), k) * std::pow(r, n - 1.0);
    };
    const double r_cut = 30.0;
    double norm_k = quad::integrate(norm_integrand, 1e-4, r_cut, 60, 8);
    // head: the convolution is bounded near 0
    norm_k += norm_integrand(1e-4) * 1e-4 / n;
    // tail: g*f ~ (2 pi)^(n/2) r^-a since f has mass (2 pi)^(n/2)
    const double tail_coef = area * std::pow(std::pow(2.0 * M_PI, 0.5 * n), k);
    norm_k += tail_coef * std::pow(r_cut, n - a * k) / (a * k - n);
    const double conv_norm = std::pow(norm_k, 1.0 / k);

    const double v_n = std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    const double g_weak = std::pow(v_n, 1.0 / qprime);
    const double f_lp = std::pow(2.0 * M_PI / p, 0.5 * n / p);
    return 2.0 * conv_norm / (g_weak * f_lp);
}

QStarReport q_star_smallness(int n, double qprime, double u0_qstar_norm, double kernel_weak_norm) {
    if (n < 2) throw std::invalid_argument("q_star_smallness: requires n >= 2");
    if (!(qprime > 1.0) || !(qprime <= n))
        throw std::invalid_argument("q_star_smallness: qprime must lie in (1, n]");
    QStarReport report;
    report.q_star = n / (n + 1.0 - n / qprime);

    // Auxiliary exponent p from the open interval the proof allows; it closes
    // up exactly at q' = n.
    const double p_lo = std::max(report.q_star, 1.0 / (1.0 - 1.0 / (2.0 * qprime)));
    const double p_hi = 1.0 / (1.0 - 1.0 / qprime + 1.0 / (2.0 * n));
    if (!(p_lo < p_hi)) {
        report.degenerate = true;
        report.small_enough = false;
        return report;
    }
    const double p = 0.5 * (p_lo + p_hi);
    report.p_used = p;
    const double qs = report.q_star;
    const double r = 1.0 / (2.0 / p + 1.0 / qprime - 1.0);

    const double a = 1.0 - n * (1.0 / qs - 1.0 / p);
    const double b1 = 0.5 * (1.0 - n * (1.0 / r - 1.0 / qs));
    const double b2 = 0.5 * (1.0 - n * (1.0 / r - 1.0 / p));
    if (!(r > 1.0) || !(r <= qs + 1e-12) || !(a > 0.0) || !(b1 > 0.0) || !(b2 > 0.0))
        throw std::logic_error("q_star_smallness: traced exponents left the admissible range");

    const double k_exp = 1.0 / (1.0 / p + 1.0 / qprime - 1.0);
    report.hls_constant = estimate_weak_young_constant(n, qprime, k_exp, p);
    const double lem = report.hls_constant * kernel_weak_norm;
    report.eta = lem * (grad_heat_constant(qs, r, n) * quad::beta_function(a, b1) +
                        grad_heat_constant(p, r, n) * quad::beta_function(a, b2));
    report.c3 = 1.0 + heat_constant(p, qs, n);
    report.bound_used = 1.0 / (4.0 * report.eta * report.c3);
    report.small_enough = u0_qstar_norm < report.bound_used;
    return report;
}

}  // namespace agg
