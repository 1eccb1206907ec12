#pragma once

#include <map>
#include <string>
#include <vector>

#include "agg/grid.hpp"
#include "agg/heat.hpp"
#include "agg/kernels.hpp"

namespace agg {

enum class Regime { Mild, Strong };

const char* to_string(Regime r);

/// Explicit local-existence horizon from the contraction smallness condition,
/// with every traced constant exposed.
struct LocalExistenceEstimate {
    Regime regime = Regime::Mild;
    double q = 1.0;
    double qprime = 0.0;  // conjugate exponent; inf for q = 1
    double T = 0.0;       // may be inf
    std::map<std::string, double> constants_ledger;
};

/// Mild regime (q in [1, n/(n-1)), q' > n): T solves
///   4 C1 T^theta ||grad K||_{q'} ||u0||_1 (1 + C(q,1)) = 1/2,
/// theta = (1 - n(1 - 1/q))/2, with C1 traced through the heat estimates and
/// the two beta-function integrals. Strong regime (q >= n/(n-1)): T =
/// [8 C ||grad K||_{q'} (||u0||_1 + ||u0||_q)]^-2 with C = 2 ||grad G(.,1)||_1.
/// The margin 1/2 leaves contraction slack downstream. Zero kernel norm or
/// zero data give T = inf. In the mild regime T depends only on conserved
/// quantities (the L^1 norm and the kernel norm), so the same horizon
/// re-applies from any later state and nonnegative solutions continue
/// globally; in the strong regime T shrinks with the L^q norm and offers no
/// such continuation.
LocalExistenceEstimate local_existence_time(Regime regime, double u0_l1, double u0_lq,
                                            double grad_k_norm, double q, int n);

/// Trajectory of field slices on [0, T]; values between slices extend the
/// nearest earlier slice with the heat semigroup (exact for the linear part).
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> slices;

    Field value_at(double s) const;
};

struct PicardOptions {
    Regime regime = Regime::Mild;
    double q = 1.0;           // L^q component of the weighted norm
    int slices = 48;          // stored time slices (quadratically clustered at 0)
    int base_quad_nodes = 32;
    int max_quad_nodes = 128;
    double quad_tol = 1e-8;
};

/// B(u, v)(t) = -integral over [0,t] of grad G(., t-s) * (u (grad K * v))(s) ds.
/// The substitution s = t sigma^2 regularizes the weight at s = 0; composite
/// Gauss-Legendre in sigma with node doubling until self-convergence.
Field bilinear_term(const Trajectory& u, const Trajectory& v, double t, const KernelSpec& kernel,
                    const PicardOptions& opts = {});

struct PicardState {
    int iterate_index = 0;
    Trajectory trajectory;
    std::vector<double> contraction_ratios;
    double weighted_norm = 0.0;
    bool converged = false;  // false reports a non-contractive iteration
    double final_increment = 0.0;
    double residual = 0.0;  // || u - (G*u0 + B(u,u)) || in the weighted norm
};

/// Picard iteration for u = G*u0 + B(u, u) from the zero trajectory; stops
/// when the weighted-norm increment drops below tol. Ratios are
/// ||u_{m+1}-u_m|| / ||u_m-u_{m-1}||.
PicardState picard_solve(const Field& u0, const KernelSpec& kernel, double T, double tol,
                         int max_iter, const PicardOptions& opts = {});

/// sup ||u||_1 + sup t^{(n/2)(1-1/q)} ||u||_q (Mild) or sup ||u||_1 +
/// sup ||u||_q (Strong) over the slices.
double weighted_norm(const Trajectory& traj, Regime regime, double q);

struct QStarReport {
    double q_star = 0.0;
    bool small_enough = false;
    double bound_used = 0.0;  // 1 / (4 eta C3); 0 when the trace degenerates
    double p_used = 0.0;
    double eta = 0.0;
    double c3 = 0.0;
    double hls_constant = 0.0;
    bool empirical = true;    // the weak-Young constant is estimated numerically
    bool degenerate = false;  // q' = n leaves no admissible auxiliary exponent
};

/// Small-data global-existence exponent q* = n /(n + 1 - n/q') and the traced
/// smallness threshold on ||u0||_{q*}. Requires n >= 2 and q' in (1, n]. The
/// threshold assumes a unit weak-L^{q'} kernel norm unless kernel_weak_norm
/// is given.
QStarReport q_star_smallness(int n, double qprime, double u0_qstar_norm,
                             double kernel_weak_norm = 1.0);

/// Numerical estimate (with a factor-2 safety margin) of the constant in
/// || grad K * f ||_k <= C || grad K ||_{q',inf} || f ||_p, probed on the
/// canonical pair g = |x|^{-n/q'}, f = Gaussian via Fourier-Bessel quadrature.
double estimate_weak_young_constant(int n, double qprime, double k, double p);

}  // namespace agg
