#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "agg/grid.hpp"
#include "agg/spectral.hpp"

namespace agg {

/// Raised when a kernel fails the radial blow-up hypothesis
/// sup_{0<s<=delta} s K'(s) <= -gamma < 0.
struct NotBlowupAdmissible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when the near-origin exponent of |K'| cannot be fitted.
struct IndeterminateClassification : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class KernelSign { Attractive, Repulsive };

/// K = 0: reduces the equation to pure heat flow.
struct ZeroKernel {};

/// K(x) = A exp(-|x|^2 / (2 sigma^2)); smooth, bounded gradient.
struct GaussianKernel {
    double amplitude = 1.0;
    double sigma = 1.0;
};

/// K(x) = exp(-sqrt(alpha) |x|); Lipschitz but not C^1 at the origin.
struct ExponentialKernel {
    double alpha = 1.0;
};

/// Fundamental solution of -Laplace + alpha; Fourier symbol 1/(|xi|^2+alpha).
struct BesselKernel {
    double alpha = 1.0;
    int dim = 2;
};

/// Fundamental solution of -Laplace; symbol 1/|xi|^2 with the zero mode set
/// to 0 (mean-free periodic convention).
struct NewtonianKernel {
    int dim = 2;
};

/// K(x) = c |x|^(beta - dim) with 1 < beta < dim.
struct PowerLawKernel {
    double beta = 1.5;
    double c = 1.0;
    int dim = 2;
};

/// Symbol -1/(|xi|^2 + 1) in 2D: the chemotaxis kernel with reversed sign.
struct RepulsiveBesselKernel {};

/// Tabulated radial profile (r, k, k') with strictly increasing r; linearly
/// interpolated, no Fourier symbol.
struct RadialTable {
    std::vector<double> r;
    std::vector<double> k;
    std::vector<double> k_prime;
};

struct CustomRadialKernel {
    std::shared_ptr<const RadialTable> table;
};

using KernelVariant = std::variant<ZeroKernel, GaussianKernel, ExponentialKernel, BesselKernel,
                                   NewtonianKernel, PowerLawKernel, RepulsiveBesselKernel,
                                   CustomRadialKernel>;

struct KernelSpec {
    KernelVariant variant;
    KernelSign sign = KernelSign::Attractive;

    static KernelSpec zero();
    static KernelSpec gaussian(double amplitude = 1.0, double sigma = 1.0);
    static KernelSpec exponential(double alpha = 1.0);
    static KernelSpec bessel(double alpha, int dim);
    static KernelSpec newtonian(int dim);
    static KernelSpec power_law(double beta, int dim, double c = 1.0);
    static KernelSpec repulsive_bessel();
    static KernelSpec custom_radial(RadialTable table);

    /// Dimension baked into the variant, if any.
    std::optional<int> bound_dim() const;
    std::string name() const;
};

/// Radial profile k(r), k'(r) plus the near-origin exponent a >= 0 with
/// |K'(r)| ~ r^-a (NaN when unknown, e.g. custom tables).
struct RadialProfile {
    std::function<double(double)> k;
    std::function<double(double)> k_prime;
    double near_origin_exponent = 0.0;

    /// Central-difference consistency check of k' against k at sample radii.
    bool validate(double rel_tol = 1e-6) const;
};

bool has_symbol(const KernelSpec& spec, int dim);
bool has_radial_profile(const KernelSpec& spec);

/// Fourier symbol at squared wavevector |xi|^2. Throws for variants without
/// a symbol in the given dimension.
double symbol(const KernelSpec& spec, int dim, double xi_sq);
RadialSymbol symbol_function(const KernelSpec& spec, int dim);
FourierField kernel_symbol_field(const KernelSpec& spec, const Grid& g);

/// K'(r) for r > 0.
double radial_derivative(const KernelSpec& spec, int dim, double r);
/// K(r) for r > 0.
double radial_value(const KernelSpec& spec, int dim, double r);
RadialProfile radial_profile(const KernelSpec& spec, int dim);

struct SingularityClass {
    enum class Verdict { Mild, StronglySingular, Bounded };
    Verdict verdict = Verdict::Mild;
    /// sup of exponents q' with grad K in L^q' near the origin (inf allowed).
    double qprime_sup = 0.0;
    /// Weak-space endpoint: grad K in L^(q',inf) at q' = n/a.
    double weak_qprime = 0.0;
    double near_origin_exponent = 0.0;
    double fit_residual = 0.0;
};

const char* to_string(SingularityClass::Verdict v);

/// Classify the kernel per the near-origin growth of |K'|: qprime_sup = n/a,
/// mild iff a < 1. The exponent comes from the variant when known analytically
/// and is otherwise least-squares fitted on log|K'(2^-j)|, j = 4..14; a fit
/// residual above 0.05 throws IndeterminateClassification.
SingularityClass classify(const KernelSpec& spec, int dim);

/// Least-squares exponent fit used by classify (exposed for testing):
/// returns (a, residual).
std::pair<double, double> fit_near_origin_exponent(const KernelSpec& spec, int dim);

struct OsgoodResult {
    bool finite = false;
    double value = 0.0;
};

/// Adaptive quadrature of the integral of 1/|k'(r)| over (0, 1]; requires k'
/// of one sign there. The finite flag reflects convergence of the improper
/// integral.
OsgoodResult osgood(const KernelSpec& spec, int dim);

struct BlowupParams {
    double delta = 0.0;
    double gamma = 0.0;
    double c_bar = 0.0;
};

/// Certify gamma = -sup_{(0,delta]} s K'(s) and c_bar = sup_{[delta,s_max]}
/// |s K'(s)|/s^2 by geometric sampling refined until stable to 1e-6.
/// Throws NotBlowupAdmissible when the first sup is >= 0.
BlowupParams blowup_params(const KernelSpec& spec, int dim, double delta, double s_max);

/// Mass threshold M_c = (2n + 4(c_bar + gamma/delta^2) I0) / gamma; any mass
/// strictly above it forces finite-time blow-up for admissible kernels.
double critical_mass(const BlowupParams& p, int dim, double I0);

struct KernelDecomposition {
    RadialSymbol k1_symbol;
    RadialSymbol k2_symbol;
    double k2_grad_inf_bound = 0.0;
};

/// Split K = K1 + K2 with distributional Laplacian of K1 nonnegative and
/// grad K2 bounded. Known for the repulsive Bessel kernel:
/// K1_hat = -1/|xi|^2, K2_hat = 1/(|xi|^2 (|xi|^2+1)).
KernelDecomposition decompose(const KernelSpec& spec);

/// ||grad K||_{L^q'} by radial quadrature, truncated at radius r_max
/// (the periodic surrogate of the whole-space norm for slowly decaying
/// kernels). Returns infinity when the near-origin integral diverges.
double grad_lq_norm(const KernelSpec& spec, int dim, double qprime, double r_max);

/// ||grad K||_inf = sup_r |K'(r)| (infinite for singular kernels).
double grad_sup_norm(const KernelSpec& spec, int dim);

}  // namespace agg
