#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "agg/kernels.hpp"
#include "agg/quadrature.hpp"
#include "agg/spectral.hpp"

using namespace agg;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Independent ascending-series oracle for the modified Bessel functions,
// accurate for moderate arguments.
double bessel_i0(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= (x * x / 4.0) / (k * k);
        sum += term;
    }
    return sum;
}

double bessel_k0_series(double x) {
    const double euler = 0.57721566490153286;
    double sum = 0.0, term = 1.0, hk = 0.0;
    for (int k = 1; k < 40; ++k) {
        term *= (x * x / 4.0) / (k * k);
        hk += 1.0 / k;
        sum += term * hk;
    }
    return -(std::log(0.5 * x) + euler) * bessel_i0(x) + sum;
}

double bessel_k1_series(double x) {
    const double euler = 0.57721566490153286;
    double i1 = 0.0, term = 0.5 * x;
    for (int k = 0; k < 40; ++k) {
        if (k > 0) term *= (x * x / 4.0) / (k * (k + 1.0));
        i1 += term;
    }
    double sum = 0.0;
    double t = 1.0;
    double h = 0.0;
    for (int k = 0; k < 40; ++k) {
        if (k > 0) {
            t *= (x * x / 4.0) / (k * (k + 1.0));
            h += 1.0 / k;
        }
        const double psi1 = -euler + h;                    // psi(k+1)
        const double psi2 = -euler + h + 1.0 / (k + 1.0);  // psi(k+2)
        sum += (psi1 + psi2) * t;
    }
    return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * sum;
}

}  // namespace

TEST_CASE("symbol values on the catalog") {
    CHECK(symbol(KernelSpec::bessel(1.0, 2), 2, 0.0) == doctest::Approx(1.0));
    CHECK(symbol(KernelSpec::repulsive_bessel(), 2, 0.0) == doctest::Approx(-1.0));
    CHECK(symbol(KernelSpec::newtonian(2), 2, 4.0) == doctest::Approx(0.25));
    CHECK(symbol(KernelSpec::newtonian(2), 2, 0.0) == 0.0);
    CHECK_THROWS(symbol(KernelSpec::exponential(1.0), 2, 1.0));
    CHECK_THROWS(symbol(KernelSpec::custom_radial(RadialTable{{0.5, 1.0}, {1.0, 0.5}, {-1.0, -1.0}}), 1, 1.0));
}

TEST_CASE("gaussian symbol is the closed-form transform") {
    // FT of A exp(-|x|^2/(2 s^2)) is A (2 pi s^2)^(n/2) exp(-s^2 |xi|^2 / 2)
    const KernelSpec k = KernelSpec::gaussian(2.0, 0.7);
    const double s2 = 0.49;
    for (double xi : {0.0, 0.5, 2.0}) {
        CHECK(symbol(k, 2, xi * xi) ==
              doctest::Approx(2.0 * (2.0 * M_PI * s2) * std::exp(-0.5 * s2 * xi * xi)).epsilon(1e-14));
    }
}

TEST_CASE("radial derivatives") {
    // newtonian in 2D: K = -log(r)/(2 pi), K' = -1/(2 pi r)
    CHECK(radial_derivative(KernelSpec::newtonian(2), 2, 1.0) == doctest::Approx(-1.0 / (2.0 * M_PI)));
    CHECK(radial_derivative(KernelSpec::exponential(1.0), 1, 2.0) == doctest::Approx(-std::exp(-2.0)));
    CHECK_THROWS(radial_derivative(KernelSpec::newtonian(2), 2, 0.0));
    CHECK_THROWS(radial_derivative(KernelSpec::newtonian(2), 2, -1.0));

    // r K'(r) -> -1/(2 pi) for the 2D Bessel kernel
    const KernelSpec bes = KernelSpec::bessel(1.0, 2);
    const double r = 1e-4;
    CHECK(r * radial_derivative(bes, 2, r) == doctest::Approx(-1.0 / (2.0 * M_PI)).epsilon(1e-3));
}

TEST_CASE("bessel kernel profile matches the series oracle") {
    const KernelSpec bes = KernelSpec::bessel(2.0, 2);
    const double sa = std::sqrt(2.0);
    for (double r : {0.01, 0.1, 0.5, 1.0}) {
        CHECK(radial_value(bes, 2, r) ==
              doctest::Approx(bessel_k0_series(sa * r) / (2.0 * M_PI)).epsilon(1e-9));
        CHECK(radial_derivative(bes, 2, r) ==
              doctest::Approx(-sa * bessel_k1_series(sa * r) / (2.0 * M_PI)).epsilon(1e-9));
    }
}

TEST_CASE("newtonian symbol inverts the negative laplacian on the torus") {
    // -Laplace (K * f) = f - mean(f) under the mean-free convention
    Grid g = Grid::make(2, 4.0, 32);
    Field f = sampled(g, [](double x, double y) { return std::exp(-x * x - y * y) + std::sin(x); });
    FourierField sym = kernel_symbol_field(KernelSpec::newtonian(2), g);
    Field conv = spectral_convolve(f, sym);
    Field lap = spectral_laplacian(conv);
    const double mean = mass_and_moment(f).first / std::pow(2.0 * g.half_length, 2);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(-lap.values[i] == doctest::Approx(f.values[i] - mean).epsilon(1e-9));
}

TEST_CASE("radial profiles differentiate consistently") {
    for (const KernelSpec& k : {KernelSpec::gaussian(1.3, 0.9), KernelSpec::exponential(2.0),
                                KernelSpec::bessel(1.0, 2), KernelSpec::newtonian(2),
                                KernelSpec::power_law(1.5, 2), KernelSpec::repulsive_bessel()}) {
        CAPTURE(k.name());
        CHECK(radial_profile(k, 2).validate(1e-6));
    }
}

TEST_CASE("classification table") {
    SingularityClass c = classify(KernelSpec::gaussian(), 2);
    CHECK(c.verdict == SingularityClass::Verdict::Mild);
    CHECK(c.near_origin_exponent == 0.0);
    CHECK(std::isinf(c.qprime_sup));

    c = classify(KernelSpec::exponential(1.0), 1);
    CHECK(c.verdict == SingularityClass::Verdict::Mild);
    CHECK(std::isinf(c.qprime_sup));

    c = classify(KernelSpec::bessel(1.0, 2), 2);
    CHECK(c.verdict == SingularityClass::Verdict::StronglySingular);
    CHECK(c.qprime_sup == doctest::Approx(2.0));

    c = classify(KernelSpec::bessel(1.0, 1), 1);
    CHECK(c.verdict == SingularityClass::Verdict::Mild);

    c = classify(KernelSpec::newtonian(2), 2);
    CHECK(c.verdict == SingularityClass::Verdict::StronglySingular);
    CHECK(c.qprime_sup == doctest::Approx(2.0));

    c = classify(KernelSpec::power_law(1.5, 2), 2);
    CHECK(c.verdict == SingularityClass::Verdict::StronglySingular);
    CHECK(c.near_origin_exponent == doctest::Approx(1.5));
}

TEST_CASE("power-law exponent fit recovers n - beta + 1") {
    for (double beta : {1.2, 1.5, 1.8}) {
        auto [a, residual] = fit_near_origin_exponent(KernelSpec::power_law(beta, 2), 2);
        CHECK(a == doctest::Approx(2.0 - beta + 1.0).epsilon(1e-3));
        CHECK(residual < 1e-10);
    }
}

TEST_CASE("classification verdict is invariant under kernel rescaling") {
    // K(lambda x) for a power law is again a power law with a scaled constant
    for (double lambda : {0.25, 4.0}) {
        const double beta = 1.4;
        const double c_scaled = std::pow(lambda, beta - 2.0);
        SingularityClass base = classify(KernelSpec::power_law(beta, 2, 1.0), 2);
        SingularityClass scaled = classify(KernelSpec::power_law(beta, 2, c_scaled), 2);
        CHECK(base.verdict == scaled.verdict);
        CHECK(base.qprime_sup == doctest::Approx(scaled.qprime_sup));
    }
}

TEST_CASE("oscillatory singularity is reported indeterminate") {
    RadialTable table;
    for (double lr = std::log(1e-5); lr <= std::log(4.0); lr += 0.01) {
        const double r = std::exp(lr);
        table.r.push_back(r);
        table.k.push_back(-std::log(r));
        table.k_prime.push_back(-(1.5 + std::sin(5.0 * lr)) / r);
    }
    CHECK_THROWS_AS(classify(KernelSpec::custom_radial(std::move(table)), 2),
                    IndeterminateClassification);
}

TEST_CASE("osgood quantities") {
    // newtonian 2D: |k'| = 1/(2 pi r), so the integral is 2 pi r dr over (0,1] = pi
    OsgoodResult res = osgood(KernelSpec::newtonian(2), 2);
    CHECK(res.finite);
    CHECK(res.value == doctest::Approx(M_PI).epsilon(1e-8));

    // profile k(r) = r has |k'| = 1
    RadialTable unit;
    for (double r = 1e-6; r <= 2.0; r += 1e-3) {
        unit.r.push_back(r);
        unit.k.push_back(r);
        unit.k_prime.push_back(1.0);
    }
    res = osgood(KernelSpec::custom_radial(std::move(unit)), 1);
    CHECK(res.finite);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-8));

    // gaussian: |k'| ~ c r near 0, integral of 1/(c r) diverges
    res = osgood(KernelSpec::gaussian(1.0, 1.0), 2);
    CHECK_FALSE(res.finite);
    CHECK(std::isinf(res.value));
}

TEST_CASE("osgood finiteness is consistent with strong singularity") {
    for (const KernelSpec& k :
         {KernelSpec::newtonian(2), KernelSpec::bessel(1.0, 2), KernelSpec::power_law(1.5, 2)}) {
        CAPTURE(k.name());
        CHECK(classify(k, 2).near_origin_exponent >= 1.0);
        CHECK(osgood(k, 2).finite);
    }
}

TEST_CASE("blow-up constants for the 2D newtonian kernel") {
    for (double delta : {0.5, 1.0, 2.0}) {
        BlowupParams p = blowup_params(KernelSpec::newtonian(2), 2, delta, 50.0);
        CHECK(p.gamma == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-9));
        CHECK(p.c_bar == doctest::Approx(1.0 / (2.0 * M_PI * delta * delta)).epsilon(1e-6));
    }
}

TEST_CASE("blow-up hypothesis verified on a 10x refined sample grid") {
    BlowupParams p = blowup_params(KernelSpec::newtonian(2), 2, 1.0, 50.0);
    const KernelSpec k = KernelSpec::newtonian(2);
    for (int i = 1; i <= 4000; ++i) {
        const double s = 1.0 * i / 4000.0;
        CHECK(s * radial_derivative(k, 2, s) <= -p.gamma + 1e-9);
    }
    for (int i = 0; i <= 4000; ++i) {
        const double s = 1.0 + 49.0 * i / 4000.0;
        CHECK(std::abs(s * radial_derivative(k, 2, s)) <= (p.c_bar + 1e-9) * s * s);
    }
}

TEST_CASE("smooth kernels are not blow-up admissible") {
    CHECK_THROWS_AS(blowup_params(KernelSpec::gaussian(), 2, 1.0, 10.0), NotBlowupAdmissible);
    CHECK_THROWS_AS(blowup_params(KernelSpec::repulsive_bessel(), 2, 1.0, 10.0), NotBlowupAdmissible);
}

TEST_CASE("bessel kernel blow-up constants near the newtonian values") {
    BlowupParams p = blowup_params(KernelSpec::bessel(1.0, 2), 2, 0.1, 10.0);
    CHECK(p.gamma == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(0.05));
}

TEST_CASE("critical mass") {
    // 2D newtonian with I0 = 0 and delta = 1: M_c = 8 pi
    BlowupParams p = blowup_params(KernelSpec::newtonian(2), 2, 1.0, 50.0);
    CHECK(critical_mass(p, 2, 0.0) == doctest::Approx(8.0 * M_PI).epsilon(1e-8));
    // I0 = pi: c_bar + gamma/delta^2 = 1/pi, M_c = 16 pi
    CHECK(critical_mass(p, 2, M_PI) == doctest::Approx(16.0 * M_PI).epsilon(1e-6));
    // unit constants
    BlowupParams unit{1.0, 1.0, 0.0};
    CHECK(critical_mass(unit, 1, 0.0) == doctest::Approx(2.0));
    BlowupParams bad{1.0, -1.0, 0.0};
    CHECK_THROWS(critical_mass(bad, 2, 0.0));
}

TEST_CASE("repulsive bessel decomposition") {
    const KernelSpec k = KernelSpec::repulsive_bessel();
    KernelDecomposition d = decompose(k);
    CHECK(d.k2_symbol(1.0) == doctest::Approx(0.5));
    CHECK(d.k2_grad_inf_bound == doctest::Approx(0.25).epsilon(1e-6));

    Grid g = Grid::make(2, 6.0, 64);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const double xisq = wavevector_sq(g, i);
        const double full = symbol(k, 2, xisq);
        CHECK(std::abs(d.k1_symbol(xisq) + d.k2_symbol(xisq) - full) <= 1e-12);
        if (xisq > 0.0) CHECK(-xisq * d.k1_symbol(xisq) >= 0.0);
    }
    CHECK_THROWS(decompose(KernelSpec::gaussian()));
}

TEST_CASE("gradient norms") {
    // gaussian: sup |K'| = (A/sigma) e^(-1/2)
    CHECK(grad_sup_norm(KernelSpec::gaussian(2.0, 0.5), 1) ==
          doctest::Approx(4.0 * std::exp(-0.5)));
    CHECK(std::isinf(grad_sup_norm(KernelSpec::newtonian(2), 2)));

    // newtonian 2D: ||grad K||_q'^q' = 2 pi (2 pi)^-q' r^(1-q') integrated
    const double qp = 1.5;
    const double rmax = 8.0;
    const double expect = std::pow(
        2.0 * M_PI * std::pow(2.0 * M_PI, -qp) * std::pow(rmax, 2.0 - qp) / (2.0 - qp), 1.0 / qp);
    CHECK(grad_lq_norm(KernelSpec::newtonian(2), 2, qp, rmax) == doctest::Approx(expect).epsilon(1e-6));

    // endpoint divergence: no finite L^2 gradient norm for the 2D newtonian
    CHECK(std::isinf(grad_lq_norm(KernelSpec::newtonian(2), 2, 2.0, 8.0)));
    CHECK(std::isinf(grad_lq_norm(KernelSpec::bessel(1.0, 2), 2, 2.0, 8.0)));
    // but any q' < 2 is finite for the bessel kernel
    CHECK(std::isfinite(grad_lq_norm(KernelSpec::bessel(1.0, 2), 2, 1.8, 8.0)));
}

TEST_CASE("zero kernel edge cases") {
    CHECK(symbol(KernelSpec::zero(), 2, 1.0) == 0.0);
    CHECK(radial_derivative(KernelSpec::zero(), 1, 0.5) == 0.0);
    CHECK(grad_sup_norm(KernelSpec::zero(), 1) == 0.0);
    CHECK(classify(KernelSpec::zero(), 1).verdict == SingularityClass::Verdict::Mild);
    CHECK_THROWS(osgood(KernelSpec::zero(), 1));
}

TEST_CASE("repulsive flag flips attractive kernels") {
    KernelSpec g = KernelSpec::gaussian(1.0, 1.0);
    g.sign = KernelSign::Repulsive;
    CHECK(radial_derivative(g, 1, 1.0) > 0.0);
    CHECK(symbol(g, 1, 0.0) < 0.0);
}

TEST_CASE("symbols satisfy Parseval against a Gaussian test function") {
    // integral of K g == (2 pi)^-n integral of K_hat g_hat, both by quadrature;
    // the two routes share no code (radial profile vs Fourier symbol)
    const double sigma = 0.8;
    auto check_pair = [&](const KernelSpec& k, int n) {
        CAPTURE(k.name());
        const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
        auto real_side = [&](double r) {
            return area * radial_value(k, n, r) * std::exp(-0.5 * r * r / (sigma * sigma)) *
                   std::pow(r, n - 1.0);
        };
        auto fourier_side = [&](double rho) {
            return area * std::pow(2.0 * M_PI, -n) * symbol(k, n, rho * rho) *
                   std::pow(2.0 * M_PI * sigma * sigma, 0.5 * n) *
                   std::exp(-0.5 * sigma * sigma * rho * rho) * std::pow(rho, n - 1.0);
        };
        const double lhs = quad::integrate_to_zero(real_side, 1.0).value +
                           quad::integrate(real_side, 1.0, 40.0, 64, 16);
        const double rhs = quad::integrate_to_zero(fourier_side, 1.0).value +
                           quad::integrate(fourier_side, 1.0, 60.0, 64, 16);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    };
    check_pair(KernelSpec::power_law(1.5, 2), 2);
    check_pair(KernelSpec::power_law(1.2, 2), 2);
    check_pair(KernelSpec::gaussian(1.3, 0.6), 2);
    check_pair(KernelSpec::gaussian(1.3, 0.6), 1);
    check_pair(KernelSpec::exponential(2.0), 1);
    check_pair(KernelSpec::bessel(1.5, 2), 2);
    check_pair(KernelSpec::bessel(1.5, 1), 1);
    check_pair(KernelSpec::repulsive_bessel(), 2);
}
