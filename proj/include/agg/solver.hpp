#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "agg/diagnostics.hpp"
#include "agg/grid.hpp"
#include "agg/kernels.hpp"
#include "agg/spectral.hpp"

namespace agg {

enum class Scheme { EtdRk2, Strang };

struct Caps {
    double linf_cap = 0.0;            // 0 resolves to 1e6 * ||u0||_inf at run start
    double negativity_cap = 1e-3;     // min u < -cap * ||u||_inf trips detection
    double moment_floor = 1e-2;       // I(t) < floor * I(0) trips detection
};

struct SimConfig {
    Grid grid;
    KernelSpec kernel;
    Field u0;
    double t_end = 1.0;
    double dt_init = 1e-2;
    double dt_min = 1e-10;
    Scheme scheme = Scheme::EtdRk2;
    Caps caps;
    int diagnostics_stride = 1;
    double lq_exponent = 2.0;
    bool record_virial_rhs = false;
    std::vector<double> snapshot_times;
    double cfl_safety = 0.4;
};

enum class Termination { Completed, BlowupDetected, NumericalFailure };

enum class BlowupTrigger { LinfCap, DtCollapse, MomentFloor, NegativityCap };

const char* to_string(Termination t);
const char* to_string(BlowupTrigger t);

struct BlowupReport {
    BlowupTrigger trigger = BlowupTrigger::LinfCap;
    double t_detect = 0.0;
    double linf_at_detect = 0.0;
    double moment_at_detect = 0.0;
};

struct RunResult {
    Termination termination = Termination::Completed;
    std::optional<BlowupReport> blowup;
    DiagnosticsSeries series;
    std::vector<std::pair<double, Field>> snapshots;
    double boundary_leakage = 0.0;
    /// Worst observed -min u / max|u|; above 1e-8 the run carries a
    /// negativity warning (monitored, not enforced).
    double max_negativity = 0.0;
    long steps_taken = 0;
};

/// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, series-evaluated
/// for |z| < 1e-2 to avoid cancellation.
double phi1(double z);
double phi2(double z);

/// One time step of u_t = Laplace u - div(u (grad K * u)).
///
/// EtdRk2 integrates the Duhamel form exactly in the linear part:
/// predictor u_a = E u + dt phi1 N(u) in Fourier space with E = e^{-|xi|^2 dt},
/// then the trapezoidal-type corrector u+ = u_a + dt phi2 (N(u_a) - N(u)).
/// The transport term N(u) = -div(u (grad K * u)) is pseudospectral with
/// 2/3-rule dealiasing. Strang splits: half heat, RK2 transport, half heat.
Field step(SpectralWorkspace& ws, const Field& u, double dt, const KernelSpec& kernel,
           Scheme scheme = Scheme::EtdRk2);
Field step(const Field& u, double dt, const KernelSpec& kernel, Scheme scheme = Scheme::EtdRk2);

/// Cap checks against the current state; fires on the first of LinfCap,
/// NegativityCap, MomentFloor (dt collapse is reported by run()).
std::optional<BlowupReport> detect_blowup(const Field& u, const DiagnosticsSeries& series,
                                          const Caps& caps);

/// Integrate over [0, t_end] with adaptive dt =
/// min(dt_init, cfl h / ||v||_inf, cfl / ||div v||_inf); records diagnostics
/// every diagnostics_stride steps plus the first and last. dt falling below
/// dt_min terminates with BlowupDetected(DtCollapse).
RunResult run(const SimConfig& cfg);

}  // namespace agg
