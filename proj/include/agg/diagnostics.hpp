#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "agg/grid.hpp"
#include "agg/kernels.hpp"

namespace agg {

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double moment = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double lq = 0.0;
    double min_u = 0.0;
    std::optional<double> virial_rhs;
};

struct DiagnosticsSeries {
    std::vector<DiagnosticsRow> rows;
    double lq_exponent = 2.0;
};

/// Right-hand side of the second-moment identity,
///   dI/dt = 2 n M + sum_{i != j} u_i u_j |x_i - x_j| K'(|x_i - x_j|) h^{2n},
/// evaluated by direct double sum. Grids above 128^2 cells are coarsened 2x
/// (mass-preserving) until the sum is affordable; cells with
/// |u| <= 1e-14 max|u| are skipped.
double virial_rhs(const Field& u, const KernelSpec& kernel);

struct VirialEstimate {
    double value = 0.0;
    int coarsening_levels = 0;
    /// |value - value at one extra coarsening level|; 0 when no coarsening ran.
    double coarsening_error = 0.0;
};

VirialEstimate virial_rhs_detailed(const Field& u, const KernelSpec& kernel);

struct VirialBoundReport {
    bool pass = true;
    double max_violation = 0.0;  // relative to the scale M(2n + gamma M + 4(c+g/d^2) I)
    double tolerance = 0.05;
    int rows_checked = 0;
};

/// Check the differential inequality dI/dt <= M (2n - gamma M +
/// 4(c_bar + gamma/delta^2) I(t)) on interior rows, with dI/dt from
/// three-point finite differences. Violations are normalized by the sum of
/// the absolute term magnitudes.
VirialBoundReport virial_bound_check(const DiagnosticsSeries& series, const BlowupParams& p, int dim,
                                     double tolerance = 0.05);

/// Upper bound I0 / c with c = M (gamma M - 2n - 4(c_bar + gamma/delta^2) I0)
/// on the survival time of a regular solution; infinity when c <= 0.
double blowup_time_bound(double mass, double I0, const BlowupParams& p, int dim);

struct GronwallReport {
    bool pass = true;
    double min_margin = 0.0;  // min over rows of 1 - lq(t) / (e^{Ct} lq(0))
    double growth_constant = 0.0;
    double q = 2.0;
};

/// Verify lq(t) <= e^{Ct} lq(0) with C = c_eps * k2_grad_inf^2 * M^2.
GronwallReport gronwall_check(const DiagnosticsSeries& series, double q, double k2_grad_inf,
                              double mass, double c_eps);

/// max over rows of |M(t) - M(0)| / M(0).
double mass_drift(const DiagnosticsSeries& series);

/// Fixed CSV schema: header t,mass,moment,l2,linf,lq,min_u,virial_rhs and
/// 17-significant-digit values; a missing virial column is written as nan.
void write_series_csv(const DiagnosticsSeries& series, std::ostream& os);
DiagnosticsSeries load_series_csv(std::istream& is);

}  // namespace agg
