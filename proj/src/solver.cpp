#include "agg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Transport term and velocity statistics, shared by the schemes and the
/// adaptive dt logic.
struct NonlinearOp {
    SpectralWorkspace& ws;
    const Grid& grid;
    FourierField symbol;           // kernel symbol on the grid (zero if K = 0)
    bool zero_kernel = false;

    NonlinearOp(SpectralWorkspace& ws_, const KernelSpec& kernel) : ws(ws_), grid(ws_.grid()) {
        symbol = kernel_symbol_field(kernel, grid);
        zero_kernel = true;
        for (const auto& m : symbol.modes)
            if (m != std::complex<double>(0.0, 0.0)) {
                zero_kernel = false;
                break;
            }
    }

    /// Velocity components grad(K * u) from the spectrum of u.
    std::vector<FourierField> velocity_hat(const FourierField& uh) const {
        const int n = grid.points_per_dim;
        std::vector<FourierField> out;
        out.reserve(grid.dim);
        for (int axis = 0; axis < grid.dim; ++axis) {
            FourierField vh = FourierField::zeros(grid);
            for (std::size_t i = 0; i < uh.modes.size(); ++i) {
                const int k = grid.dim == 1
                                  ? static_cast<int>(i)
                                  : (axis == 0 ? static_cast<int>(i) / n : static_cast<int>(i) % n);
                if (signed_mode(k, n) == -n / 2) continue;
                vh.modes[i] =
                    std::complex<double>(0.0, wavevector(grid, k)) * symbol.modes[i] * uh.modes[i];
            }
            out.push_back(std::move(vh));
        }
        return out;
    }

    /// N(u)_hat = -sum_j i xi_j FFT(u_r * v_j), 2/3-dealiased on both the
    /// product inputs and the result.
    FourierField nonlinear_hat(FourierField uh) {
        FourierField nh = FourierField::zeros(grid);
        if (zero_kernel) return nh;
        std::vector<FourierField> vh = velocity_hat(uh);
        dealias_two_thirds(uh);
        Field ur = ws.inverse(uh);
        const int n = grid.points_per_dim;
        for (int axis = 0; axis < grid.dim; ++axis) {
            dealias_two_thirds(vh[axis]);
            Field v = ws.inverse(vh[axis]);
            FourierField wh = FourierField::zeros(grid);
            for (std::size_t i = 0; i < wh.modes.size(); ++i)
                wh.modes[i] = ur.values[i] * v.values[i];
            ws.forward_raw(wh.modes.data());
            dealias_two_thirds(wh);
            for (std::size_t i = 0; i < nh.modes.size(); ++i) {
                const int k = grid.dim == 1
                                  ? static_cast<int>(i)
                                  : (axis == 0 ? static_cast<int>(i) / n : static_cast<int>(i) % n);
                if (signed_mode(k, n) == -n / 2) continue;
                nh.modes[i] -= std::complex<double>(0.0, wavevector(grid, k)) * wh.modes[i];
            }
        }
        return nh;
    }

    /// max |v| and max |div v| for the CFL and growth-rate guards.
    std::pair<double, double> velocity_bounds(const FourierField& uh) {
        if (zero_kernel) return {0.0, 0.0};
        std::vector<FourierField> vh = velocity_hat(uh);
        std::vector<Field> v;
        v.reserve(grid.dim);
        for (int axis = 0; axis < grid.dim; ++axis) v.push_back(ws.inverse(vh[axis]));
        double scale = max_abs(v[0]);
        if (grid.dim == 2) scale = std::max(scale, max_abs(v[1]));
        double vmax = 0.0;
        if (scale > 0.0 && scale < 1e150) {
            double vmax_sq = 0.0;
            for (std::size_t i = 0; i < v[0].size(); ++i) {
                double sq = v[0].values[i] * v[0].values[i];
                if (grid.dim == 2) sq += v[1].values[i] * v[1].values[i];
                vmax_sq = std::max(vmax_sq, sq);
            }
            vmax = std::sqrt(vmax_sq);
        } else if (scale > 0.0) {
            // overflow-safe path for astronomically scaled states
            for (std::size_t i = 0; i < v[0].size(); ++i) {
                const double m = grid.dim == 2 ? std::hypot(v[0].values[i], v[1].values[i])
                                               : std::abs(v[0].values[i]);
                vmax = std::max(vmax, m);
            }
        }
        FourierField dh = FourierField::zeros(grid);
        for (std::size_t i = 0; i < dh.modes.size(); ++i)
            dh.modes[i] = -wavevector_sq(grid, i) * symbol.modes[i] * uh.modes[i];
        Field div = ws.inverse(dh);
        return {vmax, max_abs(div)};
    }
};

Field etd_rk2_step(SpectralWorkspace& ws, NonlinearOp& op, const Field& u, double dt) {
    const Grid& g = u.grid;
    FourierField uh = ws.forward(u);
    FourierField nh = op.nonlinear_hat(uh);

    FourierField ah = FourierField::zeros(g);
    for (std::size_t i = 0; i < uh.modes.size(); ++i) {
        const double z = -wavevector_sq(g, i) * dt;
        ah.modes[i] = std::exp(z) * uh.modes[i] + dt * phi1(z) * nh.modes[i];
    }
    FourierField nah = op.nonlinear_hat(ah);
    for (std::size_t i = 0; i < ah.modes.size(); ++i) {
        const double z = -wavevector_sq(g, i) * dt;
        ah.modes[i] += dt * phi2(z) * (nah.modes[i] - nh.modes[i]);
    }
    Field out = ws.inverse(ah);
    out.time_tag = u.time_tag + dt;
    return out;
}

Field strang_step(SpectralWorkspace& ws, NonlinearOp& op, const Field& u, double dt) {
    const Grid& g = u.grid;
    auto half_heat = [&](FourierField& fh) {
        for (std::size_t i = 0; i < fh.modes.size(); ++i)
            fh.modes[i] *= std::exp(-wavevector_sq(g, i) * 0.5 * dt);
    };
    FourierField uh = ws.forward(u);
    half_heat(uh);
    // Heun step for the transport part
    FourierField n1 = op.nonlinear_hat(uh);
    FourierField mid = uh;
    for (std::size_t i = 0; i < mid.modes.size(); ++i) mid.modes[i] += dt * n1.modes[i];
    FourierField n2 = op.nonlinear_hat(mid);
    for (std::size_t i = 0; i < uh.modes.size(); ++i)
        uh.modes[i] += 0.5 * dt * (n1.modes[i] + n2.modes[i]);
    half_heat(uh);
    Field out = ws.inverse(uh);
    out.time_tag = u.time_tag + dt;
    return out;
}

DiagnosticsRow make_row(const Field& u, double t, double lq_exponent, bool with_virial,
                        const KernelSpec& kernel) {
    DiagnosticsRow row;
    row.t = t;
    const auto [mass, moment] = mass_and_moment(u);
    row.mass = mass;
    row.moment = moment;
    row.l2 = lp_norm(u, 2.0);
    row.linf = lp_norm(u, kInf);
    row.lq = lp_norm(u, lq_exponent);
    row.min_u = min_value(u);
    if (with_virial) row.virial_rhs = virial_rhs(u, kernel);
    return row;
}

}  // namespace

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::BlowupDetected: return "blowup_detected";
        default: return "numerical_failure";
    }
}

const char* to_string(BlowupTrigger t) {
    switch (t) {
        case BlowupTrigger::LinfCap: return "linf_cap";
        case BlowupTrigger::DtCollapse: return "dt_collapse";
        case BlowupTrigger::MomentFloor: return "moment_floor";
        default: return "negativity_cap";
    }
}

double phi1(double z) {
    if (std::abs(z) < 1e-2) {
        // 1 + z/2 + z^2/6 + z^3/24 + z^4/120 + z^5/720
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0))));
    }
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-2) {
        return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z * (1.0 / 720.0 + z / 5040.0))));
    }
    return (std::expm1(z) - z) / (z * z);
}

Field step(SpectralWorkspace& ws, const Field& u, double dt, const KernelSpec& kernel, Scheme scheme) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    NonlinearOp op(ws, kernel);
    return scheme == Scheme::EtdRk2 ? etd_rk2_step(ws, op, u, dt) : strang_step(ws, op, u, dt);
}

Field step(const Field& u, double dt, const KernelSpec& kernel, Scheme scheme) {
    SpectralWorkspace ws(u.grid);
    return step(ws, u, dt, kernel, scheme);
}

std::optional<BlowupReport> detect_blowup(const Field& u, const DiagnosticsSeries& series,
                                          const Caps& caps) {
    const double linf = max_abs(u);
    const double minu = min_value(u);
    const auto [mass, moment] = mass_and_moment(u);
    (void)mass;
    const double i0 = series.rows.empty() ? 0.0 : series.rows.front().moment;

    BlowupReport report;
    report.t_detect = u.time_tag;
    report.linf_at_detect = linf;
    report.moment_at_detect = moment;
    if (caps.linf_cap > 0.0 && linf > caps.linf_cap) {
        report.trigger = BlowupTrigger::LinfCap;
        return report;
    }
    if (minu < -caps.negativity_cap * linf) {
        report.trigger = BlowupTrigger::NegativityCap;
        return report;
    }
    if (i0 > 0.0 && moment < caps.moment_floor * i0) {
        report.trigger = BlowupTrigger::MomentFloor;
        return report;
    }
    return std::nullopt;
}

RunResult run(const SimConfig& cfg) {
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("run: t_end must be nonnegative");
    if (!(cfg.dt_min > 0.0) || !(cfg.dt_init >= cfg.dt_min))
        throw std::invalid_argument("run: need 0 < dt_min <= dt_init");
    if (cfg.diagnostics_stride < 1) throw std::invalid_argument("run: diagnostics_stride must be >= 1");
    if (!cfg.u0.all_finite()) throw std::invalid_argument("run: initial field has non-finite values");
    if (!(cfg.u0.grid == cfg.grid)) throw std::invalid_argument("run: u0 grid mismatch");
    if (!is_density(cfg.u0)) throw std::invalid_argument("run: u0 is not a density (negative values)");

    Caps caps = cfg.caps;
    if (caps.linf_cap <= 0.0) caps.linf_cap = 1e6 * std::max(max_abs(cfg.u0), 1e-300);
    if (caps.linf_cap <= max_abs(cfg.u0))
        throw std::invalid_argument("run: linf_cap must exceed ||u0||_inf");

    RunResult result;
    result.series.lq_exponent = cfg.lq_exponent;
    SpectralWorkspace ws(cfg.grid);
    NonlinearOp op(ws, cfg.kernel);

    Field u = cfg.u0;
    u.time_tag = 0.0;
    double t = 0.0;
    auto record = [&](const Field& f, double time) {
        result.series.rows.push_back(make_row(f, time, cfg.lq_exponent, cfg.record_virial_rhs, cfg.kernel));
        result.boundary_leakage = std::max(result.boundary_leakage, boundary_fraction(f));
        result.max_negativity = std::max(result.max_negativity, negativity_fraction(f));
    };
    record(u, 0.0);

    std::size_t next_snapshot = 0;
    auto maybe_snapshot = [&](const Field& f, double time, bool force) {
        while (next_snapshot < cfg.snapshot_times.size() &&
               time >= cfg.snapshot_times[next_snapshot] - 1e-14) {
            if (result.snapshots.empty() || result.snapshots.back().first != time)
                result.snapshots.emplace_back(time, f);
            ++next_snapshot;
        }
        if (force) {
            if (result.snapshots.empty() || result.snapshots.back().first != time)
                result.snapshots.emplace_back(time, f);
        }
    };
    maybe_snapshot(u, 0.0, false);

    if (cfg.t_end == 0.0) {
        result.termination = Termination::Completed;
        return result;
    }

    long steps = 0;
    while (t < cfg.t_end) {
        FourierField uh = ws.forward(u);
        const auto [vmax, divmax] = op.velocity_bounds(uh);
        double dt = cfg.dt_init;
        if (vmax > 0.0) dt = std::min(dt, cfg.cfl_safety * cfg.grid.spacing / vmax);
        if (divmax > 0.0) dt = std::min(dt, cfg.cfl_safety / divmax);
        const bool final_step = t + dt >= cfg.t_end;
        if (final_step) dt = cfg.t_end - t;  // landing step, exempt from the collapse check
        if (!final_step && dt < cfg.dt_min) {
            result.termination = Termination::BlowupDetected;
            BlowupReport report;
            report.trigger = BlowupTrigger::DtCollapse;
            report.t_detect = t;
            report.linf_at_detect = max_abs(u);
            report.moment_at_detect = mass_and_moment(u).second;
            result.blowup = report;
            if (result.series.rows.back().t != t) record(u, t);
            maybe_snapshot(u, t, true);
            result.steps_taken = steps;
            return result;
        }

        u = cfg.scheme == Scheme::EtdRk2 ? etd_rk2_step(ws, op, u, dt)
                                         : strang_step(ws, op, u, dt);
        t = final_step ? cfg.t_end : t + dt;
        u.time_tag = t;
        ++steps;

        if (!u.all_finite()) {
            result.termination = Termination::NumericalFailure;
            result.steps_taken = steps;
            return result;
        }

        const bool due = steps % cfg.diagnostics_stride == 0;
        if (due || final_step) record(u, t);
        maybe_snapshot(u, t, final_step);

        if (auto report = detect_blowup(u, result.series, caps)) {
            result.termination = Termination::BlowupDetected;
            result.blowup = report;
            if (!due && !final_step) record(u, t);
            maybe_snapshot(u, t, true);
            result.steps_taken = steps;
            return result;
        }
    }
    result.termination = Termination::Completed;
    result.steps_taken = steps;
    return result;
}

}  // namespace agg
