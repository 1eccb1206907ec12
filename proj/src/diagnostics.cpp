#include "agg/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace agg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ActiveCell {
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
};

double pair_sum(const Field& u, const KernelSpec& kernel) {
    const Grid& g = u.grid;
    const int dim = g.dim;
    const double cutoff = 1e-14 * max_abs(u);
    std::vector<ActiveCell> cells;
    cells.reserve(u.size());
    const int n = g.points_per_dim;
    if (dim == 1) {
        for (int i = 0; i < n; ++i)
            if (std::abs(u.values[i]) > cutoff) cells.push_back({g.coord(i), 0.0, u.values[i]});
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                const double v = u.values[g.at(ix, iy)];
                if (std::abs(v) > cutoff) cells.push_back({g.coord(ix), g.coord(iy), v});
            }
    }
    const double w = std::pow(g.cell_volume(), 2);
    double sum = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const double dx = cells[i].x - cells[j].x;
            const double dy = cells[i].y - cells[j].y;
            const double r = std::sqrt(dx * dx + dy * dy);
            row += cells[j].u * r * radial_derivative(kernel, dim, r);
        }
        sum += cells[i].u * row;
    }
    return 2.0 * sum * w;  // i<j pairs counted once, kernel symmetric
}

}  // namespace

namespace {

double virial_rhs_on(const Field& work, const KernelSpec& kernel) {
    const double mass = mass_and_moment(work).first;
    return 2.0 * work.grid.dim * mass + pair_sum(work, kernel);
}

}  // namespace

VirialEstimate virial_rhs_detailed(const Field& u, const KernelSpec& kernel) {
    Field work = u;
    VirialEstimate est;
    while (work.grid.cell_count() > 128u * 128u) {
        work = coarsen_by_two(work);
        ++est.coarsening_levels;
    }
    est.value = virial_rhs_on(work, kernel);
    if (est.coarsening_levels > 0)
        est.coarsening_error = std::abs(est.value - virial_rhs_on(coarsen_by_two(work), kernel));
    return est;
}

double virial_rhs(const Field& u, const KernelSpec& kernel) {
    return virial_rhs_detailed(u, kernel).value;
}

VirialBoundReport virial_bound_check(const DiagnosticsSeries& series, const BlowupParams& p, int dim,
                                     double tolerance) {
    if (!(p.gamma > 0.0)) throw std::invalid_argument("virial_bound_check: gamma must be positive");
    if (series.rows.size() < 3) throw std::invalid_argument("virial_bound_check: need at least 3 rows");
    for (std::size_t i = 1; i < series.rows.size(); ++i)
        if (!(series.rows[i].t > series.rows[i - 1].t))
            throw std::invalid_argument("virial_bound_check: timestamps must increase");
    const double mass = series.rows.front().mass;
    const double coef = 4.0 * (p.c_bar + p.gamma / (p.delta * p.delta));

    VirialBoundReport report;
    report.tolerance = tolerance;
    for (std::size_t i = 1; i + 1 < series.rows.size(); ++i) {
        const auto& lo = series.rows[i - 1];
        const auto& mid = series.rows[i];
        const auto& hi = series.rows[i + 1];
        const double hm = mid.t - lo.t;
        const double hp = hi.t - mid.t;
        // three-point derivative on a nonuniform stencil
        const double didt = (hm * hm * hi.moment + (hp * hp - hm * hm) * mid.moment - hp * hp * lo.moment) /
                            (hp * hm * (hp + hm));
        const double bound = mass * (2.0 * dim - p.gamma * mass + coef * mid.moment);
        const double scale = mass * (2.0 * dim + p.gamma * mass + coef * mid.moment);
        const double violation = (didt - bound) / std::max(scale, 1e-300);
        report.max_violation = std::max(report.max_violation, violation);
        ++report.rows_checked;
    }
    report.pass = report.max_violation <= tolerance;
    return report;
}

double blowup_time_bound(double mass, double I0, const BlowupParams& p, int dim) {
    if (!(mass > 0.0)) throw std::invalid_argument("blowup_time_bound: mass must be positive");
    if (!(I0 > 0.0))
        throw std::invalid_argument("blowup_time_bound: I0 must be positive (point data unsupported)");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("blowup_time_bound: gamma must be positive");
    const double c =
        mass * (p.gamma * mass - 2.0 * dim - 4.0 * (p.c_bar + p.gamma / (p.delta * p.delta)) * I0);
    return c > 0.0 ? I0 / c : kInf;
}

GronwallReport gronwall_check(const DiagnosticsSeries& series, double q, double k2_grad_inf,
                              double mass, double c_eps) {
    if (series.rows.empty()) throw std::invalid_argument("gronwall_check: empty series");
    GronwallReport report;
    report.q = q;
    report.growth_constant = c_eps * k2_grad_inf * k2_grad_inf * mass * mass;
    const double lq0 = series.rows.front().lq;
    report.min_margin = kInf;
    for (const auto& row : series.rows) {
        const double bound = std::exp(report.growth_constant * row.t) * lq0;
        const double margin = bound > 0.0 ? 1.0 - row.lq / bound : (row.lq > 0.0 ? -kInf : 0.0);
        report.min_margin = std::min(report.min_margin, margin);
    }
    report.pass = report.min_margin >= -1e-12;
    return report;
}

double mass_drift(const DiagnosticsSeries& series) {
    if (series.rows.empty()) throw std::invalid_argument("mass_drift: empty series");
    const double m0 = series.rows.front().mass;
    if (m0 == 0.0) throw std::invalid_argument("mass_drift: initial mass is zero");
    double drift = 0.0;
    for (const auto& row : series.rows) drift = std::max(drift, std::abs(row.mass - m0) / std::abs(m0));
    return drift;
}

void write_series_csv(const DiagnosticsSeries& series, std::ostream& os) {
    os << "t,mass,moment,l2,linf,lq,min_u,virial_rhs\n";
    char buf[512];
    for (const auto& row : series.rows) {
        const double vr = row.virial_rhs.value_or(std::numeric_limits<double>::quiet_NaN());
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.t, row.mass,
                      row.moment, row.l2, row.linf, row.lq, row.min_u, vr);
        os << buf;
    }
}

DiagnosticsSeries load_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("series csv: empty stream");
    if (line == "t,mass,moment,l2,linf,lq,min_u,virial_rhs\r")
        line.pop_back();
    if (line != "t,mass,moment,l2,linf,lq,min_u,virial_rhs")
        throw std::runtime_error("series csv: unexpected header '" + line + "'");
    DiagnosticsSeries series;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double vals[8];
        for (int i = 0; i < 8; ++i) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("series csv: short row '" + line + "'");
            vals[i] = std::strtod(cell.c_str(), nullptr);
        }
        DiagnosticsRow row;
        row.t = vals[0];
        row.mass = vals[1];
        row.moment = vals[2];
        row.l2 = vals[3];
        row.linf = vals[4];
        row.lq = vals[5];
        row.min_u = vals[6];
        if (!std::isnan(vals[7])) row.virial_rhs = vals[7];
        series.rows.push_back(row);
    }
    return series;
}

}  // namespace agg
