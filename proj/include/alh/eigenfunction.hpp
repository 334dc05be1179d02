#pragma once

#include "alh/linsolve.hpp"
#include "alh/ops.hpp"
#include "alh/windows.hpp"
#include "alh/zoo.hpp"

namespace alh {

// Radial eigenfunction solve: t = t0 + t1 with lift t0 = e^w and correction t1
// solving the same discrete operator that the lift is fed through,
// A t1 = -A t0, so A t = 0 holds exactly in floating point. On the exact
// hyperbolic metric the calibrated operator already annihilates e^w, which
// pins t1 at the solver floor instead of the truncation level.
struct EigenfunctionResult {
    ScalarField t, t0, t1;
    ScalarField residual;  // Laplacian t - (n+1) t from the FD stencils
    TensorField vertical;  // T = Hess(t) - t g
    ScalarField vertical_gnorm;
    CgStats stats;
};

inline EigenfunctionResult solve_radial_eigenfunction(const ZeroShiftMetric& m, const FdOps& fd,
                                                      CgStats* stats_out = nullptr) {
    const auto& g = m.g();
    const int d = g.dim(), n = g.n();

    EigenfunctionResult res{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g),
                            TensorField(g, 2, TensorField::Sym::pair01), ScalarField(g), {}};

    res.t0 = ScalarField::from(g, [](double w, const std::array<double, 3>&) {
        return std::exp(w);
    });

    HelmholtzSystem sys(m, n + 1);
    std::vector<double> rhs = sys.rhs_from_lift(res.t0);
    res.t1 = sys.solve(rhs, &res.stats);
    if (stats_out) *stats_out = res.stats;

    for (std::int64_t i = 0; i < g.npts(); ++i) res.t.flat(i) = res.t0.flat(i) + res.t1.flat(i);

    MetricField full = to_full_metric(m);
    Christoffels ch = christoffel_zero_shift(m, fd);
    TensorField hess = hessian_scalar(full, ch, res.t, fd);
    ScalarField lap = laplacian(full, hess);
    for (std::int64_t i = 0; i < g.npts(); ++i)
        res.residual.flat(i) = lap.flat(i) - (n + 1) * res.t.flat(i);

    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const double* h = hess.comp(i * d + j);
            const double* gc = full.g2.comp(i * d + j);
            for (std::int64_t pt = 0; pt < g.npts(); ++pt)
                res.vertical.comp(i * d + j)[pt] = h[pt] - res.t.flat(pt) * gc[pt];
            if (j > i) {
                const double* src = res.vertical.comp(i * d + j);
                double* dst = res.vertical.comp(j * d + i);
                for (std::int64_t pt = 0; pt < g.npts(); ++pt) dst[pt] = src[pt];
            }
        }
    res.vertical_gnorm = gnorm_field(full, res.vertical);
    return res;
}

// Decay measurement of |T|_g = |Hess t - t g|_g over the reporting box.
inline AlhOrder measure_vertical_decay(const ZeroShiftMetric& m, const EigenfunctionResult& res,
                                       double a_expected) {
    const auto& g = m.g();
    std::vector<double> stations = norm_stations(g);
    if (stations.size() < 4)
        throw precondition_error("radial range too short to measure a decay order");
    AlhOrder out;
    ReportRegion reg = make_report_region(g);
    for (double wc : stations) {
        const int iw = nearest_level(g, wc);
        out.stations.push_back(g.w(iw));
        out.sups.push_back(sup_at_height(res.vertical_gnorm, reg, iw));
    }
    out.fit = fit_decay_rate(out.stations, out.sups);
    for (std::size_t i = 0; i < out.stations.size(); ++i)
        out.constant = std::max(out.constant, out.sups[i] * std::exp(a_expected * out.stations[i]));
    return out;
}

} // namespace alh
