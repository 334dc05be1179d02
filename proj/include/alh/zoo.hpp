#pragma once

#include <functional>

#include "alh/metric.hpp"
#include "alh/ops.hpp"
#include "alh/windows.hpp"

namespace alh {

// C^3 compactly supported bump, equal to 1 at the origin, zero for |u| >= 1.
inline double bump(double u2) {
    const double s = 1.0 - u2;
    return s > 0.0 ? s * s * s * s : 0.0;
}

// Exact hyperbolic half-space model: N = 1, g_t = e^{2w} delta.
inline ZeroShiftMetric make_hyperbolic(const HalfSpaceGrid& g) {
    ZeroShiftMetric m(g);
    const int d = g.dim();
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            m.lapse.at(iw, it) = 1.0;
            const double e2w = std::exp(2.0 * g.w(iw));
            for (int a = 1; a < d; ++a)
                for (int b = a; b < d; ++b)
                    m.gt.set(a * d + b, iw, it, a == b ? e2w : 0.0);
        }
    return m;
}

struct WarpedMetric {
    ZeroShiftMetric m;
    std::function<double(double)> f, fp, fpp; // warp factor and derivatives
    double a = 1.0;
};

// Rotationally trivial warped product N = 1, g_t = f(w)^2 delta with
// f = e^w (1 + amp e^{-a w}); the curvature deviation decays like e^{-a w}.
inline WarpedMetric make_warped(const HalfSpaceGrid& g, double a, double amp = 0.1) {
    WarpedMetric wm{ZeroShiftMetric(g),
                    [a, amp](double w) { return std::exp(w) * (1.0 + amp * std::exp(-a * w)); },
                    [a, amp](double w) {
                        return std::exp(w) * (1.0 + (1.0 - a) * amp * std::exp(-a * w));
                    },
                    [a, amp](double w) {
                        return std::exp(w) * (1.0 + (1.0 - a) * (1.0 - a) * amp * std::exp(-a * w));
                    },
                    a};
    const int d = g.dim();
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            wm.m.lapse.at(iw, it) = 1.0;
            const double f2 = wm.f(g.w(iw)) * wm.f(g.w(iw));
            for (int a1 = 1; a1 < d; ++a1)
                for (int b = a1; b < d; ++b)
                    wm.m.gt.set(a1 * d + b, iw, it, a1 == b ? f2 : 0.0);
        }
    return wm;
}

struct PerturbParams {
    double a = 1.0;      // decay order of the perturbation
    double eps = 0.1;    // tangential metric amplitude
    double eps_n = 0.05; // lapse amplitude
};

// Compact tangential profile scaled into the box [-l, l]^n with a margin so
// the perturbation vanishes identically near the lateral boundary.
inline double box_bump(const HalfSpaceGrid& g, std::int64_t it) {
    const double lp = 0.9 * g.l();
    double u2 = 0.0;
    for (int mu = 0; mu < g.n(); ++mu) {
        const double x = g.x(g.tang_coord(it, mu)) / lp;
        u2 += x * x;
    }
    return bump(u2);
}

// Localized ALH perturbation of the hyperbolic model:
// N = 1 + eps_n e^{-a w} nu(x), g_t = e^{2w} (delta + eps e^{-a w} kappa(x) B),
// with B traceless of unit spectral norm, so |g_t - e^{2w} delta| ~ eps e^{-aw}.
inline ZeroShiftMetric make_perturbed(const HalfSpaceGrid& g, const PerturbParams& p) {
    if (!(p.eps < 0.9) || !(p.eps_n < 0.9))
        throw precondition_error("perturbation amplitudes must stay below 0.9");
    ZeroShiftMetric m(g);
    const int d = g.dim(), n = g.n();
    double B[3][3] = {};
    if (n == 1) {
        B[0][0] = 1.0;
    } else {
        B[0][0] = 0.6;
        B[0][1] = B[1][0] = 0.8;
        B[1][1] = -0.6;
    }
    for (std::int64_t it = 0; it < g.ntang(); ++it) {
        const double kap = box_bump(g, it);
        for (int iw = 0; iw < g.nw(); ++iw) {
            const double decay = std::exp(-p.a * g.w(iw));
            m.lapse.at(iw, it) = 1.0 + p.eps_n * decay * kap;
            const double e2w = std::exp(2.0 * g.w(iw));
            for (int a = 1; a < d; ++a)
                for (int b = a; b < d; ++b) {
                    const double base = (a == b) ? 1.0 : 0.0;
                    m.gt.set(a * d + b, iw, it,
                             e2w * (base + p.eps * decay * kap * B[a - 1][b - 1]));
                }
        }
    }
    return m;
}

// Mean curvature of the level sets of w: H = g^{mu nu} S_{mu nu} with
// S = (2N)^{-1} d_0 g_t. Hyperbolic gives n, warped gives n f'/f.
inline ScalarField mean_curvature(const ZeroShiftMetric& m, const FdOps& fd) {
    const auto& g = m.g();
    const int d = g.dim();
    std::vector<ScalarField> dgt(d * d);
    for (int a = 1; a < d; ++a)
        for (int b = a; b < d; ++b) dgt[a * d + b] = fd.dw(m.gt.component_field(a * d + b));
    ScalarField out(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gt(d - 1, d - 1);
            for (int a = 1; a < d; ++a)
                for (int b = 1; b < d; ++b) gt(a - 1, b - 1) = m.gt.at(a * d + b, iw, it);
            Mat gti = gt.inverse();
            double h = 0.0;
            for (int a = 1; a < d; ++a)
                for (int b = 1; b < d; ++b) {
                    const double dv = dgt[(a <= b ? a * d + b : b * d + a)].at(iw, it);
                    h += gti(a - 1, b - 1) * dv;
                }
            out.at(iw, it) = h / (2.0 * m.lapse.at(iw, it));
        }
    return out;
}

struct AlhOrder {
    DecayFit fit;
    std::vector<double> stations;
    std::vector<double> sups;
    double constant = 0.0; // max over stations of sup * e^{a w}
};

// Measures the decay order of the curvature deviation |R + K|_g by fitting
// station sups over the reporting box against e^{-a w}.
inline AlhOrder verify_alh_order(const ZeroShiftMetric& m, const FdOps& fd, double a_expected) {
    const auto& g = m.g();
    std::vector<double> stations = norm_stations(g);
    if (stations.size() < 4)
        throw precondition_error("radial range too short to measure a decay order");

    CurvatureTensors curv = curvature_tensors(m, fd);
    MetricField full = to_full_metric(m);
    ScalarField dev = gnorm_field(full, curv.deviation);

    AlhOrder out;
    ReportRegion reg = make_report_region(g);
    for (double wc : stations) {
        const int iw = nearest_level(g, wc);
        out.stations.push_back(g.w(iw));
        out.sups.push_back(sup_at_height(dev, reg, iw));
    }
    out.fit = fit_decay_rate(out.stations, out.sups);
    for (std::size_t i = 0; i < out.stations.size(); ++i)
        out.constant = std::max(out.constant, out.sups[i] * std::exp(a_expected * out.stations[i]));
    return out;
}

} // namespace alh
