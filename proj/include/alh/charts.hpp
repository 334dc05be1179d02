#pragma once

// Harmonic coordinates in two places: interior charts on the half-space grid,
// anchored to a prescribed boundary profile, and boundary charts on zoomed
// balls where harmonic coordinates approach linear ones as the zoom tightens.
//
// The interior solve uses a flux-difference right-hand side: the divergence of
// W_g G dphi0 minus the same flux formed from the exact product reference
// metric dw^2 + e^{2w} delta. Both fluxes go through one code path, so on the
// exact product metric the difference, the right-hand side, and the harmonic
// correction are all identically zero and the chart is phi0 itself.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "alh/fd.hpp"
#include "alh/grid.hpp"
#include "alh/halfspace.hpp"
#include "alh/linsolve.hpp"
#include "alh/metric.hpp"
#include "alh/ops.hpp"
#include "alh/tensor.hpp"
#include "alh/zoo.hpp"

namespace alh {

// Contravariant flux density P^i = W g^{ij} d_j phi with W = N sqrt(det g_t).
inline std::vector<ScalarField> harmonic_flux(const ZeroShiftMetric& m, const ScalarField& phi,
                                              const FdOps& fd) {
    const HalfSpaceGrid& g = m.g();
    const int d = g.dim();
    std::vector<ScalarField> dphi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dphi[static_cast<std::size_t>(i)] = fd.d(phi, i);
    std::vector<ScalarField> p(static_cast<std::size_t>(d), ScalarField(g));
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t q = g.idx(iw, it);
            const double N = m.lapse.at(iw, it);
            Mat gt(d - 1, d - 1);
            for (int a = 1; a < d; ++a)
                for (int b = 1; b < d; ++b) gt(a - 1, b - 1) = m.gt.at(a * d + b, iw, it);
            const double W = N * std::sqrt(gt.determinant());
            const Mat gti = gt.inverse();
            p[0].raw()[static_cast<std::size_t>(q)] =
                (W / (N * N)) * dphi[0].raw()[static_cast<std::size_t>(q)];
            for (int a = 1; a < d; ++a) {
                double acc = 0.0;
                for (int b = 1; b < d; ++b)
                    acc += gti(a - 1, b - 1) *
                           dphi[static_cast<std::size_t>(b)].raw()[static_cast<std::size_t>(q)];
                p[static_cast<std::size_t>(a)].raw()[static_cast<std::size_t>(q)] = W * acc;
            }
        }
    return p;
}

struct InteriorChart {
    ScalarField phi0;        // boundary profile, constant along w
    ScalarField correction;  // harmonic correction psi
    ScalarField phi;         // phi0 + psi
    ScalarField pairing;     // <dw, dphi>_g = N^{-2} d_w phi
    CgStats stats;
    double rhs_max = 0.0;
};

struct InteriorChartOptions {
    bool odd_reflection = false;  // restrict to x^1 <= 0 and extend oddly (n = 1 only)
    double delta_weight = 0.5;    // decay-weight certificate for the odd path
};

// Harmonic chart anchored to profile(x): solves Lap_g phi = 0 with
// phi - profile -> 0 enforced through zero Dirichlet boxes for the correction.
inline InteriorChart solve_interior_chart(const ZeroShiftMetric& m, const FdOps& fd,
                                          const std::function<double(std::array<double, 3>)>& profile,
                                          const InteriorChartOptions& opts = {}) {
    const HalfSpaceGrid& g = m.g();
    InteriorChart out;
    out.phi0 = ScalarField::from(g, [&](double, std::array<double, 3> px) { return profile(px); });

    std::vector<ScalarField> pm = harmonic_flux(m, out.phi0, fd);
    std::vector<ScalarField> pref = harmonic_flux(make_hyperbolic(g), out.phi0, fd);
    for (std::size_t c = 0; c < pm.size(); ++c) {
        std::vector<double>& a = pm[c].raw();
        const std::vector<double>& b = pref[c].raw();
        for (std::size_t q = 0; q < a.size(); ++q) a[q] -= b[q];
    }

    HelmholtzSystem sys(m, 0.0);
    std::vector<double> rhs = sys.flux_divergence(pm);
    for (double v : rhs) out.rhs_max = std::max(out.rhs_max, std::abs(v));

    if (opts.odd_reflection) {
        HalfspaceSolution hs = halfspace_odd_solve(m, 0.0, rhs, opts.delta_weight);
        out.correction = hs.v;
        out.stats = hs.stats;
    } else {
        out.correction = sys.solve(rhs, &out.stats);
    }

    out.phi = ScalarField(g);
    for (std::int64_t q = 0; q < g.npts(); ++q)
        out.phi.flat(q) = out.phi0.flat(q) + out.correction.flat(q);

    out.pairing = ScalarField(g);
    ScalarField dphi_w = fd.dw(out.phi);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t q = g.idx(iw, it);
            const double N = m.lapse.at(iw, it);
            out.pairing.flat(q) = dphi_w.flat(q) / (N * N);
        }
    return out;
}

// Residual of the pairing identity for u = <dt, dphi>_g with phi harmonic:
//   -Lap u - (n - 1) u + 2 (Ric + n g)(dt, dphi) + 2 <Hess0 t, Hess phi> = 0,
// where Hess0 is the trace-free Hessian. Returned pointwise; boundary-adjacent
// rows carry one-sided stencil noise and should be judged on the interior.
inline ScalarField dt_dphi_identity_residual(const ZeroShiftMetric& m, const FdOps& fd,
                                             const ScalarField& t, const ScalarField& phi) {
    const HalfSpaceGrid& g = m.g();
    const int n = g.n(), d = g.dim();
    const MetricField mf = to_full_metric(m);
    const Christoffels ch = christoffel_zero_shift(m, fd);
    const CurvatureTensors curv = curvature_tensors(mf, ch, fd);

    const TensorField hess_t = hessian_scalar(mf, ch, t, fd);
    const TensorField hess_phi = hessian_scalar(mf, ch, phi, fd);
    const TensorField hess0_t = traceless_part(mf, hess_t);

    std::vector<ScalarField> dt(static_cast<std::size_t>(d)), dphi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        dt[static_cast<std::size_t>(i)] = fd.d(t, i);
        dphi[static_cast<std::size_t>(i)] = fd.d(phi, i);
    }

    ScalarField u(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t q = g.idx(iw, it);
            const Mat ginv = mf.full(iw, it).inverse();
            double acc = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    acc += ginv(i, j) * dt[static_cast<std::size_t>(i)].flat(q) *
                           dphi[static_cast<std::size_t>(j)].flat(q);
            u.flat(q) = acc;
        }

    const TensorField hess_u = hessian_scalar(mf, ch, u, fd);
    const ScalarField lap_u = laplacian(mf, hess_u);

    ScalarField res(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t q = g.idx(iw, it);
            const Mat gfull = mf.full(iw, it);
            const Mat ginv = gfull.inverse();

            Vec gt_up(d), gp_up(d);
            for (int i = 0; i < d; ++i) {
                double at = 0.0, ap = 0.0;
                for (int j = 0; j < d; ++j) {
                    at += ginv(i, j) * dt[static_cast<std::size_t>(j)].flat(q);
                    ap += ginv(i, j) * dphi[static_cast<std::size_t>(j)].flat(q);
                }
                gt_up(i) = at;
                gp_up(i) = ap;
            }
            double ric_term = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    ric_term += (curv.ricci.at(i * d + j, iw, it) + n * gfull(i, j)) * gt_up(i) *
                                gp_up(j);
            const double cross = gdot_at(ginv, hess0_t, hess_phi, iw, it);

            res.flat(q) = -lap_u.flat(q) - (n - 1) * u.flat(q) + 2.0 * ric_term + 2.0 * cross;
        }
    return res;
}

// ---------------------------------------------------------------------------
// Boundary charts on zoomed balls.

// Callback giving the boundary metric components at a boundary point
// (row-major n x n into out; only the upper-left n x n block is used).
using BoundaryMetricFn =
    std::function<void(const std::array<double, 2>& x, std::array<double, 4>& out)>;

struct BoundaryChart {
    int n = 1;
    int m = 0;                       // nodes per axis on [-1, 1]
    std::vector<double> u;           // chart corrections, component-major (n fields of m^n)
    double sup_u = 0.0;
    double sup_du = 0.0;
    double holder_du = 0.0;          // discrete alpha-seminorm of the gradient
    double c1a_norm = 0.0;           // sup_u + sup_du + holder_du
    double min_jac = 1.0;            // min det(I + Du) over measured nodes
    int iterations = 0;
};

namespace detail {

// Discrete alpha-Hoelder seminorm of samples along one axis family, dyadic
// separations only. vals laid out with the given stride; count samples.
inline double holder_pairs(const std::vector<double>& v, const std::vector<unsigned char>& ok,
                           std::size_t base, std::size_t stride, int count, double h, double alpha) {
    double best = 0.0;
    for (int sep = 1; sep < count; sep *= 2) {
        const double dist = std::pow(sep * h, alpha);
        for (int i = 0; i + sep < count; ++i) {
            const std::size_t p = base + static_cast<std::size_t>(i) * stride;
            const std::size_t q = p + static_cast<std::size_t>(sep) * stride;
            if (!ok[p] || !ok[q]) continue;
            best = std::max(best, std::abs(v[q] - v[p]) / dist);
        }
    }
    return best;
}

} // namespace detail

// One-dimensional boundary chart on the zoomed interval: solves
// d/dz ( B(z) (1 + u'(z)) ) = 0 on [-1, 1], u(+-1) = 0, B = gbar^{-1/2}
// evaluated at x0 + z / lambda. Direct tridiagonal elimination.
inline BoundaryChart solve_boundary_chart_1d(const BoundaryMetricFn& gbar,
                                             const std::array<double, 2>& x0, double lambda,
                                             double alpha, int m = 129) {
    if (m < 8) throw precondition_error("boundary chart needs at least 8 nodes");
    if (!(lambda >= 1.0)) throw precondition_error("zoom factor must be at least 1");
    const double h = 2.0 / (m - 1);
    std::vector<double> bcoef(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double z = -1.0 + h * i;
        std::array<double, 4> comp{};
        gbar({x0[0] + z / lambda, x0[1]}, comp);
        if (!(comp[0] > 0.0)) throw data_error("boundary metric must be positive");
        bcoef[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(comp[0]);
    }

    // Flux form: Bh_{i+1/2} (u_{i+1} - u_i) - Bh_{i-1/2} (u_i - u_{i-1}) =
    //            -h (Bh_{i+1/2} - Bh_{i-1/2}).
    std::vector<double> lo(static_cast<std::size_t>(m), 0.0), di(static_cast<std::size_t>(m), 1.0),
        up(static_cast<std::size_t>(m), 0.0), rhs(static_cast<std::size_t>(m), 0.0);
    for (int i = 1; i + 1 < m; ++i) {
        const double bp = 0.5 * (bcoef[static_cast<std::size_t>(i)] + bcoef[static_cast<std::size_t>(i) + 1]);
        const double bm = 0.5 * (bcoef[static_cast<std::size_t>(i)] + bcoef[static_cast<std::size_t>(i) - 1]);
        lo[static_cast<std::size_t>(i)] = bm;
        di[static_cast<std::size_t>(i)] = -(bp + bm);
        up[static_cast<std::size_t>(i)] = bp;
        rhs[static_cast<std::size_t>(i)] = -h * (bp - bm);
    }
    // Thomas elimination with Dirichlet rows already in place.
    for (int i = 1; i < m; ++i) {
        const double w = lo[static_cast<std::size_t>(i)] / di[static_cast<std::size_t>(i) - 1];
        di[static_cast<std::size_t>(i)] -= w * up[static_cast<std::size_t>(i) - 1];
        rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i) - 1];
    }
    BoundaryChart out;
    out.n = 1;
    out.m = m;
    out.u.assign(static_cast<std::size_t>(m), 0.0);
    out.u[static_cast<std::size_t>(m) - 1] = rhs[static_cast<std::size_t>(m) - 1] / di[static_cast<std::size_t>(m) - 1];
    for (int i = m - 2; i >= 0; --i)
        out.u[static_cast<std::size_t>(i)] =
            (rhs[static_cast<std::size_t>(i)] - up[static_cast<std::size_t>(i)] * out.u[static_cast<std::size_t>(i) + 1]) /
            di[static_cast<std::size_t>(i)];

    std::vector<double> du(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        if (i == 0)
            du[s] = (-1.5 * out.u[0] + 2.0 * out.u[1] - 0.5 * out.u[2]) / h;
        else if (i == m - 1)
            du[s] = (0.5 * out.u[s - 2] - 2.0 * out.u[s - 1] + 1.5 * out.u[s]) / h;
        else
            du[s] = (out.u[s + 1] - out.u[s - 1]) / (2.0 * h);
    }
    std::vector<unsigned char> ok(static_cast<std::size_t>(m), 1);
    for (int i = 0; i < m; ++i) {
        out.sup_u = std::max(out.sup_u, std::abs(out.u[static_cast<std::size_t>(i)]));
        out.sup_du = std::max(out.sup_du, std::abs(du[static_cast<std::size_t>(i)]));
        out.min_jac = std::min(out.min_jac, 1.0 + du[static_cast<std::size_t>(i)]);
    }
    out.holder_du = detail::holder_pairs(du, ok, 0, 1, m, h, alpha);
    out.c1a_norm = out.sup_u + out.sup_du + out.holder_du;
    return out;
}

// Two-dimensional boundary chart on the zoomed unit disk. The operator is the
// expanded divergence form B^{ab} d_a d_b u + (d_a B^{ab}) d_b u with
// B = sqrt(det gbar) gbar^{-1}; Dirichlet zero on the circle via cut-cell
// (Shortley-Weller) arms; deterministic lexicographic SOR.
inline BoundaryChart solve_boundary_chart_disk(const BoundaryMetricFn& gbar,
                                               const std::array<double, 2>& x0, double lambda,
                                               double alpha, int m = 65) {
    if (m < 16) throw precondition_error("disk chart needs at least 16 nodes per axis");
    if (!(lambda >= 1.0)) throw precondition_error("zoom factor must be at least 1");
    const double h = 2.0 / (m - 1);
    const std::size_t np = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    auto id = [m](int i, int j) { return static_cast<std::size_t>(i) + static_cast<std::size_t>(m) * static_cast<std::size_t>(j); };
    auto zc = [h](int i) { return -1.0 + h * i; };

    std::vector<unsigned char> inside(np, 0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            inside[id(i, j)] = (zc(i) * zc(i) + zc(j) * zc(j) < 1.0 - 1e-12) ? 1 : 0;

    // B components and their centered derivatives from the callback.
    std::vector<double> b11(np), b12(np), b22(np), div1(np), div2(np);
    auto bmat = [&](double z1, double z2, double out[3]) {
        std::array<double, 4> comp{};
        gbar({x0[0] + z1 / lambda, x0[1] + z2 / lambda}, comp);
        const double det = comp[0] * comp[3] - comp[1] * comp[2];
        if (!(det > 0.0) || !(comp[0] > 0.0)) throw data_error("boundary metric must be positive");
        const double s = std::sqrt(det);
        out[0] = s * (comp[3] / det);
        out[1] = s * (-comp[1] / det);
        out[2] = s * (comp[0] / det);
    };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            double c[3], e[3], w[3], nn[3], ss[3];
            bmat(zc(i), zc(j), c);
            bmat(zc(i) + h, zc(j), e);
            bmat(zc(i) - h, zc(j), w);
            bmat(zc(i), zc(j) + h, nn);
            bmat(zc(i), zc(j) - h, ss);
            const std::size_t q = id(i, j);
            b11[q] = c[0];
            b12[q] = c[1];
            b22[q] = c[2];
            div1[q] = (e[0] - w[0]) / (2.0 * h) + (nn[1] - ss[1]) / (2.0 * h);
            div2[q] = (e[1] - w[1]) / (2.0 * h) + (nn[2] - ss[2]) / (2.0 * h);
        }

    // Cut-cell arm lengths toward the circle, in units of h (1 = full arm).
    auto arm = [&](int i, int j, int d1, int d2) {
        const double z1 = zc(i), z2 = zc(j);
        const int ii = i + d1, jj = j + d2;
        if (ii >= 0 && ii < m && jj >= 0 && jj < m && inside[id(ii, jj)]) return 1.0;
        const double zd = z1 * d1 + z2 * d2;  // z . unit direction
        const double disc = zd * zd + 1.0 - z1 * z1 - z2 * z2;
        const double s = -zd + std::sqrt(std::max(disc, 0.0));
        return std::min(std::max(s / h, 1e-6), 1.0);
    };

    BoundaryChart out;
    out.n = 2;
    out.m = m;
    out.u.assign(2 * np, 0.0);
    out.min_jac = 1.0;

    std::vector<double> grad_store(4 * np, 0.0);  // du1/dz1, du1/dz2, du2/dz1, du2/dz2
    std::vector<unsigned char> core(np, 0);

    const double omega = 1.5;
    const int max_sweeps = 200000;
    int total_iters = 0;

    for (int comp = 0; comp < 2; ++comp) {
        std::vector<double> u(np, 0.0), rhs(np, 0.0);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i)
                if (inside[id(i, j)]) rhs[id(i, j)] = -(comp == 0 ? div1[id(i, j)] : div2[id(i, j)]);

        double rhs_scale = 0.0;
        for (double v : rhs) rhs_scale = std::max(rhs_scale, std::abs(v));
        const double tol = 1e-10 * (1.0 + rhs_scale);

        int sweep = 0;
        double res_inf = tol + 1.0;
        while (res_inf > tol) {
            if (++sweep > max_sweeps) throw internal_error("disk relaxation failed to converge");
            res_inf = 0.0;
            for (int j = 1; j + 1 < m; ++j)
                for (int i = 1; i + 1 < m; ++i) {
                    const std::size_t q = id(i, j);
                    if (!inside[q]) continue;
                    const double ae = arm(i, j, 1, 0), aw = arm(i, j, -1, 0);
                    const double an = arm(i, j, 0, 1), as = arm(i, j, 0, -1);
                    const double ue = inside[id(i + 1, j)] ? u[id(i + 1, j)] : 0.0;
                    const double uw = inside[id(i - 1, j)] ? u[id(i - 1, j)] : 0.0;
                    const double un = inside[id(i, j + 1)] ? u[id(i, j + 1)] : 0.0;
                    const double us = inside[id(i, j - 1)] ? u[id(i, j - 1)] : 0.0;
                    const double upp = (inside[id(i + 1, j + 1)]) ? u[id(i + 1, j + 1)] : 0.0;
                    const double umm = (inside[id(i - 1, j - 1)]) ? u[id(i - 1, j - 1)] : 0.0;
                    const double upm = (inside[id(i + 1, j - 1)]) ? u[id(i + 1, j - 1)] : 0.0;
                    const double ump = (inside[id(i - 1, j + 1)]) ? u[id(i - 1, j + 1)] : 0.0;

                    // Unequal-arm second and first differences, Dirichlet 0 on cuts.
                    const double h2 = h * h;
                    const double cxx_e = 2.0 / (ae * (ae + aw) * h2);
                    const double cxx_w = 2.0 / (aw * (ae + aw) * h2);
                    const double cyy_n = 2.0 / (an * (an + as) * h2);
                    const double cyy_s = 2.0 / (as * (an + as) * h2);
                    const double cx_e = aw / (ae * (ae + aw) * h);
                    const double cx_w = -ae / (aw * (ae + aw) * h);
                    const double cy_n = as / (an * (an + as) * h);
                    const double cy_s = -an / (as * (an + as) * h);

                    double off = b11[q] * (cxx_e * ue + cxx_w * uw) +
                                 b22[q] * (cyy_n * un + cyy_s * us) +
                                 2.0 * b12[q] * (upp + umm - upm - ump) / (4.0 * h2) +
                                 div1[q] * (cx_e * ue + cx_w * uw) +
                                 div2[q] * (cy_n * un + cy_s * us);
                    double diag = -b11[q] * (cxx_e + cxx_w) - b22[q] * (cyy_n + cyy_s) +
                                  div1[q] * (-cx_e - cx_w) + div2[q] * (-cy_n - cy_s);
                    const double resid = rhs[q] - (diag * u[q] + off);
                    res_inf = std::max(res_inf, std::abs(resid));
                    u[q] += omega * resid / diag;
                }
        }
        total_iters += sweep;

        for (std::size_t q = 0; q < np; ++q)
            out.u[static_cast<std::size_t>(comp) * np + q] = u[q];

        for (int j = 2; j + 2 < m; ++j)
            for (int i = 2; i + 2 < m; ++i) {
                const std::size_t q = id(i, j);
                const double z2 = zc(i) * zc(i) + zc(j) * zc(j);
                if (std::sqrt(z2) > 1.0 - 2.0 * h) continue;
                core[q] = 1;
                grad_store[static_cast<std::size_t>(2 * comp) * np + q] =
                    (u[id(i + 1, j)] - u[id(i - 1, j)]) / (2.0 * h);
                grad_store[static_cast<std::size_t>(2 * comp + 1) * np + q] =
                    (u[id(i, j + 1)] - u[id(i, j - 1)]) / (2.0 * h);
                out.sup_u = std::max(out.sup_u, std::abs(u[q]));
            }
    }
    out.iterations = total_iters;

    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const std::size_t q = id(i, j);
            if (!core[q]) continue;
            Eigen::Matrix2d jac;
            jac << 1.0 + grad_store[q], grad_store[np + q], grad_store[2 * np + q],
                1.0 + grad_store[3 * np + q];
            out.min_jac = std::min(out.min_jac, jac.determinant());
            for (int c = 0; c < 4; ++c)
                out.sup_du = std::max(out.sup_du, std::abs(grad_store[static_cast<std::size_t>(c) * np + q]));
        }
    for (int c = 0; c < 4; ++c) {
        std::vector<double> slice(grad_store.begin() + static_cast<std::ptrdiff_t>(c) * static_cast<std::ptrdiff_t>(np),
                                  grad_store.begin() + static_cast<std::ptrdiff_t>(c + 1) * static_cast<std::ptrdiff_t>(np));
        for (int j = 0; j < m; ++j)
            out.holder_du = std::max(out.holder_du,
                                     detail::holder_pairs(slice, core, id(0, j), 1, m, h, alpha));
        for (int i = 0; i < m; ++i)
            out.holder_du = std::max(
                out.holder_du,
                detail::holder_pairs(slice, core, id(i, 0), static_cast<std::size_t>(m), m, h, alpha));
    }
    out.c1a_norm = out.sup_u + out.sup_du + out.holder_du;
    return out;
}

struct ZoomStep {
    double lambda;
    double c1a_norm;
    double min_jac;
};

struct ZoomSearch {
    bool ok = false;
    double lambda = 0.0;
    double c1a_norm = 0.0;
    double min_jac = 0.0;
    std::vector<ZoomStep> trail;
};

// Doubles the zoom factor from 1 until the chart correction is small in
// C^{1,alpha} and the chart map stays a local diffeomorphism. Gives up
// gracefully past 2^10.
inline ZoomSearch zoom_lambda_search(int n, const BoundaryMetricFn& gbar,
                                     const std::array<double, 2>& x0, double alpha,
                                     double target_norm, int m = 0) {
    if (n != 1 && n != 2) throw precondition_error("boundary charts support n = 1 or 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw precondition_error("alpha must lie in (0, 1)");
    if (!(target_norm > 0.0)) throw precondition_error("target norm must be positive");
    if (m == 0) m = (n == 1) ? 129 : 49;

    ZoomSearch out;
    for (double lam = 1.0; lam <= 1024.0; lam *= 2.0) {
        BoundaryChart c = (n == 1) ? solve_boundary_chart_1d(gbar, x0, lam, alpha, m)
                                   : solve_boundary_chart_disk(gbar, x0, lam, alpha, m);
        out.trail.push_back({lam, c.c1a_norm, c.min_jac});
        if (c.c1a_norm <= target_norm && c.min_jac >= 0.5) {
            out.ok = true;
            out.lambda = lam;
            out.c1a_norm = c.c1a_norm;
            out.min_jac = c.min_jac;
            return out;
        }
    }
    return out;
}

}  // namespace alh
