#pragma once

// Elliptic solve on the half domain x^1 <= 0 with odd reflection.
//
// When the metric is even across the tangential midplane and the source is
// odd, the solution is odd; restricting to half the domain with a Dirichlet
// wall at x^1 = 0 halves the work and pins the parity of the output exactly:
// the returned field satisfies v(w, -x) = -v(w, x) bitwise by construction.
// The admissible decay-weight band for this problem is (0, n); requests
// outside it are rejected up front rather than producing a certificate the
// construction cannot honor.

#include <cmath>
#include <cstdint>
#include <vector>

#include "alh/grid.hpp"
#include "alh/linsolve.hpp"
#include "alh/metric.hpp"

namespace alh {

struct HalfspaceSolution {
    ScalarField v;       // on the full grid, odd across x^1 = 0
    CgStats stats;
    double weighted_sup; // sup over nodes of e^{delta (w - w0)} |v|
};

// Relative mirror-symmetry validation. Coordinates and edge stencils are only
// symmetric to rounding, so the checks are tolerant rather than bitwise.
namespace detail {

inline void require_parity(const HalfSpaceGrid& g, const std::vector<double>& data, int sign,
                           double tol, const char* what) {
    double scale = 0.0;
    for (double v : data) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return;
    for (int ix = 0; ix < g.nx(); ++ix) {
        const int jx = g.nx() - 1 - ix;
        for (int iw = 0; iw < g.nw(); ++iw) {
            const double a = data[static_cast<std::size_t>(g.idx(iw, ix))];
            const double b = data[static_cast<std::size_t>(g.idx(iw, jx))];
            if (std::abs(a - sign * b) > tol * scale) throw data_error(what);
        }
    }
}

} // namespace detail

// Solves the interior system of -div(W G d v) + sigma M v = rhs on the half
// domain and extends oddly. The full-grid rhs must be odd across x^1 = 0 and
// the metric even; both are validated to a relative 1e-12.
inline HalfspaceSolution halfspace_odd_solve(const ZeroShiftMetric& m, double sigma,
                                             const std::vector<double>& rhs_full,
                                             double delta_weight) {
    const HalfSpaceGrid& g = m.g();
    if (g.n() != 1) throw precondition_error("odd-reflection solve supports one tangential axis");
    if (g.nx() % 2 == 0) throw precondition_error("odd-reflection solve needs an odd node count");
    if (!(delta_weight > 0.0 && delta_weight < static_cast<double>(g.n())))
        throw precondition_error("decay weight must lie in (0, n)");
    if (rhs_full.size() != static_cast<std::size_t>(g.npts()))
        throw precondition_error("source length does not match the grid");

    const double ptol = 1e-12;
    detail::require_parity(g, m.lapse.raw(), +1, ptol, "lapse is not even across x^1 = 0");
    for (int c = 0; c < m.gt.ncomp(); ++c) {
        std::vector<double> comp(m.gt.comp(c), m.gt.comp(c) + g.npts());
        detail::require_parity(g, comp, +1, ptol, "tangential metric is not even across x^1 = 0");
    }
    detail::require_parity(g, rhs_full, -1, ptol, "source is not odd across x^1 = 0");

    const int ic = (g.nx() - 1) / 2;          // column of x^1 = 0
    const int nxh = ic + 1;
    HalfSpaceGrid hg(1, g.w0(), g.w_max(), g.nw(), 0.5 * g.l(), nxh);
    ZeroShiftMetric hm(hg);
    std::vector<double> rhs_h(static_cast<std::size_t>(hg.npts()), 0.0);
    for (int ix = 0; ix < nxh; ++ix)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t src = g.idx(iw, ix);
            const std::int64_t dst = hg.idx(iw, ix);
            hm.lapse.raw()[static_cast<std::size_t>(dst)] =
                m.lapse.raw()[static_cast<std::size_t>(src)];
            for (int c = 0; c < m.gt.ncomp(); ++c) hm.gt.comp(c)[dst] = m.gt.comp(c)[src];
            rhs_h[static_cast<std::size_t>(dst)] = rhs_full[static_cast<std::size_t>(src)];
        }

    HelmholtzSystem sys(hm, sigma);
    HalfspaceSolution out{ScalarField(g), CgStats{}, 0.0};
    ScalarField vh = sys.solve(rhs_h, &out.stats);

    for (int ix = 0; ix < g.nx(); ++ix) {
        const int hx = (ix <= ic) ? ix : -1;
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t dst = g.idx(iw, ix);
            if (hx >= 0)
                out.v.raw()[static_cast<std::size_t>(dst)] =
                    vh.raw()[static_cast<std::size_t>(hg.idx(iw, hx))];
            else
                out.v.raw()[static_cast<std::size_t>(dst)] =
                    -vh.raw()[static_cast<std::size_t>(hg.idx(iw, g.nx() - 1 - ix))];
        }
    }

    for (int iw = 0; iw < g.nw(); ++iw) {
        const double wfac = std::exp(delta_weight * (g.w(iw) - g.w0()));
        for (std::int64_t it = 0; it < g.ntang(); ++it)
            out.weighted_sup = std::max(
                out.weighted_sup, wfac * std::abs(out.v.raw()[static_cast<std::size_t>(g.idx(iw, it))]));
    }
    return out;
}

} // namespace alh
