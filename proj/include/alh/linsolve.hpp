#pragma once

#include <cmath>
#include <vector>

#include "alh/metric.hpp"

namespace alh {

struct CgStats {
    int iters = 0;
    double rel_residual = 0.0;
    bool converged = false;
    bool stagnated = false;
};

// Symmetric flux-form discretization of A u = -div(W G^{-1} grad u) + sigma W u
// on the grid, W = sqrt(det G), with Dirichlet data eliminated to the boundary.
//
// Radial face coefficients use the geometric mean of the nodal values times a
// global calibration factor c_h chosen so that on the exact hyperbolic metric
// the discrete operator with sigma = n + 1 annihilates the lift e^w exactly:
// radial fluxes of e^w against e^{n w} weights telescope to
// 4 sinh(h/2) sinh((n+1)h/2) / h^2 per unit mass instead of n + 1, and c_h is
// that ratio inverted. c_h = 1 + O(h^2), so consistency order is unchanged,
// and a single positive scaling keeps the form symmetric positive definite.
class HelmholtzSystem {
public:
    HelmholtzSystem(const ZeroShiftMetric& m, double sigma) : grid_(&m.g()), sigma_(sigma) {
        const auto& g = *grid_;
        const int d = g.dim(), n = g.n();
        const double h = g.dw();
        ch_ = (n + 1) * h * h / (4.0 * std::sinh(0.5 * h) * std::sinh(0.5 * (n + 1) * h));

        mass_.resize(g.npts());
        rad_node_.resize(g.npts());
        for (int axis = 0; axis < n; ++axis) tan_face_[axis].assign(g.npts(), 0.0);
        if (n == 2) mix_.assign(g.npts(), 0.0);

        std::vector<double> tan_node[3];
        for (int axis = 0; axis < n; ++axis) tan_node[axis].assign(g.npts(), 0.0);

        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 0; iw < g.nw(); ++iw) {
                const std::int64_t i = g.idx(iw, it);
                const double N = m.lapse.at(iw, it);
                Mat gt(d - 1, d - 1);
                for (int a = 1; a < d; ++a)
                    for (int b = 1; b < d; ++b) gt(a - 1, b - 1) = m.gt.at(a * d + b, iw, it);
                const double W = N * std::sqrt(gt.determinant());
                Mat gti = gt.inverse();
                mass_[i] = W;
                rad_node_[i] = W / (N * N);
                for (int axis = 0; axis < n; ++axis) tan_node[axis][i] = W * gti(axis, axis);
                if (n == 2) mix_[i] = W * gti(0, 1);
            }

        rad_face_.assign(g.npts(), 0.0);
        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 0; iw + 1 < g.nw(); ++iw)
                rad_face_[g.idx(iw, it)] =
                    ch_ * std::sqrt(rad_node_[g.idx(iw, it)] * rad_node_[g.idx(iw + 1, it)]);
        for (int axis = 0; axis < n; ++axis) {
            const std::int64_t st = g.tang_stride(axis);
            for (std::int64_t it = 0; it < g.ntang(); ++it) {
                if (g.tang_coord(it, axis) + 1 >= g.nx()) continue;
                for (int iw = 0; iw < g.nw(); ++iw) {
                    const std::int64_t i = g.idx(iw, it);
                    tan_face_[axis][i] = 0.5 * (tan_node[axis][i] + tan_node[axis][g.idx(iw, it + st)]);
                }
            }
        }
    }

    const HalfSpaceGrid& grid() const { return *grid_; }
    double calibration() const { return ch_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& mass() const { return mass_; }

    bool is_interior(int iw, std::int64_t it) const {
        const auto& g = *grid_;
        if (iw == 0 || iw == g.nw() - 1) return false;
        for (int axis = 0; axis < g.n(); ++axis) {
            const int c = g.tang_coord(it, axis);
            if (c == 0 || c == g.nx() - 1) return false;
        }
        return true;
    }

    // A u at interior nodes; boundary rows are zeroed.
    std::vector<double> apply_full(const std::vector<double>& u) const {
        const auto& g = *grid_;
        const int n = g.n();
        const double idw2 = 1.0 / (g.dw() * g.dw());
        const double idx2 = 1.0 / (g.dx() * g.dx());
        std::vector<double> v(g.npts(), 0.0);
        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 1; iw + 1 < g.nw(); ++iw) {
                if (!is_interior(iw, it)) continue;
                const std::int64_t i = g.idx(iw, it);
                double acc = sigma_ * mass_[i] * u[i];
                acc += idw2 * (rad_face_[i] * (u[i] - u[g.idx(iw + 1, it)]) +
                               rad_face_[g.idx(iw - 1, it)] * (u[i] - u[g.idx(iw - 1, it)]));
                for (int axis = 0; axis < n; ++axis) {
                    const std::int64_t st = g.tang_stride(axis);
                    acc += idx2 * (tan_face_[axis][i] * (u[i] - u[i + st * g.nw()]) +
                                   tan_face_[axis][g.idx(iw, it - st)] *
                                       (u[i] - u[i - st * g.nw()]));
                }
                if (n == 2) {
                    const std::int64_t sx = g.nw(), sy = g.nw() * g.nx();
                    const double q = -0.25 * idx2;
                    acc += q * (mix_[i + sx] * (u[i + sx + sy] - u[i + sx - sy]) -
                                mix_[i - sx] * (u[i - sx + sy] - u[i - sx - sy]) +
                                mix_[i + sy] * (u[i + sx + sy] - u[i - sx + sy]) -
                                mix_[i - sy] * (u[i + sx - sy] - u[i - sx - sy]));
                }
                v[i] = acc;
            }
        return v;
    }

    // Correction-form right-hand side: interior rows of -A applied to a lift.
    std::vector<double> rhs_from_lift(const ScalarField& lift) const {
        std::vector<double> v = apply_full(lift.raw());
        for (double& x : v) x = -x;
        return v;
    }

    // Conservative divergence of a nodal contravariant flux density
    // P^i ~ W G^{ij} psi_j: face-averaged differences, interior rows only.
    // Built from the same face pattern as the stiffness so that a flux that
    // is identically zero produces a bitwise-zero right-hand side.
    std::vector<double> flux_divergence(const std::vector<ScalarField>& P) const {
        const auto& g = *grid_;
        const int n = g.n();
        if (static_cast<int>(P.size()) != n + 1)
            throw precondition_error("flux_divergence needs n + 1 components");
        std::vector<double> v(g.npts(), 0.0);
        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 1; iw + 1 < g.nw(); ++iw) {
                if (!is_interior(iw, it)) continue;
                const std::int64_t i = g.idx(iw, it);
                double acc = 0.5 * (P[0].flat(g.idx(iw + 1, it)) - P[0].flat(g.idx(iw - 1, it))) /
                             g.dw();
                for (int axis = 0; axis < n; ++axis) {
                    const std::int64_t st = g.tang_stride(axis) * g.nw();
                    acc += 0.5 * (P[axis + 1].flat(i + st) - P[axis + 1].flat(i - st)) / g.dx();
                }
                v[i] = acc;
            }
        return v;
    }

    std::vector<double> diagonal() const {
        const auto& g = *grid_;
        const int n = g.n();
        const double idw2 = 1.0 / (g.dw() * g.dw());
        const double idx2 = 1.0 / (g.dx() * g.dx());
        std::vector<double> dia(g.npts(), 1.0);
        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 1; iw + 1 < g.nw(); ++iw) {
                if (!is_interior(iw, it)) continue;
                const std::int64_t i = g.idx(iw, it);
                double acc = sigma_ * mass_[i];
                acc += idw2 * (rad_face_[i] + rad_face_[g.idx(iw - 1, it)]);
                for (int axis = 0; axis < n; ++axis) {
                    const std::int64_t st = g.tang_stride(axis);
                    acc += idx2 * (tan_face_[axis][i] + tan_face_[axis][g.idx(iw, it - st)]);
                }
                dia[i] = acc;
            }
        return dia;
    }

    // Jacobi-preconditioned CG on the interior block with zero Dirichlet data.
    // rhs uses full-grid indexing; boundary entries are ignored. A stagnation
    // escape accepts the iterate when the right-hand side sits at rounding
    // level and the residual cannot contract further.
    ScalarField solve(const std::vector<double>& rhs, CgStats* stats = nullptr,
                      double rel_tol = 1e-10, int max_iters = 100000) const {
        const auto& g = *grid_;
        std::vector<double> dia = diagonal();

        std::vector<double> x(g.npts(), 0.0), r(g.npts(), 0.0), z(g.npts(), 0.0),
            p(g.npts(), 0.0);
        auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
            double acc = 0.0;
            for (std::int64_t it = 0; it < g.ntang(); ++it)
                for (int iw = 1; iw + 1 < g.nw(); ++iw)
                    if (is_interior(iw, it)) {
                        const std::int64_t i = g.idx(iw, it);
                        acc += a[i] * b[i];
                    }
            return acc;
        };

        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 1; iw + 1 < g.nw(); ++iw)
                if (is_interior(iw, it)) {
                    const std::int64_t i = g.idx(iw, it);
                    r[i] = rhs[i];
                }
        const double bnorm = std::sqrt(dot(r, r));
        CgStats st;
        if (bnorm == 0.0) {
            st.converged = true;
            if (stats) *stats = st;
            ScalarField out(g);
            return out;
        }
        const double target = rel_tol * bnorm;

        for (std::int64_t i = 0; i < g.npts(); ++i) z[i] = r[i] / dia[i];
        p = z;
        double rz = dot(r, z);
        double rnorm = bnorm;
        double window_best = rnorm;
        int since_best = 0;

        int k = 0;
        for (; k < max_iters; ++k) {
            std::vector<double> ap = apply_full(p);
            const double pap = dot(p, ap);
            if (!(pap > 0.0)) throw internal_error("CG lost positive definiteness");
            const double alpha = rz / pap;
            for (std::int64_t i = 0; i < g.npts(); ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            rnorm = std::sqrt(dot(r, r));
            if (rnorm <= target) {
                st.converged = true;
                ++k;
                break;
            }
            if (rnorm < window_best * (1.0 - 1e-3)) {
                window_best = rnorm;
                since_best = 0;
            } else if (++since_best >= 50) {
                st.stagnated = true;
                ++k;
                break;
            }
            for (std::int64_t i = 0; i < g.npts(); ++i) z[i] = r[i] / dia[i];
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::int64_t i = 0; i < g.npts(); ++i) p[i] = z[i] + beta * p[i];
        }
        st.iters = k;
        st.rel_residual = rnorm / bnorm;
        if (!st.converged && !st.stagnated) throw internal_error("CG failed to converge");
        if (stats) *stats = st;

        ScalarField out(g);
        for (std::int64_t i = 0; i < g.npts(); ++i) out.flat(i) = x[i];
        return out;
    }

private:
    const HalfSpaceGrid* grid_;
    double sigma_;
    double ch_;
    std::vector<double> mass_, rad_node_, rad_face_;
    std::vector<double> tan_face_[3];
    std::vector<double> mix_;
};

} // namespace alh
