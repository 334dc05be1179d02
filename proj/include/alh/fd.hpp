#pragma once

#include <Eigen/Dense>

#include "alh/grid.hpp"

namespace alh {

// Three-point stencil; offsets are fixed by the role (centered / left edge / right edge).
struct Stencil3 {
    double c0, c1, c2;
};

// Radial stencils are exponentially fitted: weights reproduce d/dw and d2/dw2
// exactly on span{1, e^w, e^{2w}}. Metrics built from those profiles then
// differentiate exactly to rounding, and on general smooth fields the stencils
// stay second order. Tangential stencils are classical polynomial ones.
struct StencilSet {
    // centered at offsets {-h, 0, +h}
    Stencil3 d1_center, d2_center;
    // left edge, offsets {0, +h, +2h}
    Stencil3 d1_left, d2_left;
    // right edge, offsets {-2h, -h, 0}
    Stencil3 d1_right, d2_right;
};

namespace detail {

inline Stencil3 fit_exp_stencil(double off0, double off1, double off2, double r0, double r1,
                                double r2) {
    Eigen::Matrix3d m;
    m << 1.0, 1.0, 1.0,
        std::exp(off0), std::exp(off1), std::exp(off2),
        std::exp(2.0 * off0), std::exp(2.0 * off1), std::exp(2.0 * off2);
    Eigen::Vector3d rhs(r0, r1, r2);
    Eigen::Vector3d w = m.fullPivLu().solve(rhs);
    return Stencil3{w[0], w[1], w[2]};
}

} // namespace detail

inline StencilSet make_fitted_radial_stencils(double h) {
    StencilSet s;
    s.d1_center = detail::fit_exp_stencil(-h, 0.0, h, 0.0, 1.0, 2.0);
    s.d2_center = detail::fit_exp_stencil(-h, 0.0, h, 0.0, 1.0, 4.0);
    s.d1_left = detail::fit_exp_stencil(0.0, h, 2.0 * h, 0.0, 1.0, 2.0);
    s.d2_left = detail::fit_exp_stencil(0.0, h, 2.0 * h, 0.0, 1.0, 4.0);
    s.d1_right = detail::fit_exp_stencil(-2.0 * h, -h, 0.0, 0.0, 1.0, 2.0);
    s.d2_right = detail::fit_exp_stencil(-2.0 * h, -h, 0.0, 0.0, 1.0, 4.0);
    return s;
}

inline StencilSet make_classical_stencils(double h) {
    StencilSet s;
    s.d1_center = Stencil3{-0.5 / h, 0.0, 0.5 / h};
    s.d2_center = Stencil3{1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)};
    s.d1_left = Stencil3{-1.5 / h, 2.0 / h, -0.5 / h};
    s.d2_left = Stencil3{1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)}; // first order at the edge
    s.d1_right = Stencil3{0.5 / h, -2.0 / h, 1.5 / h};
    s.d2_right = Stencil3{1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)};
    return s;
}

// Derivative operators bound to one grid. Radial = fitted, tangential = classical.
class FdOps {
  public:
    explicit FdOps(const HalfSpaceGrid& grid)
        : grid_(&grid),
          radial_(make_fitted_radial_stencils(grid.dw())),
          tangential_(make_classical_stencils(grid.dx())) {}

    const HalfSpaceGrid& grid() const { return *grid_; }

    ScalarField dw(const ScalarField& f) const { return apply_radial(f, false); }
    ScalarField dww(const ScalarField& f) const { return apply_radial(f, true); }
    ScalarField dx(const ScalarField& f, int axis) const { return apply_tangential(f, axis, false); }
    ScalarField dxx(const ScalarField& f, int axis) const { return apply_tangential(f, axis, true); }

    // d_i with index 0 = radial, 1..n = tangential axes shifted by one.
    ScalarField d(const ScalarField& f, int i) const {
        return i == 0 ? dw(f) : dx(f, i - 1);
    }
    ScalarField d2(const ScalarField& f, int i, int j) const {
        if (i == 0 && j == 0) return dww(f);
        if (i == 0) return dw(dx(f, j - 1));
        if (j == 0) return dw(dx(f, i - 1));
        if (i == j) return dxx(f, i - 1);
        return dx(dx(f, i - 1), j - 1);
    }

  private:
    ScalarField apply_radial(const ScalarField& f, bool second) const {
        const auto& g = *grid_;
        ScalarField out(g);
        const Stencil3& sc = second ? radial_.d2_center : radial_.d1_center;
        const Stencil3& sl = second ? radial_.d2_left : radial_.d1_left;
        const Stencil3& sr = second ? radial_.d2_right : radial_.d1_right;
        for (std::int64_t it = 0; it < g.ntang(); ++it) {
            const std::int64_t base = g.idx(0, it);
            out.flat(base) = sl.c0 * f.flat(base) + sl.c1 * f.flat(base + 1) + sl.c2 * f.flat(base + 2);
            for (int iw = 1; iw + 1 < g.nw(); ++iw) {
                const std::int64_t i = base + iw;
                out.flat(i) = sc.c0 * f.flat(i - 1) + sc.c1 * f.flat(i) + sc.c2 * f.flat(i + 1);
            }
            const std::int64_t top = base + g.nw() - 1;
            out.flat(top) = sr.c0 * f.flat(top - 2) + sr.c1 * f.flat(top - 1) + sr.c2 * f.flat(top);
        }
        return out;
    }

    ScalarField apply_tangential(const ScalarField& f, int axis, bool second) const {
        const auto& g = *grid_;
        if (axis < 0 || axis >= g.n()) throw precondition_error("tangential axis out of range");
        ScalarField out(g);
        const std::int64_t stride = g.tang_stride(axis) * g.nw();
        const Stencil3& sc = second ? tangential_.d2_center : tangential_.d1_center;
        const Stencil3& sl = second ? tangential_.d2_left : tangential_.d1_left;
        const Stencil3& sr = second ? tangential_.d2_right : tangential_.d1_right;
        const double h = g.dx();
        for (std::int64_t it = 0; it < g.ntang(); ++it) {
            const int xa = g.tang_coord(it, axis);
            for (int iw = 0; iw < g.nw(); ++iw) {
                const std::int64_t i = g.idx(iw, it);
                if (xa == 0) {
                    if (second) {
                        // 4-point one-sided second derivative keeps O(dx^2) at the face
                        out.flat(i) = (2.0 * f.flat(i) - 5.0 * f.flat(i + stride) +
                                       4.0 * f.flat(i + 2 * stride) - f.flat(i + 3 * stride)) /
                                      (h * h);
                    } else {
                        out.flat(i) = sl.c0 * f.flat(i) + sl.c1 * f.flat(i + stride) +
                                      sl.c2 * f.flat(i + 2 * stride);
                    }
                } else if (xa == g.nx() - 1) {
                    if (second) {
                        out.flat(i) = (2.0 * f.flat(i) - 5.0 * f.flat(i - stride) +
                                       4.0 * f.flat(i - 2 * stride) - f.flat(i - 3 * stride)) /
                                      (h * h);
                    } else {
                        out.flat(i) = sr.c0 * f.flat(i - 2 * stride) + sr.c1 * f.flat(i - stride) +
                                      sr.c2 * f.flat(i);
                    }
                } else {
                    out.flat(i) = sc.c0 * f.flat(i - stride) + sc.c1 * f.flat(i) +
                                  sc.c2 * f.flat(i + stride);
                }
            }
        }
        return out;
    }

    const HalfSpaceGrid* grid_;
    StencilSet radial_;
    StencilSet tangential_;
};

} // namespace alh
