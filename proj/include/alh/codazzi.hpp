#pragma once

// Codazzi deviation of a symmetric 2-tensor and the elliptic recovery that
// rebuilds the tensor from that deviation.
//
// For a symmetric T the deviation f_ijk = D_i T_jk - D_j T_ik measures the
// failure of T to be a Codazzi tensor.  On flat space, if T is traceless,
// del^i f_ijk + d_j f^i_ki = Lap T_jk, so T solves a componentwise Poisson
// problem with source assembled purely from f.  recover_from_defect_flat
// discretizes that problem and is expected to reproduce T to O(h^2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "alh/fd.hpp"
#include "alh/grid.hpp"
#include "alh/linsolve.hpp"
#include "alh/metric.hpp"
#include "alh/ops.hpp"
#include "alh/tensor.hpp"

namespace alh {

// f_ijk = D_i T_jk - D_j T_ik with the Levi-Civita connection of m.
// Antisymmetric in (i, j) by construction.
inline TensorField codazzi_defect(const MetricField& m, const Christoffels& ch,
                                  const TensorField& t, const FdOps& fd) {
    if (t.rank() != 2) throw precondition_error("codazzi_defect expects a 2-tensor");
    const TensorField dt = covariant_derivative(m, ch, t, fd);  // slots (i, j, k) = D_i T_jk
    const HalfSpaceGrid& g = *m.grid;
    const int d = g.dim();
    TensorField f(g, 3);
    const std::int64_t npts = g.npts();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double* out = f.comp((i * d + j) * d + k);
                const double* a = dt.comp((i * d + j) * d + k);
                const double* b = dt.comp((j * d + i) * d + k);
                for (std::int64_t p = 0; p < npts; ++p) out[p] = a[p] - b[p];
            }
    return f;
}

// Same deviation with plain coordinate derivatives (flat background).
inline TensorField codazzi_defect_flat(const TensorField& t, const FdOps& fd) {
    if (t.rank() != 2) throw precondition_error("codazzi_defect_flat expects a 2-tensor");
    const HalfSpaceGrid& g = t.grid();
    const int d = g.dim();
    const std::int64_t npts = g.npts();
    TensorField f(g, 3);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            ScalarField tjk = t.component_field(j * d + k);
            for (int i = 0; i < d; ++i) {
                if (i == j) continue;  // f_jjk = 0 stays zero-initialized
                const std::vector<double>& di = fd.d(tjk, i).raw();
                double* fijk = f.comp((i * d + j) * d + k);
                double* fjik = f.comp((j * d + i) * d + k);
                for (std::int64_t p = 0; p < npts; ++p) {
                    fijk[p] += di[static_cast<std::size_t>(p)];
                    fjik[p] -= di[static_cast<std::size_t>(p)];
                }
            }
        }
    return f;
}

// Poisson source S_jk = del^i f_ijk + d_j f^i_ki on flat space, returned
// symmetrized.  The two raw terms sum to something (j,k)-symmetric whenever f
// is the deviation of a symmetric tensor, but not for arbitrary antisymmetric
// data, so the symmetric part is what the recovery consumes.
inline TensorField poisson_source_from_defect_flat(const TensorField& f, const FdOps& fd) {
    if (f.rank() != 3) throw precondition_error("poisson source expects a 3-tensor");
    const HalfSpaceGrid& g = f.grid();
    const int d = g.dim();
    const std::int64_t npts = g.npts();

    TensorField raw(g, 2);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double* out = raw.comp(j * d + k);
            for (int i = 0; i < d; ++i) {
                ScalarField fijk = f.component_field((i * d + j) * d + k);
                const std::vector<double>& di = fd.d(fijk, i).raw();
                for (std::int64_t p = 0; p < npts; ++p) out[p] += di[static_cast<std::size_t>(p)];
            }
        }
    for (int k = 0; k < d; ++k) {
        ScalarField trace(g);
        for (int i = 0; i < d; ++i) {
            const double* src = f.comp((i * d + k) * d + i);
            std::vector<double>& acc = trace.raw();
            for (std::int64_t p = 0; p < npts; ++p) acc[static_cast<std::size_t>(p)] += src[p];
        }
        for (int j = 0; j < d; ++j) {
            const std::vector<double>& dj = fd.d(trace, j).raw();
            double* out = raw.comp(j * d + k);
            for (std::int64_t p = 0; p < npts; ++p) out[p] += dj[static_cast<std::size_t>(p)];
        }
    }

    TensorField s(g, 2, TensorField::Sym::pair01);
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
            ScalarField half(g);
            const double* a = raw.comp(j * d + k);
            const double* b = raw.comp(k * d + j);
            for (std::int64_t p = 0; p < npts; ++p)
                half.raw()[static_cast<std::size_t>(p)] = 0.5 * (a[p] + b[p]);
            s.assign_component(j * d + k, half);
        }
    return s;
}

// Curvature commutator D_i D_j phi_k - D_j D_i phi_k = -R^l_{kij} phi_l
// specialized to T = Hess(phi): the deviation of a Hessian is pure curvature.
// Returns the predicted deviation so tests can compare against codazzi_defect.
inline TensorField hessian_defect_from_curvature(const MetricField& m,
                                                 const CurvatureTensors& curv,
                                                 const ScalarField& phi, const FdOps& fd) {
    const HalfSpaceGrid& g = *m.grid;
    const int d = g.dim();
    TensorField pred(g, 3);
    std::vector<ScalarField> dphi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dphi[static_cast<std::size_t>(i)] = fd.d(phi, i);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t p = g.idx(iw, it);
            const Mat ginv = m.full(iw, it).inverse();
            Vec grad_up(d);
            for (int l = 0; l < d; ++l) {
                double acc = 0.0;
                for (int a = 0; a < d; ++a)
                    acc += ginv(l, a) * dphi[static_cast<std::size_t>(a)].raw()[static_cast<std::size_t>(p)];
                grad_up(l) = acc;
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        double acc = 0.0;
                        // first Riemann slot lowered, paired with the raised gradient
                        for (int l = 0; l < d; ++l)
                            acc -= curv.riemann.at(((l * d + k) * d + i) * d + j, iw, it) *
                                   grad_up(l);
                        pred.comp((i * d + j) * d + k)[p] = acc;
                    }
        }
    return pred;
}

// Componentwise Dirichlet Poisson recovery on a flat background:
// solve Lap U_jk = S_jk with U = boundary_data on the box boundary.
// boundary_data supplies the manufactured field; its interior values only
// seed the correction split, so the solve is still a genuine recovery.
inline TensorField recover_from_defect_flat(const TensorField& s, const TensorField& boundary_data,
                                            CgStats* worst_stats = nullptr) {
    if (s.rank() != 2 || boundary_data.rank() != 2)
        throw precondition_error("recovery expects 2-tensors");
    const HalfSpaceGrid& g = s.grid();
    const int d = g.dim();
    const std::int64_t npts = g.npts();

    ZeroShiftMetric flat(g);
    std::fill(flat.lapse.raw().begin(), flat.lapse.raw().end(), 1.0);
    for (int a = 1; a < d; ++a) {
        double* c = flat.gt.comp(a * d + a);
        std::fill(c, c + npts, 1.0);
    }
    HelmholtzSystem sys(flat, 0.0);
    const std::vector<double>& mass = sys.mass();

    TensorField u(g, 2, TensorField::Sym::pair01);
    CgStats worst{};
    for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) {
            ScalarField lift = boundary_data.component_field(j * d + k);
            // Rows discretize mass * (-Lap), so Lap U = S becomes
            // A U = -mass * S; subtracting A(lift) reduces to zero Dirichlet.
            std::vector<double> rhs = sys.rhs_from_lift(lift);
            const double* sv = s.comp(j * d + k);
            for (std::int64_t p = 0; p < npts; ++p)
                rhs[static_cast<std::size_t>(p)] -= sv[p] * mass[static_cast<std::size_t>(p)];
            CgStats st{};
            ScalarField v = sys.solve(rhs, &st);
            if (st.iterations > worst.iterations) worst = st;
            ScalarField total(g);
            for (std::int64_t p = 0; p < npts; ++p)
                total.raw()[static_cast<std::size_t>(p)] =
                    lift.raw()[static_cast<std::size_t>(p)] + v.raw()[static_cast<std::size_t>(p)];
            u.assign_component(j * d + k, total);
        }
    if (worst_stats) *worst_stats = worst;
    return u;
}

}  // namespace alh
