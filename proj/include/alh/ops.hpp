#pragma once

#include <array>

#include "alh/fd.hpp"
#include "alh/metric.hpp"
#include "alh/tensor.hpp"

namespace alh {

// Christoffel symbols Gamma^k_{ij}, component index (k*d + i)*d + j,
// symmetric in (i, j).
struct Christoffels {
    TensorField gamma;
};

namespace detail {

// Loads all components of a tensor at one point into a stack buffer (d^4 max).
inline void load_point(const TensorField& t, int iw, std::int64_t it, double* buf) {
    const int nc = t.ncomp();
    const std::int64_t i = t.grid().idx(iw, it);
    for (int c = 0; c < nc; ++c) buf[c] = t.comp(c)[i];
}

// out[.., s, ..] = sum_a M(s, a) in[.., a, ..] on one slot of a rank-k buffer.
inline void apply_slot(const Mat& M, int slot, int rank, int d, const double* in, double* out) {
    int nc = 1, stride = 1;
    for (int r = 0; r < rank; ++r) nc *= d;
    for (int r = slot + 1; r < rank; ++r) stride *= d;
    for (int c = 0; c < nc; ++c) {
        const int s = (c / stride) % d;
        const int base = c - s * stride;
        double acc = 0.0;
        for (int a = 0; a < d; ++a) acc += M(s, a) * in[base + a * stride];
        out[c] = acc;
    }
}

// Raises every slot with ginv; in and out must not alias.
inline void raise_all(const Mat& ginv, int rank, int d, const double* in, double* out) {
    std::array<double, 256> tmp{};
    const double* src = in;
    for (int slot = 0; slot < rank; ++slot) {
        double* dst = (slot % 2 == 0) ? out : tmp.data();
        apply_slot(ginv, slot, rank, d, src, dst);
        src = dst;
    }
    if (src != out) {
        int nc = 1;
        for (int r = 0; r < rank; ++r) nc *= d;
        for (int c = 0; c < nc; ++c) out[c] = src[c];
    }
}

} // namespace detail

// Pointwise g-norm of a covariant tensor: sqrt of the full contraction of T
// with itself through ginv on every slot. Linear in component count per slot.
inline double gnorm_at(const Mat& ginv, const TensorField& t, int iw, std::int64_t it) {
    const int rank = t.rank();
    if (rank == 0) return std::abs(t.at(0, iw, it));
    const int d = t.dim();
    std::array<double, 256> low{}, up{};
    detail::load_point(t, iw, it, low.data());
    detail::raise_all(ginv, rank, d, low.data(), up.data());
    double acc = 0.0;
    for (int c = 0; c < t.ncomp(); ++c) acc += low[c] * up[c];
    return std::sqrt(std::max(acc, 0.0));
}

// Full g-contraction of two covariant tensors of equal rank at one point.
inline double gdot_at(const Mat& ginv, const TensorField& A, const TensorField& B, int iw,
                      std::int64_t it) {
    if (A.rank() != B.rank()) throw precondition_error("gdot_at needs equal ranks");
    const int rank = A.rank();
    if (rank == 0) return A.at(0, iw, it) * B.at(0, iw, it);
    const int d = A.dim();
    std::array<double, 256> la{}, ua{}, lb{};
    detail::load_point(A, iw, it, la.data());
    detail::load_point(B, iw, it, lb.data());
    detail::raise_all(ginv, rank, d, la.data(), ua.data());
    double acc = 0.0;
    for (int c = 0; c < A.ncomp(); ++c) acc += ua[c] * lb[c];
    return acc;
}

// Closed-form Christoffels of N^2 dw^2 + g_t. The radial-tangential entries
// follow from the generic formula; in particular Gamma^mu_00 = -N g^{mu nu} d_nu N.
inline Christoffels christoffel_zero_shift(const ZeroShiftMetric& m, const FdOps& fd) {
    const auto& g = m.g();
    const int d = g.dim(), n = g.n();
    Christoffels ch{TensorField(g, 3)};

    ScalarField dN_w = fd.dw(m.lapse);
    std::vector<ScalarField> dN_x(n);
    for (int a = 0; a < n; ++a) dN_x[a] = fd.dx(m.lapse, a);

    // dgt[a*d+b][i] = d_i g_{ab} for tangential (a, b), i over all directions
    std::vector<std::vector<ScalarField>> dgt(d * d, std::vector<ScalarField>(d));
    for (int a = 1; a < d; ++a)
        for (int b = a; b < d; ++b) {
            ScalarField comp = m.gt.component_field(a * d + b);
            dgt[a * d + b][0] = fd.dw(comp);
            for (int mu = 0; mu < n; ++mu) dgt[a * d + b][mu + 1] = fd.dx(comp, mu);
        }
    auto dg = [&](int a, int b, int i) -> const ScalarField& {
        return dgt[(a <= b ? a * d + b : b * d + a)][i];
    };

    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const double N = m.lapse.at(iw, it);
            Mat gt(d - 1, d - 1);
            for (int a = 1; a < d; ++a)
                for (int b = 1; b < d; ++b) gt(a - 1, b - 1) = m.gt.at(a * d + b, iw, it);
            Mat gti = gt.inverse();

            auto set = [&](int k, int i, int j, double v) {
                ch.gamma.set((k * d + i) * d + j, iw, it, v);
                ch.gamma.set((k * d + j) * d + i, iw, it, v);
            };

            set(0, 0, 0, dN_w.at(iw, it) / N);
            for (int mu = 1; mu < d; ++mu) set(0, 0, mu, dN_x[mu - 1].at(iw, it) / N);
            for (int mu = 1; mu < d; ++mu) {
                double acc = 0.0;
                for (int nu = 1; nu < d; ++nu) acc += gti(mu - 1, nu - 1) * dN_x[nu - 1].at(iw, it);
                set(mu, 0, 0, -N * acc);
            }
            for (int mu = 1; mu < d; ++mu)
                for (int nu = mu; nu < d; ++nu)
                    set(0, mu, nu, -0.5 / (N * N) * dg(mu, nu, 0).at(iw, it));
            for (int mu = 1; mu < d; ++mu)
                for (int nu = 1; nu < d; ++nu) {
                    double acc = 0.0;
                    for (int s = 1; s < d; ++s) acc += gti(mu - 1, s - 1) * dg(s, nu, 0).at(iw, it);
                    set(mu, 0, nu, 0.5 * acc);
                }
            for (int mu = 1; mu < d; ++mu)
                for (int nu = 1; nu < d; ++nu)
                    for (int s = nu; s < d; ++s) {
                        double acc = 0.0;
                        for (int a = 1; a < d; ++a)
                            acc += gti(mu - 1, a - 1) * (dg(a, s, nu).at(iw, it) +
                                                         dg(nu, a, s).at(iw, it) -
                                                         dg(nu, s, a).at(iw, it));
                        set(mu, nu, s, 0.5 * acc);
                    }
        }
    return ch;
}

// Generic-formula Christoffels of an arbitrary full metric (oracle for the
// closed forms, and the working path for non-product metrics).
inline Christoffels christoffel_generic(const MetricField& m, const FdOps& fd) {
    const auto& g = *m.grid;
    const int d = g.dim(), n = g.n();
    Christoffels ch{TensorField(g, 3)};

    std::vector<std::vector<ScalarField>> dg(d * d, std::vector<ScalarField>(d));
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            ScalarField comp = m.g2.component_field(a * d + b);
            dg[a * d + b][0] = fd.dw(comp);
            for (int mu = 0; mu < n; ++mu) dg[a * d + b][mu + 1] = fd.dx(comp, mu);
        }
    auto D = [&](int a, int b, int i, int iw, std::int64_t it) {
        return dg[(a <= b ? a * d + b : b * d + a)][i].at(iw, it);
    };

    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gm = m.full(iw, it);
            Mat gi = gm.inverse();
            for (int k = 0; k < d; ++k)
                for (int i = 0; i < d; ++i)
                    for (int j = i; j < d; ++j) {
                        double acc = 0.0;
                        for (int a = 0; a < d; ++a)
                            acc += gi(k, a) * (D(a, j, i, iw, it) + D(i, a, j, iw, it) -
                                               D(i, j, a, iw, it));
                        const double v = 0.5 * acc;
                        ch.gamma.set((k * d + i) * d + j, iw, it, v);
                        ch.gamma.set((k * d + j) * d + i, iw, it, v);
                    }
        }
    return ch;
}

struct CurvatureTensors {
    TensorField riemann;   // lowered, slots (m, l, i, j): antisym (m,l), (i,j), pair-symmetric
    TensorField ricci;     // rank 2
    ScalarField scalar;
    TensorField deviation; // riemann + constant-curvature comparison tensor
};

// K_{ijkl} = g_ik g_jl - g_il g_jk evaluated pointwise.
inline void constant_curvature_at(const Mat& gm, int d, double* out) {
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    out[((i * d + j) * d + k) * d + l] = gm(i, k) * gm(j, l) - gm(i, l) * gm(j, k);
}

// Assembles the full curvature set from Christoffels. The raw FD Riemann obeys
// its algebraic symmetries only to truncation order, so the lowered tensor is
// projected onto the Riemann-symmetric part (first Bianchi stays a test).
inline CurvatureTensors curvature_tensors(const MetricField& m, const Christoffels& ch,
                                          const FdOps& fd) {
    const auto& g = *m.grid;
    const int d = g.dim(), n = g.n();
    CurvatureTensors out{TensorField(g, 4), TensorField(g, 2, TensorField::Sym::pair01),
                         ScalarField(g), TensorField(g, 4)};

    // dgamma[(k*d+j)*d+l][i] = d_i Gamma^k_{jl}
    std::vector<std::vector<ScalarField>> dgamma(d * d * d, std::vector<ScalarField>(d));
    for (int c = 0; c < d * d * d; ++c) {
        ScalarField comp = ch.gamma.component_field(c);
        dgamma[c][0] = fd.dw(comp);
        for (int mu = 0; mu < n; ++mu) dgamma[c][mu + 1] = fd.dx(comp, mu);
    }

    std::array<double, 256> up{}, low{}, anti{}, kn{};
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const std::int64_t pt = g.idx(iw, it);
            Mat gm = m.full(iw, it);
            Mat gi = gm.inverse();

            auto gam = [&](int k, int i, int j) { return ch.gamma.comp((k * d + i) * d + j)[pt]; };

            // up[((k*d+l)*d+i)*d+j] = R^k_{lij}
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    for (int i = 0; i < d; ++i)
                        for (int j = i + 1; j < d; ++j) {
                            double v = dgamma[(k * d + j) * d + l][i].at(iw, it) -
                                       dgamma[(k * d + i) * d + l][j].at(iw, it);
                            for (int a = 0; a < d; ++a)
                                v += gam(k, i, a) * gam(a, j, l) - gam(k, j, a) * gam(a, i, l);
                            up[((k * d + l) * d + i) * d + j] = v;
                            up[((k * d + l) * d + j) * d + i] = -v;
                        }
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    for (int i = 0; i < d; ++i) up[((k * d + l) * d + i) * d + i] = 0.0;

            // lower the first slot
            for (int mi = 0; mi < d; ++mi)
                for (int l = 0; l < d; ++l)
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j) {
                            double v = 0.0;
                            for (int k = 0; k < d; ++k)
                                v += gm(mi, k) * up[((k * d + l) * d + i) * d + j];
                            low[((mi * d + l) * d + i) * d + j] = v;
                        }

            // project onto the Riemann-symmetric part
            auto L = [&](int a, int b, int c, int e) { return low[((a * d + b) * d + c) * d + e]; };
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    for (int c = 0; c < d; ++c)
                        for (int e = 0; e < d; ++e)
                            anti[((a * d + b) * d + c) * d + e] =
                                0.25 * (L(a, b, c, e) - L(b, a, c, e) - L(a, b, e, c) +
                                        L(b, a, e, c));
            constant_curvature_at(gm, d, kn.data());
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    for (int c = 0; c < d; ++c)
                        for (int e = 0; e < d; ++e) {
                            const int ce = ((a * d + b) * d + c) * d + e;
                            const int swapped = ((c * d + e) * d + a) * d + b;
                            const double v = 0.5 * (anti[ce] + anti[swapped]);
                            out.riemann.comp(ce)[pt] = v;
                            out.deviation.comp(ce)[pt] = v + kn[ce];
                        }

            // Ric_{lj} = g^{mk} R_{m l k j}
            for (int l = 0; l < d; ++l)
                for (int j = l; j < d; ++j) {
                    double v = 0.0;
                    for (int mi = 0; mi < d; ++mi)
                        for (int k = 0; k < d; ++k)
                            v += gi(mi, k) * out.riemann.comp(((mi * d + l) * d + k) * d + j)[pt];
                    out.ricci.set(l * d + j, iw, it, v);
                }
            double sc = 0.0;
            for (int l = 0; l < d; ++l)
                for (int j = 0; j < d; ++j) sc += gi(l, j) * out.ricci.comp(l * d + j)[pt];
            out.scalar.flat(pt) = sc;
        }
    return out;
}

inline CurvatureTensors curvature_tensors(const ZeroShiftMetric& m, const FdOps& fd) {
    MetricField full = to_full_metric(m);
    Christoffels ch = christoffel_zero_shift(m, fd);
    return curvature_tensors(full, ch, fd);
}

// Hess_{ij} phi = d_i d_j phi - Gamma^k_{ij} d_k phi.
inline TensorField hessian_scalar(const MetricField& m, const Christoffels& ch,
                                  const ScalarField& phi, const FdOps& fd) {
    const auto& g = *m.grid;
    const int d = g.dim();
    TensorField out(g, 2, TensorField::Sym::pair01);
    std::vector<ScalarField> dphi(d);
    for (int i = 0; i < d; ++i) dphi[i] = fd.d(phi, i);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            ScalarField dij = fd.d2(phi, i, j);
            for (std::int64_t pt = 0; pt < g.npts(); ++pt) {
                double v = dij.flat(pt);
                for (int k = 0; k < d; ++k)
                    v -= ch.gamma.comp((k * d + i) * d + j)[pt] * dphi[k].flat(pt);
                dij.flat(pt) = v;
            }
            out.assign_component(i * d + j, dij);
        }
    return out;
}

inline ScalarField laplacian(const MetricField& m, const TensorField& hess) {
    const auto& g = *m.grid;
    const int d = g.dim();
    ScalarField out(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gi = m.full(iw, it).inverse();
            double v = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) v += gi(i, j) * hess.at(i * d + j, iw, it);
            out.at(iw, it) = v;
        }
    return out;
}

// (A ^ B)_{ijkl} = A_ik B_jl + A_jl B_ik - A_il B_jk - A_jk B_il.
inline TensorField kulkarni_nomizu(const TensorField& A, const TensorField& B) {
    if (A.rank() != 2 || B.rank() != 2)
        throw precondition_error("kulkarni_nomizu needs rank-2 inputs");
    const auto& g = A.grid();
    const int d = A.dim();
    TensorField out(g, 4);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double* dst = out.comp(((i * d + j) * d + k) * d + l);
                    const double* aik = A.comp(i * d + k);
                    const double* ail = A.comp(i * d + l);
                    const double* ajk = A.comp(j * d + k);
                    const double* ajl = A.comp(j * d + l);
                    const double* bik = B.comp(i * d + k);
                    const double* bil = B.comp(i * d + l);
                    const double* bjk = B.comp(j * d + k);
                    const double* bjl = B.comp(j * d + l);
                    for (std::int64_t pt = 0; pt < g.npts(); ++pt)
                        dst[pt] = aik[pt] * bjl[pt] + ajl[pt] * bik[pt] - ail[pt] * bjk[pt] -
                                  ajk[pt] * bil[pt];
                }
    return out;
}

// T - (tr_g T / (n+1)) g for rank-2 T.
inline TensorField traceless_part(const MetricField& m, const TensorField& t) {
    const auto& g = *m.grid;
    const int d = g.dim();
    TensorField out(g, 2, TensorField::Sym::pair01);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gm = m.full(iw, it);
            Mat gi = gm.inverse();
            double tr = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) tr += gi(i, j) * t.at(i * d + j, iw, it);
            const double s = tr / d;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j)
                    out.set(i * d + j, iw, it, t.at(i * d + j, iw, it) - s * gm(i, j));
        }
    return out;
}

// Covariant derivative of a covariant rank-k field; the derivative slot comes first.
inline TensorField covariant_derivative(const MetricField& m, const Christoffels& ch,
                                        const TensorField& t, const FdOps& fd) {
    const auto& g = *m.grid;
    const int d = g.dim();
    const int rank = t.rank();
    if (rank + 1 > 4) throw precondition_error("covariant derivative output exceeds rank 4");
    TensorField out(g, rank + 1);
    const int nc = t.ncomp();
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i < d; ++i) out.assign_component(i * nc + c, fd.d(t.component_field(c), i));
    for (int c = 0; c < nc; ++c) {
        std::array<int, 4> sl{};
        int cc = c;
        for (int r = rank - 1; r >= 0; --r) {
            sl[r] = cc % d;
            cc /= d;
        }
        for (int i = 0; i < d; ++i) {
            double* dst = out.comp(i * nc + c);
            for (int r = 0; r < rank; ++r) {
                int stride = 1;
                for (int q = r + 1; q < rank; ++q) stride *= d;
                const int base = c - sl[r] * stride;
                for (int a = 0; a < d; ++a) {
                    const double* gaa = ch.gamma.comp((a * d + i) * d + sl[r]);
                    const double* tc = t.comp(base + a * stride);
                    for (std::int64_t pt = 0; pt < g.npts(); ++pt) dst[pt] -= gaa[pt] * tc[pt];
                }
            }
        }
    }
    return out;
}

// Hessian of phi in the conformal metric e^{-2u} g:
// Hessbar phi = Hess phi + du o dphi + dphi o du - <du, dphi>_g g.
inline TensorField conformal_hessian(const MetricField& m, const Christoffels& ch,
                                     const ScalarField& u, const ScalarField& phi,
                                     const FdOps& fd) {
    const auto& g = *m.grid;
    const int d = g.dim();
    TensorField hess = hessian_scalar(m, ch, phi, fd);
    std::vector<ScalarField> du(d), dphi(d);
    for (int i = 0; i < d; ++i) {
        du[i] = fd.d(u, i);
        dphi[i] = fd.d(phi, i);
    }
    TensorField out(g, 2, TensorField::Sym::pair01);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gm = m.full(iw, it);
            Mat gi = gm.inverse();
            double pair = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    pair += gi(i, j) * du[i].at(iw, it) * dphi[j].at(iw, it);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    const double v = hess.at(i * d + j, iw, it) +
                                     du[i].at(iw, it) * dphi[j].at(iw, it) +
                                     dphi[i].at(iw, it) * du[j].at(iw, it) - pair * gm(i, j);
                    out.set(i * d + j, iw, it, v);
                }
        }
    return out;
}

// Lowered Riemann tensor of gbar = t^{-2} g:
// Rbar = t^{-2} (R + (Hess t / t) ^ g - 1/2 |dt/t|^2 g ^ g).
inline TensorField conformal_riemann(const MetricField& m, const Christoffels& ch,
                                     const CurvatureTensors& curv, const ScalarField& t,
                                     const FdOps& fd) {
    const auto& g = *m.grid;
    const int d = g.dim();
    TensorField hess = hessian_scalar(m, ch, t, fd);
    std::vector<ScalarField> dt(d);
    for (int i = 0; i < d; ++i) dt[i] = fd.d(t, i);

    TensorField hess_over_t(g, 2, TensorField::Sym::pair01);
    ScalarField half_dt2(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const double tv = t.at(iw, it);
            Mat gi = m.full(iw, it).inverse();
            double n2 = 0.0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) n2 += gi(i, j) * dt[i].at(iw, it) * dt[j].at(iw, it);
            half_dt2.at(iw, it) = 0.5 * n2 / (tv * tv);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j)
                    hess_over_t.set(i * d + j, iw, it, hess.at(i * d + j, iw, it) / tv);
        }

    TensorField kn1 = kulkarni_nomizu(hess_over_t, m.g2);
    TensorField kngg = kulkarni_nomizu(m.g2, m.g2);
    TensorField out(g, 4);
    for (int c = 0; c < d * d * d * d; ++c) {
        double* dst = out.comp(c);
        const double* r = curv.riemann.comp(c);
        const double* k1 = kn1.comp(c);
        const double* k2 = kngg.comp(c);
        for (std::int64_t it = 0; it < g.ntang(); ++it)
            for (int iw = 0; iw < g.nw(); ++iw) {
                const std::int64_t pt = g.idx(iw, it);
                const double tv = t.at(iw, it);
                dst[pt] = (r[pt] + k1[pt] - half_dt2.at(iw, it) * k2[pt]) / (tv * tv);
            }
    }
    return out;
}

// Pointwise field of g-norms of a tensor.
inline ScalarField gnorm_field(const MetricField& m, const TensorField& t) {
    const auto& g = *m.grid;
    ScalarField out(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gi = m.full(iw, it).inverse();
            out.at(iw, it) = gnorm_at(gi, t, iw, it);
        }
    return out;
}

// Norm of the (3,1) version of a lowered rank-4 tensor. The first slot is
// raised with raise_metric (the metric whose curvature it is); the resulting
// mixed tensor is measured in norm_metric: the raised slot contracts with
// norm_g, the covariant slots with norm_g^{-1}.
inline ScalarField gnorm31_field(const MetricField& norm_metric, const MetricField& raise_metric,
                                 const TensorField& r4) {
    const auto& g = *norm_metric.grid;
    const int d = g.dim();
    if (r4.rank() != 4) throw precondition_error("gnorm31_field needs a rank-4 tensor");
    ScalarField out(g);
    std::array<double, 256> low{}, mixed{}, dual{}, tmp{};
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            Mat gr = raise_metric.full(iw, it).inverse();
            Mat gn = norm_metric.full(iw, it);
            Mat gni = gn.inverse();
            detail::load_point(r4, iw, it, low.data());
            detail::apply_slot(gr, 0, 4, d, low.data(), mixed.data());
            detail::apply_slot(gn, 0, 4, d, mixed.data(), tmp.data());
            detail::apply_slot(gni, 1, 4, d, tmp.data(), dual.data());
            detail::apply_slot(gni, 2, 4, d, dual.data(), tmp.data());
            detail::apply_slot(gni, 3, 4, d, tmp.data(), dual.data());
            double acc = 0.0;
            for (int c = 0; c < r4.ncomp(); ++c) acc += mixed[c] * dual[c];
            out.at(iw, it) = std::sqrt(std::max(acc, 0.0));
        }
    return out;
}

} // namespace alh
