#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "alh/fd.hpp"
#include "alh/grid.hpp"
#include "alh/tensor.hpp"

namespace alh {

// Product window centered at (wc, xc): radial interval |w - wc| < r crossed
// with the Euclidean tangential ball |y - xc| < r e^{-wc}.
struct Window {
    double wc = 0.0;
    std::array<double, 3> xc{};
    double r = 1.0;
};

// Volume of a window in h = dw^2 + e^{2w} delta; independent of the center.
inline double window_volume(int n, double r) {
    const double omega = (n == 1) ? 2.0 : (n == 2 ? M_PI : 4.0 * M_PI / 3.0);
    return omega * std::pow(r, n) * (std::exp(n * r) - std::exp(-n * r)) / n;
}

namespace detail {

// Antiderivative piece for circle-rectangle overlap: int sqrt(R^2-u^2) du.
inline double circ_prim(double u, double R) {
    u = std::clamp(u, -R, R);
    return 0.5 * (u * std::sqrt(std::max(R * R - u * u, 0.0)) +
                  R * R * std::asin(std::clamp(u / R, -1.0, 1.0)));
}

inline double circ_int(double a, double b, double R) {
    if (b <= a) return 0.0;
    return circ_prim(b, R) - circ_prim(a, R);
}

// Area of {u <= x, v <= y} intersected with the disk of radius R at the origin.
inline double corner_area(double x, double y, double R) {
    if (x <= -R || y <= -R) return 0.0;
    const double xp = std::min(x, R);
    const double yp = std::min(y, R);
    const double c = std::sqrt(std::max(R * R - yp * yp, 0.0));
    if (yp >= 0.0) {
        // height = s(u) + min(yp, s(u)), s <= yp iff |u| >= c
        double area = circ_int(-R, xp, R);
        area += circ_int(-R, std::min(xp, -c), R);
        area += yp * std::max(0.0, std::min(xp, c) - (-c));
        area += circ_int(c, std::max(xp, c), R);
        return area;
    }
    // height = (yp + s(u))_+ on |u| <= c
    const double hi = std::min(xp, c);
    if (hi <= -c) return 0.0;
    return yp * (hi - (-c)) + circ_int(-c, hi, R);
}

} // namespace detail

// Exact area of an axis-aligned rectangle intersected with a disk.
inline double rect_disk_area(double x0, double x1, double y0, double y1, double cx, double cy,
                             double R) {
    const double a = detail::corner_area(x1 - cx, y1 - cy, R);
    const double b = detail::corner_area(x0 - cx, y1 - cy, R);
    const double c = detail::corner_area(x1 - cx, y0 - cy, R);
    const double d = detail::corner_area(x0 - cx, y0 - cy, R);
    return std::max(a - b - c + d, 0.0);
}

// Product quadrature over a window: per-node weights are the exact h-volume of
// the node's Voronoi cell clipped to the window, split as (radial integral of
// e^{n w}) x (tangential cell-ball overlap). Weights sum to the exact window
// volume regardless of how the ball sits relative to the grid.
class WindowQuad {
public:
    WindowQuad(const HalfSpaceGrid& g, const Window& win) : grid_(&g) {
        const int n = g.n();
        const double wlo = win.wc - win.r, whi = win.wc + win.r;
        const double eps = 1e-9 * (1.0 + std::abs(win.wc));
        if (wlo < g.w0() - eps || whi > g.w_max() + eps)
            throw precondition_error("window leaves the radial domain");
        const double R = win.r * std::exp(-win.wc);
        for (int mu = 0; mu < n; ++mu)
            if (win.xc[mu] - R < -g.l() - eps || win.xc[mu] + R > g.l() + eps)
                throw precondition_error("window leaves the tangential domain");

        for (int iw = 0; iw < g.nw(); ++iw) {
            const double a = std::max(g.w(iw) - 0.5 * g.dw(), wlo);
            const double b = std::min(g.w(iw) + 0.5 * g.dw(), whi);
            if (b > a) radial_.push_back({iw, (std::exp(n * b) - std::exp(n * a)) / n});
        }
        if (n == 1) {
            for (int ix = 0; ix < g.nx(); ++ix) {
                const double a = std::max(g.x(ix) - 0.5 * g.dx(), win.xc[0] - R);
                const double b = std::min(g.x(ix) + 0.5 * g.dx(), win.xc[0] + R);
                if (b > a) tang_.push_back({ix, b - a});
            }
        } else if (n == 2) {
            for (int iy = 0; iy < g.nx(); ++iy)
                for (int ix = 0; ix < g.nx(); ++ix) {
                    const double x0 = g.x(ix) - 0.5 * g.dx(), x1 = g.x(ix) + 0.5 * g.dx();
                    const double y0 = g.x(iy) - 0.5 * g.dx(), y1 = g.x(iy) + 0.5 * g.dx();
                    if (x1 < win.xc[0] - R || x0 > win.xc[0] + R) continue;
                    if (y1 < win.xc[1] - R || y0 > win.xc[1] + R) continue;
                    const double area =
                        rect_disk_area(x0, x1, y0, y1, win.xc[0], win.xc[1], R);
                    if (area > 0.0)
                        tang_.push_back({static_cast<std::int64_t>(ix) + g.nx() * iy, area});
                }
        } else {
            throw precondition_error("window quadrature supports n = 1 or 2");
        }
        double sr = 0.0, st = 0.0;
        for (auto& [i, w] : radial_) sr += w;
        for (auto& [i, w] : tang_) st += w;
        vol_ = sr * st;
    }

    double volume() const { return vol_; }

    // integral of f over the window (h-volume)
    double integral(const ScalarField& f) const {
        double acc = 0.0;
        for (auto& [it, wt] : tang_) {
            double row = 0.0;
            for (auto& [iw, wr] : radial_) row += wr * f.at(iw, it);
            acc += wt * row;
        }
        return acc;
    }

    double average(const ScalarField& f) const { return integral(f) / vol_; }

    // L^p norm of a pointwise magnitude field over the window
    double lp_norm(const ScalarField& mag, double p) const {
        double acc = 0.0;
        for (auto& [it, wt] : tang_) {
            double row = 0.0;
            for (auto& [iw, wr] : radial_) row += wr * std::pow(std::abs(mag.at(iw, it)), p);
            acc += wt * row;
        }
        return std::pow(acc, 1.0 / p);
    }

    double lp_norm_shifted(const ScalarField& f, double shift, double p) const {
        double acc = 0.0;
        for (auto& [it, wt] : tang_) {
            double row = 0.0;
            for (auto& [iw, wr] : radial_) row += wr * std::pow(std::abs(f.at(iw, it) - shift), p);
            acc += wt * row;
        }
        return std::pow(acc, 1.0 / p);
    }

private:
    const HalfSpaceGrid* grid_;
    std::vector<std::pair<int, double>> radial_;
    std::vector<std::pair<std::int64_t, double>> tang_;
    double vol_ = 0.0;
};

// Pointwise tangential pseudo-norm of a covariant rank-k field in
// h = dw^2 + e^{2w} delta: only all-tangential components contribute,
// each contracted with e^{-2w} per slot.
inline ScalarField tangential_magnitude(const TensorField& t) {
    const auto& g = t.grid();
    const int d = g.dim(), rank = t.rank();
    ScalarField out(g);
    if (rank == 0) {
        for (std::int64_t pt = 0; pt < g.npts(); ++pt) out.flat(pt) = std::abs(t.comp(0)[pt]);
        return out;
    }
    std::vector<int> comps;
    for (int c = 0; c < t.ncomp(); ++c) {
        int cc = c;
        bool tangential = true;
        for (int r = 0; r < rank; ++r) {
            if (cc % d == 0) tangential = false;
            cc /= d;
        }
        if (tangential) comps.push_back(c);
    }
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            double s = 0.0;
            for (int c : comps) {
                const double v = t.at(c, iw, it);
                s += v * v;
            }
            out.at(iw, it) = std::exp(-rank * g.w(iw)) * std::sqrt(s);
        }
    return out;
}

// |dF|_h = sqrt((d_w F)^2 + e^{-2w} sum_mu (d_mu F)^2).
inline ScalarField grad_h_magnitude(const ScalarField& f, const FdOps& fd) {
    const auto& g = f.grid();
    const int n = g.n();
    ScalarField dw = fd.dw(f);
    std::vector<ScalarField> dx;
    for (int mu = 0; mu < n; ++mu) dx.push_back(fd.dx(f, mu));
    ScalarField out(g);
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            double s = dw.at(iw, it) * dw.at(iw, it);
            const double e2 = std::exp(-2.0 * g.w(iw));
            for (int mu = 0; mu < n; ++mu) s += e2 * dx[mu].at(iw, it) * dx[mu].at(iw, it);
            out.at(iw, it) = std::sqrt(s);
        }
    return out;
}

inline TensorField radial_derivative(const TensorField& t, const FdOps& fd) {
    TensorField out(t.grid(), t.rank());
    for (int c = 0; c < t.ncomp(); ++c) out.assign_component(c, fd.dw(t.component_field(c)));
    return out;
}

struct MwResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

// Transport estimate for tensor windows: the norm at height w1 is controlled
// by the norm at w0 plus the integrated radial derivative, each damped by
// e^{(n/p - k)(w1 - v)}.
inline MwResult check_moving_window_transport(const HalfSpaceGrid& g, const FdOps& fd,
                                              const TensorField& t,
                                              const std::array<double, 3>& xc, double r, double w0,
                                              double w1, double p) {
    if (!(w1 > w0)) throw precondition_error("transport window needs w1 > w0");
    const int k = t.rank();
    const double lam = g.n() / p - k;
    ScalarField mag = tangential_magnitude(t);
    ScalarField dmag = tangential_magnitude(radial_derivative(t, fd));

    MwResult res;
    res.lhs = WindowQuad(g, Window{w1, xc, r}).lp_norm(mag, p);

    const int m = std::max(16, static_cast<int>(std::ceil((w1 - w0) / g.dw())));
    const double h = (w1 - w0) / m;
    double integral = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double v = w0 + j * h;
        const double val =
            std::exp(lam * (w1 - v)) * WindowQuad(g, Window{v, xc, r}).lp_norm(dmag, p);
        integral += (j == 0 || j == m) ? 0.5 * val : val;
    }
    integral *= h;
    res.rhs = integral +
              std::exp(lam * (w1 - w0)) * WindowQuad(g, Window{w0, xc, r}).lp_norm(mag, p);
    res.pass = res.lhs <= res.rhs * 1.05 + 1e-14;
    return res;
}

// Oscillation estimate for scalars (needs p > n + 1): the deviation from the
// window average at w1 is controlled by derivative norms at w0 and the
// integrated radial derivative.
inline MwResult check_moving_window_oscillation(const HalfSpaceGrid& g, const FdOps& fd,
                                                const ScalarField& f,
                                                const std::array<double, 3>& xc, double r,
                                                double w0, double w1, double p) {
    const int n = g.n();
    if (!(p > n + 1)) throw precondition_error("oscillation window needs p > n + 1");
    if (!(w1 > w0)) throw precondition_error("oscillation window needs w1 > w0");

    ScalarField dwf = fd.dw(f);
    ScalarField dwmag(g);
    for (std::int64_t pt = 0; pt < g.npts(); ++pt) dwmag.flat(pt) = std::abs(dwf.flat(pt));
    ScalarField dmag = grad_h_magnitude(f, fd);

    WindowQuad top(g, Window{w1, xc, r});
    const double avg = top.average(f);

    MwResult res;
    res.lhs = top.lp_norm_shifted(f, avg, p);

    const double vol = window_volume(n, r);
    const double c1 = (2.0 * r * p / (p - n - 1.0)) * std::pow(vol, 1.0 / p - 1.0);
    const double c2 = c1 * std::exp(r);

    WindowQuad base(g, Window{w0, xc, r});
    const int m = std::max(16, static_cast<int>(std::ceil((w1 - w0) / g.dw())));
    const double h = (w1 - w0) / m;
    double integral = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double v = w0 + j * h;
        const double val = std::exp((n / p) * (w1 - v)) *
                           WindowQuad(g, Window{v, xc, r}).lp_norm(dwmag, p);
        integral += (j == 0 || j == m) ? 0.5 * val : val;
    }
    integral *= h;

    res.rhs = c1 * std::exp((n / p) * (w1 - w0)) * base.lp_norm(dwmag, p) +
              c2 * std::exp(-(1.0 - n / p) * (w1 - w0)) * base.lp_norm(dmag, p) +
              2.0 * integral;
    res.pass = res.lhs <= res.rhs * 1.05 + 1e-14;
    return res;
}

struct GronwallResult {
    std::vector<double> bound;
    bool premise_ok = false;
    bool conclusion_ok = false;
};

// From f <= a + int_{w0}^{w} b f (checked by quadrature with 5% slack) derives
// the explicit bound f(w) <= a(w) + int a b e^{int b} and re-checks it.
inline GronwallResult gronwall_bound(const std::vector<double>& ws, const std::vector<double>& f,
                                     const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t m = ws.size();
    if (m < 2 || f.size() != m || a.size() != m || b.size() != m)
        throw precondition_error("gronwall inputs need equal sizes >= 2");
    for (std::size_t i = 0; i + 1 < m; ++i)
        if (!(ws[i + 1] > ws[i])) throw precondition_error("gronwall grid must increase");
    for (double bi : b)
        if (bi < 0.0) throw precondition_error("gronwall needs b >= 0");

    auto cumtrapz = [&](auto&& val) {
        std::vector<double> out(m, 0.0);
        for (std::size_t i = 1; i < m; ++i)
            out[i] = out[i - 1] + 0.5 * (ws[i] - ws[i - 1]) * (val(i) + val(i - 1));
        return out;
    };

    GronwallResult res;
    std::vector<double> bf = cumtrapz([&](std::size_t i) { return b[i] * f[i]; });
    res.premise_ok = true;
    for (std::size_t i = 0; i < m; ++i)
        if (f[i] > a[i] + bf[i] + 0.05 * (std::abs(a[i]) + std::abs(bf[i])) + 1e-14)
            res.premise_ok = false;

    std::vector<double> B = cumtrapz([&](std::size_t i) { return b[i]; });
    std::vector<double> T = cumtrapz([&](std::size_t i) { return a[i] * b[i] * std::exp(-B[i]); });
    res.bound.resize(m);
    for (std::size_t i = 0; i < m; ++i) res.bound[i] = a[i] + std::exp(B[i]) * T[i];

    res.conclusion_ok = true;
    for (std::size_t i = 0; i < m; ++i)
        if (f[i] > res.bound[i] * 1.05 + 1e-14) res.conclusion_ok = false;
    return res;
}

struct DecayFit {
    bool usable = false;
    double rate = 0.0;
    int nused = 0;
};

// Least-squares slope of ln(v) against w; rate is the negated slope. Values at
// or below the 1e-12 floor are treated as converged-to-zero and dropped.
inline DecayFit fit_decay_rate(const std::vector<double>& ws, const std::vector<double>& vs) {
    if (ws.size() != vs.size()) throw precondition_error("fit_decay_rate size mismatch");
    constexpr double floor = 1e-12;
    std::vector<double> w, lv;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (vs[i] < 0.0 && std::abs(vs[i]) > floor)
            throw data_error("fit_decay_rate expects nonnegative magnitudes");
        if (vs[i] > floor) {
            w.push_back(ws[i]);
            lv.push_back(std::log(vs[i]));
        }
    }
    DecayFit fit;
    fit.nused = static_cast<int>(w.size());
    if (fit.nused < 4) return fit;
    double mw = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        mw += w[i];
        mv += lv[i];
    }
    mw /= w.size();
    mv /= w.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num += (w[i] - mw) * (lv[i] - mv);
        den += (w[i] - mw) * (w[i] - mw);
    }
    fit.usable = den > 0.0;
    if (fit.usable) fit.rate = -num / den;
    return fit;
}

// Default station heights for decay measurements: unit steps starting two
// units above the bottom edge, stopping one unit under the top edge.
inline std::vector<double> norm_stations(const HalfSpaceGrid& g, double offset = 2.0,
                                         double step = 1.0, double top_margin = 1.0) {
    std::vector<double> out;
    for (double w = g.w0() + offset; w <= g.w_max() - top_margin + 1e-9; w += step)
        out.push_back(w);
    return out;
}

// Station values of the delta-weighted local W^{k,p} norm along the axis
// x = 0: e^{delta w_c} (||mag||_p^p + ||grad_mag||_p^p)^{1/p} over unit windows.
inline std::vector<double> weighted_station_norms(const HalfSpaceGrid& g,
                                                  const std::vector<double>& stations,
                                                  const ScalarField& mag,
                                                  const ScalarField* grad_mag, double delta,
                                                  double p, double r = 1.0) {
    if (stations.size() < 4) throw precondition_error("need at least 4 stations");
    std::vector<double> out;
    out.reserve(stations.size());
    for (double wc : stations) {
        WindowQuad q(g, Window{wc, {0.0, 0.0, 0.0}, r});
        double acc = std::pow(q.lp_norm(mag, p), p);
        if (grad_mag) acc += std::pow(q.lp_norm(*grad_mag, p), p);
        out.push_back(std::exp(delta * wc) * std::pow(acc, 1.0 / p));
    }
    return out;
}

// Interior reporting region: one unit in from the radial edges, middle half of
// the tangential box (lateral solve artifacts live near the outer quarter).
struct ReportRegion {
    std::vector<int> iws;
    std::vector<std::int64_t> tangs;
};

inline ReportRegion make_report_region(const HalfSpaceGrid& g) {
    ReportRegion reg;
    for (int iw = 0; iw < g.nw(); ++iw)
        if (g.w(iw) >= g.w0() + 1.0 - 1e-9 && g.w(iw) <= g.w_max() - 1.0 + 1e-9)
            reg.iws.push_back(iw);
    for (std::int64_t it = 0; it < g.ntang(); ++it) {
        bool inside = true;
        for (int mu = 0; mu < g.n(); ++mu)
            if (std::abs(g.x(g.tang_coord(it, mu))) > 0.5 * g.l() + 1e-9) inside = false;
        if (inside) reg.tangs.push_back(it);
    }
    return reg;
}

inline double sup_over_region(const ScalarField& f, const ReportRegion& reg) {
    double s = 0.0;
    for (std::int64_t it : reg.tangs)
        for (int iw : reg.iws) s = std::max(s, std::abs(f.at(iw, it)));
    return s;
}

// Sup of |f| over the tangential reporting box at fixed height.
inline double sup_at_height(const ScalarField& f, const ReportRegion& reg, int iw) {
    double s = 0.0;
    for (std::int64_t it : reg.tangs) s = std::max(s, std::abs(f.at(iw, it)));
    return s;
}

// Nearest grid level to a station height.
inline int nearest_level(const HalfSpaceGrid& g, double w) {
    int iw = static_cast<int>(std::lround((w - g.w0()) / g.dw()));
    return std::clamp(iw, 0, g.nw() - 1);
}

// Decay rate of the sup of |f| over the reporting box, sampled at stations.
inline DecayFit station_decay_fit(const HalfSpaceGrid& g, const ScalarField& f,
                                  const std::vector<double>& stations) {
    ReportRegion reg = make_report_region(g);
    std::vector<double> ws, vs;
    for (double wc : stations) {
        const int iw = nearest_level(g, wc);
        ws.push_back(g.w(iw));
        vs.push_back(sup_at_height(f, reg, iw));
    }
    return fit_decay_rate(ws, vs);
}

} // namespace alh
