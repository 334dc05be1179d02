#pragma once

#include <Eigen/Dense>

#include "alh/fd.hpp"
#include "alh/grid.hpp"
#include "alh/tensor.hpp"

namespace alh {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

// Metric of the form N^2 dw^2 + g_t with g_t purely tangential (zero shift).
// g_t is stored as a full-dimension symmetric rank-2 field whose radial row
// and column are identically zero.
struct ZeroShiftMetric {
    const HalfSpaceGrid* grid = nullptr;
    ScalarField lapse;
    TensorField gt;

    ZeroShiftMetric() = default;
    explicit ZeroShiftMetric(const HalfSpaceGrid& grd)
        : grid(&grd), lapse(grd), gt(grd, 2, TensorField::Sym::pair01) {}

    const HalfSpaceGrid& g() const { return *grid; }

    Mat full(int iw, std::int64_t it) const {
        const int d = grid->dim();
        Mat m = Mat::Zero(d, d);
        const double n = lapse.at(iw, it);
        m(0, 0) = n * n;
        for (int a = 1; a < d; ++a)
            for (int b = 1; b < d; ++b) m(a, b) = gt.at(a * d + b, iw, it);
        return m;
    }
};

// Checks N > 0 everywhere and positive-definiteness of the tangential block
// via Cholesky at every grid point.
inline void validate_metric(const ZeroShiftMetric& m) {
    const auto& g = m.g();
    const int d = g.dim();
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            if (!(m.lapse.at(iw, it) > 0.0)) throw data_error("lapse must be positive");
            Mat blk(d - 1, d - 1);
            for (int a = 1; a < d; ++a)
                for (int b = 1; b < d; ++b) blk(a - 1, b - 1) = m.gt.at(a * d + b, iw, it);
            Eigen::LLT<Mat> llt(blk);
            if (llt.info() != Eigen::Success)
                throw data_error("tangential metric block is not positive definite");
        }
}

// General full metric field (used for compactified and reference metrics).
struct MetricField {
    const HalfSpaceGrid* grid = nullptr;
    TensorField g2; // rank-2, pair-symmetric

    Mat full(int iw, std::int64_t it) const {
        const int d = grid->dim();
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = g2.at(i * d + j, iw, it);
        return m;
    }
};

inline MetricField to_full_metric(const ZeroShiftMetric& m) {
    const auto& g = m.g();
    MetricField out{&g, TensorField(g, 2, TensorField::Sym::pair01)};
    const int d = g.dim();
    for (std::int64_t it = 0; it < g.ntang(); ++it)
        for (int iw = 0; iw < g.nw(); ++iw) {
            const double n = m.lapse.at(iw, it);
            out.g2.set(0, iw, it, n * n);
            for (int a = 1; a < d; ++a)
                for (int b = a; b < d; ++b) out.g2.set(a * d + b, iw, it, m.gt.at(a * d + b, iw, it));
        }
    return out;
}

// Pointwise inverse metrics for either representation; zero-shift inverses
// exploit the block structure (no radial-tangential coupling).
inline Mat inverse_metric(const Mat& g) {
    return g.inverse();
}

// g-norm of a covariant rank-k tensor at one point: full contraction with the
// inverse metric on every slot.
inline double tensor_gnorm(const Mat& ginv, const TensorField& t, int iw, std::int64_t it) {
    const int d = t.dim();
    const int rank = t.rank();
    if (rank == 0) return std::abs(t.at(0, iw, it));
    const int nc = t.ncomp();
    double acc = 0.0;
    for (int c1 = 0; c1 < nc; ++c1) {
        const double v1 = t.at(c1, iw, it);
        if (v1 == 0.0) continue;
        for (int c2 = 0; c2 < nc; ++c2) {
            const double v2 = t.at(c2, iw, it);
            if (v2 == 0.0) continue;
            double w = 1.0;
            int a = c1, b = c2;
            for (int r = rank - 1; r >= 0; --r) {
                w *= ginv(a % d, b % d);
                a /= d;
                b /= d;
            }
            acc += w * v1 * v2;
        }
    }
    return std::sqrt(std::max(acc, 0.0));
}

} // namespace alh
