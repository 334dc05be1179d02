#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace alh {

// Contract violations surface as typed exceptions; the CLI maps them to exit codes.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct internal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated half-space grid: radial coordinate w on [w0, w_max] (index 0),
// n tangential coordinates on [-L, L] each. Tangential points are flattened
// into a single index with axis 0 fastest.
class HalfSpaceGrid {
  public:
    HalfSpaceGrid(int n, double w0, double w_max, int nw, double l, int nx)
        : n_(n), w0_(w0), w_max_(w_max), nw_(nw), l_(l), nx_(nx) {
        if (n < 1 || n > 3) throw precondition_error("boundary dimension must be 1, 2, or 3");
        if (nw < 8) throw precondition_error("radial point count must be at least 8");
        if (nx < 8) throw precondition_error("tangential point count must be at least 8");
        if (!(w_max > w0)) throw precondition_error("w_max must exceed w0");
        if (!(l > 0.0)) throw precondition_error("tangential half-width must be positive");
        dw_ = (w_max - w0) / (nw - 1);
        dx_ = 2.0 * l / (nx - 1);
        ntang_ = 1;
        for (int a = 0; a < n; ++a) ntang_ *= static_cast<std::int64_t>(nx);
        npts_ = static_cast<std::int64_t>(nw) * ntang_;
    }

    int n() const { return n_; }
    int dim() const { return n_ + 1; }
    double w0() const { return w0_; }
    double w_max() const { return w_max_; }
    int nw() const { return nw_; }
    double l() const { return l_; }
    int nx() const { return nx_; }
    double dw() const { return dw_; }
    double dx() const { return dx_; }
    std::int64_t ntang() const { return ntang_; }
    std::int64_t npts() const { return npts_; }

    double w(int iw) const { return w0_ + dw_ * iw; }
    double x(int ix) const { return -l_ + dx_ * ix; }

    // Flat point index; radial index fastest so radial stencils are stride-1.
    std::int64_t idx(int iw, std::int64_t it) const { return iw + static_cast<std::int64_t>(nw_) * it; }

    std::int64_t tang_stride(int axis) const {
        std::int64_t s = 1;
        for (int a = 0; a < axis; ++a) s *= nx_;
        return s;
    }
    int tang_coord(std::int64_t it, int axis) const {
        return static_cast<int>((it / tang_stride(axis)) % nx_);
    }
    std::array<double, 3> point_x(std::int64_t it) const {
        std::array<double, 3> p{0.0, 0.0, 0.0};
        for (int a = 0; a < n_; ++a) p[a] = x(tang_coord(it, a));
        return p;
    }

    bool same_shape(const HalfSpaceGrid& o) const {
        return n_ == o.n_ && nw_ == o.nw_ && nx_ == o.nx_ && w0_ == o.w0_ &&
               w_max_ == o.w_max_ && l_ == o.l_;
    }

  private:
    int n_;
    double w0_, w_max_;
    int nw_;
    double l_;
    int nx_;
    double dw_, dx_;
    std::int64_t ntang_, npts_;
};

inline HalfSpaceGrid build_grid(int n, double w0, double w_max, int nw, double l, int nx) {
    return HalfSpaceGrid(n, w0, w_max, nw, l, nx);
}

// One double per grid point.
class ScalarField {
  public:
    ScalarField() : grid_(nullptr) {}
    explicit ScalarField(const HalfSpaceGrid& grid, double fill = 0.0)
        : grid_(&grid), data_(static_cast<std::size_t>(grid.npts()), fill) {}

    const HalfSpaceGrid& grid() const {
        if (!grid_) throw internal_error("scalar field used before binding to a grid");
        return *grid_;
    }
    bool empty() const { return grid_ == nullptr; }

    double& at(int iw, std::int64_t it) { return data_[static_cast<std::size_t>(grid_->idx(iw, it))]; }
    double at(int iw, std::int64_t it) const { return data_[static_cast<std::size_t>(grid_->idx(iw, it))]; }
    double& flat(std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    double flat(std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    template <class F>
    static ScalarField from(const HalfSpaceGrid& grid, F&& f) {
        ScalarField out(grid);
        for (std::int64_t it = 0; it < grid.ntang(); ++it) {
            const auto px = grid.point_x(it);
            for (int iw = 0; iw < grid.nw(); ++iw) out.at(iw, it) = f(grid.w(iw), px);
        }
        return out;
    }

  private:
    const HalfSpaceGrid* grid_;
    std::vector<double> data_;
};

} // namespace alh
