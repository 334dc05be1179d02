#pragma once

#include <algorithm>
#include <array>

#include "alh/grid.hpp"

namespace alh {

// Dense covariant tensor field of rank k on a grid, components indexed over
// {0..n} per slot (0 = radial). Storage is component-major: each component is
// one contiguous grid array. Rank-2 fields may declare pair symmetry, which is
// enforced by construction (set() mirrors the entry).
class TensorField {
  public:
    enum class Sym { none, pair01 };

    TensorField() : grid_(nullptr), rank_(0), dim_(0), sym_(Sym::none) {}
    TensorField(const HalfSpaceGrid& grid, int rank, Sym sym = Sym::none)
        : grid_(&grid), rank_(rank), dim_(grid.dim()), sym_(sym) {
        if (rank < 0 || rank > 4) throw precondition_error("tensor rank must be in [0, 4]");
        if (sym == Sym::pair01 && rank != 2)
            throw precondition_error("pair symmetry is a rank-2 declaration");
        ncomp_ = 1;
        for (int r = 0; r < rank; ++r) ncomp_ *= dim_;
        data_.assign(static_cast<std::size_t>(ncomp_) * grid.npts(), 0.0);
    }

    const HalfSpaceGrid& grid() const { return *grid_; }
    int rank() const { return rank_; }
    int dim() const { return dim_; }
    int ncomp() const { return ncomp_; }
    Sym sym() const { return sym_; }
    bool empty() const { return grid_ == nullptr; }

    int comp_index(std::initializer_list<int> idx) const {
        int c = 0;
        for (int i : idx) c = c * dim_ + i;
        return c;
    }

    double* comp(int c) { return data_.data() + static_cast<std::size_t>(c) * grid_->npts(); }
    const double* comp(int c) const {
        return data_.data() + static_cast<std::size_t>(c) * grid_->npts();
    }

    double at(int c, int iw, std::int64_t it) const { return comp(c)[grid_->idx(iw, it)]; }

    void set(int c, int iw, std::int64_t it, double v) {
        comp(c)[grid_->idx(iw, it)] = v;
        if (sym_ == Sym::pair01) {
            const int i = c / dim_, j = c % dim_;
            if (i != j) comp(j * dim_ + i)[grid_->idx(iw, it)] = v;
        }
    }

    // Copies one component in or out as a scalar field (for derivative passes).
    ScalarField component_field(int c) const {
        ScalarField f(*grid_);
        const double* src = comp(c);
        std::copy(src, src + grid_->npts(), f.raw().begin());
        return f;
    }
    void assign_component(int c, const ScalarField& f) {
        std::copy(f.raw().begin(), f.raw().end(), comp(c));
        if (sym_ == Sym::pair01) {
            const int i = c / dim_, j = c % dim_;
            if (i != j) std::copy(f.raw().begin(), f.raw().end(), comp(j * dim_ + i));
        }
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    const HalfSpaceGrid* grid_;
    int rank_, dim_, ncomp_;
    Sym sym_;
    std::vector<double> data_;
};

} // namespace alh
