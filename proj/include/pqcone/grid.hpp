#pragma once

#include "pqcone/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pqcone {

/// Inclusive range of node indices per axis. The second axis is ignored on intervals.
struct IndexBox {
    std::array<std::size_t, 2> lo{0, 0};
    std::array<std::size_t, 2> hi{0, 0};

    friend bool operator==(const IndexBox&, const IndexBox&) = default;
};

enum class DomainKind { interval, rectangle };

/**
 * Uniform grid on [0,L] or [0,Lx]x[0,Ly] with two designated interior subsets.
 *
 * Nodes are numbered x-fastest. The subsets D1 and D2 are grid-aligned boxes whose
 * nodes keep a distance of at least two cells from the boundary, which stands in for
 * compact containment in the open domain.
 */
class GridDomain {
public:
    static GridDomain interval(double length, std::size_t nodes, IndexBox d1, IndexBox d2) {
        return GridDomain(DomainKind::interval, {length, 0.0}, {nodes, 1}, d1, d2);
    }

    static GridDomain rectangle(double lx, double ly, std::size_t nx, std::size_t ny,
                                IndexBox d1, IndexBox d2) {
        return GridDomain(DomainKind::rectangle, {lx, ly}, {nx, ny}, d1, d2);
    }

    /// Snap the coordinate interval [a,b] on an axis with n nodes of spacing h to the
    /// largest index range contained in it.
    static std::array<std::size_t, 2> snap_inward(double a, double b, double h, std::size_t n) {
        const double slack = 1e-9;
        double lo = std::ceil(a / h - slack);
        double hi = std::floor(b / h + slack);
        if (lo < 0.0) lo = 0.0;
        if (hi > static_cast<double>(n - 1)) hi = static_cast<double>(n - 1);
        if (hi < lo) throw SpecError("subset interval [" + std::to_string(a) + ", " +
                                     std::to_string(b) + "] contains no grid node");
        return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
    }

    DomainKind kind() const { return kind_; }
    int dim() const { return kind_ == DomainKind::interval ? 1 : 2; }
    std::size_t nx() const { return n_[0]; }
    std::size_t ny() const { return n_[1]; }
    std::size_t size() const { return n_[0] * n_[1]; }
    double length(int axis) const { return len_[axis]; }
    double hx() const { return h_[0]; }
    double hy() const { return h_[1]; }
    double spacing(int axis) const { return h_[axis]; }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return j * n_[0] + i; }
    std::size_t ix(std::size_t k) const { return k % n_[0]; }
    std::size_t iy(std::size_t k) const { return k / n_[0]; }

    std::array<double, 2> coord(std::size_t k) const {
        return {static_cast<double>(ix(k)) * h_[0],
                dim() == 2 ? static_cast<double>(iy(k)) * h_[1] : 0.0};
    }

    bool is_boundary(std::size_t k) const {
        const std::size_t i = ix(k);
        if (i == 0 || i + 1 == n_[0]) return true;
        if (dim() == 1) return false;
        const std::size_t j = iy(k);
        return j == 0 || j + 1 == n_[1];
    }

    /// Lumped mass (cell volume) attached to an interior node.
    double node_mass() const { return dim() == 1 ? h_[0] : h_[0] * h_[1]; }

    /// 1 or 2.
    const IndexBox& subset(int which) const { return which == 1 ? d1_ : d2_; }

    bool in_box(const IndexBox& box, std::size_t k) const {
        const std::size_t i = ix(k);
        if (i < box.lo[0] || i > box.hi[0]) return false;
        if (dim() == 1) return true;
        const std::size_t j = iy(k);
        return j >= box.lo[1] && j <= box.hi[1];
    }

    /// Node indices of a box, x-fastest.
    std::vector<std::size_t> box_nodes(const IndexBox& box) const {
        std::vector<std::size_t> out;
        const std::size_t jlo = dim() == 1 ? 0 : box.lo[1];
        const std::size_t jhi = dim() == 1 ? 0 : box.hi[1];
        for (std::size_t j = jlo; j <= jhi; ++j)
            for (std::size_t i = box.lo[0]; i <= box.hi[0]; ++i) out.push_back(index(i, j));
        return out;
    }

    std::vector<std::size_t> interior_nodes() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < size(); ++k)
            if (!is_boundary(k)) out.push_back(k);
        return out;
    }

    void validate_box(const IndexBox& box, const std::string& name) const {
        for (int a = 0; a < dim(); ++a) {
            if (box.lo[a] > box.hi[a]) throw SpecError(name + " is empty");
            if (box.lo[a] < 2 || box.hi[a] + 3 > n_[a])
                throw SpecError(name + " must stay at least two cells away from the boundary");
        }
    }

private:
    GridDomain(DomainKind kind, std::array<double, 2> len, std::array<std::size_t, 2> n,
               IndexBox d1, IndexBox d2)
        : kind_(kind), len_(len), n_(n), d1_(d1), d2_(d2) {
        for (int a = 0; a < dim(); ++a) {
            if (!(len_[a] > 0.0) || !std::isfinite(len_[a]))
                throw SpecError("domain length must be positive");
            if (n_[a] < 3) throw SpecError("need at least 3 nodes per axis");
            h_[a] = len_[a] / static_cast<double>(n_[a] - 1);
        }
        if (dim() == 1) {
            d1_.lo[1] = d1_.hi[1] = 0;
            d2_.lo[1] = d2_.hi[1] = 0;
        }
        validate_box(d1_, "D1");
        validate_box(d2_, "D2");
    }

    DomainKind kind_;
    std::array<double, 2> len_;
    std::array<std::size_t, 2> n_;
    std::array<double, 2> h_{0.0, 0.0};
    IndexBox d1_;
    IndexBox d2_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

inline DomainPtr make_domain(GridDomain d) { return std::make_shared<const GridDomain>(std::move(d)); }

/// Real values on the nodes of a grid. Values are immutable once constructed.
class GridFunction {
public:
    GridFunction(DomainPtr domain, std::vector<double> values)
        : domain_(std::move(domain)), values_(std::move(values)) {
        if (!domain_) throw SpecError("grid function without a domain");
        if (values_.size() != domain_->size()) throw SpecError("grid function size mismatch");
        for (double x : values_)
            if (!std::isfinite(x)) throw SpecError("grid function has non-finite values");
    }

    static GridFunction constant(DomainPtr domain, double c) {
        const std::size_t n = domain->size();
        return GridFunction(std::move(domain), std::vector<double>(n, c));
    }

    static GridFunction zero(DomainPtr domain) { return constant(std::move(domain), 0.0); }

    static GridFunction from(DomainPtr domain, const std::function<double(double, double)>& fn) {
        std::vector<double> vals(domain->size());
        for (std::size_t k = 0; k < vals.size(); ++k) {
            auto c = domain->coord(k);
            vals[k] = fn(c[0], c[1]);
        }
        return GridFunction(std::move(domain), std::move(vals));
    }

    /// Indicator of an index box.
    static GridFunction indicator(DomainPtr domain, const IndexBox& box) {
        std::vector<double> vals(domain->size(), 0.0);
        for (std::size_t k : domain->box_nodes(box)) vals[k] = 1.0;
        return GridFunction(std::move(domain), std::move(vals));
    }

    const GridDomain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

    bool is_nonnegative() const { return min_value() >= 0.0; }

    bool vanishes_on_boundary() const {
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (domain_->is_boundary(k) && values_[k] != 0.0) return false;
        return true;
    }

    /// Smallest value over interior nodes.
    double interior_min() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (!domain_->is_boundary(k)) m = std::min(m, values_[k]);
        return m;
    }

    GridFunction map(const std::function<double(double)>& fn) const {
        std::vector<double> out(values_.size());
        std::transform(values_.begin(), values_.end(), out.begin(), fn);
        return GridFunction(domain_, std::move(out));
    }

    friend GridFunction operator*(double c, const GridFunction& u) {
        return u.map([c](double x) { return c * x; });
    }
    friend GridFunction operator*(const GridFunction& u, double c) { return c * u; }

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
        return combine(a, b, [](double x, double y) { return x + y; });
    }
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
        return combine(a, b, [](double x, double y) { return x - y; });
    }

private:
    template <class Op>
    static GridFunction combine(const GridFunction& a, const GridFunction& b, Op op) {
        if (a.values_.size() != b.values_.size())
            throw SpecError("grid functions live on different grids");
        std::vector<double> out(a.values_.size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a.values_[k], b.values_[k]);
        return GridFunction(a.domain_, std::move(out));
    }

    DomainPtr domain_;
    std::vector<double> values_;
};

/// A cone K_D = { u >= 0 : u >= ||u|| chi_D } determined by the subset D.
class ConeSpec {
public:
    ConeSpec(DomainPtr domain, IndexBox box)
        : domain_(std::move(domain)), box_(box), nodes_(domain_->box_nodes(box_)) {
        if (nodes_.empty()) throw SpecError("cone subset is empty");
    }

    /// Cone attached to D1 (which = 1) or D2 (which = 2).
    static ConeSpec of(const DomainPtr& domain, int which) {
        return ConeSpec(domain, domain->subset(which));
    }

    const IndexBox& box() const { return box_; }
    std::span<const std::size_t> nodes() const { return nodes_; }
    GridFunction indicator() const { return GridFunction::indicator(domain_, box_); }

private:
    DomainPtr domain_;
    IndexBox box_;
    std::vector<std::size_t> nodes_;
};

inline double sup_norm(const GridFunction& u) {
    double m = 0.0;
    for (double x : u.values()) m = std::max(m, std::abs(x));
    return m;
}

/// Seminorm ||u|| = min over D of u. Only defined on nonnegative functions.
inline double seminorm(const GridFunction& u, const ConeSpec& cone) {
    if (!u.is_nonnegative())
        throw ConeError("seminorm is only defined for nonnegative functions (min value " +
                        std::to_string(u.min_value()) + ")");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k : cone.nodes()) m = std::min(m, u[k]);
    return m;
}

inline bool cone_membership(const GridFunction& u, const ConeSpec& cone) {
    const double s = seminorm(u, cone);
    for (std::size_t k : cone.nodes())
        if (u[k] < s) return false;
    return true;
}

/// Trapezoidal integral of u^s over the box of a cone subset.
inline double subset_integral(const GridFunction& u, const ConeSpec& cone, double s = 1.0) {
    const GridDomain& dom = u.domain();
    const IndexBox& b = cone.box();
    auto weight = [](std::size_t i, std::size_t lo, std::size_t hi) {
        if (lo == hi) return 1.0;
        return (i == lo || i == hi) ? 0.5 : 1.0;
    };
    double sum = 0.0;
    for (std::size_t k : cone.nodes()) {
        double w = weight(dom.ix(k), b.lo[0], b.hi[0]) * dom.hx();
        if (dom.dim() == 2) w *= weight(dom.iy(k), b.lo[1], b.hi[1]) * dom.hy();
        sum += w * std::pow(u[k], s);
    }
    return sum;
}

inline double sup_distance(const GridFunction& a, const GridFunction& b) {
    return sup_norm(a - b);
}

/// One row per node: coordinates then value, 17 significant digits.
inline void write_csv(std::ostream& os, const GridFunction& u) {
    const GridDomain& dom = u.domain();
    os << (dom.dim() == 1 ? "x,value\n" : "x,y,value\n");
    char buf[96];
    for (std::size_t k = 0; k < u.size(); ++k) {
        auto c = dom.coord(k);
        if (dom.dim() == 1)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", c[0], u[k]);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", c[0], c[1], u[k]);
        os << buf;
    }
}

} // namespace pqcone
