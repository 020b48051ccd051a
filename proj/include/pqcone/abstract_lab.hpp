#pragma once

// Finite-dimensional sandbox for the cone localization theorems.
//
// X_i = R^{n_i} with the sup norm, the orthant as order cone and the seminorm
// ||u|| = min over a coordinate mask. With chi_i the 0/1 indicator of the mask,
// ||chi_i|| = |chi_i| = 1 and u >= ||u|| chi_i holds for every u >= 0, so K_i is the
// whole orthant, phi_i = chi_i and the seminorm constant c_i (||u|| <= c_i |u|) is 1.
// The all-ones vector is an order unit h0 with |h0| = ||h0|| = 1.

#include "pqcone/errors.hpp"
#include "pqcone/expr.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pqcone {

class ConeVector {
public:
    ConeVector(std::vector<double> values, std::vector<std::size_t> mask)
        : values_(std::move(values)), mask_(std::move(mask)) {
        if (mask_.empty()) throw ConeError("cone vector mask must be nonempty");
        for (std::size_t m : mask_)
            if (m >= values_.size()) throw ConeError("cone vector mask index out of range");
        for (double x : values_)
            if (!(x >= 0.0)) throw ConeError("cone vector has a negative or NaN entry");
    }

    /// The 0/1 indicator of the mask.
    static ConeVector chi(std::size_t n, const std::vector<std::size_t>& mask) {
        std::vector<double> x(n, 0.0);
        for (std::size_t m : mask)
            if (m < n) x[m] = 1.0;
        return ConeVector(std::move(x), mask);
    }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::size_t>& mask() const { return mask_; }

    double sup_norm() const {
        double m = 0.0;
        for (double x : values_) m = std::max(m, std::abs(x));
        return m;
    }
    double seminorm() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i : mask_) m = std::min(m, values_[i]);
        return m;
    }

    friend ConeVector operator*(double c, const ConeVector& u) {
        std::vector<double> x = u.values_;
        for (double& t : x) t *= c;
        return ConeVector(std::move(x), u.mask_);
    }

private:
    std::vector<double> values_;
    std::vector<std::size_t> mask_;
};

inline double sup_norm(const ConeVector& u) { return u.sup_norm(); }
inline double seminorm(const ConeVector& u) { return u.seminorm(); }

struct LabRadii {
    double r1 = 0.0, r2 = 0.0, R1 = 0.0, R2 = 0.0;
    std::optional<double> rho1, rho2;
    std::optional<double> varrho1, varrho2;
    /// Sup-norm bounds of the excluded set in the disjunctive inner condition; default rho.
    std::optional<double> rho_tilde1, rho_tilde2;
    /// Seminorm bounds of the excluded set A = {||u|| <= a1, ||v|| <= a2}; default r/2.
    std::optional<double> a1, a2;
};

struct LabRung {
    double r1 = 0.0, r2 = 0.0, R1 = 0.0, R2 = 0.0;
};

/// Component maps N1: R^{n1} x R^{n2} -> R^{n1}, N2 -> R^{n2} as expressions over
/// u1..un1, v1..vn2 (plus u, v when the component is one-dimensional).
struct LabProblem {
    std::string name;
    std::size_t n1 = 1, n2 = 1;
    std::vector<std::size_t> mask1{0}, mask2{0};
    std::vector<Expr> N1, N2;
    LabRadii radii;
    std::vector<LabRung> ladder;
    bool isotone = false;
    int resolution = 16;

    static std::shared_ptr<const Variables> variables(std::size_t n1, std::size_t n2) {
        std::vector<std::string> names;
        for (std::size_t i = 1; i <= n1; ++i) names.push_back("u" + std::to_string(i));
        for (std::size_t i = 1; i <= n2; ++i) names.push_back("v" + std::to_string(i));
        if (n1 == 1) names.push_back("u");
        if (n2 == 1) names.push_back("v");
        return std::make_shared<const Variables>(std::move(names));
    }

    static LabProblem make(std::string name, const std::vector<std::string>& n1_src,
                           const std::vector<std::string>& n2_src) {
        LabProblem p;
        p.name = std::move(name);
        p.n1 = n1_src.size();
        p.n2 = n2_src.size();
        if (p.n1 == 0 || p.n2 == 0) throw SpecError("lab operator needs at least one component each");
        if (p.n1 + p.n2 > 6) throw SpecError("lab dimensions are capped at n1 + n2 <= 6");
        auto vars = variables(p.n1, p.n2);
        for (const auto& s : n1_src) p.N1.push_back(Expr::parse(s, vars));
        for (const auto& s : n2_src) p.N2.push_back(Expr::parse(s, vars));
        p.mask1 = all_indices(p.n1);
        p.mask2 = all_indices(p.n2);
        return p;
    }

    static std::vector<std::size_t> all_indices(std::size_t n) {
        std::vector<std::size_t> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = i;
        return m;
    }

    void validate() const {
        if (N1.size() != n1 || N2.size() != n2) throw SpecError("lab operator arity mismatch");
        auto check_mask = [](const std::vector<std::size_t>& m, std::size_t n, const char* name) {
            if (m.empty()) throw SpecError(std::string(name) + " must be nonempty");
            for (std::size_t i : m)
                if (i >= n) throw SpecError(std::string(name) + " index out of range");
        };
        check_mask(mask1, n1, "mask1");
        check_mask(mask2, n2, "mask2");
        if (resolution < 2) throw SpecError("lab resolution must be at least 2");
    }

    /// N(u, v); negative components raise ConeError.
    std::pair<std::vector<double>, std::vector<double>> apply(const std::vector<double>& u,
                                                              const std::vector<double>& v) const {
        std::vector<double> slots;
        slots.reserve(n1 + n2 + 2);
        slots.insert(slots.end(), u.begin(), u.end());
        slots.insert(slots.end(), v.begin(), v.end());
        if (n1 == 1) slots.push_back(u[0]);
        if (n2 == 1) slots.push_back(v[0]);
        std::pair<std::vector<double>, std::vector<double>> out;
        out.first.reserve(n1);
        out.second.reserve(n2);
        for (const auto& e : N1) out.first.push_back(e.eval(slots));
        for (const auto& e : N2) out.second.push_back(e.eval(slots));
        for (const auto* c : {&out.first, &out.second})
            for (double x : *c)
                if (!(x >= 0.0))
                    throw ConeError("lab operator '" + name + "' leaves the cone at " + point(u, v));
        return out;
    }

    static std::string point(const std::vector<double>& u, const std::vector<double>& v) {
        std::string s = "(";
        char buf[32];
        for (std::size_t i = 0; i < u.size() + v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", i < u.size() ? u[i] : v[i - u.size()]);
            s += (i == 0 ? "" : i == u.size() ? "; " : ", ") + std::string(buf);
        }
        return s + ")";
    }
};

namespace lab {

inline double sup(const std::vector<double>& x) {
    double m = 0.0;
    for (double t : x) m = std::max(m, std::abs(t));
    return m;
}

inline double semi(const std::vector<double>& x, const std::vector<std::size_t>& mask) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i : mask) m = std::min(m, x[i]);
    return m;
}

enum class Bound { le, lt, eq };
enum class Semi { any, eq, le, lt, ge, gt };

/// {x in R^n_+ : |x| (rel) sup, ||x|| (rel) semi_value}.
struct ComponentSet {
    double sup = 0.0;
    Bound sup_rel = Bound::le;
    Semi semi = Semi::any;
    double semi_value = 0.0;
};

inline bool contains(const ComponentSet& s, const std::vector<double>& x,
                     const std::vector<std::size_t>& mask) {
    const double m = lab::sup(x);
    switch (s.sup_rel) {
    case Bound::le: if (!(m <= s.sup)) return false; break;
    case Bound::lt: if (!(m < s.sup)) return false; break;
    case Bound::eq: if (m != s.sup) return false; break;
    }
    const double n = semi(x, mask);
    switch (s.semi) {
    case Semi::any: return true;
    case Semi::eq: return n == s.semi_value;
    case Semi::le: return n <= s.semi_value;
    case Semi::lt: return n < s.semi_value;
    case Semi::ge: return n >= s.semi_value;
    case Semi::gt: return n > s.semi_value;
    }
    return false;
}

/// Grid values on [0, bound]: k+1 equispaced points plus every radius of the component,
/// so that equality constraints on norms are hit exactly.
inline std::vector<double> axis_values(double bound, int k, const std::vector<double>& specials) {
    std::vector<double> g;
    for (int j = 0; j <= k; ++j) g.push_back(bound * j / k);
    for (double s : specials)
        if (s >= 0.0 && s <= bound) g.push_back(s);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

inline std::vector<std::vector<double>> component_samples(const ComponentSet& s, std::size_t n,
                                                          const std::vector<std::size_t>& mask,
                                                          int k, const std::vector<double>& specials) {
    std::vector<double> extra = specials;
    extra.push_back(s.semi_value);
    const std::vector<double> g = axis_values(s.sup, k, extra);
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) x[i] = g[idx[i]];
        if (contains(s, x, mask)) out.push_back(x);
        std::size_t d = 0;
        while (d < n && ++idx[d] == g.size()) idx[d++] = 0;
        if (d == n) break;
    }
    return out;
}

struct Extremum {
    double value = 0.0;
    std::size_t samples = 0;
    std::string witness;
    bool vacuous() const { return samples == 0; }
};

using Functional = std::function<double(const std::vector<double>& u, const std::vector<double>& v,
                                        const std::vector<double>& Nu, const std::vector<double>& Nv)>;

inline std::vector<double> specials(const LabProblem& p, int which) {
    const LabRadii& r = p.radii;
    std::vector<double> s = which == 1 ? std::vector<double>{r.r1, r.R1} : std::vector<double>{r.r2, r.R2};
    for (const auto* o : which == 1 ? std::vector{&r.rho1, &r.varrho1, &r.rho_tilde1, &r.a1}
                                    : std::vector{&r.rho2, &r.varrho2, &r.rho_tilde2, &r.a2})
        if (*o) s.push_back(**o);
    for (const auto& rung : p.ladder) {
        s.push_back(which == 1 ? rung.r1 : rung.r2);
        s.push_back(which == 1 ? rung.R1 : rung.R2);
    }
    return s;
}

/// Minimum (or maximum) of `fn` over the sampled product set S1 x S2.
inline Extremum extremum(const LabProblem& p, const ComponentSet& s1, const ComponentSet& s2,
                         const Functional& fn, bool minimize) {
    const auto A = component_samples(s1, p.n1, p.mask1, p.resolution, specials(p, 1));
    const auto B = component_samples(s2, p.n2, p.mask2, p.resolution, specials(p, 2));
    if (static_cast<double>(A.size()) * static_cast<double>(B.size()) > 2e7)
        throw SpecError("lab sample set too large; lower the resolution");
    Extremum e;
    e.value = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    const std::vector<double>* best_u = nullptr;
    const std::vector<double>* best_v = nullptr;
    for (const auto& u : A)
        for (const auto& v : B) {
            const auto [Nu, Nv] = p.apply(u, v);
            const double val = fn(u, v, Nu, Nv);
            ++e.samples;
            if (minimize ? val < e.value : val > e.value) {
                e.value = val;
                best_u = &u;
                best_v = &v;
            }
        }
    if (best_u) e.witness = LabProblem::point(*best_u, *best_v);
    return e;
}

/// min over lambda >= lo of max_j |a_j - lambda b_j|: golden-section search on the convex
/// objective plus the grid {1 + 2^-k}_{k=0..20} u {2, 4, 8}.
inline double ray_distance(const std::vector<double>& a, const std::vector<double>& b, double lo) {
    auto f = [&](double l) {
        double m = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - l * b[j]));
        return m;
    };
    const double nb = sup(b);
    if (nb == 0.0) return f(lo);
    double best = f(lo);
    for (int k = 0; k <= 20; ++k) {
        const double l = 1.0 + std::ldexp(1.0, -k);
        if (l >= lo) best = std::min(best, f(l));
    }
    for (double l : {2.0, 4.0, 8.0})
        if (l >= lo) best = std::min(best, f(l));
    double x0 = lo, x1 = std::max(lo, 2.0 * sup(a) / nb) + 1.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = x1 - g * (x1 - x0), d = x0 + g * (x1 - x0);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && x1 - x0 > 1e-15 * std::max(1.0, x1); ++it) {
        if (fc <= fd) {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - g * (x1 - x0);
            fc = f(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + g * (x1 - x0);
            fd = f(d);
        }
    }
    return std::min({best, fc, fd, f(0.5 * (x0 + x1))});
}

inline double diff_sup(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

inline std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c = a;
    c.insert(c.end(), b.begin(), b.end());
    return c;
}

/// Smallest lambda considered in the "lambda > 1" conditions.
inline const double lambda_gt_one = 1.0 + std::ldexp(1.0, -20);

} // namespace lab

/// Verdict on one catalog condition.
struct LabCondition {
    std::string id;
    std::string description;
    /// Smallest slack over all parts; positive means every inequality holds with room.
    double margin = 0.0;
    bool pass = false;
    /// Some sampled set was empty; the part counted as satisfied.
    bool vacuous = false;
    std::size_t samples = 0;
    std::string witness;
};

namespace lab {

inline constexpr double rel_tol = 1e-12;

/// Accumulates parts of one condition: each part is a slack (>= 0 means satisfied).
class ConditionBuilder {
public:
    ConditionBuilder(std::string id, std::string description) {
        c_.id = std::move(id);
        c_.description = std::move(description);
        c_.margin = std::numeric_limits<double>::infinity();
        c_.pass = true;
    }

    /// lhs >= rhs (strict: lhs > rhs), tested with a relative tolerance of rel_tol.
    void compare(double lhs, double rhs, bool strict, const std::string& witness = {}) {
        const double slack = lhs - rhs;
        const double band = rel_tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
        const bool ok = strict ? slack > band : slack >= -band;
        if (slack < c_.margin) {
            c_.margin = slack;
            if (!witness.empty()) c_.witness = witness;
        }
        c_.pass = c_.pass && ok;
    }

    /// inf over a sampled set of a slack functional.
    void inf(const Extremum& e, double rhs, bool strict) {
        c_.samples += e.samples;
        if (e.vacuous()) {
            c_.vacuous = true;
            return;
        }
        compare(e.value, rhs, strict, e.witness);
    }

    void sup(const Extremum& e, double bound, bool strict) {
        c_.samples += e.samples;
        if (e.vacuous()) {
            c_.vacuous = true;
            return;
        }
        compare(bound, e.value, strict, e.witness);
    }

    void disjunction(const std::vector<std::pair<Extremum, double>>& alternatives) {
        double best = -std::numeric_limits<double>::infinity();
        std::string witness;
        bool any_vacuous = false;
        for (const auto& [e, rhs] : alternatives) {
            c_.samples += e.samples;
            if (e.vacuous()) any_vacuous = true;
            else if (e.value - rhs > best) {
                best = e.value - rhs;
                witness = e.witness;
            }
        }
        if (any_vacuous) {
            c_.vacuous = true;
            return;
        }
        compare(best, 0.0, false, witness);
    }

    LabCondition done() {
        if (c_.margin == std::numeric_limits<double>::infinity()) c_.margin = 0.0;
        return c_;
    }

private:
    LabCondition c_;
};

inline double chi_semi(const LabProblem& p, int which) {
    return which == 1 ? ConeVector::chi(p.n1, p.mask1).seminorm() : ConeVector::chi(p.n2, p.mask2).seminorm();
}

/// ||phi_i|| ||chi_i|| with phi_i = chi_i / |chi_i|.
inline double phi_chi(const LabProblem& p, int which) {
    const ConeVector chi = which == 1 ? ConeVector::chi(p.n1, p.mask1) : ConeVector::chi(p.n2, p.mask2);
    return (1.0 / chi.sup_norm()) * chi.seminorm() * chi.seminorm();
}

inline double need(const std::optional<double>& v, const char* name, const std::string& id) {
    if (!v) throw SpecError("condition " + id + " needs radius " + name);
    return *v;
}

inline ComponentSet box(double R, Semi s = Semi::any, double value = 0.0, Bound b = Bound::le) {
    return ComponentSet{R, b, s, value};
}

// Seminorm functionals of the first and second image components.
inline double semi_N1(const LabProblem& p, const std::vector<double>& Nu) { return semi(Nu, p.mask1); }
inline double semi_N2(const LabProblem& p, const std::vector<double>& Nv) { return semi(Nv, p.mask2); }

enum class Scaling { none, componentwise, joint };

inline double scale(Scaling s, const LabProblem& p, const std::vector<double>& Nu,
                    const std::vector<double>& Nv, int which) {
    const double R1 = p.radii.R1, R2 = p.radii.R2;
    switch (s) {
    case Scaling::none: return 1.0;
    case Scaling::componentwise:
        return 1.0 / std::max(which == 1 ? sup(Nu) / R1 : sup(Nv) / R2, 1.0);
    case Scaling::joint: return 1.0 / std::max({sup(Nu) / R1, sup(Nv) / R2, 1.0});
    }
    return 1.0;
}

/// Lower seminorm bounds on the two faces of a set; `both` selects the faces
/// {||u|| = r1, ||v|| >= r2}, {||u|| >= r1, ||v|| = r2} instead of {||v|| <= r2}, {||u|| <= r1}.
inline void faces(ConditionBuilder& b, const LabProblem& p, bool both, bool strict, Scaling s,
                  bool divide_by_chi = true) {
    const LabRadii& r = p.radii;
    const Semi other = both ? Semi::ge : Semi::le;
    const double t1 = divide_by_chi ? r.r1 / chi_semi(p, 1) : r.r1;
    const double t2 = divide_by_chi ? r.r2 / chi_semi(p, 2) : r.r2;
    b.inf(extremum(p, box(r.R1, Semi::eq, r.r1), box(r.R2, other, r.r2),
                   [&](auto&, auto&, auto& Nu, auto& Nv) { return scale(s, p, Nu, Nv, 1) * semi_N1(p, Nu); },
                   true),
          t1, strict);
    b.inf(extremum(p, box(r.R1, other, r.r1), box(r.R2, Semi::eq, r.r2),
                   [&](auto&, auto&, auto& Nu, auto& Nv) { return scale(s, p, Nu, Nv, 2) * semi_N2(p, Nv); },
                   true),
          t2, strict);
}

inline void invariance(ConditionBuilder& b, const LabProblem& p, bool strict) {
    const LabRadii& r = p.radii;
    b.sup(extremum(p, box(r.R1), box(r.R2), [](auto&, auto&, auto& Nu, auto&) { return sup(Nu); }, false),
          r.R1, strict);
    b.sup(extremum(p, box(r.R1), box(r.R2), [](auto&, auto&, auto&, auto& Nv) { return sup(Nv); }, false),
          r.R2, strict);
}

} // namespace lab

/// Condition ids understood by check_conditions, in catalog order.
inline const std::vector<std::string>& lab_condition_ids() {
    static const std::vector<std::string> ids = {
        "radius_order",          "radius_order_three",           "invariance",
        "compression",           "compression_or",               "compression_retract",
        "compression_retract_joint", "compression_both",         "compression_both_retract",
        "compression_both_retract_joint", "compression_both_strict", "compression_strict",
        "no_ray_inner",          "no_ray_componentwise",         "no_ray_joint",
        "inner_compression",     "inner_compression_or",         "order_unit",
        "compression_order_unit", "iso_compression",             "iso_compression_both",
    };
    return ids;
}

/// Evaluates one catalog condition by extremizing over the sampled sets.
inline LabCondition check_condition(const LabProblem& p, const std::string& id) {
    using namespace lab;
    p.validate();
    const LabRadii& r = p.radii;
    const double pc1 = phi_chi(p, 1), pc2 = phi_chi(p, 2);
    auto no_scale = Scaling::none;

    if (id == "radius_order") {
        ConditionBuilder b(id, "0 < r_i < ||phi_i|| ||chi_i|| R_i");
        b.compare(r.r1, 0.0, true);
        b.compare(r.r2, 0.0, true);
        b.compare(pc1 * r.R1, r.r1, true);
        b.compare(pc2 * r.R2, r.r2, true);
        return b.done();
    }
    if (id == "radius_order_three") {
        ConditionBuilder b(id, "0 < c_i rho_i < r_i < ||phi_i|| ||chi_i|| R_i");
        const double rho1 = need(r.rho1, "rho1", id), rho2 = need(r.rho2, "rho2", id);
        b.compare(rho1, 0.0, true);
        b.compare(rho2, 0.0, true);
        b.compare(r.r1, rho1, true);
        b.compare(r.r2, rho2, true);
        b.compare(pc1 * r.R1, r.r1, true);
        b.compare(pc2 * r.R2, r.r2, true);
        return b.done();
    }
    if (id == "invariance") {
        ConditionBuilder b(id, "sup over C of |N_i| <= R_i");
        invariance(b, p, false);
        return b.done();
    }
    if (id == "compression") {
        ConditionBuilder b(id, "inf ||N_1|| >= r1/||chi_1|| on ||u|| = r1, ||v|| <= r2 (and symmetric)");
        faces(b, p, false, false, no_scale);
        return b.done();
    }
    if (id == "compression_or") {
        const double a1 = r.a1.value_or(0.5 * r.r1), a2 = r.a2.value_or(0.5 * r.r2);
        if (!(a1 < r.r1 && a2 < r.r2)) throw SpecError("compression_or needs a_i < r_i");
        ConditionBuilder b(id, "inf over A of ||N_1|| >= r1 or inf over A of ||N_2|| >= r2");
        const auto A1 = box(r.R1, Semi::le, a1), A2 = box(r.R2, Semi::le, a2);
        b.disjunction({{extremum(p, A1, A2, [&](auto&, auto&, auto& Nu, auto&) { return semi_N1(p, Nu); }, true), r.r1},
                       {extremum(p, A1, A2, [&](auto&, auto&, auto&, auto& Nv) { return semi_N2(p, Nv); }, true), r.r2}});
        return b.done();
    }
    if (id == "compression_retract") {
        ConditionBuilder b(id, "inf ||N_1|| / max(|N_1|/R1, 1) >= r1/||chi_1|| on the faces of U");
        faces(b, p, false, false, Scaling::componentwise);
        return b.done();
    }
    if (id == "compression_retract_joint") {
        ConditionBuilder b(id, "inf ||N_1|| / max(|N_1|/R1, |N_2|/R2, 1) >= r1/||chi_1|| on the faces of U");
        faces(b, p, false, false, Scaling::joint);
        return b.done();
    }
    if (id == "compression_both") {
        ConditionBuilder b(id, "inf ||N_1|| >= r1/||chi_1|| on ||u|| = r1, ||v|| >= r2 (and symmetric)");
        faces(b, p, true, false, no_scale);
        return b.done();
    }
    if (id == "compression_both_retract") {
        ConditionBuilder b(id, "inf ||N_1|| / max(|N_1|/R1, 1) >= r1/||chi_1|| on the faces of V");
        faces(b, p, true, false, Scaling::componentwise);
        return b.done();
    }
    if (id == "compression_both_retract_joint") {
        ConditionBuilder b(id, "inf ||N_1|| / max(|N_1|/R1, |N_2|/R2, 1) >= r1/||chi_1|| on the faces of V");
        faces(b, p, true, false, Scaling::joint);
        return b.done();
    }
    if (id == "compression_both_strict") {
        ConditionBuilder b(id, "inf ||N_1|| > r1/||chi_1|| on ||u|| = r1, ||v|| >= r2 (and symmetric)");
        faces(b, p, true, true, no_scale);
        return b.done();
    }
    if (id == "compression_strict") {
        ConditionBuilder b(id, "inf ||N_1|| > r1/||chi_1|| on ||u|| = r1 (and symmetric)");
        b.inf(extremum(p, box(r.R1, Semi::eq, r.r1), box(r.R2),
                       [&](auto&, auto&, auto& Nu, auto&) { return semi_N1(p, Nu); }, true),
              r.r1 / chi_semi(p, 1), true);
        b.inf(extremum(p, box(r.R1), box(r.R2, Semi::eq, r.r2),
                       [&](auto&, auto&, auto&, auto& Nv) { return semi_N2(p, Nv); }, true),
              r.r2 / chi_semi(p, 2), true);
        return b.done();
    }
    if (id == "no_ray_inner") {
        const double rho1 = need(r.rho1, "rho1", id), rho2 = need(r.rho2, "rho2", id);
        ConditionBuilder b(id, "N(u,v) != lambda (u,v) for lambda >= 1 on |u| = rho1, |v| <= rho2 (and symmetric)");
        auto dist = [](auto& u, auto& v, auto& Nu, auto& Nv) {
            return ray_distance(concat(Nu, Nv), concat(u, v), 1.0);
        };
        b.inf(extremum(p, box(rho1, Semi::any, 0.0, Bound::eq), box(rho2), dist, true), 0.0, true);
        b.inf(extremum(p, box(rho1), box(rho2, Semi::any, 0.0, Bound::eq), dist, true), 0.0, true);
        return b.done();
    }
    if (id == "no_ray_componentwise") {
        ConditionBuilder b(id, "N(u,v) != (lambda u, v), (u, lambda v), (l1 u, l2 v) on the matching faces of C");
        const double g = lambda_gt_one;
        b.inf(extremum(p, box(r.R1, Semi::any, 0.0, Bound::eq), box(r.R2, Semi::any, 0.0, Bound::lt),
                       [g](auto& u, auto& v, auto& Nu, auto& Nv) {
                           return std::max(ray_distance(Nu, u, g), diff_sup(Nv, v));
                       },
                       true),
              0.0, true);
        b.inf(extremum(p, box(r.R1, Semi::any, 0.0, Bound::lt), box(r.R2, Semi::any, 0.0, Bound::eq),
                       [g](auto& u, auto& v, auto& Nu, auto& Nv) {
                           return std::max(diff_sup(Nu, u), ray_distance(Nv, v, g));
                       },
                       true),
              0.0, true);
        b.inf(extremum(p, box(r.R1, Semi::any, 0.0, Bound::eq), box(r.R2, Semi::any, 0.0, Bound::eq),
                       [g](auto& u, auto& v, auto& Nu, auto& Nv) {
                           const double d1 = ray_distance(Nu, u, 1.0), d1g = ray_distance(Nu, u, g);
                           const double d2 = ray_distance(Nv, v, 1.0), d2g = ray_distance(Nv, v, g);
                           return std::min(std::max(d1g, d2), std::max(d1, d2g));
                       },
                       true),
              0.0, true);
        return b.done();
    }
    if (id == "no_ray_joint") {
        ConditionBuilder b(id, "N(u,v) != lambda (u,v) for lambda > 1 on the boundary of C");
        auto dist = [](auto& u, auto& v, auto& Nu, auto& Nv) {
            return ray_distance(concat(Nu, Nv), concat(u, v), lambda_gt_one);
        };
        b.inf(extremum(p, box(r.R1, Semi::any, 0.0, Bound::eq), box(r.R2), dist, true), 0.0, true);
        b.inf(extremum(p, box(r.R1), box(r.R2, Semi::any, 0.0, Bound::eq), dist, true), 0.0, true);
        return b.done();
    }
    if (id == "inner_compression") {
        const double rho1 = need(r.rho1, "rho1", id), rho2 = need(r.rho2, "rho2", id);
        const double q1 = need(r.varrho1, "varrho1", id), q2 = need(r.varrho2, "varrho2", id);
        ConditionBuilder b(id, "0 < varrho_i < ||phi_i|| ||chi_i|| rho_i, compression on the varrho faces "
                               "inside |u| <= rho1, |v| <= rho2, and |N_i| <= rho_i there");
        b.compare(q1, 0.0, true);
        b.compare(q2, 0.0, true);
        b.compare(pc1 * rho1, q1, true);
        b.compare(pc2 * rho2, q2, true);
        b.inf(extremum(p, box(rho1, Semi::eq, q1), box(rho2, Semi::ge, q2),
                       [&](auto&, auto&, auto& Nu, auto&) { return semi_N1(p, Nu); }, true),
              q1 / chi_semi(p, 1), false);
        b.inf(extremum(p, box(rho1, Semi::ge, q1), box(rho2, Semi::eq, q2),
                       [&](auto&, auto&, auto&, auto& Nv) { return semi_N2(p, Nv); }, true),
              q2 / chi_semi(p, 2), false);
        b.sup(extremum(p, box(rho1), box(rho2), [](auto&, auto&, auto& Nu, auto&) { return sup(Nu); }, false),
              rho1, false);
        b.sup(extremum(p, box(rho1), box(rho2), [](auto&, auto&, auto&, auto& Nv) { return sup(Nv); }, false),
              rho2, false);
        return b.done();
    }
    if (id == "inner_compression_or") {
        const double rho1 = need(r.rho1, "rho1", id), rho2 = need(r.rho2, "rho2", id);
        const double q1 = need(r.varrho1, "varrho1", id), q2 = need(r.varrho2, "varrho2", id);
        const double t1 = r.rho_tilde1.value_or(rho1), t2 = r.rho_tilde2.value_or(rho2);
        if (!(t1 <= rho1 && t2 <= rho2)) throw SpecError("inner_compression_or needs rho_tilde_i <= rho_i");
        ConditionBuilder b(id, "on |u| <= rho~1, |v| <= rho~2, ||u|| <= varrho1, ||v|| <= varrho2: "
                               "inf ||N_1|| >= varrho1 or inf ||N_2|| >= varrho2");
        b.compare(q1, 0.0, true);
        b.compare(q2, 0.0, true);
        b.compare(pc1 * rho1, q1, true);
        b.compare(pc2 * rho2, q2, true);
        const auto A1 = box(t1, Semi::le, q1), A2 = box(t2, Semi::le, q2);
        b.disjunction({{extremum(p, A1, A2, [&](auto&, auto&, auto& Nu, auto&) { return semi_N1(p, Nu); }, true), q1},
                       {extremum(p, A1, A2, [&](auto&, auto&, auto&, auto& Nv) { return semi_N2(p, Nv); }, true), q2}});
        return b.done();
    }
    if (id == "order_unit") {
        // h0 = (1, ..., 1) dominates every u with |u| <= 1; checked on the sampled unit ball.
        ConditionBuilder b(id, "h0 = 1 satisfies |h0| = 1 and h0 >= u whenever |u| <= 1");
        b.compare(1.0, 1.0, false);
        for (int which : {1, 2}) {
            const std::size_t n = which == 1 ? p.n1 : p.n2;
            const auto& mask = which == 1 ? p.mask1 : p.mask2;
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& u : component_samples(box(1.0), n, mask, p.resolution, {}))
                for (double x : u) worst = std::min(worst, 1.0 - x);
            b.compare(worst, 0.0, false);
        }
        return b.done();
    }
    if (id == "compression_order_unit") {
        ConditionBuilder b(id, "0 <= r_i < ||h0|| R_i and inf ||N_1|| > r1 on ||u|| = r1, ||v|| <= r2 (and symmetric)");
        b.compare(r.r1, 0.0, false);
        b.compare(r.r2, 0.0, false);
        b.compare(r.R1, r.r1, true);
        b.compare(r.R2, r.r2, true);
        faces(b, p, false, true, no_scale, false);
        return b.done();
    }
    if (id == "iso_compression" || id == "iso_compression_both") {
        const bool both = id == "iso_compression_both";
        ConditionBuilder b(id, both ? "||N_i(r1 chi_1, r2 chi_2)|| >= r_i/||chi_i||"
                                    : "||N_1(r1 chi_1, 0)|| >= r1/||chi_1||, ||N_2(0, r2 chi_2)|| >= r2/||chi_2||");
        const auto chi1 = ConeVector::chi(p.n1, p.mask1).values(), chi2 = ConeVector::chi(p.n2, p.mask2).values();
        std::vector<double> u1 = chi1, v2 = chi2;
        for (double& x : u1) x *= r.r1;
        for (double& x : v2) x *= r.r2;
        const std::vector<double> z1(p.n1, 0.0), z2(p.n2, 0.0);
        const auto first = p.apply(u1, both ? v2 : z2);
        const auto second = p.apply(both ? u1 : z1, v2);
        b.compare(semi_N1(p, first.first), r.r1 / chi_semi(p, 1), false,
                  LabProblem::point(u1, both ? v2 : z2));
        b.compare(semi_N2(p, second.second), r.r2 / chi_semi(p, 2), false,
                  LabProblem::point(both ? u1 : z1, v2));
        return b.done();
    }
    throw SpecError("unknown lab condition id '" + id + "'");
}

inline std::vector<LabCondition> check_conditions(const LabProblem& p, const std::vector<std::string>& ids) {
    std::vector<LabCondition> out;
    for (const auto& id : ids) out.push_back(check_condition(p, id));
    return out;
}

/// Per-rung conditions of the n-solution ladder, ids prefixed by "rungN.".
inline std::vector<LabCondition> ladder_conditions(const LabProblem& p) {
    if (p.ladder.empty()) throw SpecError("n-solutions needs a nonempty ladder");
    std::vector<LabCondition> out;
    const std::size_t n = p.ladder.size();
    for (std::size_t j = 0; j < n; ++j) {
        LabProblem q = p;
        q.radii = LabRadii{};
        q.radii.r1 = p.ladder[j].r1;
        q.radii.r2 = p.ladder[j].r2;
        q.radii.R1 = p.ladder[j].R1;
        q.radii.R2 = p.ladder[j].R2;
        const std::string pre = "rung" + std::to_string(j + 1) + ".";
        for (const char* id : {"radius_order", "compression_both", "invariance"}) {
            auto c = check_condition(q, id);
            c.id = pre + c.id;
            out.push_back(c);
        }
        if (j + 1 < n) {
            lab::ConditionBuilder b(pre + "separation", "c_i R_i^j < r_i^{j+1}");
            b.compare(p.ladder[j + 1].r1, p.ladder[j].R1, true);
            b.compare(p.ladder[j + 1].r2, p.ladder[j].R2, true);
            out.push_back(b.done());
            lab::ConditionBuilder s(pre + "invariance_strict", "sup over C^j of |N_i| < R_i^j");
            lab::invariance(s, q, true);
            out.push_back(s.done());
        }
        if (j > 0) {
            auto c = check_condition(q, "compression_both_strict");
            c.id = pre + c.id;
            out.push_back(c);
        }
    }
    return out;
}

struct LabFixedPoint {
    std::vector<double> u, v;
    double residual = 0.0;
};

namespace lab {

inline double residual(const LabProblem& p, const Eigen::VectorXd& z, Eigen::VectorXd* F = nullptr) {
    std::vector<double> u(z.data(), z.data() + p.n1), v(z.data() + p.n1, z.data() + p.n1 + p.n2);
    const auto [Nu, Nv] = p.apply(u, v);
    Eigen::VectorXd r(p.n1 + p.n2);
    for (std::size_t i = 0; i < p.n1; ++i) r[i] = Nu[i] - u[i];
    for (std::size_t i = 0; i < p.n2; ++i) r[p.n1 + i] = Nv[i] - v[i];
    if (F) *F = r;
    return r.lpNorm<Eigen::Infinity>();
}

/// Newton on N(z) - z with a forward-difference Jacobian, backtracking and projection
/// onto the orthant.
inline std::optional<LabFixedPoint> refine(const LabProblem& p, Eigen::VectorXd z, double tol) {
    const Eigen::Index d = z.size();
    Eigen::VectorXd F;
    double res = residual(p, z, &F);
    for (int it = 0; it < 100; ++it) {
        if (res <= tol * std::max(1.0, z.lpNorm<Eigen::Infinity>())) {
            LabFixedPoint fp;
            fp.u.assign(z.data(), z.data() + p.n1);
            fp.v.assign(z.data() + p.n1, z.data() + d);
            fp.residual = res;
            return fp;
        }
        Eigen::MatrixXd J(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            Eigen::VectorXd zj = z;
            const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
            zj[j] += h;
            Eigen::VectorXd Fj;
            residual(p, zj, &Fj);
            J.col(j) = (Fj - F) / h;
        }
        const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
        double t = 1.0;
        bool moved = false;
        while (t > 1e-10) {
            Eigen::VectorXd trial = (z + t * step).cwiseMax(0.0);
            Eigen::VectorXd Ft;
            const double rt = residual(p, trial, &Ft);
            if (rt < (1.0 - 1e-4 * t) * res) {
                z = trial;
                F = Ft;
                res = rt;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    if (res <= tol * std::max(1.0, z.lpNorm<Eigen::Infinity>())) {
        LabFixedPoint fp;
        fp.u.assign(z.data(), z.data() + p.n1);
        fp.v.assign(z.data() + p.n1, z.data() + d);
        fp.residual = res;
        return fp;
    }
    return std::nullopt;
}

} // namespace lab

/**
 * Grid scan of [0, B1]^{n1} x [0, B2]^{n2} with k cells per axis. A cell is a candidate
 * when every component of N(z) - z changes sign (or vanishes) across its corners; each
 * candidate is refined by Newton from the cell centre. Results are deduplicated by sup
 * distance and returned in lexicographic cell order.
 */
inline std::vector<LabFixedPoint> brute_force_fixed_points(const LabProblem& p, double B1, double B2,
                                                          int k, double refine_tol = 1e-12,
                                                          double dedup_tol = 1e-8) {
    p.validate();
    if (k < 1) throw SpecError("brute force needs at least one cell per axis");
    const std::size_t d = p.n1 + p.n2;
    const std::size_t npts = static_cast<std::size_t>(std::pow(k + 1, static_cast<double>(d)));
    std::vector<double> h(d);
    for (std::size_t i = 0; i < d; ++i) h[i] = (i < p.n1 ? B1 : B2) / k;
    auto node = [&](std::size_t flat) {
        Eigen::VectorXd z(d);
        for (std::size_t i = 0; i < d; ++i) {
            z[i] = static_cast<double>(flat % (k + 1)) * h[i];
            flat /= (k + 1);
        }
        return z;
    };
    std::vector<Eigen::VectorXd> F(npts);
    for (std::size_t f = 0; f < npts; ++f) lab::residual(p, node(f), &F[f]);

    std::vector<LabFixedPoint> out;
    auto add = [&](const LabFixedPoint& fp) {
        for (const auto& o : out) {
            double dist = 0.0;
            for (std::size_t i = 0; i < p.n1; ++i) dist = std::max(dist, std::abs(o.u[i] - fp.u[i]));
            for (std::size_t i = 0; i < p.n2; ++i) dist = std::max(dist, std::abs(o.v[i] - fp.v[i]));
            if (dist < dedup_tol) return;
        }
        out.push_back(fp);
    };
    const std::size_t ncells = static_cast<std::size_t>(std::pow(k, static_cast<double>(d)));
    const std::size_t ncorners = std::size_t{1} << d;
    for (std::size_t c = 0; c < ncells; ++c) {
        std::vector<std::size_t> base(d);
        std::size_t rem = c;
        for (std::size_t i = 0; i < d; ++i) {
            base[i] = rem % k;
            rem /= k;
        }
        std::vector<bool> neg(d, false), pos(d, false);
        for (std::size_t m = 0; m < ncorners; ++m) {
            std::size_t flat = 0, stride = 1;
            for (std::size_t i = 0; i < d; ++i) {
                flat += (base[i] + ((m >> i) & 1)) * stride;
                stride *= (k + 1);
            }
            for (std::size_t i = 0; i < d; ++i) {
                const double fi = F[flat][static_cast<Eigen::Index>(i)];
                if (fi <= 0.0) neg[i] = true;
                if (fi >= 0.0) pos[i] = true;
            }
        }
        bool candidate = true;
        for (std::size_t i = 0; i < d; ++i) candidate = candidate && neg[i] && pos[i];
        if (!candidate) continue;
        Eigen::VectorXd z(d);
        for (std::size_t i = 0; i < d; ++i) z[i] = (static_cast<double>(base[i]) + 0.5) * h[i];
        if (auto fp = lab::refine(p, z, refine_tol)) add(*fp);
    }
    return out;
}

/// One predicted region of a theorem's conclusion.
struct RegionCheck {
    std::string name;
    std::string description;
    std::size_t count = 0;
    bool found() const { return count > 0; }
};

struct TheoremVerdict {
    std::string theorem;
    bool confirmed = false;
    /// "CONFIRMED" or "NOT-FOUND-AT-RESOLUTION".
    std::string verdict;
    std::vector<LabCondition> hypotheses;
    std::vector<LabFixedPoint> fixed_points;
    std::vector<RegionCheck> regions;
};

/// Theorem ids accepted by validate_theorem.
inline const std::vector<std::string>& lab_theorem_ids() {
    static const std::vector<std::string> ids = {
        "one-solution",        "one-solution-or",            "one-solution-retract",
        "one-solution-retract-joint", "both-nonzero",        "both-nonzero-retract",
        "both-nonzero-retract-joint", "three-solutions",     "three-solutions-refined",
        "three-nonzero",       "three-nonzero-or",           "n-solutions",
        "order-unit",          "isotone-one-solution",       "isotone-both-nonzero",
    };
    return ids;
}

struct HypothesisCheck {
    bool hold = false;
    std::vector<LabCondition> conditions;
    /// Why the hypotheses do not hold (failing ids or a missing radius).
    std::string reason;
    /// For the three-solution refinements: whether the stronger compression held.
    bool refined = false;
};

namespace lab {

inline std::vector<std::string> base_hypotheses(const std::string& t) {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"one-solution", {"radius_order", "compression", "invariance"}},
        {"one-solution-or", {"radius_order", "invariance", "compression_or"}},
        {"one-solution-retract", {"radius_order", "compression_retract", "no_ray_componentwise"}},
        {"one-solution-retract-joint", {"radius_order", "compression_retract_joint", "no_ray_joint"}},
        {"both-nonzero", {"radius_order", "compression_both", "invariance"}},
        {"both-nonzero-retract", {"radius_order", "compression_both_retract", "no_ray_componentwise"}},
        {"both-nonzero-retract-joint", {"radius_order", "compression_both_retract_joint", "no_ray_joint"}},
        {"three-solutions", {"radius_order_three", "compression_both_strict", "invariance", "no_ray_inner"}},
        {"three-solutions-refined", {"radius_order_three", "compression_strict", "invariance", "no_ray_inner"}},
        {"three-nonzero", {"radius_order_three", "invariance", "no_ray_inner", "inner_compression"}},
        {"three-nonzero-or", {"radius_order_three", "invariance", "no_ray_inner", "inner_compression_or"}},
        {"order-unit", {"order_unit", "compression_order_unit", "invariance"}},
        {"isotone-one-solution", {"radius_order", "iso_compression", "invariance"}},
        {"isotone-both-nonzero", {"radius_order", "iso_compression_both", "invariance"}},
    };
    auto it = table.find(t);
    if (it == table.end()) throw SpecError("unknown lab theorem id '" + t + "'");
    return it->second;
}

inline std::string failing(const std::vector<LabCondition>& cs) {
    std::string s;
    for (const auto& c : cs)
        if (!c.pass) s += (s.empty() ? "" : ", ") + c.id;
    return s;
}

} // namespace lab

inline HypothesisCheck check_hypotheses(const LabProblem& p, const std::string& theorem) {
    const auto& ids = lab_theorem_ids();
    if (std::find(ids.begin(), ids.end(), theorem) == ids.end())
        throw SpecError("unknown lab theorem id '" + theorem + "'");
    HypothesisCheck h;
    if (theorem == "isotone-one-solution" || theorem == "isotone-both-nonzero") {
        if (!p.isotone) {
            h.reason = "operator is not declared isotone";
            return h;
        }
    }
    try {
        if (theorem == "n-solutions") {
            h.conditions = ladder_conditions(p);
            for (auto& c : h.conditions) {
                // The strict conditions only add solutions; they are not hypotheses of the count n.
                if (c.id.find("_strict") != std::string::npos) continue;
                if (!c.pass) h.reason += (h.reason.empty() ? "" : ", ") + c.id;
            }
            h.hold = h.reason.empty();
            if (!h.hold) h.reason = "failed: " + h.reason;
            return h;
        }
        h.conditions = check_conditions(p, lab::base_hypotheses(theorem));
        if (theorem == "three-nonzero" || theorem == "three-nonzero-or") {
            h.conditions.push_back(check_condition(p, "compression_strict"));
            h.conditions.push_back(check_condition(p, "compression_both_strict"));
            h.refined = h.conditions[h.conditions.size() - 2].pass;
            const bool either = h.refined || h.conditions.back().pass;
            std::vector<LabCondition> base(h.conditions.begin(), h.conditions.end() - 2);
            h.reason = lab::failing(base);
            if (!either) h.reason += std::string(h.reason.empty() ? "" : ", ") +
                                     "compression_strict or compression_both_strict";
        } else {
            h.reason = lab::failing(h.conditions);
        }
    } catch (const SpecError& e) {
        h.reason = e.what();
        return h;
    }
    h.hold = h.reason.empty();
    if (!h.hold && h.reason.rfind("failed: ", 0) != 0) h.reason = "failed: " + h.reason;
    return h;
}

namespace lab {

struct Region {
    std::string name, description;
    std::function<bool(const LabFixedPoint&)> test;
};

inline constexpr double region_tol = 1e-9;

inline std::vector<Region> conclusion(const LabProblem& p, const std::string& t, bool refined) {
    const LabRadii& r = p.radii;
    const double e = region_tol;
    auto S = [](const std::vector<double>& x) { return lab::sup(x); };
    auto n1 = [&p](const LabFixedPoint& f) { return semi(f.u, p.mask1); };
    auto n2 = [&p](const LabFixedPoint& f) { return semi(f.v, p.mask2); };
    auto inC = [=](const LabFixedPoint& f, double R1, double R2) {
        return S(f.u) <= R1 + e && S(f.v) <= R2 + e;
    };
    std::vector<Region> out;
    if (t == "one-solution" || t == "one-solution-retract" || t == "one-solution-retract-joint" ||
        t == "order-unit" || t == "isotone-one-solution") {
        out.push_back({"C\\U", "|u| <= R1, |v| <= R2, ||u|| >= r1 or ||v|| >= r2", [=](const LabFixedPoint& f) {
                           return inC(f, r.R1, r.R2) && (n1(f) >= r.r1 - e || n2(f) >= r.r2 - e);
                       }});
    } else if (t == "one-solution-or") {
        const double a1 = r.a1.value_or(0.5 * r.r1), a2 = r.a2.value_or(0.5 * r.r2);
        out.push_back({"C\\A", "|u| <= R1, |v| <= R2, ||u|| > a1 or ||v|| > a2", [=](const LabFixedPoint& f) {
                           return inC(f, r.R1, r.R2) && (n1(f) > a1 + e || n2(f) > a2 + e);
                       }});
    } else if (t.rfind("both-nonzero", 0) == 0 || t == "isotone-both-nonzero") {
        out.push_back({"C\\V", "|u| <= R1, |v| <= R2, ||u|| >= r1 and ||v|| >= r2", [=](const LabFixedPoint& f) {
                           return inC(f, r.R1, r.R2) && n1(f) >= r.r1 - e && n2(f) >= r.r2 - e;
                       }});
    } else if (t.rfind("three-", 0) == 0) {
        const double rho1 = *r.rho1, rho2 = *r.rho2;
        if (t == "three-nonzero") {
            const double q1 = *r.varrho1, q2 = *r.varrho2;
            out.push_back({"W", "|u| <= rho1, |v| <= rho2, ||u|| >= varrho1 and ||v|| >= varrho2",
                           [=](const LabFixedPoint& f) {
                               return S(f.u) <= rho1 + e && S(f.v) <= rho2 + e && n1(f) >= q1 - e &&
                                      n2(f) >= q2 - e;
                           }});
        } else if (t == "three-nonzero-or") {
            const double q1 = *r.varrho1, q2 = *r.varrho2;
            const double t1 = r.rho_tilde1.value_or(rho1), t2 = r.rho_tilde2.value_or(rho2);
            out.push_back({"W", "|u| <= rho1, |v| <= rho2 and outside {||u|| < varrho1, ||v|| < varrho2, "
                                "|u| <= rho~1, |v| <= rho~2}",
                           [=](const LabFixedPoint& f) {
                               return S(f.u) <= rho1 + e && S(f.v) <= rho2 + e &&
                                      (n1(f) >= q1 - e || n2(f) >= q2 - e || S(f.u) > t1 + e || S(f.v) > t2 + e);
                           }});
        } else {
            out.push_back({"W", "|u| < rho1, |v| < rho2", [=](const LabFixedPoint& f) {
                               return S(f.u) < rho1 - e && S(f.v) < rho2 - e;
                           }});
        }
        const bool tight = t == "three-solutions-refined" || refined;
        out.push_back({"V\\W", tight ? "||u|| < r1 and ||v|| < r2, |u| > rho1 or |v| > rho2"
                                     : "||u|| < r1 or ||v|| < r2, |u| > rho1 or |v| > rho2",
                       [=](const LabFixedPoint& f) {
                           const bool low = tight ? (n1(f) < r.r1 - e && n2(f) < r.r2 - e)
                                                  : (n1(f) < r.r1 - e || n2(f) < r.r2 - e);
                           return inC(f, r.R1, r.R2) && low && (S(f.u) > rho1 + e || S(f.v) > rho2 + e);
                       }});
        out.push_back({"C\\V", "||u|| > r1 and ||v|| > r2", [=](const LabFixedPoint& f) {
                           return inC(f, r.R1, r.R2) && n1(f) > r.r1 + e && n2(f) > r.r2 + e;
                       }});
    } else if (t == "n-solutions") {
        const auto& L = p.ladder;
        for (std::size_t j = 0; j < L.size(); ++j) {
            const LabRung g = L[j];
            out.push_back({"rung" + std::to_string(j + 1), "|u| <= R1^j, |v| <= R2^j, ||u|| >= r1^j, ||v|| >= r2^j",
                           [=](const LabFixedPoint& f) {
                               return inC(f, g.R1, g.R2) && n1(f) >= g.r1 - e && n2(f) >= g.r2 - e;
                           }});
        }
    } else {
        throw SpecError("unknown lab theorem id '" + t + "'");
    }
    return out;
}

/// The between-rung regions whose solutions the strict ladder conditions add.
inline std::vector<Region> ladder_extras(const LabProblem& p, const std::vector<LabCondition>& cs) {
    std::vector<Region> out;
    const auto& L = p.ladder;
    const double e = region_tol;
    auto passed = [&](const std::string& id) {
        for (const auto& c : cs)
            if (c.id == id) return c.pass;
        return false;
    };
    for (std::size_t j = 0; j + 1 < L.size(); ++j) {
        const std::string a = "rung" + std::to_string(j + 1) + ".invariance_strict";
        const std::string b = "rung" + std::to_string(j + 2) + ".compression_both_strict";
        if (!passed(a) || !passed(b)) continue;
        const LabRung lo = L[j], hi = L[j + 1];
        out.push_back({"between" + std::to_string(j + 1),
                       "|u| < R1^{j+1}, |v| < R2^{j+1}; |u| > R1^j or |v| > R2^j; ||u|| < r1^{j+1} or ||v|| < r2^{j+1}",
                       [=, &p](const LabFixedPoint& f) {
                           const double su = lab::sup(f.u), sv = lab::sup(f.v);
                           return su < hi.R1 - e && sv < hi.R2 - e && (su > lo.R1 + e || sv > lo.R2 + e) &&
                                  (semi(f.u, p.mask1) < hi.r1 - e || semi(f.v, p.mask2) < hi.r2 - e);
                       }});
    }
    return out;
}

} // namespace lab

/**
 * Checks the theorem's hypotheses, then searches C (the largest rung for n-solutions)
 * by brute force and counts fixed points in each predicted region. Raises
 * HypothesisError when the hypotheses do not hold.
 */
inline TheoremVerdict validate_theorem(const std::string& theorem, const LabProblem& p, int resolution = 16,
                                       double refine_tol = 1e-12) {
    HypothesisCheck h = check_hypotheses(p, theorem);
    if (!h.hold) throw HypothesisError("hypotheses of " + theorem + " do not hold: " + h.reason);
    TheoremVerdict out;
    out.theorem = theorem;
    out.hypotheses = h.conditions;
    double B1 = p.radii.R1, B2 = p.radii.R2;
    for (const auto& g : p.ladder)
        if (theorem == "n-solutions") {
            B1 = std::max(B1, g.R1);
            B2 = std::max(B2, g.R2);
        }
    out.fixed_points = brute_force_fixed_points(p, B1, B2, resolution, refine_tol);
    auto regions = lab::conclusion(p, theorem, h.refined);
    if (theorem == "n-solutions") {
        auto extra = lab::ladder_extras(p, h.conditions);
        regions.insert(regions.end(), extra.begin(), extra.end());
    }
    out.confirmed = true;
    for (const auto& reg : regions) {
        RegionCheck rc{reg.name, reg.description, 0};
        for (const auto& fp : out.fixed_points) rc.count += reg.test(fp);
        out.confirmed = out.confirmed && rc.found();
        out.regions.push_back(rc);
    }
    out.verdict = out.confirmed ? "CONFIRMED" : "NOT-FOUND-AT-RESOLUTION";
    return out;
}

struct LabFixture {
    LabProblem problem;
    /// Theorems whose hypotheses are expected to hold.
    std::vector<std::string> theorems;
};

/// Built-in operator fixtures.
inline std::vector<LabFixture> lab_fixtures() {
    std::vector<LabFixture> out;
    {
        auto p = LabProblem::make("constant", {"9"}, {"9"});
        p.radii.r1 = p.radii.r2 = 1.0;
        p.radii.R1 = p.radii.R2 = 9.0;
        p.isotone = true;
        out.push_back({p, {"one-solution", "one-solution-or", "one-solution-retract", "one-solution-retract-joint",
                           "both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint", "order-unit",
                           "isotone-one-solution", "isotone-both-nonzero"}});
    }
    {
        auto p = LabProblem::make("zero", {"0"}, {"0"});
        p.radii.r1 = p.radii.r2 = 1.0;
        p.radii.R1 = p.radii.R2 = 9.0;
        p.isotone = true;
        out.push_back({p, {}});
    }
    {
        auto p = LabProblem::make("sqrt", {"sqrt(u)+1"}, {"sqrt(v)+1"});
        p.radii.r1 = p.radii.r2 = 1.0;
        p.radii.R1 = p.radii.R2 = 9.0;
        p.isotone = true;
        out.push_back({p, {"one-solution", "one-solution-or", "one-solution-retract", "one-solution-retract-joint",
                           "both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint", "order-unit",
                           "isotone-one-solution", "isotone-both-nonzero"}});
    }
    {
        auto p = LabProblem::make("swap", {"v"}, {"u"});
        p.radii.r1 = p.radii.r2 = 0.5;
        p.radii.R1 = p.radii.R2 = 1.0;
        p.isotone = true;
        out.push_back({p, {"both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint", "isotone-both-nonzero"}});
    }
    {
        auto p = LabProblem::make("three", {"3*u^2/(1+u^2)"}, {"3*v^2/(1+v^2)"});
        p.radii.r1 = p.radii.r2 = 1.0;
        p.radii.R1 = p.radii.R2 = 3.0;
        p.radii.rho1 = p.radii.rho2 = 0.2;
        p.isotone = true;
        out.push_back({p, {"one-solution", "one-solution-retract", "one-solution-retract-joint", "both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint",
                           "three-solutions", "three-solutions-refined", "order-unit", "isotone-one-solution", "isotone-both-nonzero"}});
    }
    {
        auto p = LabProblem::make("shifted", {"0.05+3*u^2/(1+u^2)"}, {"0.05+3*v^2/(1+v^2)"});
        p.radii.r1 = p.radii.r2 = 1.0;
        p.radii.R1 = p.radii.R2 = 3.0;
        p.radii.rho1 = p.radii.rho2 = 0.2;
        p.radii.varrho1 = p.radii.varrho2 = 0.04;
        p.isotone = true;
        out.push_back({p, {"one-solution", "one-solution-retract", "one-solution-retract-joint", "both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint",
                           "three-solutions", "three-solutions-refined", "three-nonzero", "three-nonzero-or",
                           "order-unit", "isotone-one-solution", "isotone-both-nonzero"}});
    }
    {
        auto p = LabProblem::make("staircase", {"2+8*min(max(u-3,0),1)"}, {"2+8*min(max(v-3,0),1)"});
        p.radii.r1 = p.radii.r2 = 1.0;
        p.radii.R1 = p.radii.R2 = 3.0;
        p.ladder = {{1.0, 1.0, 3.0, 3.0}, {5.0, 5.0, 12.0, 12.0}};
        p.isotone = true;
        out.push_back({p, {"one-solution", "one-solution-or", "one-solution-retract", "one-solution-retract-joint",
                           "both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint", "n-solutions", "order-unit", "isotone-one-solution", "isotone-both-nonzero"}});
    }
    {
        auto p = LabProblem::make("affine3", {"1+0.5*v", "0.75+0.25*u1"}, {"1+0.25*(u1+u2)"});
        p.radii.r1 = p.radii.r2 = 0.5;
        p.radii.R1 = p.radii.R2 = 4.0;
        p.isotone = true;
        out.push_back({p, {"one-solution", "one-solution-or", "one-solution-retract", "one-solution-retract-joint",
                           "both-nonzero", "both-nonzero-retract", "both-nonzero-retract-joint", "order-unit", "isotone-one-solution", "isotone-both-nonzero"}});
    }
    return out;
}

} // namespace pqcone
