#pragma once

#include "pqcone/cone_consts.hpp"
#include "pqcone/errors.hpp"
#include "pqcone/expr.hpp"
#include "pqcone/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pqcone {

enum class Monotone { increasing, decreasing, unknown };

/// Declared monotonicity of a nonlinearity in u and in v.
struct Monotonicity {
    Monotone u = Monotone::unknown;
    Monotone v = Monotone::unknown;
    bool both_declared() const { return u != Monotone::unknown && v != Monotone::unknown; }
    bool isotone() const { return u == Monotone::increasing && v == Monotone::increasing; }
};

inline const char* to_string(Monotone m) {
    switch (m) {
    case Monotone::increasing: return "increasing";
    case Monotone::decreasing: return "decreasing";
    default: return "unknown";
    }
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct Radii {
    double r1 = 0.0, r2 = 0.0, R1 = 0.0, R2 = 0.0;
    std::optional<double> rho1, rho2;
    std::optional<double> varrho1, varrho2;
    std::optional<double> R_tilde1, R_tilde2;
    std::optional<double> rho_tilde1, rho_tilde2;
};

struct Rung {
    double r1 = 0.0, r2 = 0.0, R1 = 0.0, R2 = 0.0;
};

struct ProblemSpec {
    DomainPtr domain;
    double p = 2.0;
    double q = 2.0;
    Expr f = Expr::parse("0");
    Expr g = Expr::parse("0");
    /// Multiplies both f and g.
    double lambda = 1.0;
    Monotonicity f_mono;
    Monotonicity g_mono;
    Radii radii;
    std::vector<Rung> ladder;
    /// Sample intervals per axis when extrema are not taken at corners.
    int resolution = 64;
    /// Relative safety margin separating strict inequalities from ties.
    double strict_margin = 1e-9;
};

/// Which nodes the spatial variable ranges over.
enum class Region { closure, interior, d1, d2 };

struct SamplePoint {
    double x = 0.0, y = 0.0, u = 0.0, v = 0.0;
};

struct BoxExtremum {
    double min = 0.0;
    double max = 0.0;
    SamplePoint argmin;
    SamplePoint argmax;
    bool corner = false;
    int resolution = 0;
    std::string sampling() const {
        return corner ? "corner" : "sampled at resolution " + std::to_string(resolution);
    }
};

namespace detail {

inline std::vector<std::size_t> region_nodes(const GridDomain& dom, Region region) {
    switch (region) {
    case Region::closure: {
        std::vector<std::size_t> all(dom.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        return all;
    }
    case Region::interior: return dom.interior_nodes();
    case Region::d1: return dom.box_nodes(dom.subset(1));
    case Region::d2: return dom.box_nodes(dom.subset(2));
    }
    return {};
}

/// k+1 equispaced points of [lo,hi]; a single point for degenerate or unused axes.
/// With open_lo the left endpoint is dropped.
inline std::vector<double> axis_samples(Interval r, int k, bool used, bool open_lo = false) {
    if (r.hi < r.lo) throw SpecError("empty sampling range");
    if (!used) return {open_lo ? r.hi : r.lo};
    if (r.hi == r.lo) {
        if (open_lo) return {};
        return {r.lo};
    }
    std::vector<double> out;
    // Toward an open endpoint the behaviour as t -> lo matters, so add a geometric tail.
    if (open_lo)
        for (int j = 40; j >= 1; --j) {
            const double t = r.lo + (r.hi - r.lo) * std::ldexp(1.0, -j);
            if (t > r.lo && (k < 1 || t < r.lo + (r.hi - r.lo) / k)) out.push_back(t);
        }
    for (int i = open_lo ? 1 : 0; i <= k; ++i)
        out.push_back(i == k ? r.hi : r.lo + (r.hi - r.lo) * static_cast<double>(i) / k);
    return out;
}

inline std::string describe(const SamplePoint& s, int dim) {
    char buf[160];
    if (dim == 1)
        std::snprintf(buf, sizeof buf, "(x=%.17g, u=%.17g, v=%.17g)", s.x, s.u, s.v);
    else
        std::snprintf(buf, sizeof buf, "(x=%.17g, y=%.17g, u=%.17g, v=%.17g)", s.x, s.y, s.u, s.v);
    return buf;
}

inline double eval_at(const Expr& e, const SamplePoint& s, int dim) {
    const double slots[4] = {s.x, s.y, s.u, s.v};
    try {
        return e.eval(slots);
    } catch (const DomainError& err) {
        throw DomainError(err, describe(s, dim));
    }
}

/// Calls fn for every point of nodes x us x vs; skips duplicate spatial nodes when the
/// expression ignores x and y.
inline void for_each_sample(const GridDomain& dom, const std::vector<std::size_t>& nodes,
                            bool spatial, const std::vector<double>& us,
                            const std::vector<double>& vs,
                            const std::function<void(const SamplePoint&)>& fn) {
    const std::size_t nn = spatial ? nodes.size() : std::min<std::size_t>(nodes.size(), 1);
    for (std::size_t a = 0; a < nn; ++a) {
        const auto c = dom.coord(nodes[a]);
        for (double u : us)
            for (double v : vs) fn(SamplePoint{c[0], c[1], u, v});
    }
}

inline bool uses_space(const Expr& e) { return e.uses("x") || e.uses("y"); }

} // namespace detail

/**
 * Minimum and maximum of e over (region) x [u_range] x [v_range].
 *
 * With monotonicity declared in both u and v only the two extreme corners of the
 * (u,v) rectangle are evaluated; otherwise a Cartesian grid with `resolution` intervals
 * per axis is sampled. Spatial nodes are always enumerated when e depends on x or y.
 */
inline BoxExtremum box_extremum(const Expr& e, const GridDomain& dom, Region region,
                                Interval u_range, Interval v_range, const Monotonicity& mono,
                                int resolution) {
    if (u_range.hi < u_range.lo || v_range.hi < v_range.lo)
        throw SpecError("box_extremum: empty range");
    if (resolution < 1) throw SpecError("sampling resolution must be at least 1");
    const auto nodes = detail::region_nodes(dom, region);
    if (nodes.empty()) throw SpecError("box_extremum: empty spatial region");
    const bool spatial = detail::uses_space(e);
    BoxExtremum out;
    out.min = std::numeric_limits<double>::infinity();
    out.max = -std::numeric_limits<double>::infinity();
    out.resolution = resolution;

    auto visit = [&](const SamplePoint& s) {
        const double val = detail::eval_at(e, s, dom.dim());
        if (val < out.min) {
            out.min = val;
            out.argmin = s;
        }
        if (val > out.max) {
            out.max = val;
            out.argmax = s;
        }
    };

    if (mono.both_declared()) {
        out.corner = true;
        const bool ui = mono.u == Monotone::increasing, vi = mono.v == Monotone::increasing;
        const double u_max = ui ? u_range.hi : u_range.lo, u_min = ui ? u_range.lo : u_range.hi;
        const double v_max = vi ? v_range.hi : v_range.lo, v_min = vi ? v_range.lo : v_range.hi;
        const std::size_t nn = spatial ? nodes.size() : 1;
        for (std::size_t a = 0; a < nn; ++a) {
            const auto c = dom.coord(nodes[a]);
            const SamplePoint hi{c[0], c[1], u_max, v_max}, lo{c[0], c[1], u_min, v_min};
            const double fh = detail::eval_at(e, hi, dom.dim());
            const double fl = detail::eval_at(e, lo, dom.dim());
            if (fh > out.max) {
                out.max = fh;
                out.argmax = hi;
            }
            if (fl < out.min) {
                out.min = fl;
                out.argmin = lo;
            }
        }
        return out;
    }

    const auto us = detail::axis_samples(u_range, resolution, e.uses("u"));
    const auto vs = detail::axis_samples(v_range, resolution, e.uses("v"));
    detail::for_each_sample(dom, nodes, spatial, us, vs, visit);
    return out;
}

enum class Relation { le, lt, gt, ge };

inline const char* to_string(Relation r) {
    switch (r) {
    case Relation::le: return "<=";
    case Relation::lt: return "<";
    case Relation::gt: return ">";
    case Relation::ge: return ">=";
    }
    return "?";
}

struct ConditionRecord {
    std::string id;
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::le;
    /// rhs - lhs for < and <=, lhs - rhs for > and >=; positive means satisfied.
    double margin = 0.0;
    bool pass = false;
    std::string sampling;
    std::optional<SamplePoint> witness;
};

/// Compare lhs and rhs with a relative noise band delta * max(|lhs|, |rhs|). Strict
/// relations need the margin to clear the band; non-strict ones only need to reach -band.
inline ConditionRecord make_condition(std::string id, std::string inequality, double lhs,
                                      Relation rel, double rhs, double delta,
                                      std::string sampling) {
    ConditionRecord c;
    c.id = std::move(id);
    c.inequality = std::move(inequality);
    c.lhs = lhs;
    c.rhs = rhs;
    c.relation = rel;
    c.sampling = std::move(sampling);
    c.margin = (rel == Relation::le || rel == Relation::lt) ? rhs - lhs : lhs - rhs;
    const double band = delta * std::max(std::abs(lhs), std::abs(rhs));
    c.pass = (rel == Relation::le || rel == Relation::ge) ? c.margin >= -band : c.margin > band;
    return c;
}

struct ReportPart {
    std::string name;
    bool pass = false;
    std::string conclusion;
};

struct CertificateReport {
    std::string theorem;
    std::vector<ConditionRecord> conditions;
    bool pass = false;
    std::string conclusion;
    ConstantSet constants;
    int resolution = 0;
    /// Lower bound on the number of nontrivial solutions the verdict guarantees.
    int guaranteed_nontrivial = 0;
    std::vector<ReportPart> parts;
    std::vector<std::string> notes;

    const ConditionRecord& condition(const std::string& id) const {
        for (const auto& c : conditions)
            if (c.id == id) return c;
        throw Error("no condition '" + id + "' in report " + theorem);
    }
    bool passed(const std::string& id) const { return condition(id).pass; }
};

namespace detail {

inline void require(bool ok, const std::string& relation) {
    if (!ok) throw SpecError("radii violate " + relation);
}

inline void require_positive_finite(double x, const std::string& name) {
    if (!(x > 0.0) || !std::isfinite(x)) throw SpecError(name + " must be positive and finite");
}

inline void check_base_radii(const ProblemSpec& s) {
    if (!s.domain) throw SpecError("problem spec has no domain");
    require_positive_finite(s.radii.r1, "r1");
    require_positive_finite(s.radii.r2, "r2");
    require_positive_finite(s.radii.R1, "R1");
    require_positive_finite(s.radii.R2, "R2");
    require(s.radii.r1 < s.radii.R1, "r1 < R1");
    require(s.radii.r2 < s.radii.R2, "r2 < R2");
    if (!(s.lambda > 0.0) || !std::isfinite(s.lambda)) throw SpecError("lambda must be positive");
}

inline double get(const std::optional<double>& o, const std::string& name) {
    if (!o) throw SpecError("missing radius " + name);
    return *o;
}

/// Evaluates lambda*f (or g) on a box and checks nonnegativity there.
struct Sampler {
    const ProblemSpec& spec;

    BoxExtremum operator()(bool is_f, Region region, Interval u, Interval v) const {
        const Expr& e = is_f ? spec.f : spec.g;
        BoxExtremum b = box_extremum(e, *spec.domain, region, u, v, is_f ? spec.f_mono : spec.g_mono,
                                     spec.resolution);
        if (b.min < 0.0)
            throw SpecError(std::string(is_f ? "f" : "g") + " takes the negative value " +
                            std::to_string(b.min) + " at " + describe(b.argmin, spec.domain->dim()));
        b.min *= spec.lambda;
        b.max *= spec.lambda;
        return b;
    }
};

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// lambda * max f over closure x [0,U1] x [0,U2] against A * radius^{p-1}.
inline ConditionRecord upper_condition(const ProblemSpec& s, const ConstantSet& c, bool is_f,
                                       const std::string& id, double U1, double U2, double radius,
                                       Relation rel) {
    const BoxExtremum b = Sampler{s}(is_f, Region::closure, {0.0, U1}, {0.0, U2});
    const double A = is_f ? c.A_p : c.A_q, e = is_f ? s.p : s.q;
    const std::string name = is_f ? "f" : "g";
    const std::string text = "lambda*max " + name + " over [0," + fmt(U1) + "]x[0," + fmt(U2) +
                             "] " + to_string(rel) + " A*" + fmt(radius) + "^" + fmt(e - 1);
    auto rec = make_condition(id, text, b.max, rel, A * std::pow(radius, e - 1.0), s.strict_margin,
                              b.sampling());
    rec.witness = b.argmax;
    return rec;
}

/// lambda * min f over D x [u range] x [v range] against B * radius^{p-1}.
inline ConditionRecord lower_condition(const ProblemSpec& s, const ConstantSet& c, bool is_f,
                                       const std::string& id, Interval u, Interval v,
                                       double radius) {
    const BoxExtremum b = Sampler{s}(is_f, is_f ? Region::d1 : Region::d2, u, v);
    const double B = is_f ? c.B_1p : c.B_2q, e = is_f ? s.p : s.q;
    const std::string name = is_f ? "f" : "g";
    const std::string text = "lambda*min " + name + " over D" + (is_f ? "1" : "2") + "x[" +
                             fmt(u.lo) + "," + fmt(u.hi) + "]x[" + fmt(v.lo) + "," + fmt(v.hi) +
                             "] > B*" + fmt(radius) + "^" + fmt(e - 1);
    auto rec = make_condition(id, text, b.min, Relation::gt, B * std::pow(radius, e - 1.0),
                              s.strict_margin, b.sampling());
    rec.witness = b.argmin;
    return rec;
}

inline bool all_pass(const std::vector<ConditionRecord>& cs, std::initializer_list<const char*> ids) {
    for (const char* id : ids) {
        bool found = false;
        for (const auto& c : cs)
            if (c.id == id) {
                found = true;
                if (!c.pass) return false;
            }
        if (!found) return false;
    }
    return true;
}

inline std::string failed_ids(const std::vector<ConditionRecord>& cs) {
    std::string out;
    for (const auto& c : cs)
        if (!c.pass) out += (out.empty() ? "" : ", ") + c.id;
    return out;
}

} // namespace detail

/// One positive solution with |u| <= R1, |v| <= R2, ||u|| >= r1, ||v|| >= r2.
inline CertificateReport certify_existence(const ProblemSpec& spec, const ConstantSet& consts) {
    detail::check_base_radii(spec);
    const Radii& r = spec.radii;
    CertificateReport rep;
    rep.theorem = "existence";
    rep.constants = consts;
    rep.resolution = spec.resolution;
    rep.conditions.push_back(
        detail::upper_condition(spec, consts, true, "upper_f", r.R1, r.R2, r.R1, Relation::le));
    rep.conditions.push_back(
        detail::upper_condition(spec, consts, false, "upper_g", r.R1, r.R2, r.R2, Relation::le));
    rep.conditions.push_back(detail::lower_condition(spec, consts, true, "lower_f", {r.r1, r.R1},
                                                     {0.0, r.R2}, r.r1));
    rep.conditions.push_back(detail::lower_condition(spec, consts, false, "lower_g", {0.0, r.R1},
                                                     {r.r2, r.R2}, r.r2));
    rep.pass = detail::all_pass(rep.conditions, {"upper_f", "upper_g", "lower_f", "lower_g"});
    rep.guaranteed_nontrivial = rep.pass ? 1 : 0;
    rep.conclusion = rep.pass ? "positive solution with |u| <= " + detail::fmt(r.R1) +
                                    ", |v| <= " + detail::fmt(r.R2) + ", ||u|| >= " +
                                    detail::fmt(r.r1) + ", ||v|| >= " + detail::fmt(r.r2)
                              : "not certified; failed: " + detail::failed_ids(rep.conditions);
    return rep;
}

/// One nontrivial solution with ||u|| >= r1 or ||v|| >= r2 or |u| > R~1 or |v| > R~2.
inline CertificateReport certify_existence_or(const ProblemSpec& spec, const ConstantSet& consts) {
    detail::check_base_radii(spec);
    const Radii& r = spec.radii;
    const double Rt1 = r.R_tilde1.value_or(r.R1), Rt2 = r.R_tilde2.value_or(r.R2);
    detail::require(Rt1 > 0.0 && Rt1 <= r.R1, "0 < R~1 <= R1");
    detail::require(Rt2 > 0.0 && Rt2 <= r.R2, "0 < R~2 <= R2");
    CertificateReport rep;
    rep.theorem = "existence-or";
    rep.constants = consts;
    rep.resolution = spec.resolution;
    rep.conditions.push_back(
        detail::upper_condition(spec, consts, true, "upper_f", r.R1, r.R2, r.R1, Relation::le));
    rep.conditions.push_back(
        detail::upper_condition(spec, consts, false, "upper_g", r.R1, r.R2, r.R2, Relation::le));
    rep.conditions.push_back(detail::lower_condition(spec, consts, true, "lower_or_f", {0.0, Rt1},
                                                     {0.0, Rt2}, r.r1));
    rep.conditions.push_back(detail::lower_condition(spec, consts, false, "lower_or_g", {0.0, Rt1},
                                                     {0.0, Rt2}, r.r2));
    const bool upper = detail::all_pass(rep.conditions, {"upper_f", "upper_g"});
    const bool df = rep.passed("lower_or_f"), dg = rep.passed("lower_or_g");
    rep.pass = upper && (df || dg);
    rep.parts.push_back({"f-disjunct", df, df ? "lower_or_f holds" : "lower_or_f fails"});
    rep.parts.push_back({"g-disjunct", dg, dg ? "lower_or_g holds" : "lower_or_g fails"});
    rep.guaranteed_nontrivial = rep.pass ? 1 : 0;
    rep.conclusion = rep.pass ? "nontrivial solution with |u| <= " + detail::fmt(r.R1) +
                                    ", |v| <= " + detail::fmt(r.R2) + " and (||u|| >= " +
                                    detail::fmt(r.r1) + " or ||v|| >= " + detail::fmt(r.r2) +
                                    " or |u| > " + detail::fmt(Rt1) + " or |v| > " +
                                    detail::fmt(Rt2) + ")"
                              : "not certified; failed: " + detail::failed_ids(rep.conditions);
    return rep;
}

/**
 * Three nonnegative solutions: one in |u| < rho1, |v| < rho2 (possibly zero), one with
 * ||u|| < r1, ||v|| < r2 and (|u| > rho1 or |v| > rho2), one with ||u|| > r1, ||v|| > r2.
 *
 * When varrho is given the refined parts are evaluated as well: inner_lower_* sharpen the
 * first solution to ||u|| >= varrho1 and ||v|| >= varrho2; inner_or_* (with rho~) give the
 * disjunctive version.
 */
inline CertificateReport certify_three_solutions(const ProblemSpec& spec, const ConstantSet& consts) {
    detail::check_base_radii(spec);
    const Radii& r = spec.radii;
    const double rho1 = detail::get(r.rho1, "rho1"), rho2 = detail::get(r.rho2, "rho2");
    detail::require(rho1 > 0.0 && rho1 < r.r1, "0 < rho1 < r1");
    detail::require(rho2 > 0.0 && rho2 < r.r2, "0 < rho2 < r2");
    const bool has_varrho = r.varrho1.has_value() || r.varrho2.has_value();
    if (has_varrho) {
        detail::require(r.varrho1.has_value() && r.varrho2.has_value(), "varrho given in pairs");
        detail::require(*r.varrho1 > 0.0 && *r.varrho1 < rho1, "0 < varrho1 < rho1");
        detail::require(*r.varrho2 > 0.0 && *r.varrho2 < rho2, "0 < varrho2 < rho2");
    }
    const bool has_rho_tilde = r.rho_tilde1.has_value() || r.rho_tilde2.has_value();
    if (has_rho_tilde) {
        detail::require(has_varrho, "rho~ requires varrho");
        detail::require(r.rho_tilde1.has_value() && r.rho_tilde2.has_value(), "rho~ given in pairs");
        detail::require(*r.rho_tilde1 > 0.0 && *r.rho_tilde1 <= rho1, "0 < rho~1 <= rho1");
        detail::require(*r.rho_tilde2 > 0.0 && *r.rho_tilde2 <= rho2, "0 < rho~2 <= rho2");
    }

    CertificateReport rep;
    rep.theorem = "three";
    rep.constants = consts;
    rep.resolution = spec.resolution;
    auto& cs = rep.conditions;
    cs.push_back(detail::upper_condition(spec, consts, true, "upper_f", r.R1, r.R2, r.R1, Relation::le));
    cs.push_back(detail::upper_condition(spec, consts, false, "upper_g", r.R1, r.R2, r.R2, Relation::le));
    cs.push_back(detail::upper_condition(spec, consts, true, "small_f", rho1, rho2, rho1, Relation::lt));
    cs.push_back(detail::upper_condition(spec, consts, false, "small_g", rho1, rho2, rho2, Relation::lt));
    cs.push_back(detail::lower_condition(spec, consts, true, "lower_f", {r.r1, r.R1}, {0.0, r.R2}, r.r1));
    cs.push_back(detail::lower_condition(spec, consts, false, "lower_g", {0.0, r.R1}, {r.r2, r.R2}, r.r2));
    rep.pass = detail::all_pass(cs, {"upper_f", "upper_g", "small_f", "small_g", "lower_f", "lower_g"});
    rep.guaranteed_nontrivial = rep.pass ? 2 : 0;

    if (has_varrho) {
        const double q1 = *r.varrho1, q2 = *r.varrho2;
        cs.push_back(detail::lower_condition(spec, consts, true, "inner_lower_f", {q1, rho1},
                                             {0.0, rho2}, q1));
        cs.push_back(detail::lower_condition(spec, consts, false, "inner_lower_g", {0.0, rho1},
                                             {q2, rho2}, q2));
        const bool ok = rep.pass && detail::all_pass(cs, {"inner_lower_f", "inner_lower_g"});
        rep.parts.push_back({"refined-inner", ok,
                             ok ? "first solution has ||u|| >= " + detail::fmt(q1) +
                                      " and ||v|| >= " + detail::fmt(q2)
                                : "refinement not certified"});
        if (ok) rep.guaranteed_nontrivial = 3;
        if (has_rho_tilde) {
            const double t1 = *r.rho_tilde1, t2 = *r.rho_tilde2;
            cs.push_back(detail::lower_condition(spec, consts, true, "inner_or_f", {0.0, t1},
                                                 {0.0, t2}, q1));
            cs.push_back(detail::lower_condition(spec, consts, false, "inner_or_g", {0.0, t1},
                                                 {0.0, t2}, q2));
            const bool any = rep.passed("inner_or_f") || rep.passed("inner_or_g");
            const bool ok2 = rep.pass && any;
            rep.parts.push_back({"refined-inner-or", ok2,
                                 ok2 ? "first solution has ||u|| >= " + detail::fmt(q1) +
                                           " or ||v|| >= " + detail::fmt(q2) + " or |u| > " +
                                           detail::fmt(t1) + " or |v| > " + detail::fmt(t2)
                                     : "disjunctive refinement not certified"});
            if (ok2) rep.guaranteed_nontrivial = 3;
        }
    }
    rep.conclusion =
        rep.pass ? "three nonnegative solutions: |u1| < " + detail::fmt(rho1) + ", |v1| < " +
                       detail::fmt(rho2) + "; ||u2|| < " + detail::fmt(r.r1) + ", ||v2|| < " +
                       detail::fmt(r.r2) + " with |u2| > " + detail::fmt(rho1) + " or |v2| > " +
                       detail::fmt(rho2) + "; ||u3|| > " + detail::fmt(r.r1) + ", ||v3|| > " +
                       detail::fmt(r.r2)
                 : "not certified; failed: " + detail::failed_ids(cs);
    return rep;
}

/**
 * Ladder of radii (r^j, R^j), j = 1..n, with R^j < r^{j+1}. Passing the existence
 * conditions on every rung guarantees n nontrivial solutions; each rung j < n whose
 * upper conditions hold strictly adds one more, located between rungs j and j+1.
 */
inline CertificateReport certify_n_solutions(const ProblemSpec& spec, const ConstantSet& consts) {
    if (!spec.domain) throw SpecError("problem spec has no domain");
    const auto& L = spec.ladder;
    if (L.empty()) throw SpecError("ladder has no rungs");
    for (std::size_t j = 0; j < L.size(); ++j) {
        const std::string k = std::to_string(j + 1);
        detail::require(L[j].r1 > 0.0 && L[j].r2 > 0.0, "positive radii on rung " + k);
        detail::require(L[j].r1 < L[j].R1 && L[j].r2 < L[j].R2, "r < R on rung " + k);
        if (j + 1 < L.size())
            detail::require(L[j].R1 < L[j + 1].r1 && L[j].R2 < L[j + 1].r2,
                            "R^" + k + " < r^" + std::to_string(j + 2));
    }
    CertificateReport rep;
    rep.theorem = "ladder";
    rep.constants = consts;
    rep.resolution = spec.resolution;
    bool base = true;
    int extra = 0;
    for (std::size_t j = 0; j < L.size(); ++j) {
        const Rung& g = L[j];
        const std::string pre = "rung" + std::to_string(j + 1) + ".";
        auto& cs = rep.conditions;
        const std::size_t first = cs.size();
        cs.push_back(detail::upper_condition(spec, consts, true, pre + "upper_f", g.R1, g.R2, g.R1, Relation::le));
        cs.push_back(detail::upper_condition(spec, consts, false, pre + "upper_g", g.R1, g.R2, g.R2, Relation::le));
        cs.push_back(detail::lower_condition(spec, consts, true, pre + "lower_f", {g.r1, g.R1}, {0.0, g.R2}, g.r1));
        cs.push_back(detail::lower_condition(spec, consts, false, pre + "lower_g", {0.0, g.R1}, {g.r2, g.R2}, g.r2));
        for (std::size_t k = first; k < cs.size(); ++k) base = base && cs[k].pass;
        if (j + 1 < L.size()) {
            cs.push_back(detail::upper_condition(spec, consts, true, pre + "upper_strict_f", g.R1, g.R2, g.R1, Relation::lt));
            cs.push_back(detail::upper_condition(spec, consts, false, pre + "upper_strict_g", g.R1, g.R2, g.R2, Relation::lt));
            const bool strict = cs[cs.size() - 1].pass && cs[cs.size() - 2].pass;
            if (strict) ++extra;
            rep.parts.push_back({pre + "between", strict,
                                 strict ? "additional solution between rungs " + std::to_string(j + 1) +
                                              " and " + std::to_string(j + 2)
                                        : "no additional solution certified above rung " +
                                              std::to_string(j + 1)});
        }
    }
    rep.pass = base;
    const int n = static_cast<int>(L.size());
    rep.guaranteed_nontrivial = base ? n + extra : 0;
    rep.conclusion = base ? std::to_string(n) + " nontrivial solutions (one per rung) plus " +
                                std::to_string(extra) + " additional"
                          : "not certified; failed: " + detail::failed_ids(rep.conditions);
    return rep;
}

/// Box on which the nonexistence inequalities are sampled.
struct CheckBox {
    Interval u{0.0, 10.0};
    Interval v{0.0, 10.0};
};

/**
 * The six sufficient conditions for a vanishing component, sampled on a bounded box.
 * For the f conditions u = 0 is excluded (the inequalities quantify over u > 0), and
 * likewise v = 0 for the g conditions. Each record carries its worst sample as witness.
 *
 * Overall PASS means corollary (i): some condition holds, so there is no positive
 * solution. Corollary (ii) (one f condition and one g condition) is reported as a part.
 */
inline CertificateReport certify_nonexistence(const ProblemSpec& spec, const ConstantSet& consts,
                                              const CheckBox& box) {
    if (!spec.domain) throw SpecError("problem spec has no domain");
    if (box.u.hi < box.u.lo || box.v.hi < box.v.lo || box.u.lo < 0.0 || box.v.lo < 0.0)
        throw SpecError("nonexistence check box must be a nonempty subset of [0,inf)^2");
    if (!(box.u.hi > 0.0) || !(box.v.hi > 0.0))
        throw SpecError("nonexistence check box must contain positive values");
    const GridDomain& dom = *spec.domain;
    const int k = spec.resolution;
    CertificateReport rep;
    rep.theorem = "nonexistence";
    rep.constants = consts;
    rep.resolution = k;

    struct Kind {
        const char* id;
        bool is_f;
        bool above;      // f > c u^{p-1} (true) or f < c u^{p-1}
        bool harnack;    // constant B on D instead of lambda_1 on Omega
    };
    const Kind kinds[] = {
        {"below_eigen_f", true, false, false}, {"above_eigen_f", true, true, false},
        {"above_harnack_f", true, true, true}, {"below_eigen_g", false, false, false},
        {"above_eigen_g", false, true, false}, {"above_harnack_g", false, true, true},
    };
    for (const Kind& kd : kinds) {
        const Expr& e = kd.is_f ? spec.f : spec.g;
        const double expo = (kd.is_f ? spec.p : spec.q) - 1.0;
        const double c = kd.harnack ? (kd.is_f ? consts.B_1p : consts.B_2q)
                                    : (kd.is_f ? consts.lambda_p : consts.lambda_q);
        const Region region = kd.harnack ? (kd.is_f ? Region::d1 : Region::d2) : Region::interior;
        const auto nodes = detail::region_nodes(dom, region);
        // The comparison always depends on the own variable, so sample it even if e does not.
        const auto us = detail::axis_samples(box.u, k, kd.is_f || e.uses("u"), kd.is_f);
        const auto vs = detail::axis_samples(box.v, k, !kd.is_f || e.uses("v"), !kd.is_f);
        double worst = std::numeric_limits<double>::infinity();
        double wl = 0.0, wr = 0.0;
        SamplePoint wp;
        detail::for_each_sample(dom, nodes, detail::uses_space(e), us, vs, [&](const SamplePoint& s) {
            const double lhs = spec.lambda * detail::eval_at(e, s, dom.dim());
            const double rhs = c * std::pow(kd.is_f ? s.u : s.v, expo);
            const double band = spec.strict_margin * std::max(std::abs(lhs), std::abs(rhs));
            const double m = (kd.above ? lhs - rhs : rhs - lhs) - band;
            if (m < worst) {
                worst = m;
                wl = lhs;
                wr = rhs;
                wp = s;
            }
        });
        const std::string name = kd.is_f ? "f" : "g";
        const std::string var = kd.is_f ? "u" : "v";
        const std::string cname = kd.harnack ? (kd.is_f ? "B1" : "B2") : "lambda1";
        const std::string text = "lambda*" + name + (kd.above ? " > " : " < ") + cname + "*" + var +
                                 "^" + detail::fmt(expo) + " on " +
                                 (kd.harnack ? (kd.is_f ? "D1" : "D2") : "Omega") + " x box, " +
                                 var + " > 0";
        auto rec = make_condition(kd.id, text, wl, kd.above ? Relation::gt : Relation::lt, wr,
                                  spec.strict_margin,
                                  "sampled on box at resolution " + std::to_string(k));
        rec.witness = wp;
        rep.conditions.push_back(rec);
    }
    bool any_f = false, any_g = false;
    for (const auto& c : rep.conditions) {
        const bool is_f = c.id.back() == 'f';
        if (c.pass) (is_f ? any_f : any_g) = true;
    }
    rep.pass = any_f || any_g;
    rep.parts.push_back({"corollary-i", rep.pass,
                         rep.pass ? "no positive solution (on box)" : "no condition holds on box"});
    const bool both = any_f && any_g;
    rep.parts.push_back({"corollary-ii", both,
                         both ? "no nontrivial nonnegative solution (on box)"
                              : "needs one f condition and one g condition"});
    rep.guaranteed_nontrivial = 0;
    std::string comps;
    if (any_f) comps += "u = 0";
    if (any_g) comps += std::string(comps.empty() ? "" : " and ") + "v = 0";
    rep.conclusion = rep.pass ? "every nonnegative solution has " + comps + " (verified on box only)"
                              : "no nonexistence condition holds on the box";
    return rep;
}

} // namespace pqcone
