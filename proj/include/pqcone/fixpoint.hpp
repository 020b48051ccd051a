#pragma once

#include "pqcone/certify.hpp"
#include "pqcone/plap.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace pqcone {

struct FixpointConfig {
    int max_iters = 500;
    double fp_tol = 1e-9;
    /// Two solutions closer than this in sup distance are merged; negative means 100 fp_tol.
    double dedup_tol = -1.0;
    /// A component with sup norm below this counts as zero; negative means 10 fp_tol.
    double zero_tol = -1.0;
    double theta_min = 1.0 / 1024.0;
    /// A damped step must shrink the residual by the factor 1 - sufficient_decrease * theta.
    double sufficient_decrease = 1e-2;
    int random_seeds = 8;
    std::uint64_t seed = 12345;

    double dedup() const { return dedup_tol >= 0.0 ? dedup_tol : 100.0 * fp_tol; }
    double zero() const { return zero_tol >= 0.0 ? zero_tol : 10.0 * fp_tol; }
};

enum class RegionLabel { inner, middle, outer };

inline const char* to_string(RegionLabel r) {
    switch (r) {
    case RegionLabel::inner: return "inner";
    case RegionLabel::middle: return "middle";
    case RegionLabel::outer: return "outer";
    }
    return "?";
}

struct SolutionRecord {
    GridFunction u;
    GridFunction v;
    double sup_u = 0.0, sup_v = 0.0;
    double semi_u = 0.0, semi_v = 0.0;
    /// max(|N1(u,v) - u|, |N2(u,v) - v|), recomputed at the returned point.
    double residual = 0.0;
    RegionLabel region = RegionLabel::inner;
    int iterations = 0;
    std::string seed{};
    bool converged = false;
    bool u_zero = false, v_zero = false;

    bool nontrivial() const { return !(u_zero && v_zero); }
};

using FieldPair = std::pair<GridFunction, GridFunction>;

namespace detail {

inline SolverConfig with_exponent(SolverConfig cfg, double r) {
    cfg.r = r;
    return cfg;
}

/// lambda * e(x, u(x), v(x)) on interior nodes, zero on the boundary.
inline GridFunction superposition(const Expr& e, const GridFunction& u, const GridFunction& v,
                                  double lambda, const char* name) {
    const GridDomain& dom = u.domain();
    std::vector<double> out(dom.size(), 0.0);
    for (std::size_t k = 0; k < dom.size(); ++k) {
        if (dom.is_boundary(k)) continue;
        const auto c = dom.coord(k);
        const SamplePoint s{c[0], c[1], u[k], v[k]};
        const double val = lambda * eval_at(e, s, dom.dim());
        if (val < 0.0)
            throw SpecError(std::string(name) + " takes the negative value " + std::to_string(val) +
                            " at " + describe(s, dom.dim()));
        out[k] = val;
    }
    return GridFunction(u.domain_ptr(), std::move(out));
}

inline GridFunction clamp_nonnegative(const GridFunction& u) {
    return u.map([](double t) { return t > 0.0 ? t : 0.0; });
}

} // namespace detail

/// N(u,v) = (S_p(lambda F(u,v)), S_q(lambda G(u,v))).
inline FieldPair apply_N(const GridFunction& u, const GridFunction& v, const ProblemSpec& spec,
                         const SolverConfig& cfg) {
    const GridFunction F = detail::superposition(spec.f, u, v, spec.lambda, "f");
    const GridFunction G = detail::superposition(spec.g, u, v, spec.lambda, "g");
    return {solve(F, detail::with_exponent(cfg, spec.p)), solve(G, detail::with_exponent(cfg, spec.q))};
}

inline double pair_distance(const FieldPair& a, const FieldPair& b) {
    return std::max(sup_distance(a.first, b.first), sup_distance(a.second, b.second));
}

/// Region of a point relative to the three-solution radii: inner when |u| < rho1 and
/// |v| < rho2 (when rho is absent: both components zero), outer when ||u|| > r1 and
/// ||v|| > r2, middle otherwise.
inline RegionLabel classify(const SolutionRecord& rec, const ProblemSpec& spec) {
    const Radii& r = spec.radii;
    const bool inner = (r.rho1 && r.rho2) ? (rec.sup_u < *r.rho1 && rec.sup_v < *r.rho2)
                                          : (rec.u_zero && rec.v_zero);
    if (inner) return RegionLabel::inner;
    if (rec.semi_u > r.r1 && rec.semi_v > r.r2) return RegionLabel::outer;
    return RegionLabel::middle;
}

inline SolutionRecord make_record(GridFunction u, GridFunction v, double residual, int iters,
                                  std::string seed, bool converged, const ProblemSpec& spec,
                                  const FixpointConfig& fc) {
    SolutionRecord rec{.u = std::move(u), .v = std::move(v)};
    const ConeSpec c1 = ConeSpec::of(spec.domain, 1), c2 = ConeSpec::of(spec.domain, 2);
    rec.sup_u = sup_norm(rec.u);
    rec.sup_v = sup_norm(rec.v);
    rec.semi_u = seminorm(rec.u, c1);
    rec.semi_v = seminorm(rec.v, c2);
    rec.residual = residual;
    rec.iterations = iters;
    rec.seed = std::move(seed);
    rec.converged = converged;
    rec.u_zero = rec.sup_u < fc.zero();
    rec.v_zero = rec.sup_v < fc.zero();
    rec.region = classify(rec, spec);
    return rec;
}

/**
 * Damped Picard iteration z <- (1 - theta) z + theta N(z), starting with theta = 1.
 * A step without sufficient residual decrease is rejected and theta is halved; accepted
 * steps double theta again up to 1. The run stops unconverged once theta drops below
 * theta_min or max_iters is reached.
 */
inline SolutionRecord picard(const FieldPair& seed, const std::string& seed_name,
                             const ProblemSpec& spec, const SolverConfig& cfg,
                             const FixpointConfig& fc) {
    if (!seed.first.is_nonnegative() || !seed.second.is_nonnegative())
        throw ConeError("Picard seed must be nonnegative");
    FieldPair z = seed;
    FieldPair Nz = apply_N(z.first, z.second, spec, cfg);
    double res = pair_distance(Nz, z);
    double theta = 1.0;
    int it = 0;
    while (res >= fc.fp_tol && it < fc.max_iters) {
        ++it;
        FieldPair trial{detail::clamp_nonnegative((1.0 - theta) * z.first + theta * Nz.first),
                        detail::clamp_nonnegative((1.0 - theta) * z.second + theta * Nz.second)};
        FieldPair Nt = apply_N(trial.first, trial.second, spec, cfg);
        const double rt = pair_distance(Nt, trial);
        if (rt > (1.0 - fc.sufficient_decrease * theta) * res) {
            theta *= 0.5;
            if (theta < fc.theta_min) break;
            continue;
        }
        z = std::move(trial);
        Nz = std::move(Nt);
        res = rt;
        theta = std::min(1.0, 2.0 * theta);
    }
    return make_record(z.first, z.second, res, it, seed_name, res < fc.fp_tol, spec, fc);
}

enum class Direction { from_below, from_above };

/**
 * Undamped iteration for isotone f, g from the subsolution (r1 chi1, r2 chi2) or the
 * supersolution (R1, R2). Each iterate is checked against its predecessor; a step against
 * the expected order raises MonotonicityError.
 */
inline SolutionRecord monotone_iterate(Direction dir, const ProblemSpec& spec,
                                       const SolverConfig& cfg, const FixpointConfig& fc) {
    if (!spec.f_mono.isotone() || !spec.g_mono.isotone())
        throw SpecError("monotone iteration needs f and g declared increasing in u and v");
    detail::check_base_radii(spec);
    const DomainPtr& dom = spec.domain;
    const Radii& r = spec.radii;
    FieldPair z = dir == Direction::from_below
                      ? FieldPair{r.r1 * ConeSpec::of(dom, 1).indicator(),
                                  r.r2 * ConeSpec::of(dom, 2).indicator()}
                      : FieldPair{GridFunction::constant(dom, r.R1), GridFunction::constant(dom, r.R2)};
    const std::string name = dir == Direction::from_below ? "from-below" : "from-above";
    const double sign = dir == Direction::from_below ? 1.0 : -1.0;
    double res = 0.0;
    for (int it = 0; it <= fc.max_iters; ++it) {
        FieldPair Nz = apply_N(z.first, z.second, spec, cfg);
        res = pair_distance(Nz, z);
        const double tol = 1e-9 * std::max({1.0, sup_norm(z.first), sup_norm(z.second)}) + 10 * cfg.tol;
        for (int c = 0; c < 2; ++c) {
            const GridFunction& a = c == 0 ? z.first : z.second;
            const GridFunction& b = c == 0 ? Nz.first : Nz.second;
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (sign * (b[k] - a[k]) >= -tol) continue;
                const auto x = a.domain().coord(k);
                std::string what = it == 0 ? (dir == Direction::from_below ? "seed is not a subsolution"
                                                                            : "seed is not a supersolution")
                                           : "isotonicity violated at iteration " + std::to_string(it);
                throw MonotonicityError(name + ": " + what + " (component " + (c == 0 ? "u" : "v") +
                                        ", x = " + std::to_string(x[0]) + ", step " +
                                        std::to_string(b[k] - a[k]) + ")");
            }
        }
        z = std::move(Nz);
        if (res < fc.fp_tol) {
            const FieldPair Nf = apply_N(z.first, z.second, spec, cfg);
            return make_record(z.first, z.second, pair_distance(Nf, z), it + 1, name, true, spec, fc);
        }
    }
    return make_record(z.first, z.second, res, fc.max_iters, name, false, spec, fc);
}

struct MultiplicityResult {
    /// Converged, deduplicated solutions in seed-schedule order.
    std::vector<SolutionRecord> records;
    /// Seeds whose iteration did not converge, with their last residual.
    std::vector<std::pair<std::string, double>> failures;
    bool inner_found = false, middle_found = false, outer_found = false;

    int nontrivial() const {
        int n = 0;
        for (const auto& r : records) n += r.nontrivial();
        return n;
    }
};

/**
 * Fixed-point search from a fixed seed schedule: zero, varrho/rho/r multiples of the
 * indicators, R constants (jointly and per axis), seeded random cone elements, and the
 * two monotone iterations when f and g are declared isotone.
 */
inline MultiplicityResult multiplicity_search(const ProblemSpec& spec, const SolverConfig& cfg,
                                              const FixpointConfig& fc) {
    detail::check_base_radii(spec);
    const DomainPtr& dom = spec.domain;
    const Radii& r = spec.radii;
    const GridFunction chi1 = ConeSpec::of(dom, 1).indicator(), chi2 = ConeSpec::of(dom, 2).indicator();
    const GridFunction zero = GridFunction::zero(dom);
    std::vector<std::pair<std::string, FieldPair>> seeds;
    seeds.push_back({"zero", {zero, zero}});
    if (r.varrho1 && r.varrho2) seeds.push_back({"varrho*chi", {*r.varrho1 * chi1, *r.varrho2 * chi2}});
    if (r.rho1 && r.rho2) seeds.push_back({"rho*chi", {*r.rho1 * chi1, *r.rho2 * chi2}});
    seeds.push_back({"r*chi", {r.r1 * chi1, r.r2 * chi2}});
    seeds.push_back({"R*1", {GridFunction::constant(dom, r.R1), GridFunction::constant(dom, r.R2)}});
    seeds.push_back({"R*1,0", {GridFunction::constant(dom, r.R1), zero}});
    seeds.push_back({"0,R*1", {zero, GridFunction::constant(dom, r.R2)}});
    std::mt19937_64 rng(fc.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < fc.random_seeds; ++k) {
        const double a = U(rng) * r.R1, b = U(rng) * r.R2;
        auto u = GridFunction::from(dom, [&](double, double) { return a * U(rng); });
        auto v = GridFunction::from(dom, [&](double, double) { return b * U(rng); });
        seeds.push_back({"random-" + std::to_string(k), {u, v}});
    }

    MultiplicityResult out;
    auto add = [&](SolutionRecord rec) {
        if (!rec.converged) {
            out.failures.push_back({rec.seed, rec.residual});
            return;
        }
        for (const auto& old : out.records)
            if (pair_distance({old.u, old.v}, {rec.u, rec.v}) < fc.dedup()) return;
        out.records.push_back(std::move(rec));
    };
    for (const auto& [name, z] : seeds) add(picard(z, name, spec, cfg, fc));
    if (spec.f_mono.isotone() && spec.g_mono.isotone()) {
        for (Direction d : {Direction::from_below, Direction::from_above}) {
            try {
                add(monotone_iterate(d, spec, cfg, fc));
            } catch (const MonotonicityError& e) {
                out.failures.push_back({e.what(), -1.0});
            }
        }
    }
    for (const auto& rec : out.records) {
        out.inner_found |= rec.region == RegionLabel::inner;
        out.middle_found |= rec.region == RegionLabel::middle;
        out.outer_found |= rec.region == RegionLabel::outer;
    }
    return out;
}

struct LocalizationReport {
    std::vector<ConditionRecord> checks;
    bool pass = true;
};

/// |u| <= R1, |v| <= R2, ||u|| >= r1, ||v|| >= r2 within tol, and min over interior
/// nodes > 0 for every nonzero component.
inline LocalizationReport check_localization(const SolutionRecord& rec, const ProblemSpec& spec,
                                             double tol = 1e-6) {
    const Radii& r = spec.radii;
    LocalizationReport rep;
    auto add = [&](const std::string& id, const std::string& text, double lhs, Relation rel,
                   double rhs) {
        ConditionRecord c = make_condition(id, text, lhs, rel, rhs, 0.0, "exact");
        c.pass = (rel == Relation::gt || rel == Relation::lt) ? c.margin > 0.0 : c.margin >= -tol;
        rep.pass = rep.pass && c.pass;
        rep.checks.push_back(c);
    };
    add("sup_u", "|u| <= R1", rec.sup_u, Relation::le, r.R1);
    add("sup_v", "|v| <= R2", rec.sup_v, Relation::le, r.R2);
    add("semi_u", "||u|| >= r1", rec.semi_u, Relation::ge, r.r1);
    add("semi_v", "||v|| >= r2", rec.semi_v, Relation::ge, r.r2);
    if (!rec.u_zero) add("positive_u", "min over interior of u > 0", rec.u.interior_min(), Relation::gt, 0.0);
    if (!rec.v_zero) add("positive_v", "min over interior of v > 0", rec.v.interior_min(), Relation::gt, 0.0);
    return rep;
}

} // namespace pqcone
