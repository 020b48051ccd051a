#pragma once

#include "pqcone/certify.hpp"
#include "pqcone/cone_consts.hpp"
#include "pqcone/fixpoint.hpp"
#include "pqcone/specfile.hpp"

#include <numbers>

namespace pqcone {

/**
 * The Laplacian system with f = phi(x) u^2/(4+u^3) and g = psi(x) atan(v)^2, where
 * a <= phi <= b and c <= psi <= d. Bounds: Phi <= 1/3 and Psi <= pi^2/4.
 */
namespace example {

inline constexpr double l1 = 1.0 / 3.0;
inline constexpr double l2 = std::numbers::pi * std::numbers::pi / 4.0;

inline double Phi(double x) { return x * x / (4.0 + x * x * x); }
inline double Psi(double x) { return std::atan(x) * std::atan(x); }

/// Radii and scalar conditions of the pipeline at one lambda.
struct Evaluation {
    double lambda = 0.0;
    double R1 = 0.0, R2 = 0.0, r1 = 0.0, r2 = 0.0, rho1 = 0.0, rho2 = 0.0;
    double gamma = 0.0;
    std::vector<ConditionRecord> checks;
    bool pass = false;
};

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Halve r until ratio(rho)/rho < bound; returns 0 when 200 halvings do not suffice.
template <class F>
double choose_small_radius(double r, double bound, F ratio) {
    double rho = 0.5 * r;
    for (int k = 0; k < 200; ++k, rho *= 0.5)
        if (ratio(rho) / rho < bound) return rho;
    return 0.0;
}

inline Evaluation evaluate(double lambda, double A, double B, const ExampleParams& e) {
    Evaluation ev;
    ev.lambda = lambda;
    ev.R1 = lambda * l1 * e.b / A;
    ev.R2 = lambda * l2 * e.d / A;
    ev.r1 = 1.0 / std::sqrt(ev.R1);
    ev.r2 = e.r2;
    ev.gamma = l1 * (B / A) * (e.b / e.a);
    const double s = std::sqrt(ev.R1);
    auto add = [&](const char* id, const std::string& text, double lhs, Relation rel, double rhs) {
        ev.checks.push_back(make_condition(id, text, lhs, rel, rhs, 0.0, "closed form"));
    };
    add("r1_below_R1", "r1 < ||1|| R1", ev.r1, Relation::lt, ev.R1);
    add("r2_below_R2", "r2 < ||1|| R2", ev.r2, Relation::lt, ev.R2);
    add("lower_u", "(R1/r1) min(Phi(r1), Phi(R1)) > gamma",
        ev.R1 / ev.r1 * std::min(Phi(ev.r1), Phi(ev.R1)), Relation::gt, ev.gamma);
    add("lower_v", "Psi(r2)/r2 > B/(lambda c)", Psi(ev.r2) / ev.r2, Relation::gt, B / (lambda * e.c));
    add("lower_u_closed", "min(R1^1.5/(1+4 R1^1.5), R1^3/(4+R1^3)) > gamma/sqrt(R1)",
        std::min(ev.R1 * s / (1.0 + 4.0 * ev.R1 * s),
                 ev.R1 * ev.R1 * ev.R1 / (4.0 + ev.R1 * ev.R1 * ev.R1)),
        Relation::gt, ev.gamma / s);
    ev.rho1 = choose_small_radius(std::min(ev.r1, 2.0), A / (lambda * e.b), Phi);
    ev.rho2 = choose_small_radius(ev.r2, A / (lambda * e.d), Psi);
    add("rho1_below_2", "rho1 < 2", ev.rho1, Relation::lt, 2.0);
    add("small_u", "Phi(rho1)/rho1 < A/(lambda b)", ev.rho1 > 0 ? Phi(ev.rho1) / ev.rho1 : std::numeric_limits<double>::infinity(),
        Relation::lt, A / (lambda * e.b));
    add("small_v", "Psi(rho2)/rho2 < A/(lambda d)", ev.rho2 > 0 ? Psi(ev.rho2) / ev.rho2 : std::numeric_limits<double>::infinity(),
        Relation::lt, A / (lambda * e.d));
    ev.pass = std::all_of(ev.checks.begin(), ev.checks.end(), [](const auto& c) { return c.pass; });
    return ev;
}

inline void validate(const ExampleParams& e) {
    auto pos = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) throw SpecError(std::string(name) + " must be positive");
    };
    pos(e.a, "example.a");
    pos(e.b, "example.b");
    pos(e.c, "example.c");
    pos(e.d, "example.d");
    pos(e.r2, "example.r2");
    if (e.a > e.b) throw SpecError("example needs a <= b");
    if (e.c > e.d) throw SpecError("example needs c <= d");
    if (!(e.lambda_lo > 0.0) || !(e.lambda_hi > e.lambda_lo))
        throw SpecError("example.lambda_bracket must satisfy 0 < lo < hi");
    for (double k : e.factors)
        if (!(k > 0.0)) throw SpecError("example.factors must be positive");
}

struct Threshold {
    double lambda0 = 0.0;
    /// Largest lambda tried that failed; 0 when the bracket start already passes.
    double lambda_fail = 0.0;
    /// Every lambda evaluated, in order.
    std::vector<Evaluation> trace;
};

/// Doubling from lambda_lo, then bisection down to relative width 1e-12.
inline Threshold find_threshold(double A, double B, const ExampleParams& e) {
    Threshold t;
    double lo = 0.0, hi = e.lambda_lo;
    for (;;) {
        t.trace.push_back(evaluate(hi, A, B, e));
        if (t.trace.back().pass) break;
        lo = hi;
        if (hi >= e.lambda_hi) {
            std::string msg = "no lambda in [" + fmt17(e.lambda_lo) + ", " + fmt17(e.lambda_hi) +
                              "] satisfies the example conditions; at the upper end:";
            for (const auto& c : t.trace.back().checks)
                if (!c.pass) msg += " " + c.id + " margin " + fmt17(c.margin);
            throw SearchError(msg);
        }
        hi = std::min(2.0 * hi, e.lambda_hi);
    }
    if (lo > 0.0) {
        while (hi - lo > 1e-12 * hi) {
            const double mid = 0.5 * (lo + hi);
            t.trace.push_back(evaluate(mid, A, B, e));
            (t.trace.back().pass ? hi : lo) = mid;
        }
    }
    t.lambda0 = hi;
    t.lambda_fail = lo;
    return t;
}

inline std::string coefficient(double lo, double hi, double length) {
    if (lo == hi) return fmt17(lo);
    return "(" + fmt17(lo) + "+" + fmt17(hi - lo) + "*sin(" + fmt17(std::numbers::pi / length) +
           "*x)^2)";
}

/// Problem at one lambda. Radii come from the pipeline; phi and psi vary in x between
/// their bounds.
inline ProblemSpec problem_at(const DomainPtr& dom, const Evaluation& ev, const ExampleParams& e,
                              int resolution) {
    ProblemSpec s;
    s.domain = dom;
    s.p = s.q = 2.0;
    const double L = dom->length(0);
    s.f = Expr::parse(coefficient(e.a, e.b, L) + "*u^2/(4+u^3)");
    s.g = Expr::parse(coefficient(e.c, e.d, L) + "*atan(v)^2");
    s.lambda = ev.lambda;
    s.f_mono = {Monotone::unknown, Monotone::increasing};
    s.g_mono = {Monotone::increasing, Monotone::increasing};
    s.radii.r1 = ev.r1;
    s.radii.r2 = ev.r2;
    s.radii.R1 = ev.R1;
    s.radii.R2 = ev.R2;
    s.radii.rho1 = ev.rho1;
    s.radii.rho2 = ev.rho2;
    s.resolution = resolution;
    return s;
}

struct FactorRun {
    double factor = 0.0;
    Evaluation conditions;
    ProblemSpec problem;
    CertificateReport certificate;
    MultiplicityResult search;
    std::vector<LocalizationReport> localization;
    /// Nontrivial, distinct, both seminorms above (r1, r2), positive where nonzero.
    bool outer_found = false;
};

struct Report {
    ConstantSet constants;
    Threshold threshold;
    /// The pipeline conditions at lambda0/2, expected to fail.
    Evaluation half;
    std::vector<FactorRun> runs;
};

inline bool positive_where_nonzero(const SolutionRecord& rec) {
    return (rec.u_zero || rec.u.interior_min() > 0.0) && (rec.v_zero || rec.v.interior_min() > 0.0);
}

inline Report run(const DomainPtr& dom, const ExampleParams& e, const SolverConfig& cfg,
                  const FixpointConfig& fc, int resolution) {
    validate(e);
    Report rep;
    rep.constants = compute_constants(dom, 2.0, 2.0, cfg);
    const double A = rep.constants.A_p, B = rep.constants.B_1p;
    rep.threshold = find_threshold(A, B, e);
    const double lambda0 = rep.threshold.lambda0;
    rep.half = evaluate(0.5 * lambda0, A, B, e);
    for (double k : e.factors) {
        FactorRun fr;
        fr.factor = k;
        fr.conditions = evaluate(k * lambda0, A, B, e);
        fr.problem = problem_at(dom, fr.conditions, e, resolution);
        fr.certificate = certify_three_solutions(fr.problem, rep.constants);
        fr.search = multiplicity_search(fr.problem, cfg, fc);
        for (const auto& rec : fr.search.records) {
            fr.localization.push_back(check_localization(rec, fr.problem));
            if (rec.nontrivial() && rec.semi_u > fr.problem.radii.r1 &&
                rec.semi_v > fr.problem.radii.r2 && positive_where_nonzero(rec))
                fr.outer_found = true;
        }
        rep.runs.push_back(std::move(fr));
    }
    return rep;
}

} // namespace example

} // namespace pqcone
