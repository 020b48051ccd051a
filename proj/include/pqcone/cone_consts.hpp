#pragma once

#include "pqcone/grid.hpp"
#include "pqcone/plap.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace pqcone {

/// Localization constants for the pair of exponents (p, q) on one domain.
struct ConstantSet {
    double p = 2.0, q = 2.0;
    double A_p = 0.0, A_q = 0.0;
    double B_1p = 0.0, B_2q = 0.0;
    double lambda_p = 0.0, lambda_q = 0.0;
    /// ||1|| in each factor; exactly 1 for the min-over-D seminorm.
    double norm_one_1 = 1.0, norm_one_2 = 1.0;
    double torsion_p = 0.0, torsion_q = 0.0;
    double eigen_residual_p = 0.0, eigen_residual_q = 0.0;
    int dim = 1;
    std::size_t nx = 0, ny = 1;

    /// A <= lambda <= B within a relative tolerance.
    bool sandwich_holds(double rel_tol = 1e-8) const {
        auto ok = [rel_tol](double A, double l, double B) {
            return A <= l * (1 + rel_tol) && l <= B * (1 + rel_tol);
        };
        return ok(A_p, lambda_p, B_1p) && ok(A_q, lambda_q, B_2q);
    }
};

struct ExponentConstants {
    double A = 0.0, B = 0.0, lambda = 0.0, torsion = 0.0, eigen_residual = 0.0;
};

/// A_r = 1/|S_r(1)|^{r-1}, B = 1/||S_r(chi_D)||^{r-1} and lambda_{1,r} for one subset.
inline ExponentConstants exponent_constants(const DomainPtr& domain, double r, int which,
                                            SolverConfig cfg) {
    cfg.r = r;
    ExponentConstants c;
    const GridFunction torsion = solve(GridFunction::constant(domain, 1.0), cfg);
    c.torsion = sup_norm(torsion);
    c.A = 1.0 / std::pow(c.torsion, r - 1.0);
    const ConeSpec cone = ConeSpec::of(domain, which);
    const GridFunction bump = solve(cone.indicator(), cfg);
    c.B = 1.0 / std::pow(seminorm(bump, cone), r - 1.0);
    const EigenResult eig = first_eigenvalue(r, domain, cfg);
    c.lambda = eig.lambda;
    c.eigen_residual = eig.residual;
    return c;
}

inline ConstantSet compute_constants(const DomainPtr& domain, double p, double q,
                                     const SolverConfig& cfg) {
    ConstantSet cs;
    cs.p = p;
    cs.q = q;
    cs.dim = domain->dim();
    cs.nx = domain->nx();
    cs.ny = domain->ny();
    const ExponentConstants cp = exponent_constants(domain, p, 1, cfg);
    ExponentConstants cq;
    if (q == p && domain->subset(1) == domain->subset(2)) cq = cp;
    else if (q == p) {
        cq = cp;
        SolverConfig c2 = cfg;
        c2.r = q;
        const ConeSpec cone = ConeSpec::of(domain, 2);
        cq.B = 1.0 / std::pow(seminorm(solve(cone.indicator(), c2), cone), q - 1.0);
    } else {
        cq = exponent_constants(domain, q, 2, cfg);
    }
    cs.A_p = cp.A;
    cs.B_1p = cp.B;
    cs.lambda_p = cp.lambda;
    cs.torsion_p = cp.torsion;
    cs.eigen_residual_p = cp.eigen_residual;
    cs.A_q = cq.A;
    cs.B_2q = cq.B;
    cs.lambda_q = cq.lambda;
    cs.torsion_q = cq.torsion;
    cs.eigen_residual_q = cq.eigen_residual;
    return cs;
}

/// pi(u) = u when |u| <= R, otherwise (R/|u|) u.
template <class T>
T retraction_pi(const T& u, double R) {
    const double n = sup_norm(u);
    if (n <= R) return u;
    return (R / n) * u;
}

/// rho(u,v) = (max{|u|/R1, |v|/R2, 1})^{-1} (u,v).
template <class T>
std::pair<T, T> retraction_rho(const T& u, const T& v, double R1, double R2) {
    const double s = std::max({sup_norm(u) / R1, sup_norm(v) / R2, 1.0});
    if (s == 1.0) return {u, v};
    return {(1.0 / s) * u, (1.0 / s) * v};
}

/**
 * Empirical lower estimate of the Harnack constant: the smallest ratio
 * inf_D S_p(w) / (int_D S_p(w)^s)^{1/s} over a fixed catalog of right-hand sides w.
 *
 * The catalog starts with 1 and chi_D, followed by random nonnegative fields drawn
 * from a generator seeded with `seed`.
 */
inline double harnack_ratio(int samples, const DomainPtr& domain, double p, double s,
                            const ConeSpec& cone, SolverConfig cfg, std::uint64_t seed = 1) {
    if (samples < 1) throw SpecError("harnack_ratio needs at least one sample");
    if (!(s >= 1.0)) throw SpecError("harnack_ratio needs s >= 1");
    cfg.r = p;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        GridFunction w = k == 0   ? GridFunction::constant(domain, 1.0)
                         : k == 1 ? cone.indicator()
                                  : GridFunction::from(domain, [&](double, double) { return U(rng); });
        const GridFunction u = solve(w, cfg);
        const double ratio = seminorm(u, cone) / std::pow(subset_integral(u, cone, s), 1.0 / s);
        best = std::min(best, ratio);
    }
    return best;
}

} // namespace pqcone
