#include "oracles.hpp"
#include "pqcone/plap.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pqcone;

namespace {

DomainPtr unit_interval(std::size_t n, double a = 0.25, double b = 0.75) {
    const double h = 1.0 / static_cast<double>(n - 1);
    auto d = GridDomain::snap_inward(a, b, h, n);
    IndexBox box{{d[0], 0}, {d[1], 0}};
    return make_domain(GridDomain::interval(1.0, n, box, box));
}

DomainPtr unit_square(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    auto d = GridDomain::snap_inward(0.25, 0.75, h, n);
    IndexBox box{{d[0], d[0]}, {d[1], d[1]}};
    return make_domain(GridDomain::rectangle(1.0, 1.0, n, n, box, box));
}

SolverConfig config(double r) {
    SolverConfig c;
    c.r = r;
    return c;
}

} // namespace

TEST(Plap, TorsionLinear) {
    auto dom = unit_interval(1025);
    auto u = solve(GridFunction::constant(dom, 1.0), config(2.0));
    EXPECT_NEAR(sup_norm(u), 0.125, 1e-5);
    EXPECT_TRUE(u.vanishes_on_boundary());
    EXPECT_GT(u.interior_min(), 0.0);
}

TEST(Plap, TorsionNonlinearMatchesClosedForm) {
    auto dom = unit_interval(1025);
    for (double r : {1.5, 3.0, 4.0}) {
        auto u = solve(GridFunction::constant(dom, 1.0), config(r));
        EXPECT_NEAR(sup_norm(u), oracle::torsion_max(r), 1e-3) << "r = " << r;
    }
    auto u3 = solve(GridFunction::constant(dom, 1.0), config(3.0));
    EXPECT_NEAR(sup_norm(u3), 0.23570, 1e-3);
}

TEST(Plap, ZeroDataGivesZero) {
    auto dom = unit_interval(65);
    for (double r : {1.5, 2.0, 3.0}) {
        auto res = solve_detailed(GridFunction::zero(dom), config(r));
        EXPECT_EQ(sup_norm(res.u), 0.0);
        EXPECT_EQ(res.residual, 0.0);
    }
}

TEST(Plap, InvalidConfigRejected) {
    auto dom = unit_interval(65);
    EXPECT_THROW(solve(GridFunction::constant(dom, 1.0), config(1.0)), SpecError);
    EXPECT_THROW(solve(GridFunction::constant(unit_square(17), 1.0), config(1.3)), SpecError);
    SolverConfig bad = config(2.0);
    bad.tol = 0.0;
    EXPECT_THROW(solve(GridFunction::constant(dom, 1.0), bad), SpecError);
}

TEST(Plap, NonConvergenceCarriesResidual) {
    auto dom = unit_interval(257);
    SolverConfig c = config(3.0);
    c.max_iters = 1;
    c.steps_per_level = 0;
    c.tol = 1e-15;
    try {
        solve(GridFunction::constant(dom, 1.0), c);
        FAIL() << "expected a solver error";
    } catch (const SolverError& e) {
        EXPECT_GT(e.best_residual(), 0.0);
    }
}

TEST(Plap, EnergyHistoryIsNonIncreasing) {
    auto dom = unit_interval(257);
    for (double r : {1.5, 2.0, 3.0, 4.0}) {
        auto res = solve_detailed(GridFunction::constant(dom, 1.0), config(r));
        ASSERT_GE(res.energy_history.size(), 1u);
        for (std::size_t k = 1; k < res.energy_history.size(); ++k)
            EXPECT_LE(res.energy_history[k],
                      res.energy_history[k - 1] + 1e-12 * std::abs(res.energy_history[k - 1]))
                << "r = " << r << " step " << k;
    }
}

TEST(Plap, SolutionMinimizesDiscreteEnergy) {
    auto dom = unit_interval(129);
    auto v = GridFunction::constant(dom, 1.0);
    auto u = solve(v, config(3.0));
    const double J = energy(u, v, 3.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 1e-3);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> w(u.values().begin(), u.values().end());
        for (std::size_t k = 1; k + 1 < w.size(); ++k) w[k] += N(rng);
        EXPECT_GE(energy(GridFunction(dom, w), v, 3.0), J - 1e-14);
    }
}

TEST(Plap, Eigenvalue1D) {
    auto dom = unit_interval(1025);
    auto e = first_eigenvalue(2.0, dom, SolverConfig{});
    EXPECT_NEAR(e.lambda, oracle::pi * oracle::pi, 1e-3);
    EXPECT_NEAR(sup_norm(e.eigenfunction), 1.0, 1e-14);
    EXPECT_GT(e.eigenfunction.interior_min(), 0.0);
    EXPECT_NEAR(rayleigh_quotient(e.eigenfunction, 2.0), e.lambda, 1e-9 * e.lambda);
}

TEST(Plap, EigenvalueNonlinear1D) {
    auto dom = unit_interval(513);
    for (double r : {1.5, 3.0}) {
        auto e = first_eigenvalue(r, dom, SolverConfig{});
        EXPECT_NEAR(e.lambda, oracle::eigenvalue_1d(r), 2e-3 * oracle::eigenvalue_1d(r)) << r;
        EXPECT_GT(e.eigenfunction.interior_min(), 0.0);
        EXPECT_NEAR(rayleigh_quotient(e.eigenfunction, r), e.lambda, 1e-8 * e.lambda);
    }
}

TEST(Plap, Eigenvalue2D) {
    auto dom = unit_square(65);
    auto e = first_eigenvalue(2.0, dom, SolverConfig{});
    EXPECT_NEAR(e.lambda, 2 * oracle::pi * oracle::pi, 1e-2);
    EXPECT_GT(e.eigenfunction.interior_min(), 0.0);
}

TEST(Plap, TorsionOnSquareIsPositiveAndSymmetric) {
    auto dom = unit_square(33);
    auto u = solve(GridFunction::constant(dom, 1.0), config(3.0));
    EXPECT_GT(u.interior_min(), 0.0);
    EXPECT_TRUE(u.vanishes_on_boundary());
    // Known torsion maximum for the Laplacian on the unit square: 0.0736713...
    auto u2 = solve(GridFunction::constant(dom, 1.0), config(2.0));
    EXPECT_NEAR(sup_norm(u2), 0.0736713532, 5e-4);
    for (std::size_t j = 0; j < dom->ny(); ++j)
        for (std::size_t i = 0; i < dom->nx(); ++i)
            EXPECT_NEAR(u2[dom->index(i, j)], u2[dom->index(j, i)], 1e-12);
}

TEST(PlapProperty, Homogeneity) {
    auto dom = unit_interval(257);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 2.0);
    for (double r : {1.5, 2.0, 3.0}) {
        const SolverConfig cfg = config(r);
        std::vector<double> vals(dom->size());
        for (double& x : vals) x = U(rng);
        GridFunction v(dom, vals);
        auto u = solve(v, cfg);
        for (double c : {0.5, 3.0}) {
            auto uc = solve(std::pow(c, r - 1.0) * v, cfg);
            EXPECT_LE(sup_distance(uc, c * u), 10 * cfg.tol * std::max(1.0, c * sup_norm(u)))
                << "r = " << r << " c = " << c;
        }
    }
}

TEST(PlapProperty, Isotonicity) {
    auto dom = unit_interval(129);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double r : {1.5, 2.0, 3.0}) {
        const SolverConfig cfg = config(r);
        for (int t = 0; t < 10; ++t) {
            std::vector<double> a(dom->size()), b(dom->size());
            for (std::size_t k = 0; k < a.size(); ++k) {
                a[k] = U(rng);
                b[k] = a[k] + U(rng) * (t % 2);
            }
            auto u1 = solve(GridFunction(dom, a), cfg);
            auto u2 = solve(GridFunction(dom, b), cfg);
            for (std::size_t k = 0; k < u1.size(); ++k) EXPECT_LE(u1[k], u2[k] + cfg.tol);
        }
    }
}

TEST(PlapProperty, LinearityAtTwo) {
    auto dom = unit_interval(257);
    const SolverConfig cfg = config(2.0);
    auto v1 = GridFunction::from(dom, [](double x, double) { return std::sin(7 * x) + 1; });
    auto v2 = GridFunction::from(dom, [](double x, double) { return x * x; });
    auto lhs = solve(v1 + v2, cfg);
    auto rhs = solve(v1, cfg) + solve(v2, cfg);
    EXPECT_LE(sup_distance(lhs, rhs), 10 * cfg.tol);
}

TEST(PlapProperty, GridConvergenceOrderTwo) {
    std::vector<double> errs;
    for (std::size_t n : {65u, 129u, 257u, 513u}) {
        auto dom = unit_interval(n);
        auto u = solve(GridFunction::constant(dom, 1.0), config(2.0));
        errs.push_back(oracle::reconstruction_error(u, [](double x) { return x * (1 - x) / 2; }));
    }
    for (std::size_t k = 1; k < errs.size(); ++k)
        EXPECT_GE(std::log2(errs[k - 1] / errs[k]), 1.9);
}
