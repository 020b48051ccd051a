#include "oracles.hpp"
#include "pqcone/fixpoint.hpp"

#include <gtest/gtest.h>

using namespace pqcone;

namespace {

DomainPtr unit_interval(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    auto d = GridDomain::snap_inward(0.25, 0.75, h, n);
    IndexBox box{{d[0], 0}, {d[1], 0}};
    return make_domain(GridDomain::interval(1.0, n, box, box));
}

const Monotonicity isotone{Monotone::increasing, Monotone::increasing};

ProblemSpec make_spec(const DomainPtr& dom, const std::string& f, const std::string& g,
                      double r = 0.5, double R = 2.0) {
    ProblemSpec s;
    s.domain = dom;
    s.f = Expr::parse(f);
    s.g = Expr::parse(g);
    s.radii.r1 = s.radii.r2 = r;
    s.radii.R1 = s.radii.R2 = R;
    return s;
}

FieldPair zeros(const DomainPtr& dom) { return {GridFunction::zero(dom), GridFunction::zero(dom)}; }

} // namespace

TEST(ApplyN, ConstantDataGivesTorsionMultiple) {
    auto dom = unit_interval(257);
    auto spec = make_spec(dom, "16", "0");
    auto [u, v] = apply_N(GridFunction::zero(dom), GridFunction::zero(dom), spec, SolverConfig{});
    EXPECT_NEAR(sup_norm(u), 2.0, 1e-10);
    EXPECT_NEAR(seminorm(u, ConeSpec::of(dom, 1)), 1.5, 1e-10);
    EXPECT_EQ(sup_norm(v), 0.0);
}

TEST(ApplyN, LambdaScalesData) {
    auto dom = unit_interval(129);
    auto spec = make_spec(dom, "4", "2");
    spec.lambda = 4.0;
    auto [u, v] = apply_N(GridFunction::zero(dom), GridFunction::zero(dom), spec, SolverConfig{});
    EXPECT_NEAR(sup_norm(u), 2.0, 1e-10);
    EXPECT_NEAR(sup_norm(v), 1.0, 1e-10);
}

TEST(ApplyN, NegativeDataIsRejected) {
    auto dom = unit_interval(33);
    auto spec = make_spec(dom, "u - 1", "0");
    EXPECT_THROW(apply_N(GridFunction::zero(dom), GridFunction::zero(dom), spec, SolverConfig{}),
                 SpecError);
}

TEST(Picard, CappedLinearMatchesClosedForm) {
    auto dom = unit_interval(257);
    auto spec = make_spec(dom, "min(u,8)+8", "0");
    auto rec = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    ASSERT_TRUE(rec.converged);
    EXPECT_LT(rec.residual, 1e-9);
    EXPECT_TRUE(rec.v_zero);
    EXPECT_LT(oracle::reconstruction_error(rec.u, oracle::capped_linear_fixed_point), 1e-4);
}

TEST(Picard, ConstantDataConvergesInOneStep) {
    auto dom = unit_interval(129);
    auto spec = make_spec(dom, "16", "16", 1.0, 2.0);
    auto rec = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    ASSERT_TRUE(rec.converged);
    EXPECT_EQ(rec.iterations, 1);
    EXPECT_NEAR(rec.sup_u, 2.0, 1e-10);
    EXPECT_NEAR(rec.semi_v, 1.5, 1e-10);
    EXPECT_EQ(rec.region, RegionLabel::outer);
}

TEST(Picard, ZeroDataGivesZeroSolution) {
    auto dom = unit_interval(65);
    auto spec = make_spec(dom, "0", "0");
    auto seed = FieldPair{GridFunction::constant(dom, 3.0), GridFunction::constant(dom, 1.0)};
    auto rec = picard(seed, "const", spec, SolverConfig{}, FixpointConfig{});
    ASSERT_TRUE(rec.converged);
    EXPECT_TRUE(rec.u_zero);
    EXPECT_TRUE(rec.v_zero);
    EXPECT_FALSE(rec.nontrivial());
    EXPECT_EQ(rec.region, RegionLabel::inner);
}

TEST(Picard, DampingRescuesOscillatingMap) {
    // -u'' = 40 (2 - u): undamped iteration overshoots, u = 2 - 2 cosh(k(x-1/2))/cosh(k/2).
    auto dom = unit_interval(257);
    auto spec = make_spec(dom, "40*max(2-u,0)", "0");
    auto rec = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    ASSERT_TRUE(rec.converged);
    const double k = std::sqrt(40.0);
    auto exact = [k](double x) { return 2.0 - 2.0 * std::cosh(k * (x - 0.5)) / std::cosh(0.5 * k); };
    EXPECT_LT(oracle::reconstruction_error(rec.u, exact), 1e-3);
}

TEST(Picard, NegativeSeedIsRejected) {
    auto dom = unit_interval(33);
    auto spec = make_spec(dom, "1", "1");
    FieldPair seed{GridFunction::constant(dom, -1.0), GridFunction::zero(dom)};
    EXPECT_THROW(picard(seed, "neg", spec, SolverConfig{}, FixpointConfig{}), ConeError);
}

TEST(Picard, ResidualIsRecomputedAtReturnedPoint) {
    auto dom = unit_interval(129);
    auto spec = make_spec(dom, "min(u,8)+8", "2+v/2");
    auto rec = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    auto Nz = apply_N(rec.u, rec.v, spec, SolverConfig{});
    EXPECT_DOUBLE_EQ(rec.residual, pair_distance(Nz, {rec.u, rec.v}));
}

TEST(MonotoneIterate, BracketsTheFixedPoint) {
    auto dom = unit_interval(257);
    auto spec = make_spec(dom, "min(u,8)+8", "min(v,8)+8", 0.5, 2.0);
    spec.f_mono = spec.g_mono = isotone;
    auto lo = monotone_iterate(Direction::from_below, spec, SolverConfig{}, FixpointConfig{});
    auto hi = monotone_iterate(Direction::from_above, spec, SolverConfig{}, FixpointConfig{});
    ASSERT_TRUE(lo.converged);
    ASSERT_TRUE(hi.converged);
    for (std::size_t k = 0; k < lo.u.size(); ++k) EXPECT_LE(lo.u[k], hi.u[k] + 1e-9);
    EXPECT_LT(sup_distance(lo.u, hi.u), 1e-8);
    EXPECT_LT(oracle::reconstruction_error(lo.v, oracle::capped_linear_fixed_point), 1e-4);
}

TEST(MonotoneIterate, RequiresDeclaredIsotonicity) {
    auto dom = unit_interval(33);
    auto spec = make_spec(dom, "u+1", "v+1");
    EXPECT_THROW(monotone_iterate(Direction::from_below, spec, SolverConfig{}, FixpointConfig{}),
                 SpecError);
}

TEST(MonotoneIterate, SeedThatIsNotASubsolution) {
    auto dom = unit_interval(65);
    auto spec = make_spec(dom, "0", "0");
    spec.f_mono = spec.g_mono = isotone;
    try {
        monotone_iterate(Direction::from_below, spec, SolverConfig{}, FixpointConfig{});
        FAIL() << "expected MonotonicityError";
    } catch (const MonotonicityError& e) {
        EXPECT_NE(std::string(e.what()).find("not a subsolution"), std::string::npos);
    }
}

TEST(MonotoneIterate, DetectsOrderViolation) {
    // Declared isotone but decreasing in u: the second step moves down.
    auto dom = unit_interval(65);
    auto spec = make_spec(dom, "20*max(1-u,0)", "20*max(1-v,0)");
    spec.f_mono = spec.g_mono = isotone;
    try {
        monotone_iterate(Direction::from_below, spec, SolverConfig{}, FixpointConfig{});
        FAIL() << "expected MonotonicityError";
    } catch (const MonotonicityError& e) {
        EXPECT_NE(std::string(e.what()).find("isotonicity violated"), std::string::npos);
    }
}

namespace {

ProblemSpec three_solution_spec(const DomainPtr& dom) {
    auto spec = make_spec(dom, "40*u^2/(1+u^2)", "40*v^2/(1+v^2)", 1.0, 5.0);
    spec.radii.rho1 = spec.radii.rho2 = 0.1;
    spec.f_mono = spec.g_mono = isotone;
    return spec;
}

} // namespace

TEST(MultiplicitySearch, FindsZeroAndLargeSolutions) {
    auto dom = unit_interval(129);
    auto spec = three_solution_spec(dom);
    auto res = multiplicity_search(spec, SolverConfig{}, FixpointConfig{});
    EXPECT_TRUE(res.inner_found);
    EXPECT_TRUE(res.outer_found);
    EXPECT_GE(res.nontrivial(), 2);
    for (const auto& rec : res.records) {
        EXPECT_LT(rec.residual, 1e-8) << rec.seed;
        EXPECT_TRUE(rec.u.is_nonnegative());
        if (rec.region == RegionLabel::outer) {
            EXPECT_TRUE(check_localization(rec, spec).pass);
        }
    }
    for (std::size_t i = 0; i < res.records.size(); ++i)
        for (std::size_t j = i + 1; j < res.records.size(); ++j)
            EXPECT_GE(pair_distance({res.records[i].u, res.records[i].v},
                                    {res.records[j].u, res.records[j].v}),
                      FixpointConfig{}.dedup());
}

TEST(MultiplicitySearch, IsDeterministic) {
    auto dom = unit_interval(65);
    auto spec = three_solution_spec(dom);
    auto a = multiplicity_search(spec, SolverConfig{}, FixpointConfig{});
    auto b = multiplicity_search(spec, SolverConfig{}, FixpointConfig{});
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].seed, b.records[i].seed);
        EXPECT_EQ(sup_distance(a.records[i].u, b.records[i].u), 0.0);
    }
}

TEST(Localization, ConstantDataExample) {
    auto dom = unit_interval(129);
    auto spec = make_spec(dom, "16", "16", 1.0, 2.0);
    auto rec = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    EXPECT_TRUE(check_localization(rec, spec).pass);
    spec.radii.R1 = 1.9;
    auto rep = check_localization(rec, spec);
    EXPECT_FALSE(rep.pass);
    EXPECT_FALSE(rep.checks.front().pass);
    spec.radii.R1 = 2.0;
    spec.radii.r2 = 1.6;
    EXPECT_FALSE(check_localization(rec, spec).pass);
}

TEST(Picard, LambdaScalingForStateFreeData) {
    auto dom = unit_interval(129);
    auto spec = make_spec(dom, "3 + 10*sin(x)^2", "1");
    auto a = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    spec.lambda = 2.0;
    auto b = picard(zeros(dom), "zero", spec, SolverConfig{}, FixpointConfig{});
    for (std::size_t k = 0; k < a.u.size(); ++k) {
        EXPECT_NEAR(b.u[k], 2.0 * a.u[k], 1e-10);
        EXPECT_NEAR(b.v[k], 2.0 * a.v[k], 1e-10);
    }
}

TEST(MultiplicitySearch, ZeroDataHasOnlyTheZeroSolution) {
    auto dom = unit_interval(65);
    auto spec = make_spec(dom, "0", "0");
    spec.radii.rho1 = spec.radii.rho2 = 0.1;
    auto res = multiplicity_search(spec, SolverConfig{}, FixpointConfig{});
    ASSERT_EQ(res.records.size(), 1u);
    EXPECT_EQ(res.nontrivial(), 0);
    EXPECT_TRUE(res.inner_found);
}
