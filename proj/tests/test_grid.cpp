#include "pqcone/grid.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace pqcone;

namespace {

DomainPtr unit_interval(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    auto d = GridDomain::snap_inward(0.25, 0.75, h, n);
    IndexBox box{{d[0], 0}, {d[1], 0}};
    return make_domain(GridDomain::interval(1.0, n, box, box));
}

} // namespace

TEST(Grid, IntervalGeometry) {
    auto dom = unit_interval(1025);
    EXPECT_EQ(dom->size(), 1025u);
    EXPECT_DOUBLE_EQ(dom->hx(), 1.0 / 1024.0);
    EXPECT_EQ(dom->subset(1).lo[0], 256u);
    EXPECT_EQ(dom->subset(1).hi[0], 768u);
    EXPECT_TRUE(dom->is_boundary(0));
    EXPECT_TRUE(dom->is_boundary(1024));
    EXPECT_FALSE(dom->is_boundary(1));
    EXPECT_EQ(dom->interior_nodes().size(), 1023u);
}

TEST(Grid, SnapInwardRoundsTowardTheInside) {
    auto r = GridDomain::snap_inward(0.26, 0.74, 0.1, 11);
    EXPECT_EQ(r[0], 3u);
    EXPECT_EQ(r[1], 7u);
    EXPECT_THROW(GridDomain::snap_inward(0.21, 0.29, 0.1, 11), SpecError);
}

TEST(Grid, RejectsBadDomains) {
    IndexBox box{{1, 0}, {3, 0}};
    EXPECT_THROW(GridDomain::interval(1.0, 9, box, box), SpecError);  // too close to boundary
    IndexBox ok{{2, 0}, {6, 0}};
    EXPECT_THROW(GridDomain::interval(1.0, 2, ok, ok), SpecError);
    EXPECT_THROW(GridDomain::interval(-1.0, 9, ok, ok), SpecError);
    IndexBox empty{{5, 0}, {4, 0}};
    EXPECT_THROW(GridDomain::interval(1.0, 9, empty, ok), SpecError);
}

TEST(Grid, RectangleIndexing) {
    IndexBox box{{2, 2}, {4, 5}};
    auto dom = make_domain(GridDomain::rectangle(2.0, 1.0, 9, 9, box, box));
    EXPECT_EQ(dom->size(), 81u);
    EXPECT_EQ(dom->index(3, 4), 4u * 9u + 3u);
    auto c = dom->coord(dom->index(3, 4));
    EXPECT_DOUBLE_EQ(c[0], 0.75);
    EXPECT_DOUBLE_EQ(c[1], 0.5);
    EXPECT_EQ(dom->box_nodes(box).size(), 3u * 4u);
    EXPECT_EQ(dom->interior_nodes().size(), 49u);
}

TEST(Grid, NonFiniteValuesRejected) {
    auto dom = unit_interval(9);
    std::vector<double> vals(9, 0.0);
    vals[3] = std::nan("");
    EXPECT_THROW(GridFunction(dom, vals), SpecError);
    EXPECT_THROW(GridFunction(dom, std::vector<double>(8, 0.0)), SpecError);
}

TEST(Grid, SupNormExamples) {
    auto dom = unit_interval(1025);
    EXPECT_EQ(sup_norm(GridFunction::zero(dom)), 0.0);
    EXPECT_EQ(sup_norm(GridFunction::constant(dom, 3.5)), 3.5);
    auto u = GridFunction::from(dom, [](double x, double) { return x * (1 - x) / 2; });
    const double h = dom->hx();
    EXPECT_NEAR(sup_norm(u), 0.125, h * h);
}

TEST(Grid, SeminormExamples) {
    auto dom = unit_interval(1025);
    auto cone = ConeSpec::of(dom, 1);
    EXPECT_EQ(seminorm(GridFunction::constant(dom, 1.0), cone), 1.0);
    auto u = GridFunction::from(dom, [](double x, double) { return x * (1 - x) / 2; });
    EXPECT_NEAR(seminorm(u, cone), 0.09375, 1e-15);
    EXPECT_EQ(seminorm(cone.indicator(), cone), 1.0);
    EXPECT_EQ(sup_norm(cone.indicator()), 1.0);
}

TEST(Grid, SeminormRejectsNegativeFunctions) {
    auto dom = unit_interval(9);
    auto cone = ConeSpec::of(dom, 1);
    auto u = GridFunction::from(dom, [](double x, double) { return x - 0.5; });
    EXPECT_THROW(seminorm(u, cone), ConeError);
}

TEST(Grid, ConeMembershipExamples) {
    auto dom = unit_interval(65);
    auto cone = ConeSpec::of(dom, 1);
    EXPECT_TRUE(cone_membership(GridFunction::zero(dom), cone));
    EXPECT_TRUE(cone_membership(cone.indicator(), cone));
}

TEST(GridProperty, NormsAreMonotoneHomogeneousAndOrdered) {
    auto dom = unit_interval(129);
    auto cone = ConeSpec::of(dom, 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(dom->size()), b(dom->size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = U(rng);
            b[k] = a[k] + U(rng);
        }
        GridFunction u(dom, a), w(dom, b);
        EXPECT_LE(seminorm(u, cone), sup_norm(u));
        EXPECT_LE(seminorm(u, cone), seminorm(w, cone));
        EXPECT_LE(sup_norm(u), sup_norm(w));
        const double c = 10.0 * U(rng);
        EXPECT_NEAR(seminorm(c * u, cone), c * seminorm(u, cone), 1e-12 * c * seminorm(u, cone));
        // Every nonnegative function is in the cone under the min-over-D seminorm.
        EXPECT_TRUE(cone_membership(u, cone));
    }
}

TEST(Grid, SubsetIntegralTrapezoid) {
    auto dom = unit_interval(1025);
    auto cone = ConeSpec::of(dom, 1);
    EXPECT_NEAR(subset_integral(GridFunction::constant(dom, 2.0), cone), 1.0, 1e-14);
    auto u = GridFunction::from(dom, [](double x, double) { return x; });
    EXPECT_NEAR(subset_integral(u, cone), 0.25, 1e-14);
}

TEST(Grid, CsvHasHeaderAndOneRowPerNode) {
    auto dom = unit_interval(9);
    auto u = GridFunction::constant(dom, 0.1);
    std::ostringstream os;
    write_csv(os, u);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, 8), "x,value\n");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 10);
    EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
}
