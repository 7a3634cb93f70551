#include "fatou/polyroots.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace fatou;

namespace {

BoundMember member_of(const std::string& family_line, const std::string& bindings = "") {
    const FamilySpec f = parse_family(family_line);
    auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive);
    const auto members = enumerate_members(f, s);
    if (bindings.empty()) return members.front();
    for (const auto& m : members)
        if (m.id.find(bindings) != std::string::npos) return m;
    throw std::runtime_error("member not found: " + bindings);
}

TEST(PolyExtract, BasicShapes) {
    const auto m = member_of("n*(z-a) ; index n=3..3 ; param a in {2}");
    const auto p = member_polynomial(m);
    ASSERT_TRUE(p.has_value());
    ASSERT_EQ(p->degree(), 1);
    EXPECT_EQ(p->c[0], Complex(-6, 0));
    EXPECT_EQ(p->c[1], Complex(3, 0));

    const auto q = member_polynomial(member_of("z^n ; index n=5..5"));
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(q->degree(), 5);

    // Constant folding through calls of z-free arguments.
    const auto c = member_polynomial(member_of("exp(1)*z^2"));
    ASSERT_TRUE(c.has_value());
    EXPECT_NEAR(c->c[2].real(), M_E, 1e-14);
}

TEST(PolyExtract, RejectsTranscendental) {
    EXPECT_FALSE(member_polynomial(member_of("sin(k*z) ; index k=2..2")).has_value());
    EXPECT_FALSE(member_polynomial(member_of("exp(n*z) ; index n=2..2")).has_value());
    EXPECT_FALSE(member_polynomial(member_of("1/(z-1)")).has_value());
    EXPECT_FALSE(member_polynomial(member_of("z^0.5")).has_value());
}

TEST(PolyArith, ComposeAndDerivative) {
    const Poly p{{Complex(0, 0), Complex(0, 0), Complex(1, 0)}};  // z^2
    const Poly comp = compose(p, p);                              // z^4
    ASSERT_EQ(comp.degree(), 4);
    EXPECT_EQ(comp.c[4], Complex(1, 0));
    const Poly d = comp.derivative();
    EXPECT_EQ(d.degree(), 3);
    EXPECT_EQ(d.c[3], Complex(4, 0));

    // (1 + z)^2 composed with 2z: 1 + 4z + 4z^2
    const Poly q{{Complex(1, 0), Complex(2, 0), Complex(1, 0)}};
    const Poly lin{{Complex(0, 0), Complex(2, 0)}};
    const Poly r = compose(q, lin);
    EXPECT_NEAR(std::abs(r.eval(Complex(0.3, 0)) - std::pow(1.6, 2)), 0.0, 1e-12);
}

TEST(DurandKerner, CubeRootsOfUnity) {
    Poly p{{Complex(-1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)}};  // z^3 - 1
    const auto solve = durand_kerner(p);
    EXPECT_TRUE(solve.converged);
    ASSERT_EQ(solve.roots.size(), 3u);
    for (const auto& r : solve.roots) {
        EXPECT_NEAR(std::abs(r), 1.0, 1e-10);
        EXPECT_LE(std::abs(p.eval(r)), 1e-10);
    }
}

TEST(DurandKerner, OriginMultiplicityStripped) {
    Poly p{{Complex(0, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)}};  // z^3
    const auto solve = durand_kerner(p);
    EXPECT_EQ(solve.origin_multiplicity, 3);
    ASSERT_EQ(solve.roots.size(), 3u);
    for (const auto& r : solve.roots) EXPECT_EQ(r, Complex(0, 0));
}

TEST(DurandKerner, DoubleRootClusters) {
    // (z-1)^2: both roots converge within the 1e-8 cluster radius of 1.
    Poly p{{Complex(1, 0), Complex(-2, 0), Complex(1, 0)}};
    const auto solve = durand_kerner(p);
    ASSERT_EQ(solve.roots.size(), 2u);
    for (const auto& r : solve.roots) EXPECT_LE(std::abs(r - Complex(1, 0)), 1e-6);
    EXPECT_EQ(dedup_points(solve.roots, 1e-8).size(), 1u);
}

TEST(DurandKerner, HighDegreeRootsOfUnity) {
    Poly p;
    p.c.assign(65, Complex(0, 0));
    p.c[0] = Complex(-1, 0);
    p.c[64] = Complex(1, 0);  // z^64 - 1
    const auto solve = durand_kerner(p);
    EXPECT_TRUE(solve.converged);
    ASSERT_EQ(solve.roots.size(), 64u);
    std::vector<double> angles;
    for (const auto& r : solve.roots) {
        EXPECT_LE(std::abs(p.eval(r)), 1e-9);
        angles.push_back(std::arg(r));
    }
    std::sort(angles.begin(), angles.end());
    EXPECT_EQ(dedup_points(solve.roots, 1e-9).size(), 64u);
}

}  // namespace
