#include "fatou/fixpoint.hpp"

#include <gtest/gtest.h>

using namespace fatou;

namespace {

BoundMember power_member(long long n) {
    const FamilySpec f = parse_family("z^n ; index n=" + std::to_string(n) + ".." +
                                      std::to_string(n));
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive);
    return enumerate_members(f, s).front();
}

BoundMember line_member(const std::string& expr) {
    const FamilySpec f = parse_family(expr);
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive);
    return enumerate_members(f, s).front();
}

TEST(SimpleRoots, QuarticOnCircle) {
    const auto cert = simple_root_check(power_member(4), std::polar(1.0, 0.7));
    EXPECT_EQ(cert.distinct_count, 4);
    EXPECT_EQ(cert.simple_count, 4);
    EXPECT_TRUE(cert.has_three_simple());
}

TEST(SimpleRoots, DoubleRootAtOrigin) {
    const auto cert = simple_root_check(power_member(2), Complex(0, 0));
    EXPECT_EQ(cert.distinct_count, 1);
    EXPECT_EQ(cert.simple_count, 0);
    EXPECT_FALSE(cert.has_three_simple());
}

TEST(SimpleRoots, DepressedCubic) {
    // z^3 - 3z at w0 = 0: roots {0, +sqrt3, -sqrt3}, all simple.
    const auto cert = simple_root_check(line_member("z^3-3*z"), Complex(0, 0));
    EXPECT_EQ(cert.distinct_count, 3);
    EXPECT_EQ(cert.simple_count, 3);
    EXPECT_GE(cert.min_pairwise_distance, std::sqrt(3.0) - 1e-6);
}

TEST(SimpleRoots, NonPolynomialRejected) {
    EXPECT_THROW(simple_root_check(line_member("sin(z)"), Complex(0, 0)), EvalError);
}

TEST(CompositionFixedPoints, SquareComposedWithItself) {
    // z^2 o z^2 = z^4: fixed points are roots of z(z^3-1); multiplier 4z^3.
    const auto recs = composition_fixed_points(power_member(2), power_member(2));
    ASSERT_EQ(recs.size(), 4u);
    int attracting = 0, repelling = 0;
    for (const auto& r : recs) {
        EXPECT_LE(r.residual, 1e-8);
        if (std::abs(r.location) < 1e-9) {
            EXPECT_EQ(r.classification, MultiplierClass::Attracting);
            ++attracting;
        } else {
            EXPECT_NEAR(std::abs(r.location), 1.0, 1e-9);
            EXPECT_NEAR(std::abs(r.multiplier), 4.0, 1e-6);
            EXPECT_EQ(r.classification, MultiplierClass::Repelling);
            ++repelling;
        }
    }
    EXPECT_EQ(attracting, 1);
    EXPECT_EQ(repelling, 3);
}

TEST(CompositionFixedPoints, PowerPairOracle) {
    // z^n o z^m: off-origin fixed points are (nm-1)-th roots of unity with
    // multiplier modulus nm.
    for (const auto& [n, m] : {std::pair{2LL, 3LL}, {3LL, 5LL}, {8LL, 8LL}}) {
        const auto recs = composition_fixed_points(power_member(n), power_member(m));
        EXPECT_EQ(static_cast<long long>(recs.size()), n * m);  // FTA count check
        for (const auto& r : recs) {
            if (std::abs(r.location) < 1e-9) continue;
            EXPECT_NEAR(std::abs(r.location), 1.0, 1e-8);
            EXPECT_NEAR(std::abs(r.multiplier), static_cast<double>(n * m), 1e-6);
        }
    }
}

TEST(CompositionFixedPoints, AffinePairs) {
    const auto recs = composition_fixed_points(line_member("2*z"), line_member("3*z"));
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_LE(std::abs(recs[0].location), 1e-12);
    EXPECT_NEAR(std::abs(recs[0].multiplier), 6.0, 1e-12);
    EXPECT_EQ(recs[0].classification, MultiplierClass::Repelling);

    // Translation: no fixed point, no error.
    EXPECT_TRUE(composition_fixed_points(line_member("z+1"), line_member("z+1")).empty());
    // Identity: every point fixed.
    EXPECT_THROW(composition_fixed_points(line_member("1*z"), line_member("1*z")), EvalError);
}

TEST(CompositionFixedPoints, MultiplierClassConsistency) {
    const auto recs = composition_fixed_points(power_member(3), power_member(2));
    for (const auto& r : recs) {
        const double a = std::abs(r.multiplier);
        switch (r.classification) {
            case MultiplierClass::Repelling: EXPECT_GT(a, 1.0 + kIndifferentBand); break;
            case MultiplierClass::Attracting: EXPECT_LT(a, 1.0 - kIndifferentBand); break;
            case MultiplierClass::Indifferent: EXPECT_LE(std::abs(a - 1.0), kIndifferentBand); break;
        }
    }
}

TEST(RepellingSweep, PowerFamilyCoversCircleRaster) {
    const FamilySpec f = parse_family("z^n ; index n=2..8");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive);
    const GridSpec g{-2, 2, -2, 2, 64, 64};
    const FamilySpec big = parse_family("z^n ; index n=1..64");
    const auto raster = classify_grid(
        big, IndexSchedule::for_family(big, IndexSchedule::Style::Geometric), g, MartyParams{}, 0);
    const auto rep = repelling_sweep(f, s, raster);
    EXPECT_EQ(rep.pairs, 49);
    EXPECT_GT(rep.repelling_points.size(), 100u);
    EXPECT_GE(rep.coverage, 0.0);
    EXPECT_LE(rep.coverage, 3.0);
    EXPECT_EQ(rep.hypothesis_ok, rep.hypothesis_samples);
    for (const auto& r : rep.records) EXPECT_LE(r.residual, 1e-8);
}

TEST(RepellingSweep, SkipsTranscendentalPieces) {
    const FamilySpec f = parse_family("z^n ; index n=2..4\nsin(k*z) ; index k=1..4");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive);
    ClassificationRaster r;
    r.grid = GridSpec{-2, 2, -2, 2, 8, 8};
    r.cells.assign(64, PointClassification{Label::FatouBounded, 0, ""});
    const auto rep = repelling_sweep(f, s, r);
    EXPECT_EQ(rep.pairs, 9);  // only the three polynomial members pair up
    ASSERT_EQ(rep.skipped_pieces.size(), 1u);
    EXPECT_EQ(rep.coverage, 0.0);  // empty Julia mask
}

TEST(RepellingSweep, EmptyRepellingSetSentinel) {
    // A single affine contraction has an attracting fixed point only.
    const FamilySpec f = parse_family("z/2");
    IndexSchedule s;
    ClassificationRaster r;
    r.grid = GridSpec{-2, 2, -2, 2, 8, 8};
    r.cells.assign(64, PointClassification{Label::FatouBounded, 0, ""});
    r.cells[0] = PointClassification{Label::JuliaLike, 99, ""};
    const auto rep = repelling_sweep(f, s, r);
    EXPECT_TRUE(rep.repelling_points.empty());
    EXPECT_EQ(rep.coverage, -1.0);
}

}  // namespace
