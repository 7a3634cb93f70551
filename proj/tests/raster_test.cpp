#include "fatou/raster.hpp"

#include <gtest/gtest.h>

using namespace fatou;

namespace {

ClassificationRaster classify_text(const std::string& family, const GridSpec& g, int threads = 1) {
    const FamilySpec f = parse_family(family);
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    return classify_grid(f, s, g, MartyParams{}, threads);
}

TEST(Grid, CentersAndValidation) {
    GridSpec g{-2, 2, -2, 2, 4, 4};
    EXPECT_EQ(g.cell_width(), 1.0);
    EXPECT_EQ(g.center(0, 0), Complex(-1.5, -1.5));
    EXPECT_EQ(g.center(3, 3), Complex(1.5, 1.5));
    GridSpec bad{2, -2, -2, 2, 4, 4};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(ClassifyGrid, ConstantFamilyAllBounded) {
    const GridSpec g{-1, 1, -1, 1, 8, 8};
    const auto r = classify_text("0*z", g);
    for (const auto& c : r.cells) EXPECT_EQ(c.label, Label::FatouBounded);
    const auto pure = component_purity(r);
    ASSERT_EQ(pure.components.size(), 1u);
    EXPECT_TRUE(pure.components[0].pure());
    EXPECT_EQ(pure.components[0].size, 64);
}

TEST(ClassifyGrid, OutsideDomainUndetermined) {
    const GridSpec g{-2, 2, -2, 2, 8, 8};
    const auto r = classify_text("domain disk(0,1)\nn*z ; index n=1..4", g);
    EXPECT_EQ(r.at(0, 0).label, Label::Undetermined);  // corner, |z| > 1
    EXPECT_EQ(r.at(0, 0).score, 0.0);
}

TEST(Pgm, GoldenBytes) {
    const GridSpec g{-1, 1, -1, 1, 2, 2};
    const auto r = classify_text("0*z", g);
    const std::string pgm = emit_pgm(r);
    const std::string expect = std::string("P5\n2 2\n255\n") + "\xff\xff\xff\xff";
    EXPECT_EQ(pgm, expect);
}

TEST(Pgm, SingleJuliaCellPlacement) {
    // Craft a raster by hand: Julia at (ix=1, iy=0) of a 3x2 grid. Row 0 of
    // the PGM is the top (im_max) row, so that cell lands in the last row.
    ClassificationRaster r;
    r.grid = GridSpec{-1, 1, -1, 1, 3, 2};
    r.cells.assign(6, PointClassification{Label::FatouBounded, 0, ""});
    r.cells[0 * 3 + 1] = PointClassification{Label::JuliaLike, 9, "w"};
    const std::string pgm = emit_pgm(r);
    const std::string header = "P5\n3 2\n255\n";
    ASSERT_EQ(pgm.substr(0, header.size()), header);
    const std::string body = pgm.substr(header.size());
    ASSERT_EQ(body.size(), 6u);
    EXPECT_EQ(static_cast<unsigned char>(body[3 + 1]), 0);  // bottom row emitted last
    EXPECT_EQ(static_cast<unsigned char>(body[0]), 255);
}

TEST(Emit, CsvAndJson) {
    const GridSpec g{-1, 1, -1, 1, 2, 2};
    const FamilySpec f = parse_family("z^n ; index n=1..64");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    const auto r = classify_grid(f, s, g, MartyParams{}, 1);
    const std::string csv = emit_csv(r);
    EXPECT_EQ(csv.substr(0, 26), "re,im,label,score,witness\n");
    EXPECT_NE(csv.find("-0.5,0.5,"), std::string::npos);

    const std::string json = emit_json(r);
    EXPECT_NE(json.find("\"n_max\": 64"), std::string::npos);
    const auto rep = raster_report(r);
    EXPECT_EQ(rep["grid"]["width"], 2);
    // Stable key order: grid, family, schedule, params, histogram, timing.
    std::vector<std::string> keys;
    for (auto it = rep.begin(); it != rep.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"grid", "family", "schedule", "params", "histogram",
                                              "timing"}));
}

TEST(Emit, DispatcherMatchesDirectCalls) {
    const GridSpec g{-1, 1, -1, 1, 4, 4};
    const auto r = classify_text("0*z", g);
    EXPECT_EQ(emit(r, EmitFormat::Pgm), emit_pgm(r));
    EXPECT_EQ(emit(r, EmitFormat::Csv), emit_csv(r));
    EXPECT_EQ(emit(r, EmitFormat::Json), emit_json(r));
}

TEST(ClassifyGrid, ParallelEqualsSerial) {
    const GridSpec g{-2, 2, -2, 2, 48, 48};
    const auto serial = classify_text("z^n ; index n=1..16", g, 1);
    const auto parallel = classify_text("z^n ; index n=1..16", g, 4);
    EXPECT_EQ(emit_pgm(serial), emit_pgm(parallel));
    for (std::size_t k = 0; k < serial.cells.size(); ++k) {
        ASSERT_EQ(serial.cells[k].score, parallel.cells[k].score);
        ASSERT_EQ(serial.cells[k].witness, parallel.cells[k].witness);
    }
}

TEST(ClassifyGrid, DeterministicBytes) {
    const GridSpec g{-2, 2, -2, 2, 32, 32};
    const auto a = classify_text("sin(k*z) ; index k=1..8", g, 2);
    const auto b = classify_text("sin(k*z) ; index k=1..8", g, 2);
    EXPECT_EQ(emit_pgm(a), emit_pgm(b));
}

TEST(RasterUnion, MergeRules) {
    const GridSpec g{-1, 1, -1, 1, 2, 2};
    ClassificationRaster a, b;
    a.grid = b.grid = g;
    auto mk = [](Label l, double s) { return PointClassification{l, s, "w"}; };
    a.cells = {mk(Label::JuliaLike, 30), mk(Label::FatouEscaping, 1), mk(Label::FatouBounded, 0.5),
               mk(Label::FatouEscaping, 1)};
    b.cells = {mk(Label::FatouBounded, 2), mk(Label::FatouEscaping, 0.5),
               mk(Label::FatouEscaping, 1), mk(Label::Undetermined, 5)};
    const auto u = raster_union(a, b);
    EXPECT_EQ(u.cells[0].label, Label::JuliaLike);
    EXPECT_EQ(u.cells[0].score, 30.0);
    EXPECT_EQ(u.cells[1].label, Label::FatouEscaping);
    EXPECT_EQ(u.cells[2].label, Label::FatouBounded);  // mixed escape/bounded
    EXPECT_EQ(u.cells[3].label, Label::Undetermined);

    // Idempotence.
    const auto uu = raster_union(a, a);
    for (std::size_t k = 0; k < a.cells.size(); ++k) EXPECT_EQ(uu.cells[k].label, a.cells[k].label);

    ClassificationRaster wrong;
    wrong.grid = GridSpec{-1, 1, -1, 1, 4, 4};
    wrong.cells.assign(16, mk(Label::FatouBounded, 0));
    EXPECT_THROW(raster_union(a, wrong), std::invalid_argument);
}

TEST(Compare, TrivialCases) {
    const GridSpec g{-1, 1, -1, 1, 8, 8};
    ClassificationRaster a;
    a.grid = g;
    a.cells.assign(64, PointClassification{Label::FatouBounded, 0, ""});
    const auto same = compare(a, a);
    EXPECT_EQ(same.symmetric_difference_count, 0);
    EXPECT_EQ(same.hausdorff_julia, 0.0);
    EXPECT_EQ(same.confusion[static_cast<int>(Label::FatouBounded)]
                            [static_cast<int>(Label::FatouBounded)],
              64);

    ClassificationRaster b = a;
    b.cells[8 * 4 + 4] = PointClassification{Label::JuliaLike, 9, ""};
    const auto d = compare(a, b);
    EXPECT_EQ(d.symmetric_difference_count, 1);
    EXPECT_EQ(d.hausdorff_julia, -1.0);  // one empty mask sentinel

    // Same single-cell mask shifted one cell: Hausdorff exactly 1 cell width.
    ClassificationRaster c = a;
    c.cells[8 * 4 + 5] = PointClassification{Label::JuliaLike, 9, ""};
    const auto s = compare(b, c);
    EXPECT_EQ(s.symmetric_difference_count, 2);
    EXPECT_NEAR(s.hausdorff_julia, 1.0, 1e-12);
}

TEST(Components, PowerFamilySplitsInsideOutside) {
    const GridSpec g{-2, 2, -2, 2, 64, 64};
    const auto r = classify_text("z^n ; index n=1..64", g);
    const auto rep = component_purity(r);
    ASSERT_EQ(rep.components.size(), 2u);
    EXPECT_EQ(rep.mixed_count(), 0);
    // One escaping (outside), one bounded (inside disk).
    const bool first_escaping = rep.components[0].escaping > 0;
    EXPECT_TRUE(rep.components[first_escaping ? 0 : 1].escaping_fraction() == 1.0);
    EXPECT_TRUE(rep.components[first_escaping ? 1 : 0].escaping_fraction() == 0.0);
}

TEST(Components, SineFamilyTwoEscapingHalfPlanes) {
    const GridSpec g{-2, 2, -2, 2, 64, 64};
    const auto r = classify_text("sin(k*z) ; index k=1..64", g);
    const auto rep = component_purity(r);
    ASSERT_EQ(rep.components.size(), 2u);
    EXPECT_EQ(rep.mixed_count(), 0);
    for (const auto& c : rep.components) EXPECT_EQ(c.escaping_fraction(), 1.0);
}

}  // namespace
