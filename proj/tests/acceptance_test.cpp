// Acceptance suite: runs every verification case once and asserts each at
// its pinned tolerance, printing one line per case.

#include "fatou/verify.hpp"

#include <gtest/gtest.h>

#include <iostream>

using fatou::verify::CaseResult;
using fatou::verify::Suite;

namespace {

const Suite& suite() {
    static const Suite s = [] {
        fatou::verify::Options opt;
        opt.seed = 0;
        opt.threads = 0;
        Suite out = fatou::verify::run_all(opt);
        fatou::verify::print_report(out, std::cout);
        return out;
    }();
    return s;
}

const CaseResult& row(const std::string& name) {
    for (const auto& r : suite().results)
        if (r.name == name) return r;
    static CaseResult missing;
    missing.name = "missing case";
    return missing;
}

void expect_case(const std::string& name) {
    const CaseResult& r = row(name);
    ASSERT_EQ(r.name, name) << "case not found";
    EXPECT_TRUE(r.pass) << name << ": measured " << r.measured << " vs tolerance " << r.tolerance
                        << " (" << r.cmp << "); " << r.detail;
}

TEST(Acceptance, C01UnitCircleHausdorff) { expect_case("unit-circle-hausdorff"); }
TEST(Acceptance, C01UnitCirclePurity) { expect_case("unit-circle-purity"); }
TEST(Acceptance, C01UnitCircleRuntime) { expect_case("unit-circle-runtime"); }
TEST(Acceptance, C02ClosedDisk) { expect_case("closed-disk"); }
TEST(Acceptance, C02ClosedDiskRuntime) { expect_case("closed-disk-runtime"); }
TEST(Acceptance, C03RealLineContainment) { expect_case("real-line-containment"); }
TEST(Acceptance, C03RealLineAxisCovered) { expect_case("real-line-axis-covered"); }
TEST(Acceptance, C04UnionSymdiff) { expect_case("union-theorem-symdiff"); }
TEST(Acceptance, C04UnionSubsetExact) { expect_case("union-theorem-subset"); }
TEST(Acceptance, C05SingletonJulia) { expect_case("singleton-julia"); }
TEST(Acceptance, C06IntersectionNearOne) { expect_case("intersection-julia-near-one"); }
TEST(Acceptance, C06IntersectionMasksCover) { expect_case("intersection-masks-cover"); }
TEST(Acceptance, C07OrbitClosure) { expect_case("orbit-closure"); }
TEST(Acceptance, C08ExceptionalSet) { expect_case("exceptional-set"); }
TEST(Acceptance, C09RepellingRecords) { expect_case("repelling-records"); }
TEST(Acceptance, C09RepellingCoverage) { expect_case("repelling-coverage"); }
TEST(Acceptance, C10NevanlinnaTExp) { expect_case("nevanlinna-T-exp"); }
TEST(Acceptance, C10NevanlinnaThetaCubic) { expect_case("nevanlinna-theta-cubic"); }
TEST(Acceptance, C10NevanlinnaDeltaShiftedExp) { expect_case("nevanlinna-delta-shifted-exp"); }
TEST(Acceptance, C10NevanlinnaCountingCrossval) { expect_case("nevanlinna-counting-crossval"); }
TEST(Acceptance, C11ParserRoundtrip) { expect_case("prop-parser-roundtrip"); }
TEST(Acceptance, C11DerivativeFd) { expect_case("prop-derivative-fd"); }
TEST(Acceptance, C11SinIdentity) { expect_case("prop-sin-identity"); }
TEST(Acceptance, C11ParallelSerial) { expect_case("prop-parallel-serial"); }
TEST(Acceptance, C11PreimageResidual) { expect_case("prop-preimage-residual"); }

}  // namespace
