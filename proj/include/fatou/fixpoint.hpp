#pragma once

// Fixed points of compositions P(Q(z)) across polynomial family members,
// classified by multiplier, plus the simple-roots hypothesis audit.
// Composition happens on coefficients, so the degree and conditioning stay
// explicit; multipliers come from P'(Q(w)) * Q'(w).

#include <string>
#include <vector>

#include "fatou/orbit.hpp"

namespace fatou {

enum class MultiplierClass : std::uint8_t { Repelling, Attracting, Indifferent };

inline const char* multiplier_class_name(MultiplierClass c) {
    switch (c) {
        case MultiplierClass::Repelling: return "repelling";
        case MultiplierClass::Attracting: return "attracting";
        case MultiplierClass::Indifferent: return "indifferent";
    }
    return "?";
}

// Multiplier noise floor for the indifferent band.
inline constexpr double kIndifferentBand = 1e-9;

inline MultiplierClass classify_multiplier(const Complex& lambda) {
    const double a = std::abs(lambda);
    if (std::abs(a - 1.0) <= kIndifferentBand) return MultiplierClass::Indifferent;
    return a > 1.0 ? MultiplierClass::Repelling : MultiplierClass::Attracting;
}

struct FixedPointRecord {
    Complex location{};
    Complex multiplier{};
    MultiplierClass classification = MultiplierClass::Indifferent;
    std::string outer_id;  // P in P(Q(z))
    std::string inner_id;  // Q
    double residual = 0;   // |P(Q(w)) - w|
};

struct SimpleRootCertificate {
    std::string member_id;
    Complex target{};
    int distinct_count = 0;       // root clusters at the 1e-8 radius
    int simple_count = 0;         // clusters that are simple roots
    double min_pairwise_distance = 0;
    double min_derivative = 0;    // |m'| over the clusters
    bool has_three_simple() const { return simple_count >= 3; }
};

inline constexpr double kSimpleRootTol = 1e-8;

// Roots of m - w0; a root is simple when |m'| exceeds 1e-8 there and it is
// isolated from the other clusters by more than 1e-8.
inline SimpleRootCertificate simple_root_check(const BoundMember& m, const Complex& w0,
                                               const SolverParams& sp = {}) {
    auto poly = member_polynomial(m);
    if (!poly) throw EvalError("simple_root_check: member is not polynomial: " + m.id);
    Poly shifted = *poly;
    shifted.c[0] -= w0;
    shifted.trim();
    SimpleRootCertificate cert;
    cert.member_id = m.id;
    cert.target = w0;
    if (shifted.degree() == 0) return cert;

    const auto solve = durand_kerner(shifted, sp.dk_tol, sp.dk_max_iter);
    const auto clusters = dedup_points(solve.roots, kSimpleRootTol);
    const Poly dp = shifted.derivative();

    cert.distinct_count = static_cast<int>(clusters.size());
    cert.min_pairwise_distance = std::numeric_limits<double>::infinity();
    cert.min_derivative = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < clusters.size(); ++j)
            if (j != i) nearest = std::min(nearest, std::abs(clusters[i] - clusters[j]));
        const double deriv = std::abs(dp.eval(clusters[i]));
        cert.min_pairwise_distance = std::min(cert.min_pairwise_distance, nearest);
        cert.min_derivative = std::min(cert.min_derivative, deriv);
        if (deriv > kSimpleRootTol && nearest > kSimpleRootTol) ++cert.simple_count;
    }
    if (clusters.size() < 2) cert.min_pairwise_distance = 0;
    return cert;
}

// All fixed points of P(Q(z)).  Affine compositions are solved linearly; the
// identity composition has every point fixed and is rejected.
inline std::vector<FixedPointRecord> composition_fixed_points(const BoundMember& P,
                                                              const BoundMember& Q,
                                                              const SolverParams& sp = {}) {
    auto pp = member_polynomial(P);
    auto qq = member_polynomial(Q);
    if (!pp || !qq)
        throw EvalError("composition_fixed_points: both members must be polynomial");
    const Poly comp = compose(*pp, *qq);
    const Poly dP = pp->derivative();
    const Poly dQ = qq->derivative();

    auto make_record = [&](const Complex& w) {
        FixedPointRecord rec;
        rec.location = w;
        rec.multiplier = dP.eval(qq->eval(w)) * dQ.eval(w);
        rec.classification = classify_multiplier(rec.multiplier);
        rec.outer_id = P.id;
        rec.inner_id = Q.id;
        rec.residual = std::abs(comp.eval(w) - w);
        return rec;
    };

    std::vector<FixedPointRecord> out;
    if (comp.degree() < 2) {
        const Complex a = comp.degree() >= 1 ? comp.c[1] : Complex(0.0, 0.0);
        const Complex b = comp.c.empty() ? Complex(0.0, 0.0) : comp.c[0];
        if (a == Complex(1.0, 0.0)) {
            if (b == Complex(0.0, 0.0))
                throw EvalError("identity composition: every point fixed");
            return out;  // translation: no fixed point
        }
        out.push_back(make_record(b / (Complex(1.0, 0.0) - a)));
        return out;
    }

    Poly fixed = comp;
    if (fixed.c.size() < 2) fixed.c.resize(2, Complex(0.0, 0.0));
    fixed.c[1] -= Complex(1.0, 0.0);
    fixed.trim();
    const auto solve = durand_kerner(fixed, sp.dk_tol, sp.dk_max_iter);
    for (const Complex& w : dedup_points(solve.roots, sp.dedup_radius))
        out.push_back(make_record(w));
    return out;
}

struct RepellingSweepReport {
    std::vector<FixedPointRecord> records;       // all fixed points, pair order
    std::vector<Complex> repelling_points;       // deduplicated
    double coverage = 0;                         // cell widths; -1 sentinel
    long long pairs = 0;
    std::vector<std::string> skipped_pieces;
    // Hypothesis audit: members offering >= 3 distinct simple roots of
    // P - w0 at sampled Julia cell centers.
    long long hypothesis_samples = 0;
    long long hypothesis_ok = 0;
};

// Union of fixed points of P(Q(z)) over ordered member pairs, with coverage
// of the raster's Julia mask by the repelling subset.
inline RepellingSweepReport repelling_sweep(const FamilySpec& f, const IndexSchedule& s,
                                            const ClassificationRaster& a,
                                            const SolverParams& sp = {}) {
    f.validate();
    RepellingSweepReport report;
    const auto members = enumerate_members(f, s);
    std::vector<const BoundMember*> poly_members;
    for (const auto& m : members) {
        if (member_polynomial(m))
            poly_members.push_back(&m);
        else if (report.skipped_pieces.empty() ||
                 report.skipped_pieces.back() != f.pieces[m.piece_index].text)
            report.skipped_pieces.push_back(f.pieces[m.piece_index].text);
    }

    for (const BoundMember* P : poly_members) {
        for (const BoundMember* Q : poly_members) {
            ++report.pairs;
            std::vector<FixedPointRecord> recs;
            try {
                recs = composition_fixed_points(*P, *Q, sp);
            } catch (const EvalError&) {
                continue;  // identity composition etc.
            }
            for (auto& rec : recs) {
                if (rec.classification == MultiplierClass::Repelling)
                    report.repelling_points.push_back(rec.location);
                report.records.push_back(std::move(rec));
            }
        }
    }
    report.repelling_points = dedup_points(report.repelling_points, sp.dedup_radius);

    const auto julia = detail::julia_centers(a);
    if (julia.empty()) {
        report.coverage = 0;
    } else if (report.repelling_points.empty()) {
        report.coverage = -1;
    } else {
        double worst = 0;
        for (const Complex& c : julia) {
            double best = std::numeric_limits<double>::infinity();
            for (const Complex& p : report.repelling_points)
                best = std::min(best, std::norm(c - p));
            worst = std::max(worst, best);
        }
        report.coverage = std::sqrt(worst) / a.grid.cell_width();
    }

    // Audit the simple-root hypothesis at a deterministic sample of Julia
    // cell centers: every 97th cell, at most 16 samples.
    for (std::size_t k = 0; k < julia.size() && report.hypothesis_samples < 16; k += 97) {
        ++report.hypothesis_samples;
        bool ok = false;
        for (const BoundMember* m : poly_members) {
            if (simple_root_check(*m, julia[k], sp).has_three_simple()) {
                ok = true;
                break;
            }
        }
        report.hypothesis_ok += ok ? 1 : 0;
    }
    return report;
}

}  // namespace fatou
