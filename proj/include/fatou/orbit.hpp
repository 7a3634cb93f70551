#pragma once

// Backward orbits O^-_F(z): per-member preimage solves, their union under an
// index schedule, and a finite-orbit probe for the exceptional set E(F).
// Polynomial members get every root (Durand-Kerner); transcendental members
// fall back to Newton from a multistart grid and are flagged PARTIAL, since
// their full preimage sets are infinite.

#include <string>
#include <vector>

#include "fatou/polyroots.hpp"
#include "fatou/raster.hpp"

namespace fatou {

struct SolverParams {
    double dk_tol = 1e-12;
    int dk_max_iter = 500;
    double dedup_radius = 1e-9;
    double residual_tol = 1e-8;      // relative to 1 + |target|
    int newton_grid = 16;            // multistart grid is newton_grid^2 points
    double newton_window_re_min = -2, newton_window_re_max = 2;
    double newton_window_im_min = -2, newton_window_im_max = 2;
    int newton_max_iter = 60;
};

struct PreimageResult {
    std::vector<Complex> points;
    bool complete = false;           // true only on the polynomial path
    int surviving_starts = 0;        // Newton starts that failed to converge
    std::vector<std::string> warnings;
};

// All w with m(w) = target.  Polynomial members are solved completely; a
// constant member equal to the target attains it identically (error).
inline PreimageResult preimages(const BoundMember& m, const Complex& target,
                                const SolverParams& sp = {}) {
    PreimageResult out;
    if (auto poly = member_polynomial(m)) {
        Poly shifted = *poly;
        shifted.c[0] -= target;
        shifted.trim();
        if (shifted.degree() == 0) {
            if (shifted.c[0] == Complex(0.0, 0.0))
                throw EvalError("identically attained: infinite preimage set");
            out.complete = true;  // constant != target: empty, and provably so
            return out;
        }
        auto solve = durand_kerner(shifted, sp.dk_tol, sp.dk_max_iter);
        if (!solve.converged)
            out.warnings.push_back("Durand-Kerner did not reach step tolerance for " + m.id);
        out.points = dedup_points(solve.roots, sp.dedup_radius);
        out.complete = true;
        return out;
    }

    // Newton multistart over the configured window, reported PARTIAL.
    std::vector<Complex> found;
    const double tol = sp.residual_tol * (1.0 + std::abs(target));
    for (int gy = 0; gy < sp.newton_grid; ++gy) {
        for (int gx = 0; gx < sp.newton_grid; ++gx) {
            Complex w(sp.newton_window_re_min +
                          (gx + 0.5) * (sp.newton_window_re_max - sp.newton_window_re_min) /
                              sp.newton_grid,
                      sp.newton_window_im_min +
                          (gy + 0.5) * (sp.newton_window_im_max - sp.newton_window_im_min) /
                              sp.newton_grid);
            bool ok = false;
            try {
                for (int it = 0; it < sp.newton_max_iter; ++it) {
                    const Jet j = m.jet(w);
                    const Complex residual = j.v - target;
                    if (std::abs(residual) <= tol) {
                        ok = true;
                        break;
                    }
                    if (j.d == Complex(0.0, 0.0)) break;
                    const Complex step = residual / j.d;
                    w -= step;
                    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
                }
            } catch (const EvalError&) {
                ok = false;
            }
            if (ok)
                found.push_back(w);
            else
                ++out.surviving_starts;
        }
    }
    out.points = dedup_points(found, sp.dedup_radius);
    out.complete = false;
    return out;
}

struct OrbitPoint {
    Complex preimage;
    std::string member;
    double residual = 0;
};

struct OrbitSet {
    Complex target{};
    std::vector<OrbitPoint> points;
    IndexSchedule schedule;
    bool complete = true;  // false when any member used the Newton fallback
    std::vector<std::string> warnings;
};

inline OrbitSet backward_orbit(const FamilySpec& f, const Complex& target, const IndexSchedule& s,
                               const SolverParams& sp = {}) {
    f.validate();
    OrbitSet orbit;
    orbit.target = target;
    orbit.schedule = s;
    const auto members = enumerate_members(f, s);
    for (const auto& m : members) {
        PreimageResult pr;
        try {
            pr = preimages(m, target, sp);
        } catch (const EvalError& e) {
            orbit.warnings.push_back(m.id + ": " + e.what());
            continue;
        }
        orbit.complete = orbit.complete && pr.complete;
        for (const auto& w : pr.warnings) orbit.warnings.push_back(w);
        for (const Complex& w : pr.points) {
            if (f.domain_clip && !f.domain_clip->contains(w)) continue;
            bool dup = false;
            for (const auto& q : orbit.points)
                if (std::abs(q.preimage - w) <= sp.dedup_radius) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            double residual = std::numeric_limits<double>::infinity();
            try {
                residual = std::abs(m(w) - target);
            } catch (const EvalError&) {
            }
            orbit.points.push_back({w, m.id, residual});
        }
    }
    return orbit;
}

enum class OrbitVerdict { FiniteCandidate, Growing };

struct ExceptionalReport {
    struct TargetRow {
        Complex target{};
        std::vector<long long> counts_per_prefix;  // orbit size after each prefix
        OrbitVerdict verdict = OrbitVerdict::Growing;
    };
    std::vector<TargetRow> targets;

    long long finite_candidates() const {
        long long n = 0;
        for (const auto& t : targets) n += t.verdict == OrbitVerdict::FiniteCandidate ? 1 : 0;
        return n;
    }
};

// Truncation probe for E(F): a target is a finite-orbit candidate when its
// orbit stopped growing between the half schedule and the full schedule.
inline ExceptionalReport exceptional_probe(const FamilySpec& f, const std::vector<Complex>& targets,
                                           const IndexSchedule& s, const SolverParams& sp = {}) {
    for (const auto& [name, vals] : s.values)
        if (vals.size() < 2)
            throw FamilyError("exceptional_probe needs at least two schedule entries");
    ExceptionalReport report;
    for (const Complex& target : targets) {
        ExceptionalReport::TargetRow row;
        row.target = target;
        std::size_t max_len = 1;
        for (const auto& [name, vals] : s.values) max_len = std::max(max_len, vals.size());
        for (std::size_t len = 1; len <= max_len; ++len) {
            IndexSchedule prefix;
            for (const auto& [name, vals] : s.values)
                prefix.values[name] = std::vector<long long>(
                    vals.begin(), vals.begin() + std::min(len, vals.size()));
            const OrbitSet orbit = backward_orbit(f, target, prefix, sp);
            row.counts_per_prefix.push_back(static_cast<long long>(orbit.points.size()));
        }
        const std::size_t L = row.counts_per_prefix.size();
        const std::size_t half = std::max<std::size_t>(1, L / 2);
        row.verdict = (L >= 2 && row.counts_per_prefix[half - 1] == row.counts_per_prefix[L - 1])
                          ? OrbitVerdict::FiniteCandidate
                          : OrbitVerdict::Growing;
        report.targets.push_back(std::move(row));
    }
    return report;
}

// Max over Julia cells of the distance to the nearest orbit point, in
// cell-width units.  0 when the Julia mask is empty; -1 when the mask is
// nonempty but the orbit is empty.
inline double coverage_distance(const OrbitSet& o, const ClassificationRaster& a) {
    const auto julia = detail::julia_centers(a);
    if (julia.empty()) return 0.0;
    if (o.points.empty()) return -1.0;
    double worst = 0;
    for (const Complex& c : julia) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : o.points) best = std::min(best, std::norm(c - p.preimage));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst) / a.grid.cell_width();
}

}  // namespace fatou
