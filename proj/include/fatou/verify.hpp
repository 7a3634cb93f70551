#pragma once

// Built-in verification suite: classical families with known Fatou/Julia
// structure, run end to end at desk scale with pinned tolerances.  The CLI
// `verify` subcommand and the acceptance test binary both drive this.

#include <chrono>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "fatou/fixpoint.hpp"
#include "fatou/nevanlinna.hpp"
#include "fatou/orbit.hpp"
#include "fatou/raster.hpp"

namespace fatou::verify {

struct CaseResult {
    std::string name;
    bool pass = false;
    double measured = 0;
    double tolerance = 0;
    std::string cmp = "<=";
    std::string detail;
    double seconds = 0;
};

struct Options {
    unsigned seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

inline constexpr int kSuiteVersion = 1;

struct Suite {
    int version = kSuiteVersion;
    std::vector<CaseResult> results;
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

namespace detail_v {

inline GridSpec standard_grid() { return GridSpec{-2, 2, -2, 2, 256, 256}; }

inline double max_julia_distance_to(const ClassificationRaster& r,
                                    const std::vector<Complex>& points) {
    double worst = 0;
    for (const Complex& c : fatou::detail::julia_centers(r)) {
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& p : points) best = std::min(best, std::norm(c - p));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst) / r.grid.cell_width();
}

}  // namespace detail_v

// The closed-unit-disk family of Example-1 type: n*(z-a) with the parameter
// a swept over rings dense enough that every in-disk grid cell sits within
// the classifier's detection radius of some sample.  The detection radius
// follows from the tail indices: a point at distance d from a sample scores
// max_n n/(1+n^2 d^2), which reaches tau only when d <= sqrt(n/tau-1)/n.
// The four probes at radius rho around each cell tighten the worst case to
// sqrt(d^2 + rho^2 - sqrt(2) d rho), which buys a coarser (faster) ladder.
inline FamilySpec disk_cover_family(double tau, double probe_radius = 0.0078125,
                                    long long n_max = 64) {
    double d_max = 0;
    for (long long n = n_max; n >= 1; n /= 2)
        if (static_cast<double>(n) > tau)
            d_max = std::max(d_max, std::sqrt(n / tau - 1.0) / static_cast<double>(n));
    if (d_max <= 0) throw FamilyError("tau too large for the schedule to detect anything");
    double cover = d_max;
    if (probe_radius > 0 && d_max * d_max > probe_radius * probe_radius / 2)
        cover = probe_radius / std::sqrt(2.0) +
                std::sqrt(d_max * d_max - probe_radius * probe_radius / 2);
    const double gap = 0.95 * cover * std::sqrt(2.0);
    const int rings = static_cast<int>(std::ceil(1.0 / gap));
    std::string text = "n*(z-a) ; index n=1.." + std::to_string(n_max) + " ; param a in {0}\n";
    for (int j = 1; j <= rings; ++j) {
        const double r = static_cast<double>(j) / rings;
        const int count = std::max(1, static_cast<int>(std::ceil(2 * M_PI * r / gap)));
        char line[160];
        std::snprintf(line, sizeof(line),
                      "n*(z-a) ; index n=1..%lld ; param a in disk(0,%.17g,1,%d)\n", n_max, r,
                      count);
        text += line;
    }
    return parse_family(text);
}

// ---------------------------------------------------------------------------
// Acceptance cases.  Tolerances are pinned here, nowhere else.

struct SharedState {
    ClassificationRaster circle_raster;  // unit-circle case, reused downstream
    double circle_raster_seconds = 0;
};

inline SharedState compute_shared() {
    SharedState st;
    const FamilySpec f = parse_family("z^n ; index n=1..64");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    const auto t0 = std::chrono::steady_clock::now();
    st.circle_raster = classify_grid(f, s, detail_v::standard_grid(), MartyParams{}, 1);
    st.circle_raster_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

inline std::vector<CaseResult> case_unit_circle(const SharedState& st) {
    std::vector<CaseResult> out;
    const auto& r = st.circle_raster;
    const double cw = r.grid.cell_width();
    const auto julia = fatou::detail::julia_centers(r);

    CaseResult h;
    double mask_to_circle = 0;
    for (const Complex& c : julia)
        mask_to_circle = std::max(mask_to_circle, std::abs(std::abs(c) - 1.0));
    double circle_to_mask = 0;
    for (int k = 0; k < 4096; ++k) {
        const Complex p = std::polar(1.0, 2 * M_PI * k / 4096);
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& c : julia) best = std::min(best, std::norm(p - c));
        circle_to_mask = std::max(circle_to_mask, std::sqrt(best));
    }
    h.name = "unit-circle-hausdorff";
    h.measured = julia.empty() ? -1 : std::max(mask_to_circle, circle_to_mask) / cw;
    h.tolerance = 3.0;
    h.pass = !julia.empty() && h.measured <= h.tolerance;
    h.detail = "Hausdorff(JuliaLike mask, |z|=1), cell widths";
    out.push_back(h);

    CaseResult p;
    const auto comps = component_purity(r);
    // Inside component pure bounded, outside pure escaping.
    int inside_id = -1, outside_id = -1;
    {
        // Identify by membership of the center cell and a corner cell.
        const int w = r.grid.width;
        std::vector<int> comp_of(r.cells.size(), -1);
        // recompute component ids the same way component_purity does
        int next = 0;
        std::vector<int> stack;
        for (int start = 0; start < static_cast<int>(r.cells.size()); ++start) {
            const Label l0 = r.cells[start].label;
            if (comp_of[start] >= 0 || (l0 != Label::FatouBounded && l0 != Label::FatouEscaping))
                continue;
            stack.push_back(start);
            comp_of[start] = next;
            while (!stack.empty()) {
                const int c = stack.back();
                stack.pop_back();
                const int ix = c % w, iy = c / w;
                const int nb[4] = {c - 1, c + 1, c - w, c + w};
                const bool ok[4] = {ix > 0, ix + 1 < w, iy > 0, iy + 1 < r.grid.height};
                for (int k = 0; k < 4; ++k) {
                    if (!ok[k] || comp_of[nb[k]] >= 0) continue;
                    const Label l = r.cells[nb[k]].label;
                    if (l != Label::FatouBounded && l != Label::FatouEscaping) continue;
                    comp_of[nb[k]] = next;
                    stack.push_back(nb[k]);
                }
            }
            ++next;
        }
        inside_id = comp_of[(r.grid.height / 2) * w + r.grid.width / 2];
        outside_id = comp_of[0];
    }
    const bool purity_ok = comps.components.size() == 2 && comps.mixed_count() == 0 &&
                           inside_id >= 0 && outside_id >= 0 && inside_id != outside_id &&
                           comps.components[inside_id].escaping_fraction() == 0.0 &&
                           comps.components[outside_id].escaping_fraction() == 1.0;
    p.name = "unit-circle-purity";
    p.measured = purity_ok ? 1 : 0;
    p.tolerance = 1;
    p.cmp = "==";
    p.pass = purity_ok;
    p.detail = "inside component pure FatouBounded, outside pure FatouEscaping";
    out.push_back(p);

    CaseResult t;
    t.name = "unit-circle-runtime";
    t.measured = st.circle_raster_seconds;
    t.tolerance = 30.0;
    t.pass = t.measured <= t.tolerance;
    t.detail = "single-threaded classify seconds";
    out.push_back(t);
    return out;
}

inline std::vector<CaseResult> case_closed_disk(const Options& opt) {
    const GridSpec g = detail_v::standard_grid();
    const MartyParams params{};
    const FamilySpec f = disk_cover_family(params.julia_threshold);
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = classify_grid(f, s, g, params, opt.threads);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    long long sym = 0;
    for (int iy = 0; iy < g.height; ++iy)
        for (int ix = 0; ix < g.width; ++ix) {
            const bool in_disk = std::abs(g.center(ix, iy)) <= 1.0;
            const bool julia = r.at(ix, iy).label == Label::JuliaLike;
            sym += in_disk != julia ? 1 : 0;
        }
    CaseResult c;
    c.name = "closed-disk";
    c.measured = 100.0 * static_cast<double>(sym) / static_cast<double>(r.cells.size());
    c.tolerance = 3.0;
    c.pass = c.measured <= c.tolerance;
    c.detail = "JuliaLike vs closed-disk mask symmetric difference, % of cells";

    CaseResult t;
    t.name = "closed-disk-runtime";
    t.measured = secs;
    t.tolerance = 300.0;
    t.pass = secs <= 300.0;
    t.detail = "classify seconds";
    return {c, t};
}

inline std::vector<CaseResult> case_real_line(const Options& opt) {
    const GridSpec g = detail_v::standard_grid();
    const FamilySpec f = parse_family("sin(k*z) ; index k=1..64");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    const auto r = classify_grid(f, s, g, MartyParams{}, opt.threads);
    const double cw = g.cell_width();

    CaseResult near;
    near.name = "real-line-containment";
    near.measured = 0;
    for (const Complex& c : fatou::detail::julia_centers(r))
        near.measured = std::max(near.measured, std::abs(c.imag()) / cw);
    near.tolerance = 3.0;
    near.pass = near.measured <= near.tolerance;
    near.detail = "max JuliaLike distance to the real axis, cell widths";

    CaseResult axis;
    axis.name = "real-line-axis-covered";
    long long axis_cells = 0, axis_julia = 0;
    for (int iy = 0; iy < g.height; ++iy)
        for (int ix = 0; ix < g.width; ++ix) {
            const Complex c = g.center(ix, iy);
            if (std::abs(c.imag()) <= cw / 2 + 1e-12) {
                ++axis_cells;
                axis_julia += r.at(ix, iy).label == Label::JuliaLike ? 1 : 0;
            }
        }
    axis.measured = static_cast<double>(axis_julia);
    axis.tolerance = static_cast<double>(axis_cells);
    axis.cmp = "==";
    axis.pass = axis_julia == axis_cells && axis_cells > 0;
    axis.detail = "cells on the axis labeled JuliaLike";
    return {near, axis};
}

inline std::vector<CaseResult> case_union_theorem(const Options& opt) {
    const GridSpec g = detail_v::standard_grid();
    const FamilySpec f1 = parse_family("sin(k*z) ; index k=1..64");
    const FamilySpec f2 = parse_family("z^n ; index n=1..64");
    const auto s1 = IndexSchedule::for_family(f1, IndexSchedule::Style::Geometric);
    const auto s2 = IndexSchedule::for_family(f2, IndexSchedule::Style::Geometric);
    const auto r1 = classify_grid(f1, s1, g, MartyParams{}, opt.threads);
    const auto r2 = classify_grid(f2, s2, g, MartyParams{}, opt.threads);
    const auto cellwise = raster_union(r1, r2);
    const FamilySpec fu = family_union(f1, f2);
    const auto su = IndexSchedule::for_family(fu, IndexSchedule::Style::Geometric);
    const auto direct = classify_grid(fu, su, g, MartyParams{}, opt.threads);

    long long sym = 0, subset_violations = 0;
    for (std::size_t k = 0; k < direct.cells.size(); ++k) {
        const bool ju = cellwise.cells[k].label == Label::JuliaLike;
        const bool jd = direct.cells[k].label == Label::JuliaLike;
        sym += ju != jd ? 1 : 0;
        subset_violations += (ju && !jd) ? 1 : 0;
    }
    CaseResult a;
    a.name = "union-theorem-symdiff";
    a.measured = 100.0 * static_cast<double>(sym) / static_cast<double>(direct.cells.size());
    a.tolerance = 2.0;
    a.pass = a.measured <= a.tolerance;
    a.detail = "raster_union vs classify(F1 u F2) JuliaLike symmetric difference, %";

    CaseResult b;
    b.name = "union-theorem-subset";
    b.measured = static_cast<double>(subset_violations);
    b.tolerance = 0;
    b.cmp = "==";
    b.pass = subset_violations == 0;
    b.detail = "cells Julia in the cellwise union but not in the direct classification";
    return {a, b};
}

inline CaseResult case_singleton_julia(const Options& opt) {
    const GridSpec g = detail_v::standard_grid();
    const FamilySpec f = parse_family("domain disk(0,1)\nn*z ; index n=1..256");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    const MartyParams params{};
    const auto r = classify_grid(f, s, g, params, opt.threads);
    CaseResult c;
    c.name = "singleton-julia";
    c.measured = 0;
    long long count = 0;
    for (const Complex& z : fatou::detail::julia_centers(r)) {
        c.measured = std::max(c.measured, std::abs(z));
        ++count;
    }
    c.tolerance = 1.0 / std::sqrt(128.0 * params.julia_threshold) + 2 * g.cell_width();
    c.pass = count > 0 && c.measured <= c.tolerance;
    c.detail = "max |c| over JuliaLike cells (" + std::to_string(count) + " cells)";
    return c;
}

inline std::vector<CaseResult> case_intersection(const Options& opt) {
    const GridSpec g = detail_v::standard_grid();
    const double cw = g.cell_width();
    const FamilySpec F = parse_family("n*z ; index n=1..64\nn*(z-1) ; index n=1..64");
    const FamilySpec G = parse_family("n*(z-1) ; index n=1..64\nexp(n*z) ; index n=1..64");
    const FamilySpec FG = family_intersect(F, G);
    const auto rFG = classify_grid(FG, IndexSchedule::for_family(FG, IndexSchedule::Style::Geometric),
                                   g, MartyParams{}, opt.threads);
    CaseResult a;
    a.name = "intersection-julia-near-one";
    a.measured = -1;
    long long count = 0;
    for (const Complex& c : fatou::detail::julia_centers(rFG)) {
        a.measured = std::max(a.measured, std::abs(c - Complex(1, 0)) / cw);
        ++count;
    }
    a.tolerance = 2.0;
    a.pass = count > 0 && a.measured <= a.tolerance;
    a.detail = "J(F n G): max JuliaLike distance to z=1, cell widths";

    const auto rF = classify_grid(F, IndexSchedule::for_family(F, IndexSchedule::Style::Geometric),
                                  g, MartyParams{}, opt.threads);
    const auto rG = classify_grid(G, IndexSchedule::for_family(G, IndexSchedule::Style::Geometric),
                                  g, MartyParams{}, opt.threads);
    double near0 = std::numeric_limits<double>::infinity();
    double near1 = near0;
    for (int iy = 0; iy < g.height; ++iy)
        for (int ix = 0; ix < g.width; ++ix) {
            if (rF.at(ix, iy).label != Label::JuliaLike || rG.at(ix, iy).label != Label::JuliaLike)
                continue;
            const Complex c = g.center(ix, iy);
            near0 = std::min(near0, std::abs(c));
            near1 = std::min(near1, std::abs(c - Complex(1, 0)));
        }
    CaseResult b;
    b.name = "intersection-masks-cover";
    b.measured = std::max(near0, near1) / cw;
    b.tolerance = 2.0;
    b.pass = b.measured <= b.tolerance;
    b.detail = "J(F) n J(G) mask reaches both z=0 and z=1, cell widths";
    return {a, b};
}

struct OrbitResiduals {
    std::vector<double> residuals;
    std::vector<double> bounds;
};

inline CaseResult case_orbit_closure(const SharedState& st, OrbitResiduals& acc) {
    const FamilySpec f = parse_family("z^n ; index n=1..32");
    IndexSchedule s;
    s.values["n"] = IndexSchedule::consecutive(1, 32);
    const auto orbit = backward_orbit(f, Complex(1, 0), s);
    for (const auto& p : orbit.points) {
        acc.residuals.push_back(p.residual);
        acc.bounds.push_back(1e-8 * (1.0 + std::abs(orbit.target)));
    }
    CaseResult c;
    c.name = "orbit-closure";
    c.measured = coverage_distance(orbit, st.circle_raster);
    c.tolerance = 3.0;
    c.pass = c.measured >= 0 && c.measured <= c.tolerance;
    c.detail = "backward orbit of 1 under {z^n, n<=32} vs the unit-circle Julia mask (" +
               std::to_string(orbit.points.size()) + " points)";
    return c;
}

inline CaseResult case_exceptional_set(const Options&) {
    const FamilySpec f = parse_family("domain disk(0,1)\nn*z ; index n=1..64");
    const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    const std::vector<Complex> targets = {Complex(0, 0), Complex(0.5, 0), Complex(0, 0.5),
                                          Complex(-0.3, 0)};
    const auto rep = exceptional_probe(f, targets, s);
    const bool zero_is_candidate =
        rep.targets[0].verdict == OrbitVerdict::FiniteCandidate;
    CaseResult c;
    c.name = "exceptional-set";
    c.measured = static_cast<double>(rep.finite_candidates());
    c.tolerance = 1;
    c.cmp = "==";
    c.pass = rep.finite_candidates() == 1 && zero_is_candidate;
    c.detail = "FiniteCandidate verdicts among targets {0, 0.5, 0.5i, -0.3}; candidate at 0: " +
               std::string(zero_is_candidate ? "yes" : "no");
    return c;
}

inline std::vector<CaseResult> case_repelling_density(const SharedState& st) {
    const FamilySpec f = parse_family("z^n ; index n=2..8");
    IndexSchedule s;
    s.values["n"] = IndexSchedule::consecutive(2, 8);
    const auto members = enumerate_members(f, s);

    long long bad_records = 0;
    std::vector<Complex> repelling;
    for (const auto& P : members) {
        for (const auto& Q : members) {
            const long long n = P.index_values[0], m = Q.index_values[0];
            for (const auto& rec : composition_fixed_points(P, Q)) {
                if (rec.classification == MultiplierClass::Repelling)
                    repelling.push_back(rec.location);
                if (std::abs(rec.location) <= 1e-8) continue;  // origin fixed point
                const bool loc_ok = std::abs(std::abs(rec.location) - 1.0) <= 1e-8;
                const bool mult_ok =
                    std::abs(std::abs(rec.multiplier) - static_cast<double>(n * m)) <= 1e-6;
                if (!loc_ok || !mult_ok) ++bad_records;
            }
        }
    }
    CaseResult rec;
    rec.name = "repelling-records";
    rec.measured = static_cast<double>(bad_records);
    rec.tolerance = 0;
    rec.cmp = "==";
    rec.pass = bad_records == 0;
    rec.detail = "off-origin fixed points of z^n o z^m violating |loc|=1+-1e-8, |mult|=nm+-1e-6";

    CaseResult cov;
    cov.name = "repelling-coverage";
    cov.measured = detail_v::max_julia_distance_to(st.circle_raster,
                                                   dedup_points(repelling, 1e-9));
    cov.tolerance = 3.0;
    cov.pass = cov.measured <= cov.tolerance;
    cov.detail = "unit-circle Julia mask vs repelling fixed points, cell widths";
    return {rec, cov};
}

inline std::vector<CaseResult> case_nevanlinna() {
    std::vector<CaseResult> out;
    auto member = [](const std::string& line) {
        const FamilySpec f = parse_family(line);
        return enumerate_members(f, IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive))
            .front();
    };
    const Complex inf(std::numeric_limits<double>::infinity(), 0);

    {
        CaseResult c;
        c.name = "nevanlinna-T-exp";
        const double t = characteristic(member("exp(z)"), 10.0);
        c.measured = std::abs(t - 10.0 / M_PI) / (10.0 / M_PI);
        c.tolerance = 1e-3;
        c.pass = c.measured <= c.tolerance;
        c.detail = "relative error of T(10, e^z) against 10/pi";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "nevanlinna-theta-cubic";
        const auto m = member("z^3");
        const auto rep =
            nevanlinna_report(m, Complex(0, 0), RadiusSchedule::log_spaced(1.5, 100.0, 5));
        double worst = std::abs(rep.theta_hat - 2.0 / 3.0);
        for (const auto& row : rep.rows)
            if (row.ratios_valid && row.r > 1)
                worst = std::max(worst, std::abs((1.0 - row.ratio_theta) - 2.0 / 3.0));
        c.measured = worst;
        c.tolerance = 1e-9;
        c.pass = worst <= c.tolerance;
        c.detail = "Theta-hat(0, z^3) deviation from 2/3 across every r > 1";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "nevanlinna-delta-shifted-exp";
        CountingOptions copt;
        copt.step_radii = RadiusSchedule::log_spaced(1.0, 1e4, 9).radii;
        const auto rep = nevanlinna_report(member("(z-5)*exp(z)"), Complex(0, 0),
                                           RadiusSchedule::log_spaced(1e3, 1e4, 9), {}, copt);
        c.measured = rep.delta_hat;
        c.tolerance = 0.99;
        c.cmp = ">=";
        c.pass = c.measured >= c.tolerance;
        c.detail = "delta-hat(0, (z-5)e^z) with r_max = 1e4";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "nevanlinna-counting-crossval";
        const auto m = member("z*(z-2)");
        const auto poly = counting(m, Complex(0, 0), 4.0);
        CountingOptions arg;
        arg.force_argument_principle = true;
        arg.step_radii = {0.5, 1.0, 2.0, 4.0};
        const auto wind = counting(m, Complex(0, 0), 4.0, arg);
        c.measured = std::abs(poly.N - wind.N);
        c.tolerance = 1e-6;
        c.pass = c.measured <= c.tolerance;
        c.detail = "|N_roots - N_winding| on z(z-2) at r=4";
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Property suites.

namespace detail_v {

inline ExprPtr random_ast(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 1 : 7);
    std::uniform_int_distribution<int> small(0, 9);
    std::uniform_int_distribution<int> var(0, 2);
    std::uniform_real_distribution<double> real(0.1, 4.0);
    static const char* names[] = {"z", "n", "a"};
    switch (kind(rng)) {
        case 0:
            if (small(rng) < 7) return make_literal(Complex(small(rng), 0), true);
            return make_literal(Complex(real(rng), 0), false);
        case 1: return make_variable(names[var(rng)]);
        case 2: return make_unary(NodeKind::Negate, random_ast(rng, depth - 1));
        case 3:
            return make_binary(NodeKind::Add, random_ast(rng, depth - 1),
                               random_ast(rng, depth - 1));
        case 4:
            return make_binary(NodeKind::Sub, random_ast(rng, depth - 1),
                               random_ast(rng, depth - 1));
        case 5:
            return make_binary(NodeKind::Mul, random_ast(rng, depth - 1),
                               random_ast(rng, depth - 1));
        case 6: {
            std::uniform_int_distribution<int> f(0, 6);
            return make_call(static_cast<Func>(f(rng)), random_ast(rng, depth - 1));
        }
        default:
            return make_binary(NodeKind::Pow, random_ast(rng, depth - 1),
                               make_literal(Complex(small(rng) % 5, 0), true));
    }
}

}  // namespace detail_v

inline std::vector<CaseResult> case_properties(const Options& opt, const OrbitResiduals& acc) {
    std::vector<CaseResult> out;
    {
        CaseResult c;
        c.name = "prop-parser-roundtrip";
        std::mt19937 rng(opt.seed + 1);
        long long ok = 0;
        for (int it = 0; it < 1000; ++it) {
            const ExprPtr ast = detail_v::random_ast(rng, 8);
            try {
                ok += structurally_equal(ast, parse_expression(format(ast), {"z", "n", "a"})) ? 1
                                                                                              : 0;
            } catch (const ParseError&) {
            }
        }
        c.measured = static_cast<double>(ok);
        c.tolerance = 1000;
        c.cmp = "==";
        c.pass = ok == 1000;
        c.detail = "parse(format(ast)) structural identity on random trees";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "prop-derivative-fd";
        std::mt19937 rng(opt.seed + 2);
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        long long ok = 0, total = 0;
        int guard = 0;
        while (total < 500 && ++guard < 100000) {
            const ExprPtr ast = detail_v::random_ast(rng, 5);
            Bindings b;
            b.z = Complex(coord(rng), coord(rng));
            b.indices["n"] = 3;
            b.params["a"] = Complex(0.5, 0.25);
            const double h = 1e-5;
            Jet j;
            Complex fp, fm;
            try {
                j = eval_with_derivative(ast, b);
                Bindings bp = b, bm = b;
                bp.z += h;
                bm.z -= h;
                fp = eval(ast, bp);
                fm = eval(ast, bm);
            } catch (const EvalError&) {
                continue;
            }
            const Complex fd = (fp - fm) / (2 * h);
            if (!std::isfinite(std::abs(j.v)) || !std::isfinite(std::abs(fd))) continue;
            if (std::abs(j.v) > 100 || std::abs(j.d) > 100 || std::abs(fd) > 200) continue;
            ++total;
            ok += std::abs(j.d - fd) <= 1e-6 * (1.0 + std::abs(j.d)) ? 1 : 0;
        }
        c.measured = static_cast<double>(ok);
        c.tolerance = 500;
        c.cmp = "==";
        c.pass = ok == 500 && total == 500;
        c.detail = "dual-number derivative vs central finite difference, rel err <= 1e-6";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "prop-sin-identity";
        std::mt19937 rng(opt.seed + 3);
        std::uniform_real_distribution<double> xs(-3.0, 3.0);
        std::uniform_real_distribution<double> ys(-2.0, 2.0);
        std::uniform_int_distribution<int> ks(1, 10);
        const auto ast = parse_expression("sin(k*z)", {"z", "k"});
        long long ok = 0;
        for (int it = 0; it < 1000; ++it) {
            const double x = xs(rng), y = ys(rng);
            const int k = ks(rng);
            Bindings b;
            b.z = Complex(x, y);
            b.indices["k"] = k;
            const double lhs = std::norm(eval(ast, b));
            const double ch = std::cosh(k * y);
            const double rhs = ch * ch - std::cos(k * x) * std::cos(k * x);
            ok += std::abs(lhs - rhs) <= 1e-9 * ch * ch ? 1 : 0;
        }
        c.measured = static_cast<double>(ok);
        c.tolerance = 1000;
        c.cmp = "==";
        c.pass = ok == 1000;
        c.detail = "| |sin kz|^2 - (cosh^2 ky - cos^2 kx) | <= 1e-9 cosh^2 ky";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "prop-parallel-serial";
        const FamilySpec f = parse_family("z^n ; index n=1..64");
        const auto s = IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
        const GridSpec g{-2, 2, -2, 2, 128, 128};
        const auto serial = classify_grid(f, s, g, MartyParams{}, 1);
        const auto parallel = classify_grid(f, s, g, MartyParams{}, 4);
        const bool equal = emit_pgm(serial) == emit_pgm(parallel);
        bool scores_equal = true;
        for (std::size_t k = 0; k < serial.cells.size(); ++k)
            scores_equal = scores_equal && serial.cells[k].score == parallel.cells[k].score;
        c.measured = equal && scores_equal ? 1 : 0;
        c.tolerance = 1;
        c.cmp = "==";
        c.pass = equal && scores_equal;
        c.detail = "byte-identical PGM and identical scores across thread counts";
        out.push_back(c);
    }
    {
        CaseResult c;
        c.name = "prop-preimage-residual";
        bool all_ok = !acc.residuals.empty();
        double worst = 0;
        for (std::size_t k = 0; k < acc.residuals.size(); ++k) {
            all_ok = all_ok && acc.residuals[k] <= acc.bounds[k];
            worst = std::max(worst, acc.residuals[k]);
        }
        c.measured = worst;
        c.tolerance = 1e-8;
        c.pass = all_ok;
        c.detail = "max |f(w) - target| over " + std::to_string(acc.residuals.size()) +
                   " orbit points from the suite";
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------

inline Suite run_all(const Options& opt = {}) {
    Suite suite;
    auto add = [&](std::vector<CaseResult> rs) {
        for (auto& r : rs) suite.results.push_back(std::move(r));
    };
    SharedState st = compute_shared();

    add(case_unit_circle(st));
    add(case_closed_disk(opt));
    add(case_real_line(opt));
    add(case_union_theorem(opt));
    add({case_singleton_julia(opt)});
    add(case_intersection(opt));
    OrbitResiduals acc;
    add({case_orbit_closure(st, acc)});
    add({case_exceptional_set(opt)});
    add(case_repelling_density(st));
    add(case_nevanlinna());
    add(case_properties(opt, acc));
    return suite;
}

inline void print_report(const Suite& suite, std::ostream& os) {
    os << "verification suite v" << suite.version << "\n";
    os << "case                              status  measured      tolerance    cmp\n";
    os << "--------------------------------  ------  ------------  -----------  ---\n";
    char buf[256];
    for (const auto& r : suite.results) {
        std::snprintf(buf, sizeof(buf), "%-32s  %-6s  %-12.6g  %-11.6g  %s\n", r.name.c_str(),
                      r.pass ? "pass" : "FAIL", r.measured, r.tolerance, r.cmp.c_str());
        os << buf;
        if (!r.detail.empty()) os << "    " << r.detail << "\n";
    }
    os << (suite.all_pass() ? "ALL CASES PASS\n" : "SOME CASES FAILED\n");
}

}  // namespace fatou::verify
