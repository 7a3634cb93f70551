#pragma once

// Nevanlinna functionals m, N, N-bar, T and the defect estimates delta-hat,
// Theta-hat for entire family members.  Polynomial members count zeros
// exactly from their roots; transcendental members count by the argument
// principle (integer winding numbers on the radius schedule) and integrate
// the resulting step function.
//
// Origin convention: N(r,a) = int_0^r (n(t)-n(0))/t dt + n(0) log r, the
// standard finite form when f(0) = a.

#include <vector>

#include "fatou/polyroots.hpp"

namespace fatou {

struct RadiusSchedule {
    std::vector<double> radii;

    // Log-spaced, `per_decade` points per decade of [r_min, r_max].
    static RadiusSchedule log_spaced(double r_min, double r_max, int per_decade) {
        if (r_min <= 0 || r_max <= r_min || per_decade < 1)
            throw std::invalid_argument("RadiusSchedule: need 0 < r_min < r_max, per_decade >= 1");
        RadiusSchedule s;
        const double decades = std::log10(r_max / r_min);
        const int steps = std::max(1, static_cast<int>(std::round(decades * per_decade)));
        for (int k = 0; k <= steps; ++k)
            s.radii.push_back(r_min * std::pow(10.0, decades * k / steps));
        s.radii.back() = r_max;
        return s;
    }

    void validate() const {
        if (radii.empty()) throw std::invalid_argument("empty radius schedule");
        for (std::size_t k = 0; k < radii.size(); ++k) {
            if (radii[k] <= 0) throw std::invalid_argument("radii must be positive");
            if (k && radii[k] <= radii[k - 1])
                throw std::invalid_argument("radii must be strictly increasing");
        }
    }
};

inline constexpr double kInfinityTarget = std::numeric_limits<double>::infinity();

struct ProximityOptions {
    int initial_samples = 4096;
    int max_samples = 1 << 20;
    double rel_tol = 1e-6;
};

namespace detail {

inline double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

using LComplex = std::complex<long double>;

// Mean over the circle |z| = r of log+ |f(z)| (a = infinity) or
// log+ 1/|f(z)-a|.  Trapezoid = sample mean for a periodic integrand;
// singular samples are jittered by a half step once, then dropped.
// Evaluation runs in long double so e^z stays finite out to |z| ~ 1e4.
template <typename F>
double circle_mean(const F& magnitude, double r, int samples, bool* had_singular = nullptr) {
    long double sum = 0;
    int used = 0;
    for (int k = 0; k < samples; ++k) {
        long double th = 2.0L * M_PI * k / samples;
        long double v = 0;
        bool ok = false;
        for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
            try {
                v = magnitude(LComplex(r * std::cos(th), r * std::sin(th)));
                ok = std::isfinite(static_cast<double>(v));
            } catch (const EvalError&) {
                ok = false;
            }
            if (!ok) th += M_PI / samples;
        }
        if (ok) {
            sum += v;
            ++used;
        } else if (had_singular) {
            *had_singular = true;
        }
    }
    if (used == 0) throw EvalError("proximity: every sample on the circle was singular");
    return static_cast<double>(sum / used);
}

}  // namespace detail

// m(r, a, f): proximity function by adaptive trapezoid quadrature.
inline double proximity(const BoundMember& m, const Complex& a, double r,
                        const ProximityOptions& opt = {}) {
    if (r <= 0) throw std::invalid_argument("proximity: r must be positive");
    const bool at_infinity =
        std::isinf(a.real()) || std::isinf(a.imag());
    const detail::LComplex al(a.real(), a.imag());
    auto magnitude = [&](const detail::LComplex& z) -> long double {
        const detail::LComplex v = m.value_l(z);
        if (at_infinity) {
            const long double av = std::abs(v);
            if (std::isinf(av)) throw EvalError("overflow on circle");
            return av > 1.0L ? std::log(av) : 0.0L;
        }
        const long double d = std::abs(v - al);
        if (d == 0.0L) throw EvalError("hit a-point on circle");
        return d < 1.0L ? -std::log(d) : 0.0L;
    };
    int samples = opt.initial_samples;
    double prev = detail::circle_mean(magnitude, r, samples);
    while (samples < opt.max_samples) {
        samples *= 2;
        const double cur = detail::circle_mean(magnitude, r, samples);
        if (std::abs(cur - prev) < opt.rel_tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

inline double proximity_infinity(const BoundMember& m, double r, const ProximityOptions& opt = {}) {
    return proximity(m, Complex(kInfinityTarget, 0.0), r, opt);
}

// log+ max_{|z|=r} |f(z)| by circle sampling; exposed alongside T in reports.
inline double log_max_modulus(const BoundMember& m, double r, int samples = 4096) {
    long double best = 0;
    for (int k = 0; k < samples; ++k) {
        const long double th = 2.0L * M_PI * k / samples;
        try {
            best = std::max(
                best, std::abs(m.value_l(detail::LComplex(r * std::cos(th), r * std::sin(th)))));
        } catch (const EvalError&) {
        }
    }
    return best > 1.0L ? static_cast<double>(std::log(best)) : 0.0;
}

namespace detail {

// Members whose expression applies division, log, or tan to z-dependent
// subtrees are not entire; zero counting and T reject them.
inline bool z_dependent(const Expr& e) {
    if (e.kind == NodeKind::Variable) return e.name == "z";
    return (e.lhs && z_dependent(*e.lhs)) || (e.rhs && z_dependent(*e.rhs));
}

inline bool entire_expression(const Expr& e) {
    if (e.kind == NodeKind::Div && z_dependent(*e.rhs)) return false;
    if (e.kind == NodeKind::Call && (e.func == Func::Log || e.func == Func::Tan) &&
        z_dependent(*e.lhs))
        return false;
    if (e.kind == NodeKind::Pow && z_dependent(*e.lhs)) {
        // z-dependent base with a non-integer or negative exponent is not entire
        const Expr& ex = *e.rhs;
        if (!(ex.kind == NodeKind::Literal && ex.int_literal && ex.value.real() >= 0) &&
            ex.kind != NodeKind::Variable)
            return false;
    }
    if (e.lhs && !entire_expression(*e.lhs)) return false;
    if (e.rhs && !entire_expression(*e.rhs)) return false;
    return true;
}

// Winding number of f - a around 0 on |z| = t via trapezoid quadrature of
// (1/2*pi) Re[z f'(z)/(f(z)-a)], doubled until it lands on an integer.
// Sample angles are staggered off the axes; an a-point on or near the circle
// makes the quadrature diverge, handled by escalating relative jitters of
// the radius (starting at the 1e-9 nudge, widening only as far as needed).
inline long long winding_count(const BoundMember& m, const Complex& a, double t,
                               int initial_samples = 1024, int max_samples = 1 << 18) {
    static constexpr double kJitters[] = {0.0, 1e-9, 1e-6, 1e-4};
    const LComplex al(a.real(), a.imag());
    for (const double jitter : kJitters) {
        const long double radius = static_cast<long double>(t) * (1.0L + jitter);
        int samples = initial_samples;
        while (samples <= max_samples) {
            long double sum = 0;
            bool singular = false;
            for (int k = 0; k < samples && !singular; ++k) {
                const long double th = 2.0L * M_PI * (k + 0.381966011250105L) / samples;
                const LComplex z(radius * std::cos(th), radius * std::sin(th));
                try {
                    const JetT<long double> j = m.jet_l(z);
                    const LComplex den = j.v - al;
                    if (den == LComplex(0, 0)) {
                        singular = true;
                        break;
                    }
                    const LComplex w = z * j.d / den;
                    const long double wr = w.real();
                    if (std::isinf(static_cast<double>(wr)) || wr != wr ||
                        std::abs(wr) > 1e14L) {
                        singular = true;
                        break;
                    }
                    sum += wr;
                } catch (const EvalError&) {
                    singular = true;
                }
            }
            if (singular) break;  // escalate the jitter and start over
            const double winding = static_cast<double>(sum / samples);
            const double nearest = std::rint(winding);
            if (std::abs(winding - nearest) <= 0.1) return static_cast<long long>(nearest);
            samples *= 2;
        }
    }
    throw EvalError("winding number did not converge to an integer at t=" + std::to_string(t));
}

}  // namespace detail

struct CountingResult {
    double N = 0;
    double N_bar = 0;
};

struct CountingOptions {
    // Radii at which the argument-principle step function n(t) is evaluated;
    // when empty, one decade below r with 9 points per decade is used.
    std::vector<double> step_radii;
    bool force_argument_principle = false;  // cross-validation hook
    double dedup_radius = 1e-8;
};

// N(r,a) and N-bar(r,a) for zeros of f - a in |z| <= r.
inline CountingResult counting(const BoundMember& m, const Complex& a, double r,
                               const CountingOptions& opt = {}) {
    if (r <= 0) throw std::invalid_argument("counting: r must be positive");
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw EvalError("counting needs a finite target value");
    if (!detail::entire_expression(*m.ast))
        throw EvalError("counting requires an entire member (no z-dependent division/log/tan)");

    const auto poly = member_polynomial(m);
    if (poly && !opt.force_argument_principle) {
        Poly shifted = *poly;
        shifted.c[0] -= a;
        shifted.trim();
        if (shifted.degree() == 0) {
            if (shifted.c[0] == Complex(0.0, 0.0))
                throw EvalError("counting: member attains the value identically");
            return {};
        }
        const auto solve = durand_kerner(shifted);
        CountingResult out;
        int n0 = solve.origin_multiplicity;
        std::vector<Complex> nonzero(solve.roots.begin() + n0, solve.roots.end());
        for (const Complex& root : nonzero) {
            const double az = std::abs(root);
            if (az > 0 && az <= r) out.N += std::log(r / az);
        }
        out.N += n0 * std::log(r);
        out.N_bar = n0 > 0 ? std::log(r) : 0.0;
        for (const Complex& root : dedup_points(nonzero, opt.dedup_radius)) {
            const double az = std::abs(root);
            if (az > 0 && az <= r) out.N_bar += std::log(r / az);
        }
        return out;
    }

    // Argument principle: integer n(t) on a radius ladder, then exact
    // integration of the step function n(t)/t.  Distinct-root counts are not
    // observable through winding numbers, so N_bar falls back to N here
    // (exact whenever the zeros are simple).
    std::vector<double> ts = opt.step_radii;
    if (ts.empty()) {
        for (int k = 0; k <= 9; ++k) ts.push_back(r * std::pow(10.0, -1.0 + k / 9.0));
    } else {
        std::sort(ts.begin(), ts.end());
    }
    while (!ts.empty() && ts.back() > r) ts.pop_back();
    if (ts.empty() || ts.back() < r) ts.push_back(r);

    const double t_origin = ts.front() * 1e-6;
    const long long n0 = detail::winding_count(m, a, t_origin);
    CountingResult out;
    double prev_t = t_origin;
    long long prev_n = n0;
    double accum = 0;
    for (const double t : ts) {
        accum += (prev_n - n0) * std::log(t / prev_t);
        prev_n = detail::winding_count(m, a, t);
        prev_t = t;
    }
    out.N = accum + n0 * std::log(r);
    out.N_bar = out.N;
    return out;
}

// T(r, f) = m(r, infinity) + N(r, poles); members are required to be entire,
// so the pole term vanishes.
inline double characteristic(const BoundMember& m, double r, const ProximityOptions& opt = {}) {
    if (!detail::entire_expression(*m.ast))
        throw EvalError("characteristic requires an entire member (no z-dependent division/log/tan)");
    return proximity_infinity(m, r, opt);
}

struct NevanlinnaRow {
    double r = 0;
    double m_a = 0;
    double N_a = 0;
    double Nbar_a = 0;
    double m_inf = 0;
    double N_poles = 0;  // always 0: members are required to be entire
    double T = 0;
    double log_max_modulus = 0;
    double ratio_delta = 0;  // N/T
    double ratio_theta = 0;  // N_bar/T
    bool ratios_valid = false;
};

struct NevanlinnaReport {
    Complex a{};
    std::vector<NevanlinnaRow> rows;
    double delta_hat = 0;
    double theta_hat = 0;
    bool theta_below_half = false;
};

struct DefectEstimate {
    double delta_hat = 0;
    double theta_hat = 0;
};

// limsup proxy: max ratio over the top third of the radius schedule.
inline NevanlinnaReport nevanlinna_report(const BoundMember& m, const Complex& a,
                                          const RadiusSchedule& rs,
                                          const ProximityOptions& popt = {},
                                          const CountingOptions& copt = {}) {
    rs.validate();
    NevanlinnaReport report;
    report.a = a;
    for (const double r : rs.radii) {
        NevanlinnaRow row;
        row.r = r;
        const auto counts = counting(m, a, r, copt);
        row.N_a = counts.N;
        row.Nbar_a = counts.N_bar;
        row.m_a = proximity(m, a, r, popt);
        row.m_inf = proximity_infinity(m, r, popt);
        row.T = row.m_inf + row.N_poles;  // counting() has already asserted entirety
        row.log_max_modulus = log_max_modulus(m, r);
        if (row.T > 1e-12) {
            row.ratio_delta = row.N_a / row.T;
            row.ratio_theta = row.Nbar_a / row.T;
            row.ratios_valid = true;
        }
        report.rows.push_back(row);
    }
    double worst_delta = 0, worst_theta = 0;
    bool any = false;
    const std::size_t n = report.rows.size();
    const std::size_t top_start = n - std::max<std::size_t>(1, (n + 2) / 3);
    for (std::size_t k = top_start; k < n; ++k) {
        if (!report.rows[k].ratios_valid) continue;
        worst_delta = std::max(worst_delta, report.rows[k].ratio_delta);
        worst_theta = std::max(worst_theta, report.rows[k].ratio_theta);
        any = true;
    }
    if (!any) throw EvalError("defects: T vanished on the whole top third of the schedule");
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    report.delta_hat = clamp01(1.0 - worst_delta);
    report.theta_hat = clamp01(1.0 - worst_theta);
    report.theta_below_half = report.theta_hat < 0.5;
    return report;
}

inline DefectEstimate defects(const BoundMember& m, const Complex& a, const RadiusSchedule& rs,
                              const ProximityOptions& popt = {}, const CountingOptions& copt = {}) {
    const auto report = nevanlinna_report(m, a, rs, popt, copt);
    return {report.delta_hat, report.theta_hat};
}

}  // namespace fatou
