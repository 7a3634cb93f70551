#pragma once

// Normality scoring via the Marty criterion: a family is normal at a point
// exactly when spherical derivatives |f'|/(1+|f|^2) of its members are
// locally uniformly bounded.  With a finite index truncation the score is a
// one-sided heuristic: it can certify "not normal up to N_max", never a
// proof of normality, so it is always reported as a score next to the label.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fatou/family.hpp"

namespace fatou {

struct MartyParams {
    double probe_radius = 0.0078125;  // half of a 256-cell sweep over [-2,2]
    int probe_count = 4;
    double julia_threshold = 22.7;
    double escape_radius = 2.0;
    double tail_fraction = 0.5;

    void validate() const {
        if (probe_radius <= 0 || probe_count < 1 || julia_threshold <= 0 || escape_radius <= 0 ||
            tail_fraction <= 0 || tail_fraction > 1)
            throw std::invalid_argument("MartyParams fields must be positive, tail_fraction in (0,1]");
    }
};

enum class Label : std::uint8_t { JuliaLike, FatouBounded, FatouEscaping, Undetermined };

inline const char* label_name(Label l) {
    switch (l) {
        case Label::JuliaLike: return "JuliaLike";
        case Label::FatouBounded: return "FatouBounded";
        case Label::FatouEscaping: return "FatouEscaping";
        case Label::Undetermined: return "Undetermined";
    }
    return "?";
}

struct PointClassification {
    Label label = Label::Undetermined;
    double score = 0.0;
    std::string witness;
};

// |f'| / (1 + |f|^2), guarded against overflow of |f|^2.  When |f| has
// overflowed the true quotient tends to zero for every family this tool
// targets, so enormous values contribute no spurious Julia evidence.
inline double spherical_derivative_value(const Jet& j) {
    const double fa = std::abs(j.v);
    const double fd = std::abs(j.d);
    if (!std::isfinite(fa)) return 0.0;
    if (!std::isfinite(fd)) return std::numeric_limits<double>::infinity();
    if (fa > 1e150) return (fd / fa) / fa;
    return fd / (1.0 + fa * fa);
}

inline double spherical_derivative(const BoundMember& m, const Complex& z) {
    return spherical_derivative_value(m.jet(z));
}

namespace detail {

// Tail = the last ceil(tail_fraction * len) schedule positions of every
// index variable. Members of index-free pieces are always in the tail.
inline std::size_t tail_start_position(std::size_t len, double tail_fraction) {
    const auto keep = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(len), std::ceil(tail_fraction * static_cast<double>(len))));
    return len - std::max<std::size_t>(std::size_t{1}, keep);
}

struct MemberView {
    const BoundMember* member;
    bool in_tail;
};

inline std::vector<MemberView> member_views(const FamilySpec& f,
                                            const std::vector<BoundMember>& members,
                                            const IndexSchedule& s, double tail_fraction) {
    std::vector<MemberView> out;
    out.reserve(members.size());
    for (const auto& m : members) {
        bool tail = true;
        const auto& ivars = f.pieces[m.piece_index].index_vars;
        for (std::size_t k = 0; k < ivars.size(); ++k) {
            const auto& vals = s.for_var(ivars[k].name);
            if (m.index_positions[k] < tail_start_position(vals.size(), tail_fraction)) tail = false;
        }
        out.push_back({&m, tail});
    }
    return out;
}

inline std::vector<Complex> probe_points(const Complex& z0, const MartyParams& p) {
    std::vector<Complex> probes;
    probes.reserve(1 + p.probe_count);
    probes.push_back(z0);
    for (int k = 0; k < p.probe_count; ++k) {
        const double th = 2.0 * M_PI * k / p.probe_count;
        probes.push_back(z0 + p.probe_radius * Complex(std::cos(th), std::sin(th)));
    }
    return probes;
}

inline PointClassification classify_with_members(const std::vector<MemberView>& members,
                                                 const Complex& z0, const MartyParams& p) {
    const auto probes = probe_points(z0, p);
    double score = -1.0;
    const BoundMember* witness = nullptr;
    double min_center_abs = std::numeric_limits<double>::infinity();
    std::size_t tail_total = 0, skipped = 0;

    for (const auto& mv : members) {
        if (!mv.in_tail) continue;
        ++tail_total;
        double member_score = 0.0;
        double center_abs = 0.0;
        try {
            for (std::size_t q = 0; q < probes.size(); ++q) {
                const Jet j = mv.member->jet(probes[q]);
                if (q == 0) {
                    const double a = std::abs(j.v);
                    center_abs = std::isfinite(a) ? a : std::numeric_limits<double>::infinity();
                }
                member_score = std::max(member_score, spherical_derivative_value(j));
            }
        } catch (const EvalError&) {
            ++skipped;
            continue;
        }
        if (member_score > score) {
            score = member_score;
            witness = mv.member;
        }
        min_center_abs = std::min(min_center_abs, center_abs);
    }

    PointClassification out;
    out.score = score < 0 ? 0.0 : score;
    out.witness = witness ? witness->id : "";
    if (tail_total == 0 || skipped * 2 > tail_total) {
        out.label = Label::Undetermined;
        return out;
    }
    if (out.score >= p.julia_threshold)
        out.label = Label::JuliaLike;
    else if (min_center_abs >= p.escape_radius)
        out.label = Label::FatouEscaping;
    else if (out.score <= p.julia_threshold / 10.0)
        out.label = Label::FatouBounded;
    else
        out.label = Label::Undetermined;
    return out;
}

}  // namespace detail

inline PointClassification classify_point(const FamilySpec& f, const IndexSchedule& s,
                                           const Complex& z0, const MartyParams& p) {
    p.validate();
    if (f.domain_clip && !f.domain_clip->contains(z0))
        throw std::invalid_argument("classify_point: z0 outside family domain");
    const auto members = enumerate_members(f, s);
    const auto views = detail::member_views(f, members, s, p.tail_fraction);
    return detail::classify_with_members(views, z0, p);
}

}  // namespace fatou
