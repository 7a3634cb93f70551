#pragma once

// A family F of holomorphic functions is a finite union of parametrized
// expression pieces.  Each piece owns one expression over z plus integer
// index variables (finite ranges) and complex parameter variables (finite
// sample sets).  Enumeration under an index schedule yields the bound
// members that every downstream estimate works with.
//
// Text format, one piece per line:
//     z^n ; index n=1..64
//     n*(z-a) ; index n=1..64 ; param a in disk(0,1,4,8)
//     n*(z-b) ; index n=1..64 ; param b in {0, 1, 0.5+0.5*i}
// with an optional header line `domain disk(0,1)`.  '#' starts a comment.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fatou/expr.hpp"
#include "fatou/program.hpp"

namespace fatou {

class FamilyError : public std::runtime_error {
public:
    explicit FamilyError(const std::string& what) : std::runtime_error(what) {}
};

struct ParamSampler {
    enum class Kind { Explicit, Disk };
    Kind kind = Kind::Explicit;
    std::vector<Complex> values;  // Explicit
    Complex center{};             // Disk
    double radius = 0;
    int rings = 0;
    int points_per_ring = 0;

    static ParamSampler explicit_list(std::vector<Complex> vs) {
        if (vs.empty()) throw FamilyError("parameter sampler needs at least one value");
        ParamSampler s;
        s.kind = Kind::Explicit;
        s.values = std::move(vs);
        return s;
    }

    // Center plus `rings` concentric rings of `points_per_ring` samples each;
    // the outermost ring lies on the boundary circle.
    static ParamSampler disk(Complex center, double radius, int rings, int points_per_ring) {
        if (radius <= 0 || rings < 1 || points_per_ring < 1)
            throw FamilyError("disk sampler needs radius > 0, rings >= 1, points >= 1");
        ParamSampler s;
        s.kind = Kind::Disk;
        s.center = center;
        s.radius = radius;
        s.rings = rings;
        s.points_per_ring = points_per_ring;
        return s;
    }

    std::vector<Complex> samples() const {
        if (kind == Kind::Explicit) return values;
        std::vector<Complex> out;
        out.reserve(1 + static_cast<std::size_t>(rings) * points_per_ring);
        out.push_back(center);
        for (int j = 1; j <= rings; ++j) {
            const double r = radius * static_cast<double>(j) / rings;
            for (int k = 0; k < points_per_ring; ++k) {
                const double th = 2.0 * M_PI * k / points_per_ring;
                out.push_back(center + Complex(r * std::cos(th), r * std::sin(th)));
            }
        }
        return out;
    }

    bool operator==(const ParamSampler& o) const {
        return kind == o.kind && values == o.values && center == o.center && radius == o.radius &&
               rings == o.rings && points_per_ring == o.points_per_ring;
    }
};

struct IndexVar {
    std::string name;
    long long lo = 1;
    long long hi = 1;
    bool operator==(const IndexVar& o) const { return name == o.name && lo == o.lo && hi == o.hi; }
};

struct ParamVar {
    std::string name;
    ParamSampler sampler;
    bool operator==(const ParamVar& o) const { return name == o.name && sampler == o.sampler; }
};

struct FamilyPiece {
    ExprPtr ast;
    std::vector<IndexVar> index_vars;
    std::vector<ParamVar> param_vars;
    std::string text;  // canonical expression text

    void validate() const {
        if (!ast) throw FamilyError("piece has no expression");
        std::set<std::string> declared{"z"};
        for (const auto& iv : index_vars) {
            if (iv.lo < 1 || iv.hi < iv.lo)
                throw FamilyError("index range for '" + iv.name + "' must satisfy 1 <= lo <= hi");
            if (!declared.insert(iv.name).second)
                throw FamilyError("duplicate variable '" + iv.name + "'");
        }
        for (const auto& pv : param_vars) {
            if (pv.sampler.samples().empty())
                throw FamilyError("empty sampler for '" + pv.name + "'");
            if (!declared.insert(pv.name).second)
                throw FamilyError("duplicate variable '" + pv.name + "'");
        }
        const auto free = free_variables(ast);
        for (const auto& v : free)
            if (declared.count(v) == 0) throw FamilyError("undeclared variable '" + v + "'");
        for (const auto& iv : index_vars)
            if (free.count(iv.name) == 0)
                throw FamilyError("index variable '" + iv.name + "' unused in expression");
        for (const auto& pv : param_vars)
            if (free.count(pv.name) == 0)
                throw FamilyError("parameter '" + pv.name + "' unused in expression");
    }
};

inline bool pieces_equal(const FamilyPiece& a, const FamilyPiece& b) {
    return structurally_equal(a.ast, b.ast) && a.index_vars == b.index_vars &&
           a.param_vars == b.param_vars;
}

struct DomainDisk {
    Complex center{};
    double radius = 0;
    bool contains(const Complex& z) const { return std::abs(z - center) <= radius; }
    bool operator==(const DomainDisk& o) const { return center == o.center && radius == o.radius; }
};

struct FamilySpec {
    std::vector<FamilyPiece> pieces;
    std::optional<DomainDisk> domain_clip;

    void validate() const {
        if (pieces.empty()) throw FamilyError("empty family");
        for (const auto& p : pieces) p.validate();
    }
};

// Theorem-style union: concatenation with structural deduplication.
inline FamilySpec family_union(const FamilySpec& a, const FamilySpec& b) {
    if (a.domain_clip != b.domain_clip) throw FamilyError("mismatched domain clips");
    FamilySpec out = a;
    for (const auto& p : b.pieces) {
        bool dup = false;
        for (const auto& q : out.pieces) dup = dup || pieces_equal(p, q);
        if (!dup) out.pieces.push_back(p);
    }
    out.validate();
    return out;
}

// Syntactic intersection: pieces structurally present in both operands.
inline FamilySpec family_intersect(const FamilySpec& a, const FamilySpec& b) {
    if (a.domain_clip != b.domain_clip) throw FamilyError("mismatched domain clips");
    FamilySpec out;
    out.domain_clip = a.domain_clip;
    for (const auto& p : a.pieces) {
        bool in_b = false;
        for (const auto& q : b.pieces) in_b = in_b || pieces_equal(p, q);
        bool dup = false;
        for (const auto& q : out.pieces) dup = dup || pieces_equal(p, q);
        if (in_b && !dup) out.pieces.push_back(p);
    }
    if (out.pieces.empty()) throw FamilyError("empty family");
    return out;
}

// ---------------------------------------------------------------------------
// Index schedules: finite truncations of n in N.

struct IndexSchedule {
    // Parallel to a piece's index_vars by name.
    std::map<std::string, std::vector<long long>> values;

    static std::vector<long long> geometric(long long lo, long long hi) {
        std::vector<long long> v;
        for (long long n = lo; n < hi; n *= 2) v.push_back(n);
        if (v.empty() || v.back() != hi) v.push_back(hi);
        return v;
    }
    static std::vector<long long> consecutive(long long lo, long long hi) {
        std::vector<long long> v;
        for (long long n = lo; n <= hi; ++n) v.push_back(n);
        return v;
    }

    enum class Style { Geometric, Consecutive };

    static IndexSchedule for_family(const FamilySpec& f, Style style) {
        IndexSchedule s;
        for (const auto& piece : f.pieces) {
            for (const auto& iv : piece.index_vars) {
                auto vals = style == Style::Geometric ? geometric(iv.lo, iv.hi)
                                                      : consecutive(iv.lo, iv.hi);
                auto it = s.values.find(iv.name);
                if (it == s.values.end())
                    s.values[iv.name] = vals;
                else if (it->second != vals)
                    throw FamilyError("conflicting ranges for index '" + iv.name + "'");
            }
        }
        return s;
    }

    const std::vector<long long>& for_var(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end()) throw FamilyError("schedule missing index '" + name + "'");
        return it->second;
    }

    void validate_for(const FamilySpec& f) const {
        for (const auto& piece : f.pieces) {
            for (const auto& iv : piece.index_vars) {
                const auto& vals = for_var(iv.name);
                if (vals.empty()) throw FamilyError("empty schedule for '" + iv.name + "'");
                for (std::size_t i = 0; i < vals.size(); ++i) {
                    if (vals[i] < iv.lo || vals[i] > iv.hi)
                        throw FamilyError("schedule value out of range for '" + iv.name + "'");
                    if (i > 0 && vals[i] <= vals[i - 1])
                        throw FamilyError("schedule must be strictly increasing");
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Bound members: a piece with all indices and parameters fixed.

struct BoundMember {
    std::size_t piece_index = 0;
    ExprPtr ast;
    std::string id;
    Program program;               // slots follow slot order below
    std::vector<Complex> slots;    // index values first, then parameters
    // Position of each index value within its schedule, used for tail windows.
    std::vector<std::size_t> index_positions;
    std::vector<long long> index_values;

    Complex operator()(const Complex& z) const { return run<Complex>(program, z, slots.data()); }
    Jet jet(const Complex& z) const { return run<Jet>(program, z, slots.data()); }

    // Long-double paths for quadrature at radii where double over/underflows.
    std::complex<long double> value_l(const std::complex<long double>& z) const {
        return run<std::complex<long double>>(program, z, slots.data());
    }
    JetT<long double> jet_l(const std::complex<long double>& z) const {
        return run<JetT<long double>>(program, z, slots.data());
    }
};

namespace detail {

inline std::string format_complex_compact(const Complex& c) {
    std::string s = format_double(c.real());
    if (c.imag() != 0.0) {
        s += (c.imag() >= 0 ? "+" : "-");
        s += format_double(std::abs(c.imag()));
        s += "i";
    }
    return s;
}

// Grammar-compatible constant text, reparseable by parse_expression.
inline std::string format_complex_expr(const Complex& c) {
    if (c.imag() == 0.0) return format_double(c.real());
    std::string s = format_double(c.real());
    s += (c.imag() >= 0 ? "+" : "-");
    s += format_double(std::abs(c.imag()));
    s += "*i";
    return s;
}

}  // namespace detail

// Deterministic order: piece, then index tuples lexicographically by
// schedule position, then parameter samples in declaration/sample order.
inline std::vector<BoundMember> enumerate_members(const FamilySpec& f, const IndexSchedule& s) {
    f.validate();
    s.validate_for(f);
    std::vector<BoundMember> out;
    for (std::size_t pi = 0; pi < f.pieces.size(); ++pi) {
        const FamilyPiece& piece = f.pieces[pi];
        std::vector<std::string> slot_names;
        for (const auto& iv : piece.index_vars) slot_names.push_back(iv.name);
        for (const auto& pv : piece.param_vars) slot_names.push_back(pv.name);
        const Program prog = compile(piece.ast, slot_names);
        const std::string text = piece.text.empty() ? format(piece.ast) : piece.text;

        std::vector<const std::vector<long long>*> axes;
        for (const auto& iv : piece.index_vars) axes.push_back(&s.for_var(iv.name));
        std::vector<std::vector<Complex>> param_sets;
        for (const auto& pv : piece.param_vars) param_sets.push_back(pv.sampler.samples());

        std::vector<std::size_t> idx(axes.size(), 0);
        for (;;) {
            std::vector<std::size_t> pidx(param_sets.size(), 0);
            for (;;) {
                BoundMember m;
                m.piece_index = pi;
                m.ast = piece.ast;
                m.program = prog;
                std::string id = text + "[";
                for (std::size_t k = 0; k < axes.size(); ++k) {
                    const long long v = (*axes[k])[idx[k]];
                    m.slots.push_back(Complex(static_cast<double>(v), 0.0));
                    m.index_positions.push_back(idx[k]);
                    m.index_values.push_back(v);
                    if (k) id += " ";
                    id += piece.index_vars[k].name + "=" + std::to_string(v);
                }
                for (std::size_t k = 0; k < param_sets.size(); ++k) {
                    const Complex v = param_sets[k][pidx[k]];
                    m.slots.push_back(v);
                    if (!axes.empty() || k) id += " ";
                    id += piece.param_vars[k].name + "=" + detail::format_complex_compact(v);
                }
                id += "]";
                if (axes.empty() && param_sets.empty()) id = text;
                m.id = std::move(id);
                out.push_back(std::move(m));

                std::size_t k = param_sets.size();
                while (k > 0) {
                    --k;
                    if (++pidx[k] < param_sets[k].size()) break;
                    pidx[k] = 0;
                    if (k == 0) goto params_done;
                }
                if (param_sets.empty()) break;
            }
        params_done:;
            std::size_t k = axes.size();
            bool carry = true;
            while (k > 0 && carry) {
                --k;
                if (++idx[k] < axes[k]->size())
                    carry = false;
                else
                    idx[k] = 0;
            }
            if (axes.empty() || carry) break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Family text format.

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '{') ++depth;
        if (c == ')' || c == '}') --depth;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Constant complex expression, e.g. "0.5+0.5*i".
inline Complex parse_complex_constant(const std::string& text) {
    ExprPtr ast = parse_expression(text, {"z"});
    if (!free_variables(ast).empty())
        throw FamilyError("expected a constant expression, got '" + text + "'");
    return eval(ast, Bindings{});
}

inline double parse_real_constant(const std::string& text) {
    const Complex c = parse_complex_constant(text);
    if (c.imag() != 0.0) throw FamilyError("expected a real constant, got '" + text + "'");
    return c.real();
}

inline ParamSampler parse_sampler(const std::string& spec) {
    const std::string s = trim(spec);
    if (!s.empty() && s.front() == '{') {
        if (s.back() != '}') throw FamilyError("unterminated sample list: " + s);
        std::vector<Complex> vals;
        for (const auto& part : split_top_level(s.substr(1, s.size() - 2), ',')) {
            const std::string t = trim(part);
            if (!t.empty()) vals.push_back(parse_complex_constant(t));
        }
        return ParamSampler::explicit_list(std::move(vals));
    }
    if (s.rfind("disk(", 0) == 0 && s.back() == ')') {
        const auto args = split_top_level(s.substr(5, s.size() - 6), ',');
        if (args.size() != 4) throw FamilyError("disk sampler needs (center, radius, rings, points)");
        return ParamSampler::disk(parse_complex_constant(trim(args[0])),
                                  parse_real_constant(trim(args[1])),
                                  static_cast<int>(parse_real_constant(trim(args[2]))),
                                  static_cast<int>(parse_real_constant(trim(args[3]))));
    }
    throw FamilyError("bad sampler '" + s + "' (want {v1, v2, ...} or disk(c,r,rings,points))");
}

}  // namespace detail

inline FamilyPiece parse_family_piece(const std::string& line) {
    const auto segs = detail::split_top_level(line, ';');
    FamilyPiece piece;
    std::set<std::string> declared{"z"};
    for (std::size_t i = 1; i < segs.size(); ++i) {
        std::istringstream in(detail::trim(segs[i]));
        std::string word;
        in >> word;
        if (word == "index") {
            std::string rest;
            std::getline(in, rest);
            rest = detail::trim(rest);
            const auto eq = rest.find('=');
            const auto dots = rest.find("..");
            if (eq == std::string::npos || dots == std::string::npos || dots < eq)
                throw FamilyError("bad index segment '" + segs[i] + "' (want name=lo..hi)");
            IndexVar iv;
            iv.name = detail::trim(rest.substr(0, eq));
            iv.lo = std::stoll(detail::trim(rest.substr(eq + 1, dots - eq - 1)));
            iv.hi = std::stoll(detail::trim(rest.substr(dots + 2)));
            declared.insert(iv.name);
            piece.index_vars.push_back(std::move(iv));
        } else if (word == "param") {
            std::string name, kw;
            in >> name >> kw;
            if (kw != "in") throw FamilyError("bad param segment '" + segs[i] + "'");
            std::string rest;
            std::getline(in, rest);
            declared.insert(name);
            piece.param_vars.push_back({name, detail::parse_sampler(detail::trim(rest))});
        } else if (!word.empty()) {
            throw FamilyError("unknown piece segment '" + segs[i] + "'");
        }
    }
    piece.ast = parse_expression(detail::trim(segs[0]), declared);
    piece.text = format(piece.ast);
    piece.validate();
    return piece;
}

inline FamilySpec parse_family(const std::string& text) {
    FamilySpec spec;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        if (line.rfind("domain", 0) == 0) {
            if (spec.domain_clip || !spec.pieces.empty())
                throw FamilyError("'domain' must be the first line and appear once");
            const std::string rest = detail::trim(line.substr(6));
            if (rest.rfind("disk(", 0) != 0 || rest.back() != ')')
                throw FamilyError("bad domain '" + rest + "' (want disk(center,radius))");
            const auto args = detail::split_top_level(rest.substr(5, rest.size() - 6), ',');
            if (args.size() != 2) throw FamilyError("domain disk needs (center, radius)");
            DomainDisk d;
            d.center = detail::parse_complex_constant(detail::trim(args[0]));
            d.radius = detail::parse_real_constant(detail::trim(args[1]));
            if (d.radius <= 0) throw FamilyError("domain radius must be positive");
            spec.domain_clip = d;
            continue;
        }
        spec.pieces.push_back(parse_family_piece(line));
    }
    spec.validate();
    return spec;
}

inline std::string format_family(const FamilySpec& f) {
    std::string out;
    if (f.domain_clip) {
        out += "domain disk(" + detail::format_complex_expr(f.domain_clip->center) + ", " +
               detail::format_double(f.domain_clip->radius) + ")\n";
    }
    for (const auto& p : f.pieces) {
        out += p.text.empty() ? format(p.ast) : p.text;
        for (const auto& iv : p.index_vars)
            out += " ; index " + iv.name + "=" + std::to_string(iv.lo) + ".." +
                   std::to_string(iv.hi);
        for (const auto& pv : p.param_vars) {
            out += " ; param " + pv.name + " in ";
            if (pv.sampler.kind == ParamSampler::Kind::Explicit) {
                out += "{";
                for (std::size_t k = 0; k < pv.sampler.values.size(); ++k) {
                    if (k) out += ", ";
                    out += detail::format_complex_expr(pv.sampler.values[k]);
                }
                out += "}";
            } else {
                out += "disk(" + detail::format_complex_expr(pv.sampler.center) + "," +
                       detail::format_double(pv.sampler.radius) + "," +
                       std::to_string(pv.sampler.rings) + "," +
                       std::to_string(pv.sampler.points_per_ring) + ")";
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace fatou
