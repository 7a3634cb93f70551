// fatoulab: numerical laboratory for Fatou/Julia-like sets of families of
// holomorphic functions.
//
// Subcommands: parse, eval, classify, union-check, orbit, except, fixpoints,
// nevanlinna, verify.  Exit codes: 0 success, 1 runtime failure, 2 usage.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "fatou/verify.hpp"

using namespace fatou;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kUsage = R"(usage: fatoulab <command> [flags]

commands:
  parse       --expr TEXT [--vars z,n,a]
              print the canonical parenthesized form and the tree
  eval        --family TEXT|--family-file PATH --member n=2[,a=0.5+0.5i] --at Z
              evaluate one member and its derivative at a point
  classify    --family TEXT|--family-file PATH [--window a,b,c,d] [--size WxH]
              [--schedule geometric|full] [--tau X] [--escape-radius X]
              [--probe-radius X] [--probes N] [--tail-fraction X] [--threads N]
              [--out raster.pgm] [--csv raster.csv] [--json report.json]
  union-check --family-a TEXT --family-b TEXT [classify flags]
              [--out-prefix PREFIX]  compare raster_union vs direct classify
  orbit       --family ... --target Z [--schedule geometric|full]
              [--window a,b,c,d] [--size WxH] [--coverage] [--out orbit.csv]
              [--json report.json]
  except      --family ... --targets Z1,Z2,... [--schedule geometric|full]
              [--json report.json]
  fixpoints   --family ... [--schedule geometric|full] [--window ...]
              [--size WxH] [--coverage] [--out fix.csv] [--json report.json]
  nevanlinna  --family ... [--member n=5] --a Z|inf [--rmin R] [--rmax R]
              [--per-decade N] [--out table.csv] [--json summary.json]
  verify      [--seed N] [--threads N]
              run the built-in verification suite; exit 0 iff all cases pass

complex numbers are written like 1+2i, 0.5i, -0.3, or inf.
expressions use z, declared index/parameter names, pi, e, i, and
sin cos tan exp log sinh cosh; powers with '^', no implicit multiplication.
)";

// --------------------------------------------------------------------------
// flag plumbing

struct Args {
    std::map<std::string, std::string> flags;
    bool has(const std::string& k) const { return flags.count(k) != 0; }
    std::string get(const std::string& k, const std::string& dflt = "") const {
        auto it = flags.find(k);
        return it == flags.end() ? dflt : it->second;
    }
    std::string require(const std::string& k) const {
        auto it = flags.find(k);
        if (it == flags.end()) throw UsageError("missing required flag --" + k);
        return it->second;
    }
    double get_num(const std::string& k, double dflt) const {
        auto it = flags.find(k);
        if (it == flags.end()) return dflt;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw UsageError("flag --" + k + " wants a number, got '" + it->second + "'");
        }
    }
};

Args parse_args(int argc, char** argv, int start) {
    Args a;
    for (int i = start; i < argc; ++i) {
        std::string tok = argv[i];
        if (tok.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + tok + "'");
        tok = tok.substr(2);
        const auto eq = tok.find('=');
        if (eq != std::string::npos) {
            a.flags[tok.substr(0, eq)] = tok.substr(eq + 1);
        } else if (i + 1 < argc) {
            a.flags[tok] = argv[++i];
        } else {
            a.flags[tok] = "";
        }
    }
    return a;
}

Complex parse_cli_complex(std::string s) {
    s = fatou::detail::trim(s);
    if (s.empty()) throw UsageError("empty complex number");
    if (s == "inf" || s == "+inf") return Complex(std::numeric_limits<double>::infinity(), 0);
    try {
        if (s.back() != 'i') return Complex(std::stod(s), 0);
        s.pop_back();
        // split into real and imaginary parts at the last top-level +/-
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;) {
            if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
                split = k;
                break;
            }
        }
        if (split == std::string::npos) {
            if (s.empty() || s == "+") return Complex(0, 1);
            if (s == "-") return Complex(0, -1);
            return Complex(0, std::stod(s));
        }
        const std::string re = s.substr(0, split);
        std::string im = s.substr(split);
        if (im == "+") im = "1";
        if (im == "-") im = "-1";
        return Complex(std::stod(re), std::stod(im));
    } catch (const std::exception&) {
        throw UsageError("bad complex number '" + s + "' (want forms like 1+2i, 0.5i, -0.3)");
    }
}

std::string format_cli_complex(const Complex& c) {
    return fatou::detail::format_complex_compact(c);
}

FamilySpec family_from_args(const Args& a, const std::string& key = "family") {
    if (a.has(key)) return parse_family(a.get(key));
    if (a.has(key + "-file")) {
        std::ifstream in(a.get(key + "-file"));
        if (!in) throw std::runtime_error("cannot open family file " + a.get(key + "-file"));
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_family(ss.str());
    }
    throw UsageError("need --" + key + " or --" + key + "-file");
}

IndexSchedule schedule_from_args(const Args& a, const FamilySpec& f,
                                 IndexSchedule::Style dflt = IndexSchedule::Style::Geometric) {
    const std::string s =
        a.get("schedule", dflt == IndexSchedule::Style::Geometric ? "geometric" : "full");
    if (s == "geometric") return IndexSchedule::for_family(f, IndexSchedule::Style::Geometric);
    if (s == "full" || s == "consecutive")
        return IndexSchedule::for_family(f, IndexSchedule::Style::Consecutive);
    throw UsageError("bad --schedule '" + s + "' (want geometric or full)");
}

GridSpec grid_from_args(const Args& a) {
    GridSpec g{-2, 2, -2, 2, 256, 256};
    if (a.has("window")) {
        const auto parts = fatou::detail::split_top_level(a.get("window"), ',');
        if (parts.size() != 4) throw UsageError("--window wants re_min,re_max,im_min,im_max");
        g.re_min = std::stod(parts[0]);
        g.re_max = std::stod(parts[1]);
        g.im_min = std::stod(parts[2]);
        g.im_max = std::stod(parts[3]);
    }
    if (a.has("size")) {
        const std::string s = a.get("size");
        const auto x = s.find('x');
        if (x == std::string::npos) throw UsageError("--size wants WxH, e.g. 256x256");
        g.width = std::stoi(s.substr(0, x));
        g.height = std::stoi(s.substr(x + 1));
    }
    g.validate();
    return g;
}

MartyParams marty_from_args(const Args& a) {
    MartyParams p;
    p.probe_radius = a.get_num("probe-radius", -1);  // auto: half a cell width
    p.probe_count = static_cast<int>(a.get_num("probes", p.probe_count));
    p.julia_threshold = a.get_num("tau", p.julia_threshold);
    p.escape_radius = a.get_num("escape-radius", p.escape_radius);
    p.tail_fraction = a.get_num("tail-fraction", p.tail_fraction);
    return p;
}

int threads_from_args(const Args& a) { return static_cast<int>(a.get_num("threads", 0)); }

// Atomic write: temp file in the destination directory, then rename, so a
// crashed run never leaves a truncated artifact behind.
void write_file_atomic(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path dest(path);
    fs::path tmp = dest;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, dest);
}

BoundMember member_from_args(const Args& a, const FamilySpec& f) {
    std::map<std::string, Complex> given;
    if (a.has("member")) {
        for (const auto& part : fatou::detail::split_top_level(a.get("member"), ',')) {
            const auto eq = part.find('=');
            if (eq == std::string::npos) throw UsageError("--member wants name=value pairs");
            given[fatou::detail::trim(part.substr(0, eq))] = parse_cli_complex(part.substr(eq + 1));
        }
    }
    for (std::size_t pi = 0; pi < f.pieces.size(); ++pi) {
        const auto& piece = f.pieces[pi];
        std::vector<std::string> names;
        for (const auto& iv : piece.index_vars) names.push_back(iv.name);
        for (const auto& pv : piece.param_vars) names.push_back(pv.name);
        if (names.size() != given.size()) continue;
        bool all = true;
        for (const auto& n : names) all = all && given.count(n) != 0;
        if (!all) continue;
        BoundMember m;
        m.piece_index = pi;
        m.ast = piece.ast;
        m.program = compile(piece.ast, names);
        std::string id = piece.text + (names.empty() ? "" : "[");
        for (std::size_t k = 0; k < names.size(); ++k) {
            const Complex v = given[names[k]];
            m.slots.push_back(v);
            if (k < piece.index_vars.size()) {
                m.index_positions.push_back(0);
                m.index_values.push_back(static_cast<long long>(v.real()));
            }
            if (k) id += " ";
            id += names[k] + "=" + format_cli_complex(v);
        }
        if (!names.empty()) id += "]";
        m.id = id;
        return m;
    }
    throw UsageError("--member bindings do not match any family piece");
}

// --------------------------------------------------------------------------
// subcommands

void dump_tree(const ExprPtr& e, int depth, std::ostream& os) {
    for (int k = 0; k < depth; ++k) os << "  ";
    switch (e->kind) {
        case NodeKind::Literal: os << "literal " << format(e) << "\n"; return;
        case NodeKind::Variable: os << "var " << e->name << "\n"; return;
        case NodeKind::Negate: os << "neg\n"; break;
        case NodeKind::Add: os << "add\n"; break;
        case NodeKind::Sub: os << "sub\n"; break;
        case NodeKind::Mul: os << "mul\n"; break;
        case NodeKind::Div: os << "div\n"; break;
        case NodeKind::Pow:
            os << "pow" << (e->int_exponent ? " (integer exponent)" : "") << "\n";
            break;
        case NodeKind::Call: os << func_name(e->func) << "\n"; break;
    }
    if (e->lhs) dump_tree(e->lhs, depth + 1, os);
    if (e->rhs) dump_tree(e->rhs, depth + 1, os);
}

int cmd_parse(const Args& a) {
    std::set<std::string> vars{"z"};
    if (a.has("vars"))
        for (const auto& v : fatou::detail::split_top_level(a.get("vars"), ','))
            vars.insert(fatou::detail::trim(v));
    const ExprPtr ast = parse_expression(a.require("expr"), vars);
    std::cout << format(ast) << "\n";
    dump_tree(ast, 0, std::cout);
    return 0;
}

int cmd_eval(const Args& a) {
    const FamilySpec f = family_from_args(a);
    const BoundMember m = member_from_args(a, f);
    const Complex z = parse_cli_complex(a.require("at"));
    const Jet j = m.jet(z);
    std::cout << m.id << " at z=" << format_cli_complex(z) << "\n";
    std::cout << "value      " << format_cli_complex(j.v) << "\n";
    std::cout << "derivative " << format_cli_complex(j.d) << "\n";
    return 0;
}

int cmd_classify(const Args& a) {
    const FamilySpec f = family_from_args(a);
    const auto s = schedule_from_args(a, f);
    const GridSpec g = grid_from_args(a);
    const auto raster = classify_grid(f, s, g, marty_from_args(a), threads_from_args(a));
    if (a.has("out")) write_file_atomic(a.get("out"), emit_pgm(raster));
    if (a.has("csv")) write_file_atomic(a.get("csv"), emit_csv(raster));
    if (a.has("json")) write_file_atomic(a.get("json"), emit_json(raster));
    long long hist[4] = {};
    for (const auto& c : raster.cells) ++hist[static_cast<int>(c.label)];
    std::cout << "JuliaLike " << hist[0] << "  FatouBounded " << hist[1] << "  FatouEscaping "
              << hist[2] << "  Undetermined " << hist[3] << "  (" << raster.timing_seconds
              << " s)\n";
    return 0;
}

int cmd_union_check(const Args& a) {
    const FamilySpec fa = family_from_args(a, "family-a");
    const FamilySpec fb = family_from_args(a, "family-b");
    const GridSpec g = grid_from_args(a);
    const MartyParams p = marty_from_args(a);
    const int threads = threads_from_args(a);
    const auto ra = classify_grid(fa, schedule_from_args(a, fa), g, p, threads);
    const auto rb = classify_grid(fb, schedule_from_args(a, fb), g, p, threads);
    const auto cellwise = raster_union(ra, rb);
    const FamilySpec fu = family_union(fa, fb);
    const auto direct = classify_grid(fu, schedule_from_args(a, fu), g, p, threads);
    const RasterDiff diff = compare(cellwise, direct);
    long long subset_violations = 0;
    for (std::size_t k = 0; k < direct.cells.size(); ++k)
        subset_violations += (cellwise.cells[k].label == Label::JuliaLike &&
                              direct.cells[k].label != Label::JuliaLike)
                                 ? 1
                                 : 0;
    if (a.has("out-prefix")) {
        const std::string pre = a.get("out-prefix");
        write_file_atomic(pre + "-a.pgm", emit_pgm(ra));
        write_file_atomic(pre + "-b.pgm", emit_pgm(rb));
        write_file_atomic(pre + "-union.pgm", emit_pgm(cellwise));
        write_file_atomic(pre + "-direct.pgm", emit_pgm(direct));
    }
    nlohmann::ordered_json j;
    j["symmetric_difference"] = diff.symmetric_difference_count;
    j["symmetric_difference_percent"] = 100.0 *
                                        static_cast<double>(diff.symmetric_difference_count) /
                                        static_cast<double>(direct.cells.size());
    j["hausdorff_julia_cells"] = diff.hausdorff_julia;
    j["subset_violations"] = subset_violations;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_orbit(const Args& a) {
    const FamilySpec f = family_from_args(a);
    const auto s = schedule_from_args(a, f, IndexSchedule::Style::Consecutive);
    const Complex target = parse_cli_complex(a.require("target"));
    const auto orbit = backward_orbit(f, target, s);
    std::string csv = "re,im,member,residual\n";
    char buf[160];
    for (const auto& p : orbit.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", p.preimage.real(), p.preimage.imag());
        csv += buf;
        csv += p.member;
        std::snprintf(buf, sizeof(buf), ",%.17g\n", p.residual);
        csv += buf;
    }
    if (a.has("out")) write_file_atomic(a.get("out"), csv);
    nlohmann::ordered_json j;
    j["target"] = format_cli_complex(target);
    j["points"] = orbit.points.size();
    j["complete"] = orbit.complete;
    j["warnings"] = orbit.warnings;
    if (a.has("coverage")) {
        const GridSpec g = grid_from_args(a);
        const auto raster = classify_grid(f, schedule_from_args(a, f), g, marty_from_args(a),
                                          threads_from_args(a));
        j["coverage_cells"] = coverage_distance(orbit, raster);
    }
    if (a.has("json")) write_file_atomic(a.get("json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    for (const auto& w : orbit.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_except(const Args& a) {
    const FamilySpec f = family_from_args(a);
    const auto s = schedule_from_args(a, f);
    std::vector<Complex> targets;
    for (const auto& part : fatou::detail::split_top_level(a.require("targets"), ','))
        targets.push_back(parse_cli_complex(part));
    const auto rep = exceptional_probe(f, targets, s);
    nlohmann::ordered_json j;
    j["targets"] = nlohmann::ordered_json::array();
    for (const auto& row : rep.targets) {
        nlohmann::ordered_json t;
        t["target"] = format_cli_complex(row.target);
        t["counts_per_prefix"] = row.counts_per_prefix;
        t["verdict"] =
            row.verdict == OrbitVerdict::FiniteCandidate ? "FiniteCandidate" : "Growing";
        j["targets"].push_back(t);
    }
    j["finite_candidates"] = rep.finite_candidates();
    if (a.has("json")) write_file_atomic(a.get("json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_fixpoints(const Args& a) {
    const FamilySpec f = family_from_args(a);
    const auto s = schedule_from_args(a, f, IndexSchedule::Style::Consecutive);
    const GridSpec g = grid_from_args(a);
    ClassificationRaster raster;
    if (a.has("coverage")) {
        raster = classify_grid(f, schedule_from_args(a, f), g, marty_from_args(a),
                               threads_from_args(a));
    } else {
        raster.grid = g;
        raster.cells.assign(static_cast<std::size_t>(g.width) * g.height,
                            PointClassification{Label::Undetermined, 0, ""});
    }
    const auto rep = repelling_sweep(f, s, raster);
    std::string csv = "re,im,mult_re,mult_im,class,P,Q\n";
    char buf[256];
    for (const auto& r : rep.records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,", r.location.real(),
                      r.location.imag(), r.multiplier.real(), r.multiplier.imag());
        csv += buf;
        csv += multiplier_class_name(r.classification);
        csv += ",";
        csv += r.outer_id;
        csv += ",";
        csv += r.inner_id;
        csv += "\n";
    }
    if (a.has("out")) write_file_atomic(a.get("out"), csv);
    nlohmann::ordered_json j;
    j["pairs"] = rep.pairs;
    j["fixed_points"] = rep.records.size();
    j["repelling_points"] = rep.repelling_points.size();
    if (a.has("coverage")) j["coverage_cells"] = rep.coverage;
    j["skipped_pieces"] = rep.skipped_pieces;
    j["hypothesis_samples"] = rep.hypothesis_samples;
    j["hypothesis_ok"] = rep.hypothesis_ok;
    if (a.has("json")) write_file_atomic(a.get("json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_nevanlinna(const Args& a) {
    const FamilySpec f = family_from_args(a);
    const BoundMember m = member_from_args(a, f);
    const Complex target = parse_cli_complex(a.get("a", "0"));
    const double rmin = a.get_num("rmin", 1.0);
    const double rmax = a.get_num("rmax", 1e4);
    const int per_decade = static_cast<int>(a.get_num("per-decade", 9));
    const auto rs = RadiusSchedule::log_spaced(rmin, rmax, per_decade);
    CountingOptions copt;
    copt.step_radii = rs.radii;
    const auto rep = nevanlinna_report(m, target, rs, {}, copt);
    std::string csv = "r,m_a,N_a,Nbar_a,T,ratio_delta,ratio_theta\n";
    char buf[256];
    for (const auto& row : rep.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.r,
                      row.m_a, row.N_a, row.Nbar_a, row.T, row.ratio_delta, row.ratio_theta);
        csv += buf;
    }
    if (a.has("out")) write_file_atomic(a.get("out"), csv);
    nlohmann::ordered_json j;
    j["member"] = m.id;
    j["a"] = format_cli_complex(target);
    j["delta_hat"] = rep.delta_hat;
    j["theta_hat"] = rep.theta_hat;
    j["theta_below_half"] = rep.theta_below_half;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : rep.rows)
        rows.push_back({{"r", row.r}, {"T", row.T}, {"log_max_modulus", row.log_max_modulus}});
    j["growth"] = rows;
    if (a.has("json")) write_file_atomic(a.get("json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const Args& a) {
    verify::Options opt;
    opt.seed = static_cast<unsigned>(a.get_num("seed", 0));
    opt.threads = threads_from_args(a);
    const auto suite = verify::run_all(opt);
    verify::print_report(suite, std::cout);
    return suite.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << kUsage;
        return 2;
    }
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        std::cout << kUsage;
        return 0;
    }
    try {
        const Args args = parse_args(argc, argv, 2);
        if (cmd == "parse") return cmd_parse(args);
        if (cmd == "eval") return cmd_eval(args);
        if (cmd == "classify") return cmd_classify(args);
        if (cmd == "union-check") return cmd_union_check(args);
        if (cmd == "orbit") return cmd_orbit(args);
        if (cmd == "except") return cmd_except(args);
        if (cmd == "fixpoints") return cmd_fixpoints(args);
        if (cmd == "nevanlinna") return cmd_nevanlinna(args);
        if (cmd == "verify") return cmd_verify(args);
        throw UsageError("unknown command '" + cmd + "'");
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << kUsage;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
