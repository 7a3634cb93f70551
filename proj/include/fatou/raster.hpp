#pragma once

// Grid classification sweep and raster-level checks.  Cells are classified
// independently, so the sweep may run on any number of threads; output is
// assembled by cell index and is identical for every thread count.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

#include "fatou/marty.hpp"

#include "json.hpp"

namespace fatou {

struct GridSpec {
    double re_min = -2, re_max = 2, im_min = -2, im_max = 2;
    int width = 256, height = 256;

    void validate() const {
        if (!(re_min < re_max) || !(im_min < im_max) || width < 2 || height < 2)
            throw std::invalid_argument("GridSpec: need re_min<re_max, im_min<im_max, size >= 2x2");
    }
    double cell_width() const { return (re_max - re_min) / width; }
    double cell_height() const { return (im_max - im_min) / height; }
    Complex center(int ix, int iy) const {
        return {re_min + (ix + 0.5) * cell_width(), im_min + (iy + 0.5) * cell_height()};
    }
    bool operator==(const GridSpec& o) const {
        return re_min == o.re_min && re_max == o.re_max && im_min == o.im_min &&
               im_max == o.im_max && width == o.width && height == o.height;
    }
};

struct ClassificationRaster {
    GridSpec grid;
    std::vector<PointClassification> cells;  // row-major, iy*width+ix, iy=0 at im_min
    std::string family_text;
    IndexSchedule schedule;
    MartyParams params;
    double timing_seconds = 0;

    const PointClassification& at(int ix, int iy) const { return cells[iy * grid.width + ix]; }
    long long schedule_max() const {
        long long m = 0;
        for (const auto& [name, vals] : schedule.values)
            for (long long v : vals) m = std::max(m, v);
        return m;
    }
};

inline ClassificationRaster classify_grid(const FamilySpec& f, const IndexSchedule& s,
                                          const GridSpec& g, MartyParams p, int threads = 0) {
    g.validate();
    if (p.probe_radius <= 0) p.probe_radius = 0.5 * g.cell_width();
    p.validate();
    f.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const auto members = enumerate_members(f, s);
    const auto views = detail::member_views(f, members, s, p.tail_fraction);

    ClassificationRaster raster;
    raster.grid = g;
    raster.cells.resize(static_cast<std::size_t>(g.width) * g.height);
    raster.family_text = format_family(f);
    raster.schedule = s;
    raster.params = p;

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    std::atomic<int> next_row{0};
    auto worker = [&]() {
        for (;;) {
            const int iy = next_row.fetch_add(1);
            if (iy >= g.height) return;
            for (int ix = 0; ix < g.width; ++ix) {
                const Complex z0 = g.center(ix, iy);
                PointClassification& cell = raster.cells[static_cast<std::size_t>(iy) * g.width + ix];
                if (f.domain_clip && !f.domain_clip->contains(z0)) {
                    cell = PointClassification{Label::Undetermined, 0.0, ""};
                    continue;
                }
                cell = detail::classify_with_members(views, z0, p);
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    raster.timing_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return raster;
}

// Cell-wise union: Julia wins; Escaping only when both escape; Undetermined
// taints; score is the max of the two scores.
inline ClassificationRaster raster_union(const ClassificationRaster& a,
                                         const ClassificationRaster& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("raster_union: grid mismatch");
    ClassificationRaster out = a;
    out.family_text = a.family_text + b.family_text;
    out.timing_seconds = a.timing_seconds + b.timing_seconds;
    for (std::size_t k = 0; k < out.cells.size(); ++k) {
        const auto& ca = a.cells[k];
        const auto& cb = b.cells[k];
        PointClassification& c = out.cells[k];
        c.score = std::max(ca.score, cb.score);
        c.witness = ca.score >= cb.score ? ca.witness : cb.witness;
        if (ca.label == Label::JuliaLike || cb.label == Label::JuliaLike)
            c.label = Label::JuliaLike;
        else if (ca.label == Label::Undetermined || cb.label == Label::Undetermined)
            c.label = Label::Undetermined;
        else if (ca.label == Label::FatouEscaping && cb.label == Label::FatouEscaping)
            c.label = Label::FatouEscaping;
        else
            c.label = Label::FatouBounded;
    }
    return out;
}

struct RasterDiff {
    long long symmetric_difference_count = 0;
    double hausdorff_julia = 0;  // cell widths; -1 when exactly one mask is empty
    long long confusion[4][4] = {};
};

namespace detail {

inline std::vector<Complex> julia_centers(const ClassificationRaster& r) {
    std::vector<Complex> pts;
    for (int iy = 0; iy < r.grid.height; ++iy)
        for (int ix = 0; ix < r.grid.width; ++ix)
            if (r.at(ix, iy).label == Label::JuliaLike) pts.push_back(r.grid.center(ix, iy));
    return pts;
}

inline double directed_hausdorff(const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double h = 0;
    for (const Complex& a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& b : to) best = std::min(best, std::norm(a - b));
        h = std::max(h, best);
    }
    return std::sqrt(h);
}

}  // namespace detail

inline RasterDiff compare(const ClassificationRaster& a, const ClassificationRaster& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("compare: grid mismatch");
    RasterDiff d;
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
        const bool ja = a.cells[k].label == Label::JuliaLike;
        const bool jb = b.cells[k].label == Label::JuliaLike;
        if (ja != jb) ++d.symmetric_difference_count;
        ++d.confusion[static_cast<int>(a.cells[k].label)][static_cast<int>(b.cells[k].label)];
    }
    const auto pa = detail::julia_centers(a);
    const auto pb = detail::julia_centers(b);
    if (pa.empty() && pb.empty()) {
        d.hausdorff_julia = 0;
    } else if (pa.empty() || pb.empty()) {
        d.hausdorff_julia = -1;
    } else {
        const double h = std::max(detail::directed_hausdorff(pa, pb),
                                  detail::directed_hausdorff(pb, pa));
        d.hausdorff_julia = h / a.grid.cell_width();
    }
    return d;
}

struct ComponentReport {
    struct Component {
        long long size = 0;
        long long escaping = 0;
        double escaping_fraction() const {
            return size ? static_cast<double>(escaping) / static_cast<double>(size) : 0.0;
        }
        bool pure() const { return escaping == 0 || escaping == size; }
    };
    std::vector<Component> components;
    long long mixed_count() const {
        long long n = 0;
        for (const auto& c : components) n += c.pure() ? 0 : 1;
        return n;
    }
};

// 4-connected components of Fatou-labeled cells (Julia and Undetermined cells
// are excluded), with the fraction of escaping labels per component.
inline ComponentReport component_purity(const ClassificationRaster& r) {
    const int w = r.grid.width, h = r.grid.height;
    std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
    ComponentReport report;
    std::vector<int> stack;
    for (int start = 0; start < w * h; ++start) {
        const Label l0 = r.cells[start].label;
        if (comp[start] >= 0 || (l0 != Label::FatouBounded && l0 != Label::FatouEscaping)) continue;
        const int id = static_cast<int>(report.components.size());
        report.components.emplace_back();
        stack.push_back(start);
        comp[start] = id;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            auto& info = report.components[id];
            ++info.size;
            if (r.cells[c].label == Label::FatouEscaping) ++info.escaping;
            const int ix = c % w, iy = c / w;
            const int nb[4] = {c - 1, c + 1, c - w, c + w};
            const bool ok[4] = {ix > 0, ix + 1 < w, iy > 0, iy + 1 < h};
            for (int k = 0; k < 4; ++k) {
                if (!ok[k] || comp[nb[k]] >= 0) continue;
                const Label l = r.cells[nb[k]].label;
                if (l != Label::FatouBounded && l != Label::FatouEscaping) continue;
                comp[nb[k]] = id;
                stack.push_back(nb[k]);
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Output formats.

inline std::uint8_t label_gray(Label l) {
    switch (l) {
        case Label::JuliaLike: return 0;
        case Label::Undetermined: return 128;
        case Label::FatouEscaping: return 200;
        case Label::FatouBounded: return 255;
    }
    return 128;
}

// PGM P5, row 0 at im_max, byte-exact for identical inputs.
inline std::string emit_pgm(const ClassificationRaster& r) {
    std::string out = "P5\n" + std::to_string(r.grid.width) + " " +
                      std::to_string(r.grid.height) + "\n255\n";
    out.reserve(out.size() + r.cells.size());
    for (int iy = r.grid.height - 1; iy >= 0; --iy)
        for (int ix = 0; ix < r.grid.width; ++ix)
            out.push_back(static_cast<char>(label_gray(r.at(ix, iy).label)));
    return out;
}

inline std::string emit_csv(const ClassificationRaster& r) {
    std::string out = "re,im,label,score,witness\n";
    char buf[128];
    for (int iy = r.grid.height - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < r.grid.width; ++ix) {
            const auto& c = r.at(ix, iy);
            const Complex z = r.grid.center(ix, iy);
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", z.real(), z.imag());
            out += buf;
            out += label_name(c.label);
            std::snprintf(buf, sizeof(buf), ",%.17g,", c.score);
            out += buf;
            out += c.witness;
            out += "\n";
        }
    }
    return out;
}

inline nlohmann::ordered_json raster_report(const ClassificationRaster& r) {
    nlohmann::ordered_json j;
    j["grid"] = {{"re_min", r.grid.re_min}, {"re_max", r.grid.re_max},
                 {"im_min", r.grid.im_min}, {"im_max", r.grid.im_max},
                 {"width", r.grid.width},   {"height", r.grid.height}};
    j["family"] = r.family_text;
    nlohmann::ordered_json sched;
    sched["n_max"] = r.schedule_max();
    for (const auto& [name, vals] : r.schedule.values) sched["vars"][name] = vals;
    j["schedule"] = sched;
    j["params"] = {{"probe_radius", r.params.probe_radius},
                   {"probe_count", r.params.probe_count},
                   {"julia_threshold", r.params.julia_threshold},
                   {"escape_radius", r.params.escape_radius},
                   {"tail_fraction", r.params.tail_fraction}};
    long long hist[4] = {};
    for (const auto& c : r.cells) ++hist[static_cast<int>(c.label)];
    j["histogram"] = {{"JuliaLike", hist[0]},
                      {"FatouBounded", hist[1]},
                      {"FatouEscaping", hist[2]},
                      {"Undetermined", hist[3]}};
    j["timing"] = {{"seconds", r.timing_seconds}};
    return j;
}

inline std::string emit_json(const ClassificationRaster& r) { return raster_report(r).dump(2) + "\n"; }

enum class EmitFormat { Pgm, Csv, Json };

inline std::string emit(const ClassificationRaster& r, EmitFormat f) {
    switch (f) {
        case EmitFormat::Pgm: return emit_pgm(r);
        case EmitFormat::Csv: return emit_csv(r);
        case EmitFormat::Json: return emit_json(r);
    }
    return "";
}

}  // namespace fatou
