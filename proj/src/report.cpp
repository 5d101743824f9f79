#include "bootperc/report.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bootperc/asymptotics.hpp"
#include "bootperc/error.hpp"

namespace bootperc {
namespace {

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io_error, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(ErrorKind::io_error, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::io_error, "cannot rename onto " + path);
    }
}

Rgb generation_colour(std::int32_t time, std::int32_t max_time) {
    if (time == InfectionField::never) return {};
    const double t = max_time > 0 ? static_cast<double>(time) / max_time : 0.0;
    const auto level = [](double v) { return static_cast<std::uint8_t>(std::lround(255.0 * v)); };
    return {level(t), 0, level(1.0 - t)};
}

InfectionRender render_infection(int L, double p, const NeighbourhoodRule& rule, std::uint64_t seed) {
    if (L <= 0 || L > 4096) fail(ErrorKind::invalid_parameter, "render needs 1 <= L <= 4096");
    InfectionRender r;
    r.L = L;
    r.p = p;
    r.seed = seed;
    r.seeds = sample_seeds(seed, 0, L, L, p);
    r.result = closure(r.seeds, rule);
    return r;
}

std::string to_svg(const InfectionRender& render, int cell_px) {
    const auto& times = render.result.times;
    const std::int32_t tmax = times.max_time();
    const int L = render.L;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << L * cell_px << "\" height=\"" << L * cell_px
       << "\" shape-rendering=\"crispEdges\">\n";
    os << "<desc>L=" << L << " p=" << number(render.p) << " seed=" << render.seed << " generations=" << tmax
       << " colormap: " << colormap_note << "</desc>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    // Row y = 0 is drawn at the bottom.
    for (int y = 0; y < L; ++y) {
        const int py = (L - 1 - y) * cell_px;
        int x = 0;
        while (x < L) {
            const std::int32_t t = times.at(x, y);
            int run = 1;
            while (x + run < L && times.at(x + run, y) == t) ++run;
            if (t != InfectionField::never)
                os << "<rect x=\"" << x * cell_px << "\" y=\"" << py << "\" width=\"" << run * cell_px
                   << "\" height=\"" << cell_px << "\" fill=\"" << hex(generation_colour(t, tmax)) << "\"/>\n";
            x += run;
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string to_png(const InfectionRender& render, int cell_px) {
    const auto& times = render.result.times;
    const std::int32_t tmax = times.max_time();
    const int side = render.L * cell_px;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(ErrorKind::io_error, "png writer unavailable");
    png_infop info = png_create_info_struct(png);
    std::string out;
    std::vector<png_byte> row(static_cast<std::size_t>(side) * 3);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::io_error, "png encoding failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t n) {
            static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), n);
        },
        nullptr);
    png_set_IHDR(png, info, side, side, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_text text{};
    text.compression = PNG_TEXT_COMPRESSION_NONE;
    text.key = const_cast<char*>("Comment");
    text.text = const_cast<char*>(colormap_note);
    png_set_text(png, info, &text, 1);
    png_write_info(png, info);
    for (int py = 0; py < side; ++py) {
        const int y = render.L - 1 - py / cell_px;
        for (int px = 0; px < side; ++px) {
            const Rgb c = generation_colour(times.at(px / cell_px, y), tmax);
            row[3 * px] = c.r;
            row[3 * px + 1] = c.g;
            row[3 * px + 2] = c.b;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_render(const InfectionRender& render, const std::string& path, int cell_px) {
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".png")
        write_file_atomic(path, to_png(render, cell_px));
    else if (ext == ".svg")
        write_file_atomic(path, to_svg(render, cell_px));
    else
        fail(ErrorKind::invalid_parameter, "render output must end in .svg or .png");
}

std::vector<StableRegion> stable_regions(const Grid& grid, const NeighbourhoodRule& rule) {
    const int w = grid.width(), h = grid.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<StableRegion> regions;
    std::vector<Cell> stack;
    for (int y0 = 0; y0 < h; ++y0)
        for (int x0 = 0; x0 < w; ++x0) {
            if (!grid.get(x0, y0) || label[static_cast<std::size_t>(y0) * w + x0] >= 0) continue;
            const int id = static_cast<int>(regions.size());
            StableRegion region;
            region.bbox = Rect(x0, y0, x0, y0);
            stack.assign(1, {x0, y0});
            label[static_cast<std::size_t>(y0) * w + x0] = id;
            while (!stack.empty()) {
                const Cell c = stack.back();
                stack.pop_back();
                region.cells.push_back(c);
                region.bbox = Rect(std::min(region.bbox.x0, c.x), std::min(region.bbox.y0, c.y),
                                   std::max(region.bbox.x1, c.x), std::max(region.bbox.y1, c.y));
                for (const Offset o : {Offset{1, 0}, Offset{-1, 0}, Offset{0, 1}, Offset{0, -1}}) {
                    const int x = c.x + o.dx, y = c.y + o.dy;
                    if (!grid.in_bounds(x, y) || !grid.get(x, y)) continue;
                    int& l = label[static_cast<std::size_t>(y) * w + x];
                    if (l < 0) {
                        l = id;
                        stack.push_back({x, y});
                    }
                }
            }
            std::sort(region.cells.begin(), region.cells.end(),
                      [](Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
            region.rectangular = static_cast<long long>(region.cells.size()) == region.bbox.area();
            const Grid alone = grid_from_cells(w, h, region.cells);
            region.closed = closure_grid(alone, rule) == alone;
            regions.push_back(std::move(region));
        }
    return regions;
}

bool ComparisonReport::measured_decreasing() const {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].measured.p_c < rows[i - 1].measured.p_c)) return false;
    return !rows.empty();
}

bool ComparisonReport::far_from_all_approximations() const {
    for (const auto& r : rows) {
        const double m = r.measured.p_c;
        for (double a : {r.first, r.first_two, r.three})
            if (!(std::abs(a - m) >= far_relative_gap * m)) return false;
    }
    return !rows.empty();
}

std::string ComparisonReport::to_csv() const {
    std::ostringstream os;
    os << "L,logL,measured_pc,bracket_lo,bracket_hi,budget_exhausted,first_term,two_term,three_term,inverted\n";
    for (const auto& r : rows)
        os << r.L << ',' << number(r.logL) << ',' << number(r.measured.p_c) << ',' << number(r.measured.lo) << ','
           << number(r.measured.hi) << ',' << (r.measured.budget_exhausted ? 1 : 0) << ',' << number(r.first) << ','
           << number(r.first_two) << ',' << number(r.three) << ',' << number(r.inverted) << '\n';
    return os.str();
}

std::string ComparisonReport::to_svg() const {
    const int width = 640, height = 400, margin = 50;
    double lo = 0.0, hi = 0.0;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    for (const auto& r : rows) {
        for (double v : {r.measured.p_c, r.first, r.first_two, r.three, r.inverted})
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        xmin = std::min(xmin, r.logL);
        xmax = std::max(xmax, r.logL);
    }
    if (hi <= lo) hi = lo + 1.0;
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    const auto sx = [&](double v) { return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin); };
    const auto sy = [&](double v) { return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin); };
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << sy(0.0) << "\" x2=\"" << width - margin << "\" y2=\"" << sy(0.0)
       << "\" stroke=\"#999999\"/>\n";
    struct Series {
        const char* name;
        const char* colour;
        double ComparisonRow::*value;
    };
    const Series series[] = {{"first term", "#1f77b4", &ComparisonRow::first},
                             {"two terms", "#ff7f0e", &ComparisonRow::first_two},
                             {"three terms", "#2ca02c", &ComparisonRow::three},
                             {"inverted", "#9467bd", &ComparisonRow::inverted}};
    int legend = 0;
    auto legend_entry = [&](const char* name, const char* colour) {
        os << "<text x=\"" << width - margin - 120 << "\" y=\"" << margin + 16 * legend++ << "\" fill=\"" << colour
           << "\" font-size=\"12\">" << name << "</text>\n";
    };
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" points=\"";
        for (const auto& r : rows)
            if (std::isfinite(r.*s.value)) os << sx(r.logL) << ',' << sy(r.*s.value) << ' ';
        os << "\"/>\n";
        legend_entry(s.name, s.colour);
    }
    os << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) os << sx(r.logL) << ',' << sy(r.measured.p_c) << ' ';
    os << "\"/>\n";
    for (const auto& r : rows)
        os << "<circle cx=\"" << sx(r.logL) << "\" cy=\"" << sy(r.measured.p_c) << "\" r=\"3\" fill=\"#d62728\"/>\n"
           << "<text x=\"" << sx(r.logL) << "\" y=\"" << height - margin + 16 << "\" font-size=\"11\">L=" << r.L
           << "</text>\n";
    legend_entry("measured", "#d62728");
    os << "<text x=\"" << margin << "\" y=\"" << margin - 20 << "\" font-size=\"12\">p_c against ln L</text>\n";
    os << "</svg>\n";
    return os.str();
}

ComparisonReport comparison_report(const std::vector<int>& L_list, const PcSearch& search) {
    ComparisonReport report;
    for (int L : L_list) {
        if (L < 2 || L > 10000) fail(ErrorKind::invalid_parameter, "comparison needs 2 <= L <= 10000");
        ComparisonRow row;
        row.L = L;
        row.logL = std::log(static_cast<double>(L));
        PcSearch s = search;
        s.L = L;
        row.measured = find_pc(s);
        const ThresholdTerms t = pc_terms(row.logL);
        row.first = t.first;
        row.first_two = t.first + t.second;
        row.three = t.total();
        try {
            row.inverted = invert_pc(row.logL);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::no_convergence && e.kind() != ErrorKind::domain_error) throw;
            row.inverted = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(row);
    }
    return report;
}

std::string paradox_csv() {
    std::ostringstream os;
    os << "crossover,t,log10_L,log10_log10_L\n";
    for (const Crossover& c : paradox_crossovers().all())
        os << c.name << ',' << number(c.t) << ',' << number(c.log10_L) << ',' << number(c.log10_log10_L) << '\n';
    return os.str();
}

}  // namespace bootperc
