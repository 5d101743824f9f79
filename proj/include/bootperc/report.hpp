#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bootperc/dynamics.hpp"
#include "bootperc/grid.hpp"
#include "bootperc/mc.hpp"
#include "bootperc/rule.hpp"

namespace bootperc {

// Replaces `path` by `content` through a sibling temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

struct Rgb {
    std::uint8_t r = 255, g = 255, b = 255;
    bool operator==(const Rgb&) const = default;
};

// Linear blue (generation 0) to red (generation max_time); white if never infected.
Rgb generation_colour(std::int32_t time, std::int32_t max_time);
constexpr const char* colormap_note =
    "linear blue(first generation) to red(last generation); never infected = white";

struct InfectionRender {
    int L = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    Grid seeds;
    ClosureResult result;
};

InfectionRender render_infection(int L, double p, const NeighbourhoodRule& rule, std::uint64_t seed);

std::string to_svg(const InfectionRender& render, int cell_px = 3);
std::string to_png(const InfectionRender& render, int cell_px = 3);
// Writes SVG or PNG according to the path's extension.
void write_render(const InfectionRender& render, const std::string& path, int cell_px = 3);

struct StableRegion {
    std::vector<Cell> cells;
    Rect bbox;
    bool rectangular = false;
    bool closed = false;  // equal to the closure of itself alone
};

// Edge-connected components of infected sites.
std::vector<StableRegion> stable_regions(const Grid& grid, const NeighbourhoodRule& rule);

struct ComparisonRow {
    int L = 0;
    double logL = 0.0;
    PcResult measured;
    double first = 0.0;
    double first_two = 0.0;
    double three = 0.0;
    double inverted = 0.0;  // NaN when the fixed point does not converge
};

// Relative gap at which a measurement counts as far from an approximation.
constexpr double far_relative_gap = 0.15;

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    bool measured_decreasing() const;
    bool far_from_all_approximations() const;
    std::string to_csv() const;
    std::string to_svg() const;
};

ComparisonReport comparison_report(const std::vector<int>& L_list, const PcSearch& search);

std::string paradox_csv();

}  // namespace bootperc
