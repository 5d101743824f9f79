#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bootperc/events.hpp"
#include "bootperc/grid.hpp"
#include "bootperc/rule.hpp"

namespace bootperc {

// A finite cell set up to translation. The representative has its
// lowest-then-leftmost cell at the origin.
class ShapeClass {
public:
    ShapeClass() = default;
    explicit ShapeClass(std::vector<Cell> cells);

    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    int rows() const;
    int span() const;  // max x - min x + 1
    ShapeClass mirrored() const;
    std::vector<Cell> placed(int x, int y) const;

    auto operator<=>(const ShapeClass&) const = default;

private:
    std::vector<Cell> cells_;
};

std::string to_json(const std::set<ShapeClass>& shapes);

// Rectangle [x] x [y] under the (1,2) rule, from column run lengths.
double hor_trav_prob_exact(int x, int y, double p);
// Same recursion without the rightmost-column condition: no three
// consecutive empty columns anywhere.
double empty_triple_free_prob(int x, int y, double p);

// Number of seed sets of each size for which the event holds.
struct EventPolynomial {
    int sites = 0;
    std::vector<std::uint64_t> counts;  // counts[k]: sets of size k
    double evaluate(double p) const;
};

constexpr int exhaustive_site_cap = 24;

EventPolynomial event_polynomial(int width, int height, EventKind event,
                                 const NeighbourhoodRule& rule = anisotropic_rule(2),
                                 unsigned workers = 1);
double event_prob_exhaustive(const Rect& rect, double p, EventKind event,
                             const NeighbourhoodRule& rule = anisotropic_rule(2), unsigned workers = 1);

// Two-site sets that, with the row below fully infected, fill the row.
// width 0 selects 4b+9.
std::set<ShapeClass> enumerate_spanning_pairs(const NeighbourhoodRule& rule, int width = 0);

struct GrowthConfigs {
    std::uint64_t count = 0;
    std::set<ShapeClass> shapes;
};
GrowthConfigs enumerate_growth_configs(int b);

// Minimal sets in a two-row window whose closure, without help from below,
// contains a spanning pair for the lower row.
std::set<ShapeClass> enumerate_infectors(int rows, int window_halfwidth = 6, int max_cardinality = 5);

// Detects translates of the (1,2) spanning pairs for a given row.
class PairDetector {
public:
    PairDetector();
    explicit PairDetector(std::set<ShapeClass> shapes);

    // First pair (scan order: shape, then column) with base row `row` and
    // both cells infected and inside `bounds`.
    std::optional<std::array<Cell, 2>> find(const Grid& infected, int row, const Rect& bounds) const;
    bool spans(const Grid& infected, int row, const Rect& bounds) const {
        return find(infected, row, bounds).has_value();
    }
    const std::set<ShapeClass>& shapes() const { return shapes_; }

private:
    std::set<ShapeClass> shapes_;
};

std::vector<Cell> minimal_up_traversable_subset(const Rect& rect, const Grid& seeds);

struct RowPair {
    int row = 0;
    std::array<Cell, 2> cells{};
    bool created_later = false;  // some cell was not in the minimal set
};

struct SpanningReport {
    int tau = 0;
    std::vector<Cell> minimal_set;
    std::vector<RowPair> per_row_pairs;
};

SpanningReport spanning_time(const Rect& rect, const Grid& seeds);

std::vector<std::vector<Cell>> decompose_paths(const std::vector<Cell>& minimal_set, const Rect& rect);

}  // namespace bootperc
