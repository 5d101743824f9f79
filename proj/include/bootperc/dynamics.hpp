#pragma once

#include <cstdint>
#include <vector>

#include "bootperc/grid.hpp"
#include "bootperc/rule.hpp"

namespace bootperc {

// One synchronous application of the bootstrap operator.
Grid bootstrap_step(const Grid& grid, const NeighbourhoodRule& rule);

struct ClosureResult {
    Grid grid;
    InfectionField times;
    int generations = 0;  // last generation that infected a site
};

ClosureResult closure(const Grid& grid, const NeighbourhoodRule& rule);
Grid closure_grid(const Grid& grid, const NeighbourhoodRule& rule);

// Frontier-queue closure with reusable buffers. One engine per thread.
class ClosureEngine {
public:
    explicit ClosureEngine(NeighbourhoodRule rule);

    // Replaces `grid` by its closure. Returns the number of generations.
    int run(Grid& grid, InfectionField* times = nullptr);

    const NeighbourhoodRule& rule() const { return rule_; }

private:
    NeighbourhoodRule rule_;
    std::vector<std::uint8_t> state_;
    std::vector<std::uint8_t> count_;
    std::vector<std::uint32_t> current_;
    std::vector<std::uint32_t> next_;
};

using CellMask = unsigned __int128;

// Bounded lattice of at most 128 sites stored in a single mask, bit y*width+x.
class SmallLattice {
public:
    static constexpr int max_sites = 128;

    SmallLattice(int width, int height, const NeighbourhoodRule& rule);

    int width() const { return width_; }
    int height() const { return height_; }
    int sites() const { return width_ * height_; }

    CellMask bit(int x, int y) const { return CellMask{1} << (y * width_ + x); }
    CellMask all() const { return all_; }
    CellMask row_mask(int y) const { return row_ << (y * width_); }
    CellMask rect_mask(const Rect& r) const;

    CellMask step(CellMask s) const;
    CellMask closure(CellMask s) const;

private:
    struct Term {
        int shift;  // positive: bit i reads bit i + shift
        CellMask valid;
    };

    int width_;
    int height_;
    int threshold_;
    int planes_;
    CellMask all_;
    CellMask row_;
    std::vector<Term> terms_;
};

int popcount(CellMask m);

}  // namespace bootperc
