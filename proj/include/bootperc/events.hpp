#pragma once

#include <string>

#include "bootperc/dynamics.hpp"
#include "bootperc/grid.hpp"
#include "bootperc/rule.hpp"

namespace bootperc {

enum class EventKind { up_trav, down_trav, hor_trav, internally_filled };

std::string to_string(EventKind kind);
EventKind parse_event(const std::string& text);

// Seeds are read in grid coordinates; sites of `rect` outside the grid count
// as unseeded. Dynamics are confined to the rectangle plus the adjoined
// infected boundary, with bounded topology.
bool is_internally_filled(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule);
bool is_hor_traversable(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule);
bool is_up_traversable(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule);
bool is_down_traversable(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule);
bool grows_to(const Rect& inner, const Rect& outer, const Grid& seeds, const NeighbourhoodRule& rule);

bool event_holds(EventKind kind, const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule);

// Event test for a fixed rectangle size on masks: bit y*width+x of the
// argument is the seed at (x,y) relative to the rectangle's corner.
class SmallEventChecker {
public:
    SmallEventChecker(EventKind kind, int width, int height, const NeighbourhoodRule& rule);

    bool operator()(CellMask rect_seeds) const;

    int width() const { return width_; }
    int height() const { return height_; }

private:
    CellMask embed(CellMask rect_seeds) const;

    EventKind kind_;
    int width_;
    int height_;
    int offset_x_ = 0;
    int offset_y_ = 0;
    SmallLattice lattice_;
    CellMask forced_ = 0;
    CellMask target_ = 0;
};

}  // namespace bootperc
