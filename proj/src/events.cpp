#include "bootperc/events.hpp"

#include <algorithm>

#include "bootperc/error.hpp"

namespace bootperc {
namespace {

// Closure inside `region` of the seeds found in `seed_window`, with `forced`
// sites infected; true iff `target` ends up infected.
bool fills(const Rect& region, const Rect& target, const Rect& seed_window, const Grid& seeds,
           const Rect* forced, const NeighbourhoodRule& rule) {
    Grid local(region.width(), region.height());
    const int ylo = std::max(seed_window.y0, 0), yhi = std::min(seed_window.y1, seeds.height() - 1);
    const int xlo = std::max(seed_window.x0, 0), xhi = std::min(seed_window.x1, seeds.width() - 1);
    for (int y = ylo; y <= yhi; ++y)
        for (int x = xlo; x <= xhi; ++x)
            if (seeds.get(x, y)) local.set(x - region.x0, y - region.y0);
    if (forced)
        local.fill(Rect(forced->x0 - region.x0, forced->y0 - region.y0, forced->x1 - region.x0,
                        forced->y1 - region.y0));
    ClosureEngine engine(rule);
    engine.run(local);
    return local.covers(Rect(target.x0 - region.x0, target.y0 - region.y0, target.x1 - region.x0,
                             target.y1 - region.y0));
}

}  // namespace

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::up_trav: return "up_trav";
        case EventKind::down_trav: return "down_trav";
        case EventKind::hor_trav: return "hor_trav";
        case EventKind::internally_filled: return "internally_filled";
    }
    return "unknown";
}

EventKind parse_event(const std::string& text) {
    if (text == "up_trav" || text == "up-trav") return EventKind::up_trav;
    if (text == "down_trav" || text == "down-trav") return EventKind::down_trav;
    if (text == "hor_trav" || text == "hor-trav") return EventKind::hor_trav;
    if (text == "internally_filled" || text == "if") return EventKind::internally_filled;
    fail(ErrorKind::invalid_parameter, "unknown event: " + text);
}

bool is_internally_filled(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule) {
    return fills(rect, rect, rect, seeds, nullptr, rule);
}

bool is_hor_traversable(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule) {
    const Rect left(rect.x0 - 2, rect.y0, rect.x0 - 1, rect.y1);
    const Rect region(rect.x0 - 2, rect.y0, rect.x1, rect.y1);
    return fills(region, rect, rect, seeds, &left, rule);
}

bool is_up_traversable(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule) {
    const Rect below(rect.x0, rect.y0 - 1, rect.x1, rect.y0 - 1);
    const Rect region(rect.x0, rect.y0 - 1, rect.x1, rect.y1);
    return fills(region, rect, rect, seeds, &below, rule);
}

bool is_down_traversable(const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule) {
    const Rect above(rect.x0, rect.y1 + 1, rect.x1, rect.y1 + 1);
    const Rect region(rect.x0, rect.y0, rect.x1, rect.y1 + 1);
    return fills(region, rect, rect, seeds, &above, rule);
}

bool grows_to(const Rect& inner, const Rect& outer, const Grid& seeds, const NeighbourhoodRule& rule) {
    if (!outer.contains(inner)) fail(ErrorKind::invalid_argument, "inner rectangle not inside outer");
    return fills(outer, outer, outer, seeds, &inner, rule);
}

bool event_holds(EventKind kind, const Rect& rect, const Grid& seeds, const NeighbourhoodRule& rule) {
    switch (kind) {
        case EventKind::up_trav: return is_up_traversable(rect, seeds, rule);
        case EventKind::down_trav: return is_down_traversable(rect, seeds, rule);
        case EventKind::hor_trav: return is_hor_traversable(rect, seeds, rule);
        case EventKind::internally_filled: return is_internally_filled(rect, seeds, rule);
    }
    return false;
}

namespace {

SmallLattice event_lattice(EventKind kind, int width, int height, const NeighbourhoodRule& rule) {
    switch (kind) {
        case EventKind::up_trav:
        case EventKind::down_trav: return SmallLattice(width, height + 1, rule);
        case EventKind::hor_trav: return SmallLattice(width + 2, height, rule);
        case EventKind::internally_filled: return SmallLattice(width, height, rule);
    }
    fail(ErrorKind::invalid_parameter, "unknown event");
}

}  // namespace

SmallEventChecker::SmallEventChecker(EventKind kind, int width, int height, const NeighbourhoodRule& rule)
    : kind_(kind), width_(width), height_(height), lattice_(event_lattice(kind, width, height, rule)) {
    switch (kind) {
        case EventKind::up_trav:
            offset_y_ = 1;
            forced_ = lattice_.row_mask(0);
            break;
        case EventKind::down_trav:
            forced_ = lattice_.row_mask(height);
            break;
        case EventKind::hor_trav:
            offset_x_ = 2;
            forced_ = lattice_.rect_mask(Rect(0, 0, 1, height - 1));
            break;
        case EventKind::internally_filled: break;
    }
    target_ = lattice_.rect_mask(Rect(offset_x_, offset_y_, offset_x_ + width - 1, offset_y_ + height - 1));
}

CellMask SmallEventChecker::embed(CellMask rect_seeds) const {
    if (offset_x_ == 0) return rect_seeds << (offset_y_ * width_);
    const CellMask row = (CellMask{1} << width_) - 1;
    const int lw = lattice_.width();
    CellMask out = 0;
    for (int y = 0; y < height_; ++y)
        out |= ((rect_seeds >> (y * width_)) & row) << ((y + offset_y_) * lw + offset_x_);
    return out;
}

bool SmallEventChecker::operator()(CellMask rect_seeds) const {
    const CellMask closed = lattice_.closure(embed(rect_seeds) | forced_);
    return (closed & target_) == target_;
}

}  // namespace bootperc
