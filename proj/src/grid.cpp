#include "bootperc/grid.hpp"

#include <algorithm>
#include <bit>

#include "bootperc/error.hpp"

namespace bootperc {

Rect::Rect(int x0_, int y0_, int x1_, int y1_) : x0(x0_), y0(y0_), x1(x1_), y1(y1_) {
    if (x0 > x1 || y0 > y1) fail(ErrorKind::invalid_argument, "rectangle corners out of order");
}

Rect Rect::from_size(int x0, int y0, int width, int height) {
    if (width < 1 || height < 1) fail(ErrorKind::invalid_argument, "rectangle must be non-empty");
    return Rect(x0, y0, x0 + width - 1, y0 + height - 1);
}

Rect Rect::from_one_based(int a, int b, int c, int d) { return Rect(a - 1, c - 1, b - 1, d - 1); }

Grid::Grid(int width, int height, Topology topology)
    : width_(width), height_(height), topology_(topology) {
    if (width < 1 || height < 1) fail(ErrorKind::invalid_argument, "grid dimensions must be positive");
    words_per_row_ = (width + word_bits - 1) / word_bits;
    const int tail = width % word_bits;
    tail_mask_ = tail == 0 ? ~Word{0} : (Word{1} << tail) - 1;
    words_.assign(static_cast<std::size_t>(words_per_row_) * height, 0);
}

void Grid::set(int x, int y, bool value) {
    if (!in_bounds(x, y)) fail(ErrorKind::invalid_argument, "site outside grid");
    Word& w = words_[index(y) + (x >> 6)];
    const Word bit = Word{1} << (x & 63);
    w = value ? (w | bit) : (w & ~bit);
}

void Grid::fill(bool value) {
    for (int y = 0; y < height_; ++y) {
        auto r = row(y);
        std::fill(r.begin(), r.end(), value ? ~Word{0} : Word{0});
        if (value) r.back() &= tail_mask_;
    }
}

void Grid::fill(const Rect& r, bool value) {
    for (int y = std::max(r.y0, 0); y <= std::min(r.y1, height_ - 1); ++y)
        for (int x = std::max(r.x0, 0); x <= std::min(r.x1, width_ - 1); ++x) set(x, y, value);
}

std::size_t Grid::count() const {
    std::size_t n = 0;
    for (Word w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool Grid::none() const {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

bool Grid::covers(const Rect& r) const {
    for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x)
            if (!in_bounds(x, y) || !get(x, y)) return false;
    return true;
}

bool Grid::is_subset_of(const Grid& other) const {
    if (width_ != other.width_ || height_ != other.height_) return false;
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~other.words_[i]) return false;
    return true;
}

std::vector<Cell> Grid::cells() const {
    std::vector<Cell> out;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (get(x, y)) out.push_back({x, y});
    return out;
}

Grid Grid::with_topology(Topology topology) const {
    Grid g = *this;
    g.topology_ = topology;
    return g;
}

bool Grid::operator==(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_ && words_ == other.words_;
}

Grid grid_from_cells(int width, int height, std::span<const Cell> cells, Topology topology) {
    Grid g(width, height, topology);
    for (const Cell& c : cells) g.set(c);
    return g;
}

std::int32_t InfectionField::max_time() const {
    std::int32_t m = never;
    for (auto t : time_) m = std::max(m, t);
    return m;
}

}  // namespace bootperc
