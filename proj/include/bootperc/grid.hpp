#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bootperc {

struct Cell {
    int x = 0;
    int y = 0;
    auto operator<=>(const Cell&) const = default;
};

// Axis-aligned rectangle with inclusive 0-based corners.
struct Rect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    Rect() = default;
    Rect(int x0_, int y0_, int x1_, int y1_);

    static Rect from_size(int x0, int y0, int width, int height);
    // [a,b] x [c,d] in 1-based inclusive notation.
    static Rect from_one_based(int a, int b, int c, int d);

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool contains(Cell c) const { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
    bool operator==(const Rect&) const = default;
};

enum class Topology { bounded, torus };

// Dense occupancy field, one bit per site, rows packed into 64-bit words.
class Grid {
public:
    using Word = std::uint64_t;
    static constexpr int word_bits = 64;

    Grid() = default;
    Grid(int width, int height, Topology topology = Topology::bounded);

    int width() const { return width_; }
    int height() const { return height_; }
    Topology topology() const { return topology_; }
    int words_per_row() const { return words_per_row_; }
    std::size_t site_count() const { return static_cast<std::size_t>(width_) * height_; }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }
    bool get(int x, int y) const {
        return (words_[index(y) + (x >> 6)] >> (x & 63)) & 1u;
    }
    bool get(Cell c) const { return get(c.x, c.y); }
    void set(int x, int y, bool value = true);
    void set(Cell c, bool value = true) { set(c.x, c.y, value); }
    void fill(bool value);
    void fill(const Rect& r, bool value = true);

    std::size_t count() const;
    bool full() const { return count() == site_count(); }
    bool none() const;
    bool covers(const Rect& r) const;
    bool is_subset_of(const Grid& other) const;

    std::vector<Cell> cells() const;
    Grid with_topology(Topology topology) const;

    std::span<const Word> row(int y) const {
        return {words_.data() + index(y), static_cast<std::size_t>(words_per_row_)};
    }
    std::span<Word> row(int y) {
        return {words_.data() + index(y), static_cast<std::size_t>(words_per_row_)};
    }
    // Mask of valid bits in the last word of a row.
    Word tail_mask() const { return tail_mask_; }

    bool operator==(const Grid& other) const;

private:
    std::size_t index(int y) const { return static_cast<std::size_t>(y) * words_per_row_; }

    int width_ = 0;
    int height_ = 0;
    Topology topology_ = Topology::bounded;
    int words_per_row_ = 0;
    Word tail_mask_ = 0;
    std::vector<Word> words_;
};

Grid grid_from_cells(int width, int height, std::span<const Cell> cells,
                     Topology topology = Topology::bounded);

// Generation at which each site became infected; 0 for initial seeds.
class InfectionField {
public:
    static constexpr std::int32_t never = -1;

    InfectionField() = default;
    InfectionField(int width, int height)
        : width_(width), height_(height), time_(static_cast<std::size_t>(width) * height, never) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::int32_t at(int x, int y) const { return time_[static_cast<std::size_t>(y) * width_ + x]; }
    std::int32_t& at(int x, int y) { return time_[static_cast<std::size_t>(y) * width_ + x]; }
    std::int32_t max_time() const;
    const std::vector<std::int32_t>& data() const { return time_; }
    std::vector<std::int32_t>& data() { return time_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::int32_t> time_;
};

}  // namespace bootperc
