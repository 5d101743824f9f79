#include "bootperc/dynamics.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "bootperc/error.hpp"

namespace bootperc {
namespace {

using Word = Grid::Word;

// out[x] = src[x + dx], zero outside [0, width).
void shift_row_bounded(std::span<const Word> src, int width, int dx, std::vector<Word>& out) {
    const int n = static_cast<int>(src.size());
    std::fill(out.begin(), out.end(), 0);
    if (dx >= width || -dx >= width) return;
    const int k = dx >= 0 ? dx : -dx;
    const int q = k >> 6, r = k & 63;
    for (int i = 0; i < n; ++i) {
        Word v = 0;
        if (dx >= 0) {
            const int j = i + q;
            if (j < n) v = src[j] >> r;
            if (r && j + 1 < n) v |= src[j + 1] << (64 - r);
        } else {
            const int j = i - q;
            if (j >= 0) v = src[j] << r;
            if (r && j - 1 >= 0) v |= src[j - 1] >> (64 - r);
        }
        out[i] = v;
    }
    const int tail = width % 64;
    if (tail) out[n - 1] &= (Word{1} << tail) - 1;
}

// out[x] = src[(x + dx) mod width] when `wrap`, else the bounded shift.
void shift_row(std::span<const Word> src, int width, int dx, bool wrap, std::vector<Word>& out,
               std::vector<Word>& scratch) {
    if (!wrap) {
        shift_row_bounded(src, width, dx, out);
        return;
    }
    dx = ((dx % width) + width) % width;
    shift_row_bounded(src, width, dx, out);
    if (dx == 0) return;
    shift_row_bounded(src, width, dx - width, scratch);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] |= scratch[i];
}

int planes_for(std::size_t n) {
    int p = 1;
    while ((std::size_t{1} << p) <= n) ++p;
    return p;
}

template <class T, class Planes>
void bitsliced_add(Planes& planes, int count, T m) {
    for (int k = 0; k < count; ++k) {
        T& c = planes[k];
        const T carry = c & m;
        c ^= m;
        m = carry;
        if (!m) break;
    }
}

template <class T, class Planes>
T bitsliced_at_least(const Planes& planes, int count, int threshold, T ones) {
    T gt = 0, eq = ones;
    for (int k = count - 1; k >= 0; --k) {
        if ((threshold >> k) & 1) {
            eq &= planes[k];
        } else {
            gt |= eq & planes[k];
            eq &= ~planes[k];
        }
    }
    return gt | eq;
}

}  // namespace

Grid bootstrap_step(const Grid& grid, const NeighbourhoodRule& rule) {
    Grid out = grid;
    const int w = grid.width(), h = grid.height(), n = grid.words_per_row();
    const bool wrap = grid.topology() == Topology::torus;
    const int planes = planes_for(rule.offsets().size());
    std::vector<std::vector<Word>> counter(planes, std::vector<Word>(n));
    std::vector<Word> shifted(n), scratch(n);
    for (int y = 0; y < h; ++y) {
        for (auto& c : counter) std::fill(c.begin(), c.end(), 0);
        for (const Offset& o : rule.offsets()) {
            int sy = y + o.dy;
            if (sy < 0 || sy >= h) {
                if (!wrap) continue;
                sy = ((sy % h) + h) % h;
            }
            shift_row(grid.row(sy), w, o.dx, wrap, shifted, scratch);
            for (int i = 0; i < n; ++i) {
                Word m = shifted[i];
                for (auto& c : counter) {
                    const Word carry = c[i] & m;
                    c[i] ^= m;
                    m = carry;
                    if (!m) break;
                }
            }
        }
        auto dst = out.row(y);
        for (int i = 0; i < n; ++i) {
            Word gt = 0, eq = ~Word{0};
            for (int k = planes - 1; k >= 0; --k) {
                if ((rule.threshold() >> k) & 1) {
                    eq &= counter[k][i];
                } else {
                    gt |= eq & counter[k][i];
                    eq &= ~counter[k][i];
                }
            }
            dst[i] |= gt | eq;
        }
        dst[n - 1] &= grid.tail_mask();
    }
    return out;
}

ClosureEngine::ClosureEngine(NeighbourhoodRule rule) : rule_(std::move(rule)) {
    if (rule_.offsets().size() > 255) fail(ErrorKind::invalid_parameter, "rule too large for closure engine");
}

int ClosureEngine::run(Grid& grid, InfectionField* times) {
    const int w = grid.width(), h = grid.height();
    const std::size_t n = grid.site_count();
    const bool wrap = grid.topology() == Topology::torus;
    const auto r = static_cast<std::uint8_t>(rule_.threshold());
    state_.assign(n, 0);
    count_.assign(n, 0);
    current_.clear();
    next_.clear();
    if (times) *times = InfectionField(w, h);

    for (int y = 0; y < h; ++y) {
        auto row = grid.row(y);
        for (int i = 0; i < grid.words_per_row(); ++i) {
            Word word = row[i];
            while (word) {
                const int x = i * 64 + std::countr_zero(word);
                word &= word - 1;
                const std::size_t v = static_cast<std::size_t>(y) * w + x;
                state_[v] = 1;
                current_.push_back(static_cast<std::uint32_t>(v));
                if (times) times->data()[v] = 0;
            }
        }
    }

    const auto& offsets = rule_.offsets();
    auto spread = [&](std::uint32_t v) {
        const int x = static_cast<int>(v % w), y = static_cast<int>(v / w);
        for (const Offset& o : offsets) {
            int wx = x - o.dx, wy = y - o.dy;
            if (wx < 0 || wx >= w) {
                if (!wrap) continue;
                wx = ((wx % w) + w) % w;
            }
            if (wy < 0 || wy >= h) {
                if (!wrap) continue;
                wy = ((wy % h) + h) % h;
            }
            const std::size_t u = static_cast<std::size_t>(wy) * w + wx;
            if (state_[u]) continue;
            if (++count_[u] == r) next_.push_back(static_cast<std::uint32_t>(u));
        }
    };

    int generation = 0;
    while (true) {
        for (std::uint32_t v : current_) spread(v);
        if (next_.empty()) break;
        ++generation;
        for (std::uint32_t u : next_) {
            state_[u] = 1;
            grid.set(static_cast<int>(u % w), static_cast<int>(u / w));
            if (times) times->data()[u] = generation;
        }
        current_.swap(next_);
        next_.clear();
    }
    return generation;
}

ClosureResult closure(const Grid& grid, const NeighbourhoodRule& rule) {
    ClosureResult result{grid, {}, 0};
    ClosureEngine engine(rule);
    result.generations = engine.run(result.grid, &result.times);
    return result;
}

Grid closure_grid(const Grid& grid, const NeighbourhoodRule& rule) {
    Grid g = grid;
    ClosureEngine engine(rule);
    engine.run(g);
    return g;
}

int popcount(CellMask m) {
    return std::popcount(static_cast<std::uint64_t>(m)) +
           std::popcount(static_cast<std::uint64_t>(m >> 64));
}

SmallLattice::SmallLattice(int width, int height, const NeighbourhoodRule& rule)
    : width_(width), height_(height), threshold_(rule.threshold()),
      planes_(planes_for(rule.offsets().size())) {
    if (width < 1 || height < 1) fail(ErrorKind::invalid_argument, "lattice dimensions must be positive");
    if (width * height > max_sites) fail(ErrorKind::instance_too_large, "small lattice holds at most 128 sites");
    if (planes_ > 8) fail(ErrorKind::invalid_parameter, "rule too large for small lattice");
    const int n = width * height;
    all_ = n == 128 ? ~CellMask{0} : (CellMask{1} << n) - 1;
    row_ = (CellMask{1} << width) - 1;
    for (const Offset& o : rule.offsets()) {
        CellMask valid = 0;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const int nx = x + o.dx, ny = y + o.dy;
                if (nx >= 0 && nx < width && ny >= 0 && ny < height) valid |= bit(x, y);
            }
        if (valid) terms_.push_back({o.dx + o.dy * width, valid});
    }
}

CellMask SmallLattice::rect_mask(const Rect& r) const {
    CellMask m = 0;
    for (int y = std::max(r.y0, 0); y <= std::min(r.y1, height_ - 1); ++y)
        for (int x = std::max(r.x0, 0); x <= std::min(r.x1, width_ - 1); ++x) m |= bit(x, y);
    return m;
}

CellMask SmallLattice::step(CellMask s) const {
    std::array<CellMask, 8> planes{};
    for (const Term& t : terms_) {
        const CellMask shifted = t.shift >= 0 ? (s >> t.shift) : (s << -t.shift);
        bitsliced_add(planes, planes_, shifted & t.valid);
    }
    return s | (bitsliced_at_least(planes, planes_, threshold_, all_) & all_);
}

CellMask SmallLattice::closure(CellMask s) const {
    while (true) {
        const CellMask next = step(s);
        if (next == s) return s;
        s = next;
    }
}

}  // namespace bootperc
