#include "bootperc/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "bootperc/dynamics.hpp"
#include "bootperc/error.hpp"

namespace bootperc {
namespace {

bool row_major_less(const Cell& a, const Cell& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

// Fills a horizontal band of three rows (below, target, above) of fixed
// width; the lowest row is infected.
class RowFill {
public:
    RowFill(const NeighbourhoodRule& rule, int width) : rule_(rule), width_(width) {
        if (3 * width <= SmallLattice::max_sites) lattice_.emplace(width, 3, rule);
    }

    int width() const { return width_; }

    // Cells have y in {1, 2}; true iff row 1 ends up fully infected.
    bool fills(const std::vector<Cell>& cells) const {
        if (lattice_) {
            CellMask m = lattice_->row_mask(0);
            for (const Cell& c : cells) m |= lattice_->bit(c.x, c.y);
            const CellMask target = lattice_->row_mask(1);
            return (lattice_->closure(m) & target) == target;
        }
        Grid g(width_, 3);
        g.fill(Rect(0, 0, width_ - 1, 0));
        for (const Cell& c : cells) g.set(c);
        ClosureEngine engine(rule_);
        engine.run(g);
        return g.covers(Rect(0, 1, width_ - 1, 1));
    }

private:
    NeighbourhoodRule rule_;
    int width_;
    std::optional<SmallLattice> lattice_;
};

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// Calls visit(indices) for every k-combination of [0, n) in lexicographic order;
// stops when visit returns true.
template <class Visit>
bool for_each_combination(int n, int k, Visit&& visit) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return false;
    while (true) {
        if (visit(idx)) return true;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

const std::set<ShapeClass>& anisotropic_pairs() {
    static const std::set<ShapeClass> shapes = enumerate_spanning_pairs(anisotropic_rule(2));
    return shapes;
}

}  // namespace

ShapeClass::ShapeClass(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(), row_major_less);
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    if (cells_.empty()) return;
    const Cell origin = cells_.front();
    for (Cell& c : cells_) c = {c.x - origin.x, c.y - origin.y};
}

int ShapeClass::rows() const {
    if (cells_.empty()) return 0;
    return cells_.back().y - cells_.front().y + 1;
}

int ShapeClass::span() const {
    if (cells_.empty()) return 0;
    auto [lo, hi] = std::minmax_element(cells_.begin(), cells_.end(),
                                        [](const Cell& a, const Cell& b) { return a.x < b.x; });
    return hi->x - lo->x + 1;
}

ShapeClass ShapeClass::mirrored() const {
    std::vector<Cell> out;
    for (const Cell& c : cells_) out.push_back({-c.x, c.y});
    return ShapeClass(std::move(out));
}

std::vector<Cell> ShapeClass::placed(int x, int y) const {
    std::vector<Cell> out;
    for (const Cell& c : cells_) out.push_back({c.x + x, c.y + y});
    return out;
}

std::string to_json(const std::set<ShapeClass>& shapes) {
    std::ostringstream os;
    os << '[';
    bool first_shape = true;
    for (const ShapeClass& s : shapes) {
        os << (first_shape ? "" : ",") << '[';
        first_shape = false;
        for (std::size_t i = 0; i < s.cells().size(); ++i)
            os << (i ? "," : "") << '[' << s.cells()[i].x << ',' << s.cells()[i].y << ']';
        os << ']';
    }
    os << ']';
    return os.str();
}

namespace {

std::array<double, 3> run_length_states(int x, int y, double p) {
    if (x < 1 || y < 1) fail(ErrorKind::invalid_parameter, "rectangle dimensions must be positive");
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_parameter, "p must lie in [0,1]");
    const double q = std::pow(1.0 - p, y);
    std::array<double, 3> s{1.0, 0.0, 0.0};
    for (int i = 0; i < x; ++i) s = {(1.0 - q) * (s[0] + s[1] + s[2]), q * s[0], q * s[1]};
    return s;
}

}  // namespace

double hor_trav_prob_exact(int x, int y, double p) { return run_length_states(x, y, p)[0]; }

double empty_triple_free_prob(int x, int y, double p) {
    const auto s = run_length_states(x, y, p);
    return s[0] + s[1] + s[2];
}

double EventPolynomial::evaluate(double p) const {
    double total = 0.0;
    for (int k = 0; k <= sites; ++k) {
        const auto c = counts[static_cast<std::size_t>(k)];
        if (c) total += static_cast<double>(c) * std::pow(p, k) * std::pow(1.0 - p, sites - k);
    }
    return total;
}

EventPolynomial event_polynomial(int width, int height, EventKind event, const NeighbourhoodRule& rule,
                                 unsigned workers) {
    const int n = width * height;
    if (width < 1 || height < 1) fail(ErrorKind::invalid_parameter, "rectangle dimensions must be positive");
    if (n > exhaustive_site_cap) fail(ErrorKind::instance_too_large, "exhaustive oracle limited to 24 sites");
    const SmallEventChecker checker(event, width, height, rule);
    const std::uint64_t total = std::uint64_t{1} << n;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(n + 1, 0));
    auto work = [&](unsigned w) {
        const std::uint64_t lo = total * w / workers, hi = total * (w + 1) / workers;
        auto& counts = partial[w];
        for (std::uint64_t s = lo; s < hi; ++s)
            if (checker(static_cast<CellMask>(s))) ++counts[static_cast<std::size_t>(std::popcount(s))];
    };
    std::vector<std::thread> threads;
    for (unsigned w = 1; w < workers; ++w) threads.emplace_back(work, w);
    work(0);
    for (auto& t : threads) t.join();
    EventPolynomial poly{n, std::vector<std::uint64_t>(n + 1, 0)};
    for (const auto& counts : partial)
        for (int k = 0; k <= n; ++k) poly.counts[k] += counts[k];
    return poly;
}

double event_prob_exhaustive(const Rect& rect, double p, EventKind event, const NeighbourhoodRule& rule,
                             unsigned workers) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_parameter, "p must lie in [0,1]");
    return event_polynomial(rect.width(), rect.height(), event, rule, workers).evaluate(p);
}

std::set<ShapeClass> enumerate_spanning_pairs(const NeighbourhoodRule& rule, int width) {
    const auto b = rule.anisotropy();
    if (!b) fail(ErrorKind::invalid_parameter, "spanning pairs need an anisotropic (1,b) rule");
    if (width == 0) width = 4 * *b + 9;
    const RowFill band(rule, width);
    const int c = width / 2;
    std::set<ShapeClass> out;
    for (int ru = 1; ru <= 2; ++ru)
        for (int y = ru; y <= 2; ++y)
            for (int x = 0; x < width; ++x) {
                const Cell u{c, ru}, v{x, y};
                if (!row_major_less(u, v)) continue;
                if (band.fills({u, v})) out.insert(ShapeClass({u, v}));
            }
    return out;
}

GrowthConfigs enumerate_growth_configs(int b) {
    if (b < 2 || b > 6) fail(ErrorKind::invalid_parameter, "growth configurations enumerated for 2 <= b <= 6");
    const int width = std::max(4 * b + 9, 6 * b + 5);
    const int c = width / 2;
    const RowFill band(anisotropic_rule(b), width);
    std::vector<Cell> candidates;
    for (int x = c + 1; x <= c + 3 * b; ++x) candidates.push_back({x, 1});
    for (int x = c - 3 * b; x <= c + 3 * b; ++x) candidates.push_back({x, 2});
    GrowthConfigs result;
    std::vector<Cell> cells(static_cast<std::size_t>(b));
    cells[0] = {c, 1};
    for_each_combination(static_cast<int>(candidates.size()), b - 1, [&](const std::vector<int>& idx) {
        for (int i = 0; i < b - 1; ++i) cells[static_cast<std::size_t>(i + 1)] = candidates[idx[i]];
        if (band.fills(cells)) result.shapes.insert(ShapeClass(cells));
        return false;
    });
    result.count = result.shapes.size();
    return result;
}

std::set<ShapeClass> enumerate_infectors(int rows, int window_halfwidth, int max_cardinality) {
    if (rows != 1 && rows != 2) fail(ErrorKind::invalid_parameter, "infectors searched for 1 or 2 rows");
    if (window_halfwidth < 6) fail(ErrorKind::invalid_parameter, "window half-width must be at least 6");
    const int width = 2 * window_halfwidth + 1;
    if (2 * width > SmallLattice::max_sites) fail(ErrorKind::instance_too_large, "window too wide");
    const int n = rows * width;
    std::uint64_t subsets = 0;
    for (int k = 1; k <= max_cardinality; ++k) subsets += binomial(n, k);
    if (subsets > (std::uint64_t{1} << 26)) fail(ErrorKind::instance_too_large, "infector search exceeds 2^26 subsets");

    const auto rule = anisotropic_rule(2);
    const SmallLattice lattice(width, 2, rule);
    std::vector<CellMask> pair_masks;
    for (const ShapeClass& s : anisotropic_pairs())
        for (int tx = -width; tx < width; ++tx) {
            CellMask m = 0;
            bool inside = true;
            for (const Cell& c : s.placed(tx, 0)) {
                if (c.x < 0 || c.x >= width || c.y > 1) inside = false;
                else m |= lattice.bit(c.x, c.y);
            }
            if (inside) pair_masks.push_back(m);
        }
    auto infects = [&](CellMask m) {
        const CellMask closed = lattice.closure(m);
        return std::any_of(pair_masks.begin(), pair_masks.end(), [&](CellMask pm) { return (closed & pm) == pm; });
    };

    std::vector<Cell> cells;
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < width; ++x) cells.push_back({x, y});
    std::set<ShapeClass> out;
    for (int k = 1; k <= max_cardinality; ++k)
        for_each_combination(n, k, [&](const std::vector<int>& idx) {
            CellMask m = 0;
            bool low = false, high = false;
            for (int i : idx) {
                m |= lattice.bit(cells[i].x, cells[i].y);
                (cells[i].y == 0 ? low : high) = true;
            }
            if (rows == 2 && !(low && high)) return false;
            if (!infects(m)) return false;
            for (int i : idx)
                if (infects(m & ~lattice.bit(cells[i].x, cells[i].y))) return false;
            std::vector<Cell> chosen;
            for (int i : idx) chosen.push_back(cells[i]);
            out.insert(ShapeClass(std::move(chosen)));
            return false;
        });
    return out;
}

PairDetector::PairDetector() : shapes_(anisotropic_pairs()) {}
PairDetector::PairDetector(std::set<ShapeClass> shapes) : shapes_(std::move(shapes)) {}

std::optional<std::array<Cell, 2>> PairDetector::find(const Grid& infected, int row, const Rect& bounds) const {
    for (const ShapeClass& s : shapes_) {
        if (s.size() != 2) continue;
        const Cell a = s.cells()[0], b = s.cells()[1];
        const int lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
        for (int tx = bounds.x0 - lo; tx + hi <= bounds.x1; ++tx) {
            const Cell ca{a.x + tx, a.y + row}, cb{b.x + tx, b.y + row};
            if (!bounds.contains(ca) || !bounds.contains(cb)) continue;
            if (!infected.in_bounds(ca.x, ca.y) || !infected.in_bounds(cb.x, cb.y)) continue;
            if (infected.get(ca) && infected.get(cb)) return std::array<Cell, 2>{ca, cb};
        }
    }
    return std::nullopt;
}

namespace {

std::vector<Cell> seeds_in(const Rect& rect, const Grid& seeds) {
    std::vector<Cell> out;
    for (int y = std::max(rect.y0, 0); y <= std::min(rect.y1, seeds.height() - 1); ++y)
        for (int x = std::max(rect.x0, 0); x <= std::min(rect.x1, seeds.width() - 1); ++x)
            if (seeds.get(x, y)) out.push_back({x, y});
    return out;  // row-major
}

}  // namespace

std::vector<Cell> minimal_up_traversable_subset(const Rect& rect, const Grid& seeds) {
    if (rect.area() > exhaustive_site_cap) fail(ErrorKind::instance_too_large, "minimal subset search limited to 24 sites");
    const int w = rect.width();
    const SmallEventChecker up(EventKind::up_trav, w, rect.height(), anisotropic_rule(2));
    const std::vector<Cell> cells = seeds_in(rect, seeds);
    std::vector<CellMask> bits;
    CellMask all = 0;
    for (const Cell& c : cells) {
        bits.push_back(CellMask{1} << ((c.y - rect.y0) * w + (c.x - rect.x0)));
        all |= bits.back();
    }
    if (!up(all)) fail(ErrorKind::not_traversable, "rectangle is not up-traversable by the seeds");
    const int n = static_cast<int>(cells.size());
    for (int k = 0; k <= n; ++k) {
        std::vector<Cell> found;
        const bool hit = for_each_combination(n, k, [&](const std::vector<int>& idx) {
            CellMask m = 0;
            for (int i : idx) m |= bits[i];
            if (!up(m)) return false;
            for (int i : idx) found.push_back(cells[i]);
            return true;
        });
        if (hit) return found;
    }
    fail(ErrorKind::structure_violation, "no traversing subset found");
}

SpanningReport spanning_time(const Rect& rect, const Grid& seeds) {
    SpanningReport report;
    report.minimal_set = minimal_up_traversable_subset(rect, seeds);
    const int w = rect.width(), h = rect.height();
    const SmallLattice lattice(w, h, anisotropic_rule(2));
    const PairDetector detector;
    CellMask base = 0;
    for (const Cell& c : report.minimal_set) base |= lattice.bit(c.x - rect.x0, c.y - rect.y0);
    CellMask state = base;
    const Rect local(0, 0, w - 1, h - 1);
    for (int t = 0;; ++t) {
        Grid g(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (state & lattice.bit(x, y)) g.set(x, y);
        std::vector<RowPair> pairs;
        for (int y = 0; y < h; ++y) {
            const auto pair = detector.find(g, y, local);
            if (!pair) break;
            RowPair rp{y + rect.y0, {}, false};
            for (int i = 0; i < 2; ++i) {
                const Cell c = (*pair)[i];
                rp.cells[i] = {c.x + rect.x0, c.y + rect.y0};
                if (!(base & lattice.bit(c.x, c.y))) rp.created_later = true;
            }
            pairs.push_back(rp);
        }
        if (static_cast<int>(pairs.size()) == h) {
            report.tau = t;
            report.per_row_pairs = std::move(pairs);
            return report;
        }
        const CellMask next = lattice.step(state);
        if (next == state) fail(ErrorKind::structure_violation, "closure lacks a spanning pair for some row");
        state = next;
    }
}

namespace {

bool is_inner_step(Cell d) { return d.y == 1 && (std::abs(d.x) == 1 || std::abs(d.x) == 2); }
bool is_final_step(Cell d) {
    return is_inner_step(d) || (d.y == 0 && std::abs(d.x) >= 1 && std::abs(d.x) <= 4);
}

// Orders the pairs of one component into a chain; empty on failure.
std::vector<Cell> chain_of(const std::vector<std::array<Cell, 2>>& pairs) {
    const std::size_t s = pairs.size();
    auto shared = [](const std::array<Cell, 2>& a, const std::array<Cell, 2>& b) {
        std::vector<Cell> out;
        for (const Cell& u : a)
            for (const Cell& v : b)
                if (u == v) out.push_back(u);
        return out;
    };
    std::vector<Cell> chain;
    if (s == 1) {
        std::array<Cell, 2> p = pairs[0];
        if (row_major_less(p[1], p[0])) std::swap(p[0], p[1]);
        chain = {p[0], p[1]};
    } else {
        std::vector<Cell> links;
        for (std::size_t i = 0; i + 1 < s; ++i) {
            const auto sh = shared(pairs[i], pairs[i + 1]);
            if (sh.size() != 1) return {};
            links.push_back(sh[0]);
        }
        auto other = [](const std::array<Cell, 2>& p, Cell c) { return p[0] == c ? p[1] : p[0]; };
        chain.push_back(other(pairs[0], links[0]));
        for (std::size_t i = 0; i + 1 < s; ++i) {
            if (i > 0 && other(pairs[i], links[i - 1]) != links[i]) return {};
            chain.push_back(links[i]);
        }
        chain.push_back(other(pairs[s - 1], links[s - 2]));
    }
    std::vector<Cell> sorted = chain;
    std::sort(sorted.begin(), sorted.end(), row_major_less);
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const Cell d{chain[i + 1].x - chain[i].x, chain[i + 1].y - chain[i].y};
        const bool last = i + 2 == chain.size();
        if (last ? !is_final_step(d) : !is_inner_step(d)) return {};
    }
    return chain;
}

}  // namespace

std::vector<std::vector<Cell>> decompose_paths(const std::vector<Cell>& minimal_set, const Rect& rect) {
    std::vector<Cell> cells = minimal_set;
    std::sort(cells.begin(), cells.end(), row_major_less);
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    std::map<Cell, int> index;
    for (const Cell& c : cells) {
        if (!rect.contains(c)) fail(ErrorKind::invalid_argument, "set not inside rectangle");
        index.emplace(c, static_cast<int>(index.size()));
    }
    const int h = rect.height();
    std::vector<std::vector<std::array<Cell, 2>>> candidates(static_cast<std::size_t>(h));
    for (int j = 0; j < h; ++j)
        for (const ShapeClass& s : anisotropic_pairs())
            for (const Cell& anchor : cells) {
                // anchor plays the role of the shape's first cell
                const int tx = anchor.x - s.cells()[0].x, ty = anchor.y - s.cells()[0].y;
                if (ty != rect.y0 + j) continue;
                const auto placed = s.placed(tx, ty);
                if (index.count(placed[0]) && index.count(placed[1]) && rect.contains(placed[1]))
                    candidates[j].push_back({placed[0], placed[1]});
            }

    std::vector<std::array<Cell, 2>> choice(static_cast<std::size_t>(h));
    std::vector<int> used(cells.size(), 0);
    std::vector<std::vector<Cell>> result;

    auto try_leaf = [&]() -> bool {
        if (std::any_of(used.begin(), used.end(), [](int u) { return u == 0; })) return false;
        std::vector<std::vector<Cell>> chains;
        int start = 0;
        for (int j = 1; j <= h; ++j) {
            const bool linked = j < h && (choice[j][0] == choice[j - 1][0] || choice[j][0] == choice[j - 1][1] ||
                                          choice[j][1] == choice[j - 1][0] || choice[j][1] == choice[j - 1][1]);
            if (linked) continue;
            std::vector<std::array<Cell, 2>> component(choice.begin() + start, choice.begin() + j);
            auto chain = chain_of(component);
            if (chain.empty()) return false;
            chains.push_back(std::move(chain));
            start = j;
        }
        if (static_cast<int>(chains.size()) != static_cast<int>(cells.size()) - h) return false;
        std::sort(chains.begin(), chains.end(),
                  [](const auto& a, const auto& b) { return row_major_less(a.front(), b.front()); });
        result = std::move(chains);
        return true;
    };

    std::function<bool(int)> search = [&](int j) -> bool {
        if (j == h) return try_leaf();
        for (const auto& pair : candidates[j]) {
            choice[j] = pair;
            for (const Cell& c : pair) ++used[index.at(c)];
            bool ok = true;
            // cells of row j can no longer be covered later
            for (std::size_t i = 0; i < cells.size() && ok; ++i)
                if (cells[i].y == rect.y0 + j && used[i] == 0) ok = false;
            if (ok && search(j + 1)) return true;
            for (const Cell& c : pair) --used[index.at(c)];
        }
        return false;
    };
    if (!search(0)) fail(ErrorKind::structure_violation, "no partition into admissible chains");
    return result;
}

}  // namespace bootperc
