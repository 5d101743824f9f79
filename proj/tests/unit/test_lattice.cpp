#include <random>

#include "bootperc/dynamics.hpp"
#include "bootperc/error.hpp"
#include "bootperc/events.hpp"
#include "doctest.h"
#include "naive.hpp"

using namespace bootperc;

namespace {

Grid random_grid(std::mt19937_64& rng, int w, int h, double p, Topology t = Topology::bounded) {
    std::bernoulli_distribution coin(p);
    Grid g(w, h, t);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (coin(rng)) g.set(x, y);
    return g;
}

std::vector<NeighbourhoodRule> all_rules() {
    return {anisotropic_rule(2), anisotropic_rule(3), two_neighbour_rule(), duarte_rule()};
}

}  // namespace

TEST_CASE("rule families") {
    const auto a = anisotropic_rule(2);
    CHECK(a.offsets() == std::vector<Offset>{{-2, 0}, {-1, 0}, {0, -1}, {0, 1}, {1, 0}, {2, 0}});
    CHECK(a.threshold() == 3);
    CHECK(a.anisotropy() == 2);
    const auto t = two_neighbour_rule();
    CHECK(t.offsets() == std::vector<Offset>{{-1, 0}, {0, -1}, {0, 1}, {1, 0}});
    CHECK(t.threshold() == 2);
    const auto d = duarte_rule();
    CHECK(d.offsets() == std::vector<Offset>{{-1, 0}, {0, -1}, {0, 1}});
    CHECK(d.threshold() == 2);
    for (int b = 2; b <= 6; ++b) {
        const auto r = anisotropic_rule(b);
        CHECK(r.offsets().size() == static_cast<std::size_t>(2 * b + 2));
        CHECK(r.threshold() == b + 1);
    }
    CHECK(make_rule({RuleFamily::anisotropic, 4, {}, 0}) == anisotropic_rule(4));
    CHECK(parse_rule("anisotropic:3") == anisotropic_rule(3));
    CHECK(parse_rule("duarte") == duarte_rule());
}

TEST_CASE("rule validation") {
    CHECK_THROWS_AS(anisotropic_rule(1), Error);
    CHECK_THROWS_AS(NeighbourhoodRule({{0, 0}, {1, 0}}, 1), Error);
    CHECK_THROWS_AS(NeighbourhoodRule({}, 1), Error);
    CHECK_THROWS_AS(NeighbourhoodRule({{1, 0}}, 2), Error);
    CHECK_THROWS_AS(NeighbourhoodRule({{1, 0}}, 0), Error);
    try {
        anisotropic_rule(0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_parameter);
    }
}

TEST_CASE("rect and grid basics") {
    CHECK_THROWS_AS(Rect(2, 0, 1, 0), Error);
    const Rect r = Rect::from_one_based(1, 20, 1, 5);
    CHECK(r == Rect(0, 0, 19, 4));
    CHECK(r.width() == 20);
    CHECK(r.height() == 5);
    Grid g(130, 3);
    g.set(129, 2);
    g.set(0, 0);
    CHECK(g.count() == 2);
    CHECK(g.get(129, 2));
    g.fill(true);
    CHECK(g.full());
    CHECK(g.count() == 390);
}

TEST_CASE("bootstrap_step examples") {
    const auto rule = anisotropic_rule(2);
    Grid empty(7, 5);
    CHECK(bootstrap_step(empty, rule) == empty);
    Grid full(7, 5);
    full.fill(true);
    CHECK(bootstrap_step(full, rule) == full);

    const std::vector<Cell> seeds{{0, 0}, {0, 1}, {3, 1}, {4, 1}};
    const Grid g = grid_from_cells(5, 2, seeds);
    const Grid next = bootstrap_step(g, rule);
    auto expected = seeds;
    expected.push_back({2, 1});
    CHECK(next == grid_from_cells(5, 2, expected));
}

TEST_CASE("bootstrap_step agrees with the site-by-site sweep") {
    std::mt19937_64 rng(11);
    for (const auto& rule : all_rules())
        for (auto topo : {Topology::bounded, Topology::torus})
            for (int trial = 0; trial < 60; ++trial) {
                const int w = 1 + static_cast<int>(rng() % 150), h = 1 + static_cast<int>(rng() % 9);
                const Grid g = random_grid(rng, w, h, 0.3, topo);
                CHECK(bootstrap_step(g, rule) == testsupport::naive_step(g, rule));
            }
}

TEST_CASE("closure examples") {
    const auto rule = anisotropic_rule(2);
    Grid empty(6, 6);
    const auto res = closure(empty, rule);
    CHECK(res.grid.none());
    for (auto t : res.times.data()) CHECK(t == InfectionField::never);

    // Staggered seeds (1,2i), (2,2i+1) in a 2-wide column, 1-based: every
    // site fills except the two corners that only ever see two infected
    // neighbours inside the column.
    for (int rows = 2; rows <= 12; ++rows) {
        Grid g(2, rows);
        for (int y1 = 1; y1 <= rows; ++y1) g.set(y1 % 2 == 0 ? 0 : 1, y1 - 1);
        const Grid c = closure_grid(g, rule);
        CHECK(c.count() == static_cast<std::size_t>(2 * rows - 2));
        CHECK_FALSE(c.get(0, 0));
        CHECK_FALSE(c.get(rows % 2 == 0 ? 1 : 0, rows - 1));
        Grid cornered = g;
        cornered.set(0, 0);
        cornered.set(rows % 2 == 0 ? 1 : 0, rows - 1);
        CHECK(closure_grid(cornered, rule).full());
    }

    for (const auto& r : all_rules()) {
        Grid single(9, 9);
        single.set(4, 4);
        CHECK(closure_grid(single, r) == single);
    }
}

TEST_CASE("closure properties on random grids") {
    std::mt19937_64 rng(7);
    for (const auto& rule : all_rules())
        for (auto topo : {Topology::bounded, Topology::torus})
            for (int trial = 0; trial < 40; ++trial) {
                const int w = 1 + static_cast<int>(rng() % 12), h = 1 + static_cast<int>(rng() % 12);
                const Grid small = random_grid(rng, w, h, 0.25, topo);
                Grid big = small;
                std::bernoulli_distribution coin(0.15);
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x)
                        if (coin(rng)) big.set(x, y);
                const auto cs = closure(small, rule);
                const Grid cb = closure_grid(big, rule);
                CHECK(cs.grid == testsupport::naive_closure(small, rule));
                CHECK(small.is_subset_of(cs.grid));
                CHECK(cs.grid.is_subset_of(cb));
                CHECK(closure_grid(cs.grid, rule) == cs.grid);

                Grid iterated = small;
                for (int i = 0; i < w * h; ++i) iterated = bootstrap_step(iterated, rule);
                CHECK(iterated == cs.grid);

                // generation semantics: iterate k times reproduces sites with time <= k
                Grid stepped = small;
                for (int k = 0; k <= cs.generations; ++k) {
                    for (int y = 0; y < h; ++y)
                        for (int x = 0; x < w; ++x) {
                            const auto t = cs.times.at(x, y);
                            CHECK(stepped.get(x, y) == (t != InfectionField::never && t <= k));
                        }
                    stepped = bootstrap_step(stepped, rule);
                }
            }
}

TEST_CASE("infection times respect the threshold") {
    std::mt19937_64 rng(3);
    const auto rule = anisotropic_rule(2);
    const Grid g = random_grid(rng, 40, 30, 0.12);
    const auto res = closure(g, rule);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 40; ++x) {
            const auto t = res.times.at(x, y);
            CHECK((t == 0) == g.get(x, y));
            if (t <= 0) continue;
            int earlier = 0;
            for (const auto& o : rule.offsets()) {
                const int nx = x + o.dx, ny = y + o.dy;
                if (!g.in_bounds(nx, ny)) continue;
                const auto tn = res.times.at(nx, ny);
                if (tn != InfectionField::never && tn < t) ++earlier;
            }
            CHECK(earlier >= rule.threshold());
        }
}

TEST_CASE("closure commutes with translation away from edges") {
    std::mt19937_64 rng(5);
    const auto rule = anisotropic_rule(2);
    for (int trial = 0; trial < 30; ++trial) {
        Grid a(40, 40), b(40, 40);
        std::bernoulli_distribution coin(0.3);
        for (int y = 12; y < 20; ++y)
            for (int x = 12; x < 20; ++x)
                if (coin(rng)) {
                    a.set(x, y);
                    b.set(x + 5, y + 3);
                }
        const Grid ca = closure_grid(a, rule), cb = closure_grid(b, rule);
        for (int y = 0; y < 37; ++y)
            for (int x = 0; x < 35; ++x) CHECK(ca.get(x, y) == cb.get(x + 5, y + 3));
    }
}

TEST_CASE("small lattice agrees with the grid engine") {
    std::mt19937_64 rng(9);
    for (const auto& rule : all_rules())
        for (int trial = 0; trial < 200; ++trial) {
            const int w = 1 + static_cast<int>(rng() % 12), h = 1 + static_cast<int>(rng() % 10);
            if (w * h > 128) continue;
            const Grid g = random_grid(rng, w, h, 0.3);
            SmallLattice lat(w, h, rule);
            CellMask m = 0;
            for (const Cell& c : g.cells()) m |= lat.bit(c.x, c.y);
            const CellMask stepped = lat.step(m);
            const CellMask closed = lat.closure(m);
            const Grid gs = bootstrap_step(g, rule), gc = closure_grid(g, rule);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    CHECK(((stepped & lat.bit(x, y)) != 0) == gs.get(x, y));
                    CHECK(((closed & lat.bit(x, y)) != 0) == gc.get(x, y));
                }
        }
}

TEST_CASE("internally filled examples") {
    const auto rule = anisotropic_rule(2);
    Grid g(10, 10);
    const Rect r(2, 3, 6, 7);
    CHECK_FALSE(is_internally_filled(r, g, rule));
    g.fill(r);
    CHECK(is_internally_filled(r, g, rule));
    Grid stag(2, 4);
    for (Cell c : {Cell{1, 0}, Cell{0, 1}, Cell{1, 2}, Cell{0, 3}}) stag.set(c);
    CHECK_FALSE(is_internally_filled(Rect(0, 0, 1, 3), stag, rule));
    stag.set(0, 0);
    stag.set(1, 3);
    CHECK(is_internally_filled(Rect(0, 0, 1, 3), stag, rule));
}

TEST_CASE("horizontal traversability examples") {
    const auto rule = anisotropic_rule(2);
    Grid g(8, 3);
    for (int x = 0; x < 8; ++x) g.set(x, x % 3);
    CHECK(is_hor_traversable(Rect(0, 0, 7, 2), g, rule));
    Grid gap = g;
    for (int x = 3; x < 6; ++x)
        for (int y = 0; y < 3; ++y) gap.set(x, y, false);
    CHECK_FALSE(is_hor_traversable(Rect(0, 0, 7, 2), gap, rule));
    Grid right = g;
    for (int y = 0; y < 3; ++y) right.set(7, y, false);
    CHECK_FALSE(is_hor_traversable(Rect(0, 0, 7, 2), right, rule));
}

TEST_CASE("horizontal traversability equals the column criterion, exhaustively") {
    const auto rule = anisotropic_rule(2);
    for (int w = 1; w <= 6; ++w)
        for (int h = 1; h <= 3; ++h) {
            const SmallEventChecker checker(EventKind::hor_trav, w, h, rule);
            for (std::uint32_t s = 0; s < (1u << (w * h)); ++s) {
                std::vector<bool> col(w, false);
                Grid g(w, h);
                for (int i = 0; i < w * h; ++i)
                    if ((s >> i) & 1) {
                        col[i % w] = true;
                        g.set(i % w, i / w);
                    }
                bool ok = col[w - 1];
                for (int x = 0; x + 2 < w; ++x)
                    if (!col[x] && !col[x + 1] && !col[x + 2]) ok = false;
                const bool grid_answer = is_hor_traversable(Rect(0, 0, w - 1, h - 1), g, rule);
                CHECK(grid_answer == ok);
                CHECK(checker(s) == ok);
            }
        }
}

TEST_CASE("up traversability examples") {
    const auto rule = anisotropic_rule(2);
    Grid pair(6, 1);
    pair.set(0, 0);
    pair.set(1, 0);
    CHECK(is_up_traversable(Rect(0, 0, 5, 0), pair, rule));

    // one in-row pair per row
    Grid rows(6, 3);
    for (int y = 0; y < 3; ++y) {
        rows.set(2, y);
        rows.set(4, y);
    }
    CHECK(is_up_traversable(Rect(0, 0, 5, 2), rows, rule));
    Grid missing = rows;
    missing.set(2, 2, false);
    missing.set(4, 2, false);
    CHECK_FALSE(is_up_traversable(Rect(0, 0, 5, 2), missing, rule));
}

TEST_CASE("small event checker agrees with grid events") {
    std::mt19937_64 rng(21);
    const auto rule = anisotropic_rule(2);
    for (auto kind : {EventKind::up_trav, EventKind::down_trav, EventKind::hor_trav, EventKind::internally_filled})
        for (int trial = 0; trial < 400; ++trial) {
            const int w = 1 + static_cast<int>(rng() % 7), h = 1 + static_cast<int>(rng() % 4);
            const SmallEventChecker checker(kind, w, h, rule);
            const std::uint32_t s = static_cast<std::uint32_t>(rng()) & ((1u << (w * h)) - 1);
            Grid g(w + 4, h + 4);
            for (int i = 0; i < w * h; ++i)
                if ((s >> i) & 1) g.set(2 + i % w, 2 + i / w);
            // noise outside the rectangle must not matter
            g.set(0, 0);
            g.set(w + 3, h + 3);
            g.set(1, 2);
            CHECK(checker(s) == event_holds(kind, Rect(2, 2, w + 1, h + 1), g, rule));
        }
}

TEST_CASE("down traversability mirrors up traversability") {
    const auto rule = anisotropic_rule(2);
    for (int w = 2; w <= 4; ++w)
        for (int h = 1; h <= 3; ++h) {
            const SmallEventChecker up(EventKind::up_trav, w, h, rule), down(EventKind::down_trav, w, h, rule);
            for (std::uint32_t s = 0; s < (1u << (w * h)); ++s) {
                std::uint32_t mirrored = 0;
                for (int i = 0; i < w * h; ++i)
                    if ((s >> i) & 1) mirrored |= 1u << ((h - 1 - i / w) * w + i % w);
                CHECK(up(s) == down(mirrored));
            }
        }
}

TEST_CASE("grows_to") {
    const auto rule = anisotropic_rule(2);
    Grid g(30, 10);
    const Rect inner = Rect::from_one_based(1, 20, 1, 5);
    CHECK(grows_to(inner, inner, g, rule));
    const Rect outer = Rect::from_one_based(1, 23, 1, 5);
    CHECK_FALSE(grows_to(inner, outer, g, rule));
    Grid full(30, 10);
    full.fill(true);
    CHECK(grows_to(inner, outer, full, rule));
    CHECK_THROWS_AS(grows_to(outer, inner, g, rule), Error);
}
