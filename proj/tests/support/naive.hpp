#pragma once

#include "bootperc/grid.hpp"
#include "bootperc/rule.hpp"

namespace testsupport {

// Full sweep of the bootstrap operator, site by site.
inline bootperc::Grid naive_step(const bootperc::Grid& g, const bootperc::NeighbourhoodRule& rule) {
    bootperc::Grid out = g;
    const int w = g.width(), h = g.height();
    const bool wrap = g.topology() == bootperc::Topology::torus;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (g.get(x, y)) continue;
            int n = 0;
            for (const auto& o : rule.offsets()) {
                int nx = x + o.dx, ny = y + o.dy;
                if (wrap) {
                    nx = ((nx % w) + w) % w;
                    ny = ((ny % h) + h) % h;
                } else if (nx < 0 || nx >= w || ny < 0 || ny >= h) {
                    continue;
                }
                n += g.get(nx, ny);
            }
            if (n >= rule.threshold()) out.set(x, y);
        }
    return out;
}

inline bootperc::Grid naive_closure(bootperc::Grid g, const bootperc::NeighbourhoodRule& rule) {
    while (true) {
        bootperc::Grid next = naive_step(g, rule);
        if (next == g) return g;
        g = next;
    }
}

}  // namespace testsupport
