#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bootperc/error.hpp"
#include "bootperc/variational.hpp"
#include "doctest.h"

using namespace bootperc;

TEST_CASE("potential parameters") {
    const auto q = PotentialParams::from_p(0.05);
    CHECK(q.xi == 9);
    CHECK(q.delta_xi == doctest::Approx(1.0 - 2.0 / 9.0));
    for (double p : {0.2, 0.1, 1e-3, 1e-25}) {
        const auto r = PotentialParams::from_p(p);
        CHECK(r.xi >= 1);
        CHECK(r.delta_xi > 0.0);
        CHECK(r.delta_xi < 1.0);
    }
    // for ln(1/p) in (1, sqrt 2] the ceiling gives xi = 2 and delta_xi = 0
    CHECK(PotentialParams::from_p(0.3).delta_xi == 0.0);
    CHECK_THROWS_AS(PotentialParams::from_p(0.0), Error);
}

TEST_CASE("psi branches") {
    const auto q = PotentialParams::from_p(1e-6);
    const double knee = q.psi_knee(), end = q.psi_end();
    REQUIRE(knee < end);
    CHECK(psi(2.0 * end, q) == 0.0);
    const double at_knee = -(std::log(24.0 * q.p * q.xi * q.xi + 8.0 * q.p) + 1.0 / q.xi);
    CHECK(psi(knee * (1 - 1e-12), q) == doctest::Approx(at_knee));
    CHECK(psi(knee, q) == doctest::Approx(at_knee).epsilon(1e-12));
    CHECK(psi(end, q) == doctest::Approx(-(std::log(8.0 + 8.0 * q.p) + 1.0 / q.xi)));
    // non-increasing everywhere below the end, convex inside each branch
    double prev = INFINITY;
    for (double x = knee / 100.0; x <= end; x *= 1.5) {
        const double v = psi(x, q);
        CHECK(v <= prev);
        prev = v;
        const double h = x * 1e-3;
        const bool one_branch = (x + h < knee) || (x - h >= knee && x + h <= end);
        if (one_branch) CHECK(psi(x - h, q) + psi(x + h, q) - 2.0 * v >= -1e-12);
    }
    // the flat branch meets the decreasing one in a concave kink
    const double h = knee * 1e-3;
    CHECK(psi(knee - h, q) + psi(knee + h, q) - 2.0 * psi(knee, q) < 0.0);
    // the middle branch turns negative once 8p^2 x + 8p > e^{-1/xi}
    CHECK(psi(end, q) < 0.0);
    CHECK(psi(knee, q) > 0.0);
    CHECK_THROWS_AS(psi(0.0, q), Error);
}

TEST_CASE("psi at p = 0.05 has no middle branch") {
    const auto q = PotentialParams::from_p(0.05);
    CHECK(q.psi_knee() > q.psi_end());
    CHECK(psi(1e4, q) == 0.0);
    CHECK(psi(100.0, q) < 0.0);
}

TEST_CASE("phi") {
    const auto q = PotentialParams::from_p(0.05);
    const double cut = q.phi_cutoff();
    CHECK(phi(cut * 0.5, q) == 0.0);
    CHECK(phi(cut, q) == 0.0);
    CHECK(phi_closed(cut, q) == doctest::Approx(std::exp(-3.0 * 0.05 * cut)));
    const double y = 5.0 / 0.05 * std::log(std::log(20.0));
    CHECK(phi(y, q) == doctest::Approx(std::exp(-3.0 * 0.05 * y)));
    double prev = INFINITY;
    for (double t = cut * 1.01; t < cut * 3; t *= 1.1) {
        const double v = phi(t, q);
        CHECK(v > 0.0);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("growth cost U_p") {
    const auto q = PotentialParams::from_p(0.05);
    CHECK(U_p(10.0, 100.0, 0.0, 0.0, q) == 0.0);
    CHECK(U_p(10.0, 100.0, 7.0, 0.0, q) == doctest::Approx(q.delta_xi * 7.0 * phi(100.0, q)));
    CHECK_THROWS_AS(U_p(10.0, 100.0, -1.0, 0.0, q), Error);
    CHECK_THROWS_AS(U_p(10.0, 100.0, 0.0, -1.0, q), Error);
    // a unit step along the trajectory pays about 1 in the horizontal part
    const auto r = PotentialParams::from_p(1e-3);
    const double ell = 2.0 * r.phi_cutoff();
    auto x_at = [&](double h) { return std::exp(3.0 * r.p * h) / (3.0 * r.p); };
    const double s = x_at(ell + 1) - x_at(ell);
    const double cost = U_p(x_at(ell), ell, s, 1.0, r);
    CHECK(cost == doctest::Approx(r.delta_xi * (psi(x_at(ell + 1), r) + s * std::exp(-3.0 * r.p * (ell + 1)))));
    CHECK(s * std::exp(-3.0 * r.p * (ell + 1)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("segment integrals") {
    const auto q = PotentialParams::from_p(1e-6);
    const double knee = q.psi_knee(), end = q.psi_end(), cut = q.phi_cutoff();
    const PathPoint a{knee * 0.5, cut * 0.5};
    CHECK(path_weight({a, {a.x * 3, a.y}}, q) == doctest::Approx(phi(a.y, q) * a.x * 2));
    CHECK(path_weight({a, {a.x, a.y + 5}}, q) == doctest::Approx(psi(a.x, q) * 5));
    const GrowthPath diag = {a, {end * 2, cut * 2}};
    CHECK(path_weight(diag, q) == doctest::Approx(path_weight_quadrature(diag, q)).epsilon(1e-10));
    REQUIRE(knee * 4 < end);
    const GrowthPath mixed = {{knee * 0.5, cut * 1.1}, {knee * 2, cut * 1.1}, {knee * 3, cut * 1.3}, {end * 1.5, cut * 1.6}};
    CHECK(std::abs(path_weight(mixed, q) - path_weight_quadrature(mixed, q)) < 1e-9 * std::abs(path_weight(mixed, q)) + 1e-9);
    // L-shaped path against the constant-g closed form
    const PathPoint lo{knee * 2, 10.0}, hi{end * 0.5, 50.0};
    const double l_weight = path_weight({lo, {hi.x, lo.y}, hi}, q);
    CHECK(l_weight == doctest::Approx(phi(lo.y, q) * (hi.x - lo.x) + psi(hi.x, q) * (hi.y - lo.y)));
    CHECK_THROWS_AS(path_weight({hi, lo}, q), Error);
    CHECK_THROWS_AS(path_weight({lo, lo}, q), Error);
}

TEST_CASE("optimal curve") {
    const auto q = PotentialParams::from_p(1e-25);
    const auto c = delta_curve(q);
    REQUIRE(c.nonempty());
    CHECK(c.y_of(1.0 / (q.p * q.p)) == doctest::Approx(std::log(3.0 / q.p) / (3.0 * q.p)).epsilon(1e-13));
    CHECK(c.x_of(4.0 / q.p * std::log(std::log(1.0 / q.p))) == doctest::Approx(c.u.x).epsilon(1e-12));
    for (int k = 0; k < 100; ++k) {
        const double y = c.u.y + (c.v.y - c.u.y) * (k + 0.5) / 100.0;
        CHECK(std::abs(psi_derivative(c.x_of(y), q) - phi_derivative(y, q)) < 1e-9);
    }
    CHECK(!delta_curve(PotentialParams::from_p(0.05)).nonempty());
}

TEST_CASE("dynamic programme") {
    const auto q = PotentialParams::from_p(1e-25);
    const auto c = delta_curve(q);
    CHECK(W_min(c.u, c.u, q).weight == 0.0);
    CHECK(W_min(c.u, c.u, q).path.empty());
    CHECK_THROWS_AS(W_min(c.v, c.u, q), Error);
    CHECK_THROWS_AS(W_min(c.u, c.v, q, 32), Error);

    const auto m512 = W_min(c.u, c.v, q, 512);
    const auto m1024 = W_min(c.u, c.v, q, 1024);
    CHECK(m1024.weight <= m512.weight);
    CHECK(std::abs(m1024.weight - m512.weight) < 0.01 * std::abs(m1024.weight));
    const double along = delta_weight(c, c.u.y, c.v.y);
    CHECK(std::abs(m512.weight - along) < 0.02 * std::abs(along));
    CHECK(m512.weight >= along * (1 - 1e-9));
    CHECK(path_weight(m512.path, q) == doctest::Approx(m512.weight).epsilon(1e-9));
    for (int k = 1; k < 100; ++k) {
        const double y = c.u.y + (c.v.y - c.u.y) * (0.1 + 0.8 * k / 100.0);
        CHECK(std::abs(path_x_at(m512.path, y) / c.x_of(y) - 1.0) < 0.05);
    }
    // weight along the curve agrees with the sampled polyline
    CHECK(path_weight(c.sample(c.u.y, c.v.y, 2000), q) == doctest::Approx(along).epsilon(1e-4));
}

TEST_CASE("composition and decomposition") {
    const auto q = PotentialParams::from_p(1e-25);
    const auto c = delta_curve(q);
    const PathPoint a{c.u.x / 50.0, c.u.y}, b{c.v.x, c.v.y * 1.05};
    const double whole = W_min(a, b, q, 512).weight;
    const double tol = 0.01 * std::abs(whole);
    const PathPoint mid{c.x_of(0.5 * (c.u.y + c.v.y)), 0.5 * (c.u.y + c.v.y)};
    CHECK(whole <= W_min(a, mid, q, 512).weight + W_min(mid, b, q, 512).weight + tol);
    const double parts = W_min(a, c.u, q, 512).weight + W_min(c.u, c.v, q, 512).weight + W_min(c.v, b, q, 512).weight;
    CHECK(std::abs(whole - parts) <= tol);

    // below the phi cutoff horizontal moves are free and psi(1/p^2) < 0, so
    // running right first undercuts the three-part sum
    const PathPoint low{c.u.x / 50.0, c.u.y * 0.95};
    const auto direct = W_min(low, b, q, 512);
    const double low_parts =
        W_min(low, c.u, q, 512).weight + W_min(c.u, c.v, q, 512).weight + W_min(c.v, b, q, 512).weight;
    CHECK(direct.weight < 0.0);
    CHECK(low_parts > direct.weight + 1.0 * std::abs(direct.weight));
    CHECK(direct.weight == doctest::Approx(psi(b.x, q) * (b.y - low.y)).epsilon(1e-9));
}

TEST_CASE("paths further from the curve weigh more") {
    const auto q = PotentialParams::from_p(1e-25);
    const auto c = delta_curve(q);
    const int bands = 12;
    std::vector<double> h;
    for (int k = 0; k <= bands; ++k) h.push_back(c.u.y + (c.v.y - c.u.y) * k / bands);
    // up-then-right staircase with x <= x(y) on every band
    auto northwest = [&](double f) {
        GrowthPath path{c.u};
        for (int k = 1; k <= bands; ++k) {
            const double x = std::max(path.back().x, std::max(c.u.x, f * c.x_of(h[k - 1])));
            if (x > path.back().x) path.push_back({x, path.back().y});
            path.push_back({x, h[k]});
        }
        if (c.v.x > path.back().x) path.push_back(c.v);
        return path;
    };
    // right-then-up staircase with x >= x(y) on every band
    auto southeast = [&](double g) {
        GrowthPath path{c.u};
        for (int k = 1; k <= bands; ++k) {
            const double x = std::min(c.v.x, g * c.x_of(h[k]));
            if (x > path.back().x) path.push_back({x, path.back().y});
            path.push_back({path.back().x, h[k]});
        }
        return path;
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        GrowthPath near, far;
        if (trial % 2 == 0) {
            const double f1 = 0.05 + 0.9 * unit(rng), f2 = f1 + (1.0 - f1) * unit(rng);
            near = northwest(f2);
            far = northwest(f1);
        } else {
            const double g2 = 1.0 + 2.0 * unit(rng), g1 = g2 * (1.0 + 2.0 * unit(rng));
            near = southeast(g2);
            far = southeast(g1);
        }
        CHECK(path_weight(far, q) >= path_weight(near, q) * (1 - 1e-12));
        CHECK(path_weight(near, q) >= delta_weight(c, c.u.y, c.v.y) * (1 - 1e-12));
    }
}

TEST_CASE("staged trajectory cost matches the curve integral") {
    const auto q = PotentialParams::from_p(1e-25);
    const auto c = delta_curve(q);
    const auto rects = c.sample(c.u.y, c.v.y, 200);
    const double along = q.delta_xi * delta_weight(c, c.u.y, c.v.y);
    CHECK(std::abs(trajectory_cost(rects, q) - along) < 0.05 * std::abs(along));
    // at p = 0.05 the curve below 1/p^2 lies under the phi cutoff; unit steps
    const auto r = PotentialParams::from_p(0.05);
    const auto d = delta_curve(r);
    GrowthPath steps;
    for (int ell = 1; ell <= 27; ++ell) steps.push_back({d.x_of(ell), static_cast<double>(ell)});
    const double integral = r.delta_xi * delta_weight(d, 1.0, 27.0);
    CHECK(std::abs(trajectory_cost(steps, r) - integral) < 0.05 * std::abs(integral));
}

TEST_CASE("closed form") {
    const auto q = PotentialParams::from_p(0.05);
    const auto cf = W_closed(q);
    const double l = std::log(20.0);
    CHECK(cf.leading == doctest::Approx(l * l / 0.3));
    CHECK(cf.second < 0.0);
    CHECK(cf.third > 0.0);
    CHECK(std::log(8.0 / (3.0 * std::numbers::e)) < 0.0);
    CHECK(cf.with_lower_segment() == doctest::Approx(cf.leading + cf.third));
    // leading ratio approaches 1 only for astronomically small p
    double prev = -INFINITY;
    for (double p : {1e-2, 1e-10, 1e-100, 1e-300}) {
        const auto r = PotentialParams::from_p(p);
        const double ll = r.log_inv_p();
        const double ratio = W_closed(r).upper_part() * 6.0 * p / (ll * ll);
        CHECK(ratio > prev);
        prev = ratio;
    }
    CHECK(prev > 0.75);
    CHECK(prev < 1.0);
    // the dropped (24/p) ln^2 ln(1/p) term separates display and integral
    const auto r = PotentialParams::from_p(1e-25);
    const auto rf = W_closed(r);
    const double ll = std::log(r.log_inv_p());
    const double dropped = 24.0 / r.p * ll * ll;
    CHECK(rf.linearised_integral - rf.upper_part() == doctest::Approx(dropped).epsilon(0.01));
    const auto c = delta_curve(r);
    CHECK(std::abs(W_min(c.u, c.v, r, 512).weight - rf.linearised_integral) < 0.02 * rf.linearised_integral);
    CHECK(lower_segment_bound(r, 0.0) > 0.0);
}
