#include <cmath>
#include <numbers>

#include "bootperc/asymptotics.hpp"
#include "bootperc/error.hpp"
#include "bootperc/oracles.hpp"
#include "doctest.h"

using namespace bootperc;

namespace {

long long binomial_ll(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("constants") {
    const auto c = asymptotic_constants(2);
    CHECK(c.C1 == 1.0 / 12.0);
    CHECK(c.C2 < 0.0);
    CHECK(c.growth_count == 8);
    CHECK(std::abs(-(c.C2 + 2.0 * c.C1 * std::log(c.C1)) - (std::log(4.5) + 1.0) / 6.0) < 1e-12);
    CHECK(std::abs(constant_Cb(2) + 2.0 * std::log(9.0 * std::numbers::e / 2.0)) < 1e-12);
    CHECK(std::abs(2.0 * c.C2 - std::log(8.0 / (3.0 * std::numbers::e)) / 3.0) < 1e-15);
}

TEST_CASE("alpha roots") {
    CHECK(alpha(0.0) == 0.0);
    CHECK(alpha(1.0) == 1.0);
    CHECK(alpha(0.1) >= 0.07);
    double prev = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double u = i / 10000.0;
        const double a = alpha(u);
        CHECK(alpha_residual(u, a) < 1e-12 * std::max(1.0, u));
        CHECK(a > prev);
        if (u > 0.0) CHECK(a >= u - 3.0 * u * u);
        prev = a;
    }
    for (double u : {1e-12, 1e-8, 1.0 - 1e-6, 1.0 - 1e-12}) CHECK(alpha_residual(u, alpha(u)) < 1e-12);
    CHECK_THROWS_AS(alpha(-0.1), Error);
}

TEST_CASE("alpha complement matches direct root") {
    for (double s : {0.4, 0.2, 0.05}) CHECK(alpha_complement(s) == doctest::Approx(1.0 - alpha(1.0 - s)).epsilon(1e-12));
    // z ~ s^3 for small s
    CHECK(alpha_complement(1e-10) == doctest::Approx(1e-30).epsilon(1e-6));
}

TEST_CASE("f bounds") {
    CHECK(f_of(0.001, 10.0) >= 0.5 * 0.001 * 10.0 - 3.0 * 1e-6 * 100.0);
    CHECK(f_of(0.1, 1e5) < 1e-300);
    for (double p : {0.05, 0.01}) {
        double prev = INFINITY;
        for (double y = 1; y < 2000; y *= 1.3) {
            const double f = f_of(p, y);
            CHECK(f > 0.0);
            CHECK(f < prev);
            prev = f;
        }
    }
    // f = s^3 + Theta(s^4) with s = (1-p)^y
    for (double p : {0.05, 0.02, 0.005}) {
        for (double py = 3.0; py <= 12.0; py += 0.25) {
            const double s = std::pow(1.0 - p, py / p);
            CHECK(std::abs(f_of(p, py / p) - s * s * s) <= 2.0 * s * s * s * s);
        }
    }
    // relative error against e^{-3py} scales like ln^{-2}(1/p)
    for (double p : {0.05, 0.01, 0.001, 1e-4, 1e-6}) {
        const double y = 2.0 / p * std::log(std::log(1.0 / p));
        const double e = std::exp(-3.0 * p * y);
        const double scaled = std::abs(f_of(p, y) - e) / e * std::pow(std::log(1.0 / p), 2);
        CHECK(scaled > 0.5);
        CHECK(scaled < 3.0);
    }
}

TEST_CASE("droplet exponent") {
    const double l10 = std::log(10.0);
    const auto d = droplet_log_prob_bounds(0.1);
    CHECK(d.lower == d.upper);
    CHECK(d.lower == doctest::Approx(-l10 * l10 / 0.6 + std::log(8.0 / (3.0 * std::numbers::e)) * l10 / 0.3));
    CHECK(d.lower < 0.0);
    double prev_gap = INFINITY;
    for (double p : {1e-3, 1e-6, 1e-12, 1e-24, 1e-48}) {
        const double l = std::log(1.0 / p);
        const double gap = std::abs(droplet_log_prob_bounds(p).lower / (l * l / p) + 1.0 / 6.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.01);
    CHECK_THROWS_AS(droplet_log_prob_bounds(0.5), Error);
}

TEST_CASE("growth count formula") {
    CHECK(growth_count_formula(2) == 8);
    CHECK(growth_count_formula(3) == 28);
    for (int b = 2; b <= 12; ++b) {
        const long long shifted = (2 * b - 1) * binomial_ll(2 * b - 2, b);
        CHECK(shifted % (b + 1) == 0);
        const long long expect = binomial_ll(2 * b, b) - shifted / (b + 1) - 1 + binomial_ll(2 * b, b - 1) -
                                 binomial_ll(2 * b - 2, b - 3);
        CHECK(growth_count_formula(b) == static_cast<std::uint64_t>(expect));
    }
    CHECK(growth_count_formula(2) == enumerate_growth_configs(2).count);
    CHECK(growth_count_formula(3) == enumerate_growth_configs(3).count);
    CHECK_THROWS_AS(growth_count_formula(1), Error);
}

TEST_CASE("three-term expansion") {
    for (double e10 = 2; e10 <= 300; e10 += 7) {
        const double logL = std::pow(10.0, e10);
        CHECK(pc_threeterm(logL, 2) == doctest::Approx(pc_factored(logL)).epsilon(1e-13));
    }
    for (double logL : {1e4, 1e9, 1e40}) CHECK(pc_threeterm(logL, 2) == doctest::Approx(pc_terms(logL, 2).total()));
    // general-b form at b = 2 uses C(2) and must agree with the displayed constant
    const auto t2 = pc_terms(1e8, 2);
    const double t = std::log(1e8);
    CHECK(-constant_Cb(2) * t / 12.0 / 1e8 == doctest::Approx(t2.third).epsilon(1e-12));
    const auto t6 = pc_terms(1e6, 2);
    CHECK(-t6.second / t6.first > 0.7);
    CHECK(pc_threeterm(1e10, 3) > 0.0);
    CHECK_THROWS_AS(pc_terms(1.0, 2), Error);
    CHECK_THROWS_AS(pc_terms(0.5, 2), Error);
}

TEST_CASE("threshold inversion") {
    const double p_star = 0.02;
    CHECK(invert_pc(logL_for_threshold(p_star)) == doctest::Approx(p_star).epsilon(1e-12));
    double prev = 1.0;
    for (double e10 = 2; e10 <= 200; e10 += 3) {
        const double p = invert_pc(std::pow(10.0, e10));
        CHECK(p < prev);
        prev = p;
    }
    std::vector<double> its;
    const double fixed = invert_pc(1e6, 0.0, &its);
    REQUIRE(its.size() > 4);
    for (std::size_t i = 4; i < its.size(); ++i)
        CHECK(std::abs(its[i] - fixed) <= std::abs(its[i - 1] - fixed) + 1e-18);
    CHECK(invert_pc(1e6, 0.1) > fixed);
    CHECK_THROWS_AS(invert_pc(1.5), Error);
}

TEST_CASE("inversion minus expansion is small against the third term") {
    auto ratio = [](double logL) {
        const auto t = pc_terms(logL, 2);
        return std::abs(invert_pc(logL) - t.total()) / t.third;
    };
    for (double e10 = 3; e10 <= 12; e10 += 1) CHECK(ratio(std::pow(10.0, e10)) < 0.25);
    CHECK(ratio(1e60) < ratio(1e12));
    CHECK(ratio(1e300) < ratio(1e60));
    CHECK(ratio(1e300) < 0.05);
}

TEST_CASE("paradox crossovers") {
    const auto r = paradox_crossovers();
    CHECK(r.second_exceeds_first_low.t == doctest::Approx(1.4296).epsilon(1e-4));
    const double L = std::pow(10.0, r.second_exceeds_first_low.log10_L);
    CHECK(L > 65.0);
    CHECK(L < 67.0);
    CHECK(r.second_exceeds_first_high.t == doctest::Approx(8.613).epsilon(1e-4));
    CHECK(r.second_exceeds_first_high.log10_L > 2380.0);
    CHECK(r.second_exceeds_first_high.log10_L < 2400.0);
    CHECK(r.second_within_one_percent.log10_log10_L > 1402.0);
    CHECK(r.second_within_one_percent.log10_log10_L < 1405.0);
    CHECK(r.third_exceeds_first.log10_L == doctest::Approx(65.0).epsilon(0.01));
    CHECK(r.third_exceeds_second.log10_L == doctest::Approx(14.35).epsilon(0.01));
    // defining equations hold at the roots
    const double c3 = third_term_coefficient();
    CHECK(std::abs(c3 - r.third_exceeds_first.t / 12.0) < 1e-12);
    CHECK(std::abs(c3 - std::log(r.third_exceeds_second.t) / 3.0) < 1e-12);
    const double ts = r.third_exceeds_first_two_sum.t;
    CHECK(std::abs(c3 - ts / 12.0 + std::log(ts) / 3.0) < 1e-12);
    CHECK(r.all().size() == 6);
}
