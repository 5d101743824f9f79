#include "bootperc/asymptotics.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "bootperc/error.hpp"

namespace bootperc {
namespace {

using boost::multiprecision::cpp_int;

constexpr double kLn10 = std::numbers::ln10;

cpp_int binom(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    cpp_int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <class F>
double bracketed_root(F f, double lo, double hi) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
    std::uintmax_t iters = 300;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

double cubic(double x, double u) {
    const double q = 1.0 - u;
    return ((x - u) * x - u * q) * x - u * q * q;
}

// Root of g(z) = s^3 - z(1+s+s^2) + (2+s)z^2 - z^3 in [0,1/2] for s < 1/2.
double complement_root(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a1 = 1.0 + s + s * s, a2 = 2.0 + s, s3 = s * s * s;
    auto g = [&](double z) { return s3 - z * (a1 - z * (a2 - z)); };
    return bracketed_root(g, 0.0, 0.5);
}

}  // namespace

AsymptoticConstants asymptotic_constants(int b) {
    AsymptoticConstants c;
    c.C1 = 1.0 / 12.0;
    c.C2 = std::log(8.0 / (3.0 * std::numbers::e)) / 6.0;
    c.b = b;
    c.growth_count = growth_count_formula(b);
    c.Cb = constant_Cb(b);
    return c;
}

double third_term_coefficient() { return (std::log(4.5) + 1.0) / 6.0; }

double alpha(double u) {
    if (!(u >= 0.0 && u <= 1.0)) fail(ErrorKind::invalid_parameter, "alpha needs u in [0,1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return 1.0;
    if (u > 0.5) return 1.0 - complement_root(1.0 - u);
    return bracketed_root([u](double x) { return cubic(x, u); }, u, 1.0);
}

double alpha_complement(double s) {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::invalid_parameter, "alpha_complement needs s in [0,1]");
    if (s < 0.5) return complement_root(s);
    return 1.0 - alpha(1.0 - s);
}

double alpha_residual(double u, double root) { return std::abs(cubic(root, u)); }

double f_of(double p, double y) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::invalid_parameter, "f needs 0 < p < 1");
    if (!(y > 0.0)) fail(ErrorKind::invalid_parameter, "f needs y > 0");
    const double log_s = y * std::log1p(-p);
    const double s = std::exp(log_s);
    if (s < 0.5) return -std::log1p(-complement_root(s));
    return -std::log(alpha(-std::expm1(log_s)));
}

DropletExponent droplet_log_prob_bounds(double p) {
    if (!(p > 0.0 && p < 1.0 / std::numbers::e)) fail(ErrorKind::invalid_parameter, "droplet bounds need 0 < p < 1/e");
    const double l = std::log(1.0 / p);
    const double e = -l * l / (6.0 * p) + std::log(8.0 / (3.0 * std::numbers::e)) / 3.0 * l / p;
    return {e, e};
}

std::uint64_t growth_count_formula(int b) {
    if (b < 2) fail(ErrorKind::invalid_parameter, "growth count needs b >= 2");
    const cpp_int shifted_num = (2 * b - 1) * binom(2 * b - 2, b);
    if (shifted_num % (b + 1) != 0) fail(ErrorKind::non_integral_term, "shift term is not an integer");
    const cpp_int total = binom(2 * b, b) - shifted_num / (b + 1) - 1 + binom(2 * b, b - 1) - binom(2 * b - 2, b - 3);
    if (total > cpp_int(std::numeric_limits<std::uint64_t>::max()))
        fail(ErrorKind::invalid_parameter, "growth count exceeds 64 bits");
    return static_cast<std::uint64_t>(total);
}

double constant_Cb(int b) {
    const double g = static_cast<double>(growth_count_formula(b));
    const double bb = b;
    return 2.0 / (bb - 1.0) * std::log(g / ((bb + 1.0) * std::numbers::e)) +
           2.0 * std::log((bb - 1.0) * (bb - 1.0) / (4.0 * (bb + 1.0)));
}

ThresholdTerms pc_terms(double logL, int b) {
    if (!(logL > 1.0) || !std::isfinite(logL)) fail(ErrorKind::domain_error, "ln ln ln L undefined for this L");
    const double t = std::log(logL);
    if (!(t > 0.0)) fail(ErrorKind::domain_error, "ln ln ln L undefined for this L");
    const double lt = std::log(t);
    if (b == 2) return {t * t / (12.0 * logL), -t * lt / (3.0 * logL), third_term_coefficient() * t / logL};
    const double k = (b - 1.0) * (b - 1.0) / (4.0 * (b + 1.0));
    return {k * t * t / logL, -4.0 * k * t * lt / logL, -k * constant_Cb(b) * t / logL};
}

double pc_threeterm(double logL, int b) { return pc_terms(logL, b).total(); }

double pc_factored(double logL) {
    const double t = std::log(logL);
    return t / (12.0 * logL) * (t - 4.0 * std::log(t) + 2.0 * std::log(9.0 * std::numbers::e / 2.0));
}

double invert_pc(double logL, double eta, std::vector<double>* iterates) {
    if (!(logL > 1.0) || !std::isfinite(logL)) fail(ErrorKind::domain_error, "invert_pc needs logL > 1");
    const auto c = asymptotic_constants(2);
    const double lt = std::log(logL);
    double p = c.C1 * lt * lt / logL;
    if (iterates) iterates->assign(1, p);
    for (int i = 0; i < 200; ++i) {
        if (!(p > 0.0 && p < 1.0)) break;
        const double l = -std::log(p);
        const double next = (c.C1 * l * l - (c.C2 - eta) * l) / logL;
        if (iterates) iterates->push_back(next);
        if (std::abs(next - p) < 1e-15 * std::abs(next)) return next;
        p = next;
    }
    fail(ErrorKind::no_convergence, "threshold inversion did not converge; logL too small");
}

double logL_for_threshold(double p, double eta) {
    const auto c = asymptotic_constants(2);
    const double l = -std::log(p);
    return (c.C1 * l * l - (c.C2 - eta) * l) / p;
}

std::vector<Crossover> ParadoxReport::all() const {
    return {second_exceeds_first_low, second_exceeds_first_high, second_within_one_percent,
            third_exceeds_first, third_exceeds_second, third_exceeds_first_two_sum};
}

ParadoxReport paradox_crossovers() {
    auto solve = [](auto f, double lo, double hi) {
        boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
        std::uintmax_t iters = 500;
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
        return 0.5 * (r.first + r.second);
    };
    auto make = [](const char* name, double t) {
        // ln L = e^t; log10 L = e^t / ln 10; log10 log10 L = (t - ln ln 10) / ln 10
        const double loglog10 = (t - std::log(kLn10)) / kLn10;
        return Crossover{name, t, std::exp(t) / kLn10, loglog10};
    };
    const double c3 = third_term_coefficient();
    ParadoxReport r;
    auto ratio = [](double t) { return 4.0 * std::log(t) - t; };
    r.second_exceeds_first_low = make("second_exceeds_first_low", solve(ratio, 1.1, std::numbers::e * 1.0));
    r.second_exceeds_first_high = make("second_exceeds_first_high", solve(ratio, 4.0, 20.0));
    r.second_within_one_percent =
        make("second_within_one_percent", solve([](double t) { return 4.0 * std::log(t) / t - 0.01; }, 100.0, 1e5));
    // isolated terms divided by t/ln L: t/12, ln(t)/3, c3
    r.third_exceeds_first = make("third_exceeds_first", solve([c3](double t) { return c3 - t / 12.0; }, 1.0, 100.0));
    r.third_exceeds_second =
        make("third_exceeds_second", solve([c3](double t) { return c3 - std::log(t) / 3.0; }, 1.0, 100.0));
    r.third_exceeds_first_two_sum = make(
        "third_exceeds_first_two_sum", solve([c3](double t) { return c3 - (t / 12.0 - std::log(t) / 3.0); }, 8.0, 100.0));
    return r;
}

}  // namespace bootperc
