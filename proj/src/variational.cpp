#include "bootperc/variational.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "bootperc/error.hpp"

namespace bootperc {
namespace {

// b ln b - a ln a for 0 < a <= b, stable when b is close to a.
double xlogx_difference(double a, double b) { return (b - a) * std::log(b) + a * std::log1p((b - a) / a); }

double middle_psi_integral(double x0, double x1, const PotentialParams& q) {
    // integrand -(ln(8p^2) + ln(x + 1/p)) - 1/xi
    const double c = 1.0 / q.p;
    const double a = x0 + c, b = x1 + c;
    const double log_part = xlogx_difference(a, b) - (b - a);
    return -(std::log(8.0 * q.p * q.p) + 1.0 / q.xi) * (x1 - x0) - log_part;
}

template <class F>
double integrate(F f, double a, double b, double tolerance) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tolerance);
}

// Splits [a,b] at the given breakpoints and sums the pieces.
template <class F>
double integrate_pieces(F f, double a, double b, std::vector<double> cuts, double tolerance) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (hi > lo) total += integrate(f, lo, hi, tolerance);
    }
    return total;
}

}  // namespace

PotentialParams PotentialParams::from_p(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::invalid_parameter, "potentials need 0 < p < 1");
    PotentialParams q;
    q.p = p;
    const double l = std::log(1.0 / p);
    q.xi = std::max(1, static_cast<int>(std::ceil(l * l)));
    q.delta_xi = 1.0 - 2.0 / q.xi;
    return q;
}

double PotentialParams::log_inv_p() const { return -std::log(p); }
double PotentialParams::psi_knee() const { return 3.0 * static_cast<double>(xi) * xi / p; }
double PotentialParams::psi_end() const { return 1.0 / (p * p); }
double PotentialParams::phi_cutoff() const { return 4.0 / p * std::log(log_inv_p()); }

void validate_path(const GrowthPath& path) {
    for (std::size_t i = 1; i < path.size(); ++i) {
        const PathPoint a = path[i - 1], b = path[i];
        if (b.x < a.x || b.y < a.y) fail(ErrorKind::non_monotone_path, "path must be coordinate-wise non-decreasing");
        if (a == b) fail(ErrorKind::non_monotone_path, "consecutive path points must differ");
    }
}

double psi(double x, const PotentialParams& q) {
    if (!(x > 0.0)) fail(ErrorKind::invalid_parameter, "psi needs x > 0");
    if (x < q.psi_knee()) return -(std::log(24.0 * q.p * q.xi * q.xi + 8.0 * q.p) + 1.0 / q.xi);
    if (x <= q.psi_end()) return -(std::log(8.0 * q.p * q.p * x + 8.0 * q.p) + 1.0 / q.xi);
    return 0.0;
}

double psi_derivative(double x, const PotentialParams& q) {
    if (x >= q.psi_knee() && x <= q.psi_end()) return -1.0 / (x + 1.0 / q.p);
    return 0.0;
}

double phi(double y, const PotentialParams& q) {
    if (!(y > 0.0)) fail(ErrorKind::invalid_parameter, "phi needs y > 0");
    return y > q.phi_cutoff() ? std::exp(-3.0 * q.p * y) : 0.0;
}

double phi_closed(double y, const PotentialParams& q) {
    if (!(y > 0.0)) fail(ErrorKind::invalid_parameter, "phi needs y > 0");
    return y >= q.phi_cutoff() ? std::exp(-3.0 * q.p * y) : 0.0;
}

double phi_derivative(double y, const PotentialParams& q) {
    return y > q.phi_cutoff() ? -3.0 * q.p * std::exp(-3.0 * q.p * y) : 0.0;
}

double psi_integral(double x0, double x1, const PotentialParams& q) {
    if (!(x0 > 0.0) || x1 < x0) fail(ErrorKind::invalid_parameter, "psi integral needs 0 < x0 <= x1");
    const double knee = q.psi_knee(), end = q.psi_end();
    double total = 0.0;
    if (x0 < knee) total += (std::min(x1, knee) - x0) * psi(x0, q);
    const double lo = std::max(x0, knee), hi = std::min(x1, end);
    if (hi > lo) total += middle_psi_integral(lo, hi, q);
    return total;
}

double phi_integral(double y0, double y1, const PotentialParams& q) {
    if (!(y0 > 0.0) || y1 < y0) fail(ErrorKind::invalid_parameter, "phi integral needs 0 < y0 <= y1");
    const double lo = std::max(y0, q.phi_cutoff());
    if (!(y1 > lo)) return 0.0;
    const double k = 3.0 * q.p;
    return std::exp(-k * lo) * -std::expm1(-k * (y1 - lo)) / k;
}

double U_p(double x, double y, double s, double t, const PotentialParams& q) {
    if (s < 0.0 || t < 0.0) fail(ErrorKind::negative_growth, "rectangles must be nested");
    return q.delta_xi * (t * psi(x + s, q) + s * phi(y + t, q));
}

double segment_weight(PathPoint a, PathPoint b, const PotentialParams& q) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    if (dx < 0.0 || dy < 0.0) fail(ErrorKind::non_monotone_path, "segment must be non-decreasing");
    if (dx == 0.0 && dy == 0.0) return 0.0;
    if (dx == 0.0) return psi(a.x, q) * dy;
    if (dy == 0.0) return phi(a.y, q) * dx;
    return dy / dx * psi_integral(a.x, b.x, q) + dx / dy * phi_integral(a.y, b.y, q);
}

double path_weight(const GrowthPath& path, const PotentialParams& q) {
    validate_path(path);
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) total += segment_weight(path[i - 1], path[i], q);
    return total;
}

double path_weight_quadrature(const GrowthPath& path, const PotentialParams& q, double tolerance) {
    validate_path(path);
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const PathPoint a = path[i - 1], b = path[i];
        const double dx = b.x - a.x, dy = b.y - a.y;
        auto integrand = [&](double t) { return psi(a.x + t * dx, q) * dy + phi(a.y + t * dy, q) * dx; };
        std::vector<double> cuts;
        if (dx > 0.0)
            for (double c : {q.psi_knee(), q.psi_end()}) cuts.push_back((c - a.x) / dx);
        if (dy > 0.0) cuts.push_back((q.phi_cutoff() - a.y) / dy);
        total += integrate_pieces(integrand, 0.0, 1.0, cuts, tolerance);
    }
    return total;
}

MinimalPath W_min(PathPoint a, PathPoint b, const PotentialParams& q, int grid_n) {
    if (a.x > b.x || a.y > b.y) fail(ErrorKind::invalid_box, "W_min needs a <= b coordinate-wise");
    if (!(a.x > 0.0 && a.y > 0.0)) fail(ErrorKind::invalid_parameter, "W_min needs a positive corner");
    if (grid_n < 64) fail(ErrorKind::invalid_parameter, "W_min needs grid_n >= 64");
    if (a == b) return {};
    const int n = grid_n;
    std::vector<double> xs(n + 1), ys(n + 1);
    const double log_ratio = std::log(b.x / a.x);
    for (int i = 0; i <= n; ++i) {
        xs[i] = i == n ? b.x : a.x * std::exp(log_ratio * i / n);
        ys[i] = i == n ? b.y : a.y + (b.y - a.y) * i / n;
    }
    std::vector<double> vertical(n + 1), horizontal(n + 1);
    for (int i = 0; i <= n; ++i) vertical[i] = psi(xs[i], q);
    for (int j = 0; j <= n; ++j) horizontal[j] = phi_closed(ys[j], q);

    const auto stride = static_cast<std::size_t>(n + 1);
    std::vector<double> cost(stride * stride);
    std::vector<unsigned char> from_left(stride * stride, 0);
    auto at = [stride](int i, int j) { return static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(i); };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (i == 0 && j == 0) {
                cost[0] = 0.0;
                continue;
            }
            double best = INFINITY;
            bool left = false;
            if (i > 0) {
                best = cost[at(i - 1, j)] + horizontal[j] * (xs[i] - xs[i - 1]);
                left = true;
            }
            if (j > 0) {
                const double up = cost[at(i, j - 1)] + vertical[i] * (ys[j] - ys[j - 1]);
                if (up < best) {
                    best = up;
                    left = false;
                }
            }
            cost[at(i, j)] = best;
            from_left[at(i, j)] = left;
        }

    MinimalPath result;
    result.weight = cost[at(n, n)];
    std::vector<PathPoint> nodes;
    int i = n, j = n;
    nodes.push_back({xs[i], ys[j]});
    while (i > 0 || j > 0) {
        if (from_left[at(i, j)]) --i;
        else --j;
        nodes.push_back({xs[i], ys[j]});
    }
    std::reverse(nodes.begin(), nodes.end());
    // keep corners only
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (k > 0 && nodes[k] == nodes[k - 1]) continue;
        if (k > 0 && k + 1 < nodes.size()) {
            const bool straight = (nodes[k - 1].x == nodes[k].x && nodes[k].x == nodes[k + 1].x) ||
                                  (nodes[k - 1].y == nodes[k].y && nodes[k].y == nodes[k + 1].y);
            if (straight) continue;
        }
        result.path.push_back(nodes[k]);
    }
    return result;
}

double DeltaCurve::x_of(double y) const { return std::exp(3.0 * params.p * y) / (3.0 * params.p); }
double DeltaCurve::y_of(double x) const { return std::log(3.0 * params.p * x) / (3.0 * params.p); }

GrowthPath DeltaCurve::sample(double y0, double y1, int segments) const {
    if (segments < 1 || y1 < y0) fail(ErrorKind::invalid_parameter, "sample needs y0 <= y1 and segments >= 1");
    GrowthPath path;
    for (int k = 0; k <= segments; ++k) {
        const double y = k == segments ? y1 : y0 + (y1 - y0) * k / segments;
        path.push_back({x_of(y), y});
    }
    return path;
}

DeltaCurve delta_curve(const PotentialParams& q) {
    if (!(q.p < 1.0 / std::numbers::e)) fail(ErrorKind::invalid_parameter, "the optimal curve needs p < 1/e");
    const double l = q.log_inv_p();
    DeltaCurve c;
    c.params = q;
    c.u = {std::pow(l, 12) / (3.0 * q.p), 4.0 / q.p * std::log(l)};
    c.v = {1.0 / (q.p * q.p), std::log(3.0 / q.p) / (3.0 * q.p)};
    return c;
}

double delta_weight(const DeltaCurve& curve, double y0, double y1) {
    const PotentialParams& q = curve.params;
    auto integrand = [&](double y) {
        const double x = curve.x_of(y);
        return psi(x, q) + phi_closed(y, q) * std::exp(3.0 * q.p * y);
    };
    const std::vector<double> cuts = {curve.y_of(q.psi_knee()), curve.y_of(q.psi_end()), q.phi_cutoff()};
    return integrate_pieces(integrand, y0, y1, cuts, 1e-12);
}

double trajectory_cost(const GrowthPath& rectangles, const PotentialParams& q) {
    double total = 0.0;
    for (std::size_t k = 1; k < rectangles.size(); ++k) {
        const PathPoint r = rectangles[k - 1], next = rectangles[k];
        total += U_p(r.x, r.y, next.x - r.x, next.y - r.y, q);
    }
    return total;
}

ClosedForm W_closed(const PotentialParams& q) {
    if (!(q.p < 1.0 / std::numbers::e)) fail(ErrorKind::invalid_parameter, "closed form needs p < 1/e");
    const double l = q.log_inv_p(), ll = std::log(l);
    ClosedForm c;
    c.leading = l * l / (6.0 * q.p);
    c.second = -4.0 / q.p * l * ll;
    c.third = -std::log(8.0 / (3.0 * std::numbers::e)) * l / (3.0 * q.p);
    c.lower_segment = 4.0 / q.p * l * ll;
    const double y0 = 4.0 / q.p * ll, y1 = l / (3.0 * q.p);
    c.linearised_integral =
        (1.0 - 3.0 / q.xi - std::log(8.0 * q.p / 3.0)) * (y1 - y0) - 1.5 * q.p * (y1 * y1 - y0 * y0);
    return c;
}

double lower_segment_bound(const PotentialParams& q, double a2) {
    const DeltaCurve c = delta_curve(q);
    return -(std::log(8.0 * q.p * q.p * c.u.x + 8.0 * q.p) + 1.0 / q.xi) * (c.u.y - a2);
}

double path_x_at(const GrowthPath& path, double y) {
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (path[k].y == y) return path[k].x;
        if (k + 1 < path.size() && path[k].y < y && y < path[k + 1].y) {
            const PathPoint a = path[k], b = path[k + 1];
            return a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
        }
    }
    fail(ErrorKind::invalid_argument, "height outside the path");
}

}  // namespace bootperc
