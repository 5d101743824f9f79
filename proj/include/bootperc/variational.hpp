#pragma once

#include <vector>

namespace bootperc {

struct PotentialParams {
    double p = 0.0;
    int xi = 1;             // ceil(ln^2(1/p))
    double delta_xi = 0.0;  // 1 - 2/xi

    static PotentialParams from_p(double p);
    double log_inv_p() const;
    double psi_knee() const;     // 3 xi^2 / p
    double psi_end() const;      // 1 / p^2
    double phi_cutoff() const;   // (4/p) ln ln(1/p)
};

struct PathPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const PathPoint&) const = default;
};

using GrowthPath = std::vector<PathPoint>;

void validate_path(const GrowthPath& path);

double psi(double x, const PotentialParams& params);
double psi_derivative(double x, const PotentialParams& params);
// Zero at the cutoff itself.
double phi(double y, const PotentialParams& params);
// Limit from above at the cutoff.
double phi_closed(double y, const PotentialParams& params);
double phi_derivative(double y, const PotentialParams& params);

double psi_integral(double x0, double x1, const PotentialParams& params);
double phi_integral(double y0, double y1, const PotentialParams& params);

// Cost of growing an x-by-y rectangle to (x+s)-by-(y+t).
double U_p(double x, double y, double s, double t, const PotentialParams& params);

double segment_weight(PathPoint a, PathPoint b, const PotentialParams& params);
double path_weight(const GrowthPath& path, const PotentialParams& params);
// Same integral by adaptive Gauss-Kronrod quadrature.
double path_weight_quadrature(const GrowthPath& path, const PotentialParams& params, double tolerance = 1e-9);

struct MinimalPath {
    double weight = 0.0;
    GrowthPath path;
};

// Shortest monotone staircase on a log-spaced (in x), linear (in y) grid.
MinimalPath W_min(PathPoint a, PathPoint b, const PotentialParams& params, int grid_n = 512);

struct DeltaCurve {
    PotentialParams params;
    PathPoint u;
    PathPoint v;
    bool nonempty() const { return u.x <= v.x && u.y <= v.y; }
    double x_of(double y) const;
    double y_of(double x) const;
    GrowthPath sample(double y0, double y1, int segments) const;
};

DeltaCurve delta_curve(const PotentialParams& params);

// Weight along the curve between heights y0 and y1, by quadrature in y.
double delta_weight(const DeltaCurve& curve, double y0, double y1);

// Sum of U_p over consecutive rectangles of a staged trajectory.
double trajectory_cost(const GrowthPath& rectangles, const PotentialParams& params);

struct ClosedForm {
    double leading = 0.0;  // (1/6p) ln^2(1/p)
    double second = 0.0;   // -(4/p) ln(1/p) ln ln(1/p)
    double third = 0.0;    // -(1/3p) ln(8/3e) ln(1/p)
    double lower_segment = 0.0;  // (4/p) ln(1/p) ln ln(1/p)
    // Linearised integrand 1 - 3/xi - ln(8p/3) - 3py integrated exactly
    // from (4/p) ln ln(1/p) to (1/3p) ln(1/p), before asymptotic truncation.
    double linearised_integral = 0.0;
    double upper_part() const { return leading + second + third; }
    double with_lower_segment() const { return upper_part() + lower_segment; }
};

ClosedForm W_closed(const PotentialParams& params);

// Lower bound on the weight from (a1, a2) to u, given a2.
double lower_segment_bound(const PotentialParams& params, double a2);

// x on a monotone path at height y (the smallest such x).
double path_x_at(const GrowthPath& path, double y);

}  // namespace bootperc
