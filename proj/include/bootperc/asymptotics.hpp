#pragma once

#include <cstdint>
#include <vector>

namespace bootperc {

struct AsymptoticConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    int b = 2;
    double Cb = 0.0;
    std::uint64_t growth_count = 0;
};

AsymptoticConstants asymptotic_constants(int b = 2);

// Coefficient of (ln ln L)/(ln L) in the three-term threshold expansion.
double third_term_coefficient();

// Positive root of X^3 - uX^2 - u(1-u)X - u(1-u)^2.
double alpha(double u);
// 1 - alpha(1 - s), accurate when s is small.
double alpha_complement(double s);
double alpha_residual(double u, double root);

double f_of(double p, double y);

struct DropletExponent {
    double lower = 0.0;
    double upper = 0.0;
};
DropletExponent droplet_log_prob_bounds(double p);

std::uint64_t growth_count_formula(int b);
double constant_Cb(int b);

struct ThresholdTerms {
    double first = 0.0;
    double second = 0.0;
    double third = 0.0;
    double total() const { return first + second + third; }
};

// Terms of the threshold expansion in logL = ln L.
ThresholdTerms pc_terms(double logL, int b = 2);
double pc_threeterm(double logL, int b = 2);
double pc_factored(double logL);

// Fixed point of p = [C1 ln^2(1/p) - (C2 - eta) ln(1/p)] / logL.
double invert_pc(double logL, double eta = 0.0, std::vector<double>* iterates = nullptr);
// logL at which invert_pc(logL, eta) returns p.
double logL_for_threshold(double p, double eta = 0.0);

struct Crossover {
    const char* name;
    double t;            // ln ln L
    double log10_L;      // log10 L (may be inf when only the next field is meaningful)
    double log10_log10_L;
};

struct ParadoxReport {
    Crossover second_exceeds_first_low;
    Crossover second_exceeds_first_high;
    Crossover second_within_one_percent;
    Crossover third_exceeds_first;          // isolated terms
    Crossover third_exceeds_second;         // isolated terms, absolute values
    Crossover third_exceeds_first_two_sum;  // partial-sum convention
    std::vector<Crossover> all() const;
};

ParadoxReport paradox_crossovers();

}  // namespace bootperc
