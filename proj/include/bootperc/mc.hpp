#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bootperc/events.hpp"
#include "bootperc/grid.hpp"
#include "bootperc/rule.hpp"

namespace bootperc {

// Counter-based site randomness: the uniform for (seed, trial, site) does not
// depend on evaluation order or thread count.
std::uint64_t splitmix64(std::uint64_t x);

class TrialStream {
public:
    TrialStream(std::uint64_t master_seed, std::uint64_t trial);
    double uniform(std::uint64_t site) const;
    bool infected(std::uint64_t site, double p) const { return uniform(site) < p; }

private:
    std::uint64_t key_;
};

// Seeds of trial `trial` on a width x height box, site index y*width+x.
Grid sample_seeds(std::uint64_t master_seed, std::uint64_t trial, int width, int height, double p);

struct McEstimate {
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
};

constexpr double wilson_z95 = 1.959963984540054;
McEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double z = wilson_z95);

// Worker count from BOOTPERC_WORKERS, else the hardware concurrency.
unsigned default_workers();

// Counts trials in [first, first+count) for which `trial_fn(worker, trial)`
// holds. Trials are split into contiguous blocks, one per worker.
std::uint64_t count_successes(std::uint64_t first, std::uint64_t count, unsigned workers,
                              const std::function<bool(unsigned, std::uint64_t)>& trial_fn);

struct EventSpec {
    NeighbourhoodRule rule = anisotropic_rule(2);
    int width = 1;
    int height = 1;
    EventKind kind = EventKind::internally_filled;
    double p = 0.0;
};

struct TrialPlan {
    std::uint64_t master_seed = 0;
    std::uint64_t trials = 1;
    EventSpec event;
    unsigned parallel_width = 1;
};

McEstimate estimate_event(const TrialPlan& plan);

struct PcProbe {
    double p = 0.0;
    McEstimate estimate;
    bool above_target = false;
    bool undecided = false;  // trial cap reached before the interval excluded the target
};

struct PcSearch {
    int L = 64;
    NeighbourhoodRule rule = anisotropic_rule(2);
    double target = 0.5;
    double tol = 0.002;
    std::uint64_t initial_trials = 64;
    std::uint64_t max_trials = std::uint64_t{1} << 20;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
};

struct PcResult {
    double p_c = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<PcProbe> probes;
    bool budget_exhausted = false;
};

// Fill indicator of [L]^2 for one trial at probability p.
class FillTrial {
public:
    FillTrial(int L, const NeighbourhoodRule& rule);
    bool operator()(std::uint64_t master_seed, std::uint64_t trial, double p);

private:
    int L_;
    Grid grid_;
    ClosureEngine engine_;
};

PcResult find_pc(const PcSearch& search);

struct EpsilonWindow {
    PcResult low;   // target eps
    PcResult high;  // target 1 - eps
    double width() const { return high.p_c - low.p_c; }
};

EpsilonWindow epsilon_window(PcSearch search, double eps);

struct GrowthStage {
    int ell = 0;
    int width = 0;       // ceil(e^{3 ell p} / 3p)
    int next_width = 0;  // width at ell + 1
    McEstimate horizontal;
    McEstimate vertical;
};

struct StagedGrowth {
    double p = 0.0;
    int last_ell = 0;  // ceil((1/3p) ln(1/p))
    std::vector<GrowthStage> stages;
    const GrowthStage& middle() const;
};

constexpr std::uint64_t default_cell_budget = std::uint64_t{1} << 26;

int trajectory_width(int ell, double p);
StagedGrowth staged_growth_experiment(double p, std::uint64_t master_seed, std::uint64_t trials = 20000,
                                      unsigned workers = 1, std::uint64_t cell_budget = default_cell_budget);

struct DropletRow {
    double p = 0.0;
    McEstimate estimate;
    double log_p_hat = 0.0;           // -inf when no trial succeeded
    double predicted_exponent = 0.0;  // two-term droplet exponent, NaN for p >= 1/e
    double exponent_ratio = 0.0;      // NaN when undefined
    bool zero_successes = false;
};

std::vector<DropletRow> droplet_if_scan(const std::vector<double>& p_list, int x, int y, std::uint64_t trials,
                                        std::uint64_t master_seed, unsigned workers = 1,
                                        const NeighbourhoodRule& rule = anisotropic_rule(2));

}  // namespace bootperc
