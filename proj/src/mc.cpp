#include "bootperc/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include "bootperc/asymptotics.hpp"
#include "bootperc/error.hpp"

namespace bootperc {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

TrialStream::TrialStream(std::uint64_t master_seed, std::uint64_t trial)
    : key_(splitmix64(splitmix64(master_seed) ^ (trial * 0xD1B54A32D192ED03ull))) {}

double TrialStream::uniform(std::uint64_t site) const {
    const std::uint64_t h = splitmix64(key_ ^ (site * 0x8CB92BA72F3D8DD7ull));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::invalid_parameter, "p must lie in [0,1]");
}

void seed_grid(Grid& grid, const TrialStream& stream, double p) {
    grid.fill(false);
    const int w = grid.width();
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < w; ++x)
            if (stream.infected(static_cast<std::uint64_t>(y) * w + x, p)) grid.set(x, y);
}

int padded_sites(const EventSpec& e) {
    switch (e.kind) {
        case EventKind::up_trav:
        case EventKind::down_trav: return e.width * (e.height + 1);
        case EventKind::hor_trav: return (e.width + 2) * e.height;
        case EventKind::internally_filled: return e.width * e.height;
    }
    return std::numeric_limits<int>::max();
}

// Per-worker event evaluation state.
class EventTrial {
public:
    explicit EventTrial(const EventSpec& e) : e_(e) {
        if (padded_sites(e) <= SmallLattice::max_sites)
            small_.emplace(e.kind, e.width, e.height, e.rule);
        else
            grid_ = Grid(e.width, e.height);
    }

    bool operator()(std::uint64_t master_seed, std::uint64_t trial) {
        const TrialStream stream(master_seed, trial);
        if (small_) {
            CellMask mask = 0;
            const int n = e_.width * e_.height;
            for (int i = 0; i < n; ++i)
                if (stream.infected(static_cast<std::uint64_t>(i), e_.p)) mask |= CellMask{1} << i;
            return (*small_)(mask);
        }
        seed_grid(grid_, stream, e_.p);
        return event_holds(e_.kind, Rect::from_size(0, 0, e_.width, e_.height), grid_, e_.rule);
    }

private:
    EventSpec e_;
    std::optional<SmallEventChecker> small_;
    Grid grid_;
};

}  // namespace

Grid sample_seeds(std::uint64_t master_seed, std::uint64_t trial, int width, int height, double p) {
    check_probability(p);
    if (width <= 0 || height <= 0) fail(ErrorKind::invalid_parameter, "box dimensions must be positive");
    Grid grid(width, height);
    seed_grid(grid, TrialStream(master_seed, trial), p);
    return grid;
}

McEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) fail(ErrorKind::invalid_parameter, "trials must be positive");
    if (successes > trials) fail(ErrorKind::invalid_argument, "successes exceed trials");
    McEstimate out;
    out.trials = trials;
    out.successes = successes;
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (ph + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
    out.p_hat = ph;
    out.ci_lo = std::clamp(std::min(centre - half, ph), 0.0, 1.0);
    out.ci_hi = std::clamp(std::max(centre + half, ph), 0.0, 1.0);
    if (successes == 0) out.ci_lo = 0.0;
    if (successes == trials) out.ci_hi = 1.0;
    return out;
}

unsigned default_workers() {
    if (const char* env = std::getenv("BOOTPERC_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        fail(ErrorKind::invalid_parameter, std::string("BOOTPERC_WORKERS must be a positive integer: ") + env);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t count_successes(std::uint64_t first, std::uint64_t count, unsigned workers,
                              const std::function<bool(unsigned, std::uint64_t)>& trial_fn) {
    if (workers == 0) fail(ErrorKind::invalid_parameter, "worker count must be positive");
    const std::uint64_t w = std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1));
    if (w == 1) {
        std::uint64_t s = 0;
        for (std::uint64_t t = first; t < first + count; ++t) s += trial_fn(0, t) ? 1 : 0;
        return s;
    }
    std::vector<std::uint64_t> partial(w, 0);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (std::uint64_t k = 0; k < w; ++k) {
        const std::uint64_t lo = first + count * k / w;
        const std::uint64_t hi = first + count * (k + 1) / w;
        threads.emplace_back([&, k, lo, hi] {
            try {
                std::uint64_t s = 0;
                for (std::uint64_t t = lo; t < hi; ++t) s += trial_fn(static_cast<unsigned>(k), t) ? 1 : 0;
                partial[k] = s;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    std::uint64_t total = 0;
    for (auto s : partial) total += s;
    return total;
}

McEstimate estimate_event(const TrialPlan& plan) {
    const EventSpec& e = plan.event;
    check_probability(e.p);
    if (e.width <= 0 || e.height <= 0) fail(ErrorKind::invalid_parameter, "box dimensions must be positive");
    if (plan.trials == 0) fail(ErrorKind::invalid_parameter, "trials must be positive");
    if (plan.parallel_width == 0) fail(ErrorKind::invalid_parameter, "parallel width must be positive");
    std::vector<EventTrial> states;
    for (unsigned k = 0; k < plan.parallel_width; ++k) states.emplace_back(e);
    const std::uint64_t s = count_successes(0, plan.trials, plan.parallel_width,
                                            [&](unsigned k, std::uint64_t t) { return states[k](plan.master_seed, t); });
    return wilson_estimate(s, plan.trials);
}

FillTrial::FillTrial(int L, const NeighbourhoodRule& rule) : L_(L), grid_(L, L), engine_(rule) {
    if (L <= 0) fail(ErrorKind::invalid_parameter, "L must be positive");
}

bool FillTrial::operator()(std::uint64_t master_seed, std::uint64_t trial, double p) {
    seed_grid(grid_, TrialStream(master_seed, trial), p);
    engine_.run(grid_);
    return grid_.full();
}

PcResult find_pc(const PcSearch& s) {
    if (s.L <= 0) fail(ErrorKind::invalid_parameter, "L must be positive");
    if (!(s.target > 0.0 && s.target < 1.0)) fail(ErrorKind::invalid_parameter, "target must lie in (0,1)");
    if (!(s.tol > 0.0)) fail(ErrorKind::invalid_parameter, "tolerance must be positive");
    if (s.initial_trials == 0 || s.max_trials < s.initial_trials)
        fail(ErrorKind::invalid_parameter, "trial cap must be at least the initial trial count");
    if (s.workers == 0) fail(ErrorKind::invalid_parameter, "worker count must be positive");

    std::vector<FillTrial> states;
    for (unsigned k = 0; k < s.workers; ++k) states.emplace_back(s.L, s.rule);

    PcResult out;
    while (out.hi - out.lo > s.tol) {
        PcProbe probe;
        probe.p = 0.5 * (out.lo + out.hi);
        std::uint64_t n = 0, successes = 0, next = s.initial_trials;
        for (;;) {
            successes += count_successes(n, next - n, s.workers, [&](unsigned k, std::uint64_t t) {
                return states[k](s.master_seed, t, probe.p);
            });
            n = next;
            probe.estimate = wilson_estimate(successes, n);
            if (probe.estimate.ci_lo > s.target || probe.estimate.ci_hi < s.target) break;
            if (n >= s.max_trials) {
                probe.undecided = true;
                break;
            }
            next = std::min(2 * n, s.max_trials);
        }
        probe.above_target = probe.estimate.p_hat >= s.target;
        if (probe.above_target)
            out.hi = probe.p;
        else
            out.lo = probe.p;
        out.budget_exhausted = out.budget_exhausted || probe.undecided;
        out.probes.push_back(probe);
    }
    out.p_c = 0.5 * (out.lo + out.hi);
    return out;
}

EpsilonWindow epsilon_window(PcSearch search, double eps) {
    if (!(eps > 0.0 && eps <= 0.5)) fail(ErrorKind::invalid_parameter, "eps must lie in (0, 1/2]");
    EpsilonWindow w;
    search.target = eps;
    w.low = find_pc(search);
    search.target = 1.0 - eps;
    w.high = eps == 0.5 ? w.low : find_pc(search);
    return w;
}

const GrowthStage& StagedGrowth::middle() const {
    if (stages.empty()) fail(ErrorKind::invalid_argument, "no growth stages");
    const int ell = std::max(1, static_cast<int>(std::lround(last_ell / 2.0)));
    for (const auto& st : stages)
        if (st.ell == ell) return st;
    return stages[stages.size() / 2];
}

int trajectory_width(int ell, double p) {
    const double w = std::ceil(std::exp(3.0 * ell * p) / (3.0 * p));
    if (!(w < static_cast<double>(std::numeric_limits<int>::max())))
        fail(ErrorKind::trajectory_too_large, "trajectory width overflows");
    return std::max(1, static_cast<int>(w));
}

StagedGrowth staged_growth_experiment(double p, std::uint64_t master_seed, std::uint64_t trials, unsigned workers,
                                      std::uint64_t cell_budget) {
    if (!(p > 0.0 && p <= 1.0)) fail(ErrorKind::invalid_parameter, "p must lie in (0,1]");
    if (trials == 0 || workers == 0) fail(ErrorKind::invalid_parameter, "trials and workers must be positive");
    StagedGrowth out;
    out.p = p;
    out.last_ell = std::max(1, static_cast<int>(std::ceil(std::log(1.0 / p) / (3.0 * p))));
    const double largest = static_cast<double>(trajectory_width(out.last_ell + 1, p)) * (out.last_ell + 1);
    if (largest > static_cast<double>(cell_budget))
        fail(ErrorKind::trajectory_too_large, "trajectory exceeds the cell budget");

    const NeighbourhoodRule rule = anisotropic_rule(2);
    for (int ell = 1; ell <= out.last_ell; ++ell) {
        GrowthStage st;
        st.ell = ell;
        st.width = trajectory_width(ell, p);
        st.next_width = trajectory_width(ell + 1, p);
        const Rect inner = Rect::from_size(0, 0, st.width, ell);
        const Rect wide = Rect::from_size(0, 0, st.next_width, ell);
        const Rect tall = Rect::from_size(0, 0, st.width, ell + 1);
        const std::uint64_t stage_seed = splitmix64(master_seed ^ (0xA24BAED4963EE407ull * ell));
        std::vector<Grid> grids(workers);
        auto run = [&](const Rect& outer, std::uint64_t salt) {
            for (auto& g : grids) g = Grid(outer.width(), outer.height());
            const std::uint64_t seed = splitmix64(stage_seed ^ salt);
            const std::uint64_t s = count_successes(0, trials, workers, [&](unsigned k, std::uint64_t t) {
                seed_grid(grids[k], TrialStream(seed, t), p);
                return grows_to(inner, outer, grids[k], rule);
            });
            return wilson_estimate(s, trials);
        };
        st.horizontal = run(wide, 1);
        st.vertical = run(tall, 2);
        out.stages.push_back(st);
    }
    return out;
}

std::vector<DropletRow> droplet_if_scan(const std::vector<double>& p_list, int x, int y, std::uint64_t trials,
                                        std::uint64_t master_seed, unsigned workers, const NeighbourhoodRule& rule) {
    if (x <= 0 || y <= 0) fail(ErrorKind::invalid_parameter, "box dimensions must be positive");
    if (static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(y) > default_cell_budget)
        fail(ErrorKind::trajectory_too_large, "droplet box exceeds the cell budget");
    std::vector<DropletRow> rows;
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        const double p = p_list[i];
        TrialPlan plan;
        plan.master_seed = splitmix64(master_seed + i);
        plan.trials = trials;
        plan.parallel_width = workers;
        plan.event = EventSpec{rule, x, y, EventKind::internally_filled, p};
        DropletRow row;
        row.p = p;
        row.estimate = estimate_event(plan);
        row.zero_successes = row.estimate.successes == 0;
        row.log_p_hat = row.zero_successes ? -std::numeric_limits<double>::infinity() : std::log(row.estimate.p_hat);
        if (p > 0.0 && p < 1.0 / std::numbers::e) {
            row.predicted_exponent = droplet_log_prob_bounds(p).lower;
            row.exponent_ratio = row.zero_successes ? std::numeric_limits<double>::quiet_NaN()
                                                    : row.log_p_hat / row.predicted_exponent;
        } else {
            row.predicted_exponent = std::numeric_limits<double>::quiet_NaN();
            row.exponent_ratio = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace bootperc
