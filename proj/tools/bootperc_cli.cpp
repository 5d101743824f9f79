#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bootperc/asymptotics.hpp"
#include "bootperc/error.hpp"
#include "bootperc/experiment.hpp"
#include "bootperc/mc.hpp"
#include "bootperc/oracles.hpp"
#include "bootperc/report.hpp"
#include "bootperc/variational.hpp"
#include "json.hpp"

using namespace bootperc;
using nlohmann::json;

namespace {

constexpr int exit_bad_spec = 2;
constexpr int exit_compute = 3;
constexpr int exit_io = 4;

// JSON has no NaN or infinity; those become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

NeighbourhoodRule resolve_rule(const ExperimentSpec& s) {
    if (s.rule == "anisotropic") return anisotropic_rule(s.b);
    return parse_rule(s.rule);
}

unsigned workers_of(const ExperimentSpec& s) { return s.workers ? s.workers : default_workers(); }

std::string format_of(const ExperimentSpec& s, const char* fallback) { return s.format.empty() ? fallback : s.format; }

void require_format(const std::string& format, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (format == a) return;
    fail(ErrorKind::bad_spec, "format " + format + " is not available for this command");
}

void emit(const ExperimentSpec& s, const std::string& content) {
    if (s.out.empty() || s.out == "-")
        std::cout << content;
    else
        write_file_atomic(s.out, content);
}

json estimate_json(const McEstimate& e) {
    return {{"p_hat", e.p_hat}, {"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi}, {"trials", e.trials}, {"successes", e.successes}};
}

json pc_json(const PcResult& r) {
    json probes = json::array();
    for (const auto& pr : r.probes)
        probes.push_back({{"p", pr.p},
                          {"trials", pr.estimate.trials},
                          {"successes", pr.estimate.successes},
                          {"ci_lo", pr.estimate.ci_lo},
                          {"ci_hi", pr.estimate.ci_hi},
                          {"above_target", pr.above_target},
                          {"undecided", pr.undecided}});
    return {{"p_c", r.p_c}, {"lo", r.lo}, {"hi", r.hi}, {"budget_exhausted", r.budget_exhausted}, {"probes", probes}};
}

std::string probe_csv(const PcResult& r) {
    std::ostringstream os;
    os << "p,trials,successes,p_hat,ci_lo,ci_hi,above_target,undecided\n";
    for (const auto& pr : r.probes)
        os << csv_number(pr.p) << ',' << pr.estimate.trials << ',' << pr.estimate.successes << ','
           << csv_number(pr.estimate.p_hat) << ',' << csv_number(pr.estimate.ci_lo) << ','
           << csv_number(pr.estimate.ci_hi) << ',' << (pr.above_target ? 1 : 0) << ',' << (pr.undecided ? 1 : 0)
           << '\n';
    return os.str();
}

PcSearch search_of(const ExperimentSpec& s) {
    PcSearch search;
    search.L = s.L;
    search.rule = resolve_rule(s);
    search.target = s.target;
    search.tol = s.tol;
    search.max_trials = s.max_trials;
    search.initial_trials = std::min<std::uint64_t>(64, s.max_trials);
    search.master_seed = s.seed;
    search.workers = workers_of(s);
    return search;
}

std::string run_simulate(const ExperimentSpec& s) {
    TrialPlan plan;
    plan.master_seed = s.seed;
    plan.trials = s.trials;
    plan.parallel_width = workers_of(s);
    plan.event = EventSpec{resolve_rule(s), s.width, s.height, parse_event(s.event), s.p};
    const McEstimate e = estimate_event(plan);
    const std::string format = format_of(s, "json");
    require_format(format, {"json", "csv"});
    if (format == "csv")
        return "event,p,width,height,trials,successes,p_hat,ci_lo,ci_hi,seed\n" + s.event + ',' + csv_number(s.p) +
               ',' + std::to_string(s.width) + ',' + std::to_string(s.height) + ',' + std::to_string(e.trials) + ',' +
               std::to_string(e.successes) + ',' + csv_number(e.p_hat) + ',' + csv_number(e.ci_lo) + ',' +
               csv_number(e.ci_hi) + ',' + std::to_string(s.seed) + '\n';
    json j = estimate_json(e);
    j["event"] = s.event;
    j["p"] = s.p;
    j["width"] = s.width;
    j["height"] = s.height;
    j["seed"] = s.seed;
    return j.dump() + '\n';
}

std::string run_closure(const ExperimentSpec& s) {
    const InfectionRender r = render_infection(s.L, s.p, resolve_rule(s), s.seed);
    const std::string format = format_of(s, "json");
    require_format(format, {"json", "svg", "png"});
    if (format == "svg") return to_svg(r);
    if (format == "png") return to_png(r);
    const auto regions = stable_regions(r.result.grid, resolve_rule(s));
    int non_rect = 0;
    for (const auto& reg : regions) non_rect += reg.closed && !reg.rectangular ? 1 : 0;
    json j{{"L", s.L},
           {"p", s.p},
           {"seed", s.seed},
           {"rule", s.rule},
           {"initial", r.seeds.count()},
           {"infected", r.result.grid.count()},
           {"generations", r.result.generations},
           {"full", r.result.grid.full()},
           {"regions", regions.size()},
           {"non_rectangular_regions", non_rect}};
    return j.dump(2) + '\n';
}

std::string run_traverse(const ExperimentSpec& s) {
    const EventKind kind = parse_event(s.event);
    const NeighbourhoodRule rule = resolve_rule(s);
    double prob = 0.0;
    std::string method;
    if (kind == EventKind::hor_trav && rule == anisotropic_rule(2)) {
        prob = hor_trav_prob_exact(s.width, s.height, s.p);
        method = "column_dp";
    } else {
        prob = event_prob_exhaustive(Rect::from_size(0, 0, s.width, s.height), s.p, kind, rule, workers_of(s));
        method = "exhaustive";
    }
    const std::string format = format_of(s, "json");
    require_format(format, {"json", "csv"});
    if (format == "csv")
        return "event,width,height,p,probability,method\n" + s.event + ',' + std::to_string(s.width) + ',' +
               std::to_string(s.height) + ',' + csv_number(s.p) + ',' + csv_number(prob) + ',' + method + '\n';
    json j{{"event", s.event}, {"width", s.width}, {"height", s.height},
           {"p", s.p},         {"probability", prob}, {"method", method}};
    return j.dump(2) + '\n';
}

std::string run_pc_search(const ExperimentSpec& s) {
    const PcSearch search = search_of(s);
    if (!s.L_list.empty()) {
        const ComparisonReport report = comparison_report(s.L_list, search);
        if (!s.plot.empty()) write_file_atomic(s.plot, report.to_svg());
        const std::string format = format_of(s, "csv");
        require_format(format, {"csv", "json"});
        if (format == "csv") return report.to_csv();
        json rows = json::array();
        for (const auto& r : report.rows)
            rows.push_back({{"L", r.L},
                            {"logL", r.logL},
                            {"measured", pc_json(r.measured)},
                            {"first_term", r.first},
                            {"two_term", r.first_two},
                            {"three_term", r.three},
                            {"inverted", finite_or_null(r.inverted)}});
        json j{{"rows", rows},
               {"measured_decreasing", report.measured_decreasing()},
               {"far_from_all_approximations", report.far_from_all_approximations()}};
        return j.dump(2) + '\n';
    }
    const PcResult r = find_pc(search);
    const std::string format = format_of(s, "json");
    require_format(format, {"json", "csv"});
    if (format == "csv") return probe_csv(r);
    json j = pc_json(r);
    j["L"] = s.L;
    j["target"] = s.target;
    j["seed"] = s.seed;
    return j.dump(2) + '\n';
}

std::string run_window(const ExperimentSpec& s) {
    const EpsilonWindow w = epsilon_window(search_of(s), s.eps);
    const std::string format = format_of(s, "json");
    require_format(format, {"json", "csv"});
    const bool flagged = w.low.budget_exhausted || w.high.budget_exhausted;
    if (format == "csv")
        return "L,eps,p_eps,p_one_minus_eps,window,budget_exhausted\n" + std::to_string(s.L) + ',' +
               csv_number(s.eps) + ',' + csv_number(w.low.p_c) + ',' + csv_number(w.high.p_c) + ',' +
               csv_number(w.width()) + ',' + (flagged ? "1" : "0") + '\n';
    json j{{"L", s.L},         {"eps", s.eps},     {"p_eps", w.low.p_c}, {"p_one_minus_eps", w.high.p_c},
           {"window", w.width()}, {"budget_exhausted", flagged}};
    return j.dump(2) + '\n';
}

std::string run_droplet(const ExperimentSpec& s) {
    const std::vector<double> grid = s.p_grid.empty() ? std::vector<double>{s.p} : s.p_grid;
    const auto rows = droplet_if_scan(grid, s.width, s.height, s.trials, s.seed, workers_of(s), resolve_rule(s));
    const std::string format = format_of(s, "json");
    require_format(format, {"json", "csv"});
    if (format == "csv") {
        std::string out = "p,width,height,trials,successes,p_hat,ci_lo,ci_hi,log_p_hat,predicted_exponent,ratio,zero_successes\n";
        for (const auto& r : rows)
            out += csv_number(r.p) + ',' + std::to_string(s.width) + ',' + std::to_string(s.height) + ',' +
                   std::to_string(r.estimate.trials) + ',' + std::to_string(r.estimate.successes) + ',' +
                   csv_number(r.estimate.p_hat) + ',' + csv_number(r.estimate.ci_lo) + ',' +
                   csv_number(r.estimate.ci_hi) + ',' + csv_number(r.log_p_hat) + ',' +
                   csv_number(r.predicted_exponent) + ',' + csv_number(r.exponent_ratio) + ',' +
                   (r.zero_successes ? "1" : "0") + '\n';
        return out;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        json j = estimate_json(r.estimate);
        j["p"] = r.p;
        j["log_p_hat"] = finite_or_null(r.log_p_hat);
        j["predicted_exponent"] = finite_or_null(r.predicted_exponent);
        j["exponent_ratio"] = finite_or_null(r.exponent_ratio);
        j["zero_successes"] = r.zero_successes;
        arr.push_back(j);
    }
    json j{{"width", s.width}, {"height", s.height}, {"seed", s.seed}, {"rows", arr}};
    return j.dump(2) + '\n';
}

std::string run_enumerate(const ExperimentSpec& s) {
    require_format(format_of(s, "json"), {"json"});
    std::set<ShapeClass> shapes;
    json j;
    if (s.enumerate == "pairs") {
        shapes = enumerate_spanning_pairs(anisotropic_rule(s.b));
        j["b"] = s.b;
    } else if (s.enumerate == "infectors") {
        shapes = enumerate_infectors(s.rows);
        j["rows"] = s.rows;
    } else if (s.enumerate == "growth") {
        const GrowthConfigs g = enumerate_growth_configs(s.b);
        shapes = g.shapes;
        j["b"] = s.b;
        j["formula"] = growth_count_formula(s.b);
    } else {
        fail(ErrorKind::bad_spec, "enumerate must be pairs, infectors or growth");
    }
    j["kind"] = s.enumerate;
    j["count"] = shapes.size();
    j["shapes"] = json::parse(to_json(shapes));
    return j.dump(2) + '\n';
}

std::string run_asymptotics(const ExperimentSpec& s) {
    const ThresholdTerms t = pc_terms(s.logL, s.b);
    double inverted = std::numeric_limits<double>::quiet_NaN();
    if (s.b == 2) {
        try {
            inverted = invert_pc(s.logL, s.eta);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::no_convergence) throw;
        }
    }
    const std::string format = format_of(s, "csv");
    require_format(format, {"csv", "json"});
    if (format == "csv")
        return "logL,b,first,second,third,threeterm,inverted\n" + csv_number(s.logL) + ',' + std::to_string(s.b) + ',' +
               csv_number(t.first) + ',' + csv_number(t.second) + ',' + csv_number(t.third) + ',' +
               csv_number(t.total()) + ',' + csv_number(inverted) + '\n';
    json j{{"logL", s.logL},  {"b", s.b},           {"first", t.first},
           {"second", t.second}, {"third", t.third}, {"threeterm", t.total()},
           {"inverted", finite_or_null(inverted)}};
    return j.dump(2) + '\n';
}

std::string run_variational(const ExperimentSpec& s) {
    require_format(format_of(s, "json"), {"json"});
    const PotentialParams params = PotentialParams::from_p(s.p);
    const DeltaCurve curve = delta_curve(params);
    const ClosedForm closed = W_closed(params);
    json j{{"p", s.p},
           {"xi", params.xi},
           {"delta_xi", params.delta_xi},
           {"u", {curve.u.x, curve.u.y}},
           {"v", {curve.v.x, curve.v.y}},
           {"delta_nonempty", curve.nonempty()},
           {"closed_form",
            {{"leading", closed.leading},
             {"second", closed.second},
             {"third", closed.third},
             {"upper_part", closed.upper_part()},
             {"linearised_integral", closed.linearised_integral}}}};
    if (curve.nonempty()) {
        const MinimalPath m = W_min(curve.u, curve.v, params, s.grid_n);
        j["delta_weight"] = delta_weight(curve, curve.u.y, curve.v.y);
        j["W_min"] = m.weight;
        j["grid_n"] = s.grid_n;
    } else {
        j["delta_weight"] = nullptr;
        j["W_min"] = nullptr;
    }
    return j.dump(2) + '\n';
}

std::string run_paradox(const ExperimentSpec& s) {
    const std::string format = format_of(s, "csv");
    require_format(format, {"csv", "json"});
    if (format == "csv") return paradox_csv();
    json arr = json::array();
    for (const Crossover& c : paradox_crossovers().all())
        arr.push_back({{"name", c.name},
                       {"t", c.t},
                       {"log10_L", finite_or_null(c.log10_L)},
                       {"log10_log10_L", finite_or_null(c.log10_log10_L)}});
    return json{{"crossovers", arr}}.dump(2) + '\n';
}

std::string run_render(const ExperimentSpec& s) {
    const InfectionRender r = render_infection(s.L, s.p, resolve_rule(s), s.seed);
    const std::string format = format_of(s, "svg");
    require_format(format, {"svg", "png"});
    return format == "png" ? to_png(r) : to_svg(r);
}

std::string dispatch(const ExperimentSpec& s) {
    switch (s.command) {
        case Command::simulate: return run_simulate(s);
        case Command::closure: return run_closure(s);
        case Command::traverse: return run_traverse(s);
        case Command::pc_search: return run_pc_search(s);
        case Command::window: return run_window(s);
        case Command::droplet: return run_droplet(s);
        case Command::enumerate: return run_enumerate(s);
        case Command::asymptotics: return run_asymptotics(s);
        case Command::variational: return run_variational(s);
        case Command::paradox: return run_paradox(s);
        case Command::render: return run_render(s);
    }
    fail(ErrorKind::bad_spec, "unknown command");
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::bad_spec:
        case ErrorKind::invalid_parameter:
        case ErrorKind::invalid_argument: return exit_bad_spec;
        case ErrorKind::io_error: return exit_io;
        default: return exit_compute;
    }
}

int report_error(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

class Overrides {
public:
    template <typename T>
    CLI::Option* add(CLI::App& app, const std::string& name, T ExperimentSpec::*field, const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app.add_option(name, *value, help);
        setters_.push_back([opt, value, field](ExperimentSpec& s) {
            if (opt->count()) s.*field = *value;
        });
        return opt;
    }

    void apply(ExperimentSpec& s) const {
        for (const auto& set : setters_) set(s);
    }

private:
    std::vector<std::function<void(ExperimentSpec&)>> setters_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic bootstrap percolation laboratory"};
    app.require_subcommand(0, 1);
    std::string config_path;
    bool dump_spec = false;
    app.add_option("--config", config_path, "JSON experiment spec; flags override its values");
    app.add_flag("--dump-spec", dump_spec, "print the resolved experiment spec and exit");

    Overrides o;
    o.add(app, "--rule", &ExperimentSpec::rule, "anisotropic[:b], two-neighbour or duarte");
    o.add(app, "--b", &ExperimentSpec::b, "anisotropy parameter");
    o.add(app, "--width,-x", &ExperimentSpec::width, "box width");
    o.add(app, "--height,-y", &ExperimentSpec::height, "box height");
    o.add(app, "--L", &ExperimentSpec::L, "side of the square lattice");
    o.add(app, "--L-list", &ExperimentSpec::L_list, "lattice sides for the comparison report");
    o.add(app, "--p,-p", &ExperimentSpec::p, "site probability");
    o.add(app, "--p-grid", &ExperimentSpec::p_grid, "probabilities to scan");
    o.add(app, "--event", &ExperimentSpec::event, "up_trav, down_trav, hor_trav or internally_filled");
    o.add(app, "--trials", &ExperimentSpec::trials, "Monte Carlo trials");
    o.add(app, "--seed", &ExperimentSpec::seed, "master seed");
    o.add(app, "--workers", &ExperimentSpec::workers, "worker threads (default BOOTPERC_WORKERS)");
    o.add(app, "--target", &ExperimentSpec::target, "fill probability defining p_c");
    o.add(app, "--tol", &ExperimentSpec::tol, "bisection bracket width");
    o.add(app, "--max-trials", &ExperimentSpec::max_trials, "trial cap per bisection probe");
    o.add(app, "--eps", &ExperimentSpec::eps, "window level");
    o.add(app, "--logL", &ExperimentSpec::logL, "natural log of L");
    o.add(app, "--eta", &ExperimentSpec::eta, "shift of the second constant in the inversion");
    o.add(app, "--rows", &ExperimentSpec::rows, "rows of the infector window");
    o.add(app, "--grid-n", &ExperimentSpec::grid_n, "variational grid resolution");
    o.add(app, "--out,-o", &ExperimentSpec::out, "output path (default stdout)");
    o.add(app, "--plot", &ExperimentSpec::plot, "SVG plot path for the comparison report");
    o.add(app, "--format", &ExperimentSpec::format, "csv, json, svg or png")
        ->check(CLI::IsMember({"csv", "json", "svg", "png"}));
    bool pairs = false, infectors = false, growth = false;
    app.add_flag("--pairs", pairs, "enumerate spanning pairs");
    app.add_flag("--infectors", infectors, "enumerate infectors");
    app.add_flag("--growth", growth, "enumerate growth configurations");

    const char* commands[] = {"simulate", "closure", "traverse",    "pc-search", "window", "droplet",
                              "enumerate", "asymptotics", "variational", "paradox", "render"};
    for (const char* c : commands) app.add_subcommand(c)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(std::string(to_string(ErrorKind::bad_spec)), e.what(), exit_bad_spec);
    }

    try {
        ExperimentSpec spec;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) fail(ErrorKind::io_error, "cannot read config " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            spec = parse_experiment_spec(buf.str());
        }
        o.apply(spec);
        if (pairs) spec.enumerate = "pairs";
        if (infectors) spec.enumerate = "infectors";
        if (growth) spec.enumerate = "growth";
        const auto chosen = app.get_subcommands();
        if (!chosen.empty()) spec.command = parse_command(chosen.front()->get_name());
        else if (config_path.empty() && !dump_spec) fail(ErrorKind::bad_spec, "no command given");

        if (dump_spec) {
            std::cout << to_json(spec) << '\n';
            return 0;
        }
        emit(spec, dispatch(spec));
        std::cerr << to_string(spec.command) << ": ok" << (spec.out.empty() ? "" : " -> " + spec.out) << '\n';
        return 0;
    } catch (const Error& e) {
        return report_error(std::string(to_string(e.kind())), e.what(), exit_code(e.kind()));
    } catch (const std::exception& e) {
        return report_error("compute-error", e.what(), exit_compute);
    }
}
