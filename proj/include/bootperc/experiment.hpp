#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bootperc {

enum class Command {
    simulate,
    closure,
    traverse,
    pc_search,
    window,
    droplet,
    enumerate,
    asymptotics,
    variational,
    paradox,
    render,
};

std::string to_string(Command command);
Command parse_command(const std::string& text);

// One CLI invocation. Precedence: defaults, then a JSON config file, then flags.
struct ExperimentSpec {
    Command command = Command::simulate;
    std::string rule = "anisotropic:2";
    int b = 2;
    int width = 20;
    int height = 5;
    int L = 64;
    std::vector<int> L_list;
    double p = 0.1;
    std::vector<double> p_grid;
    std::string event = "hor_trav";
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0 selects the environment default
    double target = 0.5;
    double tol = 0.002;
    std::uint64_t max_trials = std::uint64_t{1} << 20;
    double eps = 0.1;
    double logL = 1e6;
    double eta = 0.0;
    std::string enumerate = "pairs";  // pairs, infectors, growth
    int rows = 2;
    int grid_n = 512;
    std::string out;  // empty writes to stdout
    std::string plot;
    std::string format;  // empty selects the command default

    bool operator==(const ExperimentSpec&) const = default;
};

std::string to_json(const ExperimentSpec& spec);
// Fields absent from `text` keep their values in `base`.
ExperimentSpec parse_experiment_spec(const std::string& text, ExperimentSpec base = {});

}  // namespace bootperc
