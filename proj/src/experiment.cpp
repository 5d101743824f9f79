#include "bootperc/experiment.hpp"

#include <array>
#include <utility>

#include "bootperc/error.hpp"
#include "json.hpp"

namespace bootperc {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Command, const char*>, 11> command_names{{
    {Command::simulate, "simulate"},
    {Command::closure, "closure"},
    {Command::traverse, "traverse"},
    {Command::pc_search, "pc-search"},
    {Command::window, "window"},
    {Command::droplet, "droplet"},
    {Command::enumerate, "enumerate"},
    {Command::asymptotics, "asymptotics"},
    {Command::variational, "variational"},
    {Command::paradox, "paradox"},
    {Command::render, "render"},
}};

template <typename T>
void read(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

std::string to_string(Command command) {
    for (const auto& [c, name] : command_names)
        if (c == command) return name;
    return "unknown";
}

Command parse_command(const std::string& text) {
    for (const auto& [c, name] : command_names)
        if (text == name) return c;
    fail(ErrorKind::bad_spec, "unknown command: " + text);
}

std::string to_json(const ExperimentSpec& s) {
    json j;
    j["command"] = to_string(s.command);
    j["rule"] = s.rule;
    j["b"] = s.b;
    j["width"] = s.width;
    j["height"] = s.height;
    j["L"] = s.L;
    j["L_list"] = s.L_list;
    j["p"] = s.p;
    j["p_grid"] = s.p_grid;
    j["event"] = s.event;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["workers"] = s.workers;
    j["target"] = s.target;
    j["tol"] = s.tol;
    j["max_trials"] = s.max_trials;
    j["eps"] = s.eps;
    j["logL"] = s.logL;
    j["eta"] = s.eta;
    j["enumerate"] = s.enumerate;
    j["rows"] = s.rows;
    j["grid_n"] = s.grid_n;
    j["out"] = s.out;
    j["plot"] = s.plot;
    j["format"] = s.format;
    return j.dump(2);
}

ExperimentSpec parse_experiment_spec(const std::string& text, ExperimentSpec s) {
    try {
        const json j = json::parse(text);
        if (!j.is_object()) fail(ErrorKind::bad_spec, "experiment spec must be a JSON object");
        if (j.contains("command")) s.command = parse_command(j.at("command").get<std::string>());
        read(j, "rule", s.rule);
        read(j, "b", s.b);
        read(j, "width", s.width);
        read(j, "height", s.height);
        read(j, "L", s.L);
        read(j, "L_list", s.L_list);
        read(j, "p", s.p);
        read(j, "p_grid", s.p_grid);
        read(j, "event", s.event);
        read(j, "trials", s.trials);
        read(j, "seed", s.seed);
        read(j, "workers", s.workers);
        read(j, "target", s.target);
        read(j, "tol", s.tol);
        read(j, "max_trials", s.max_trials);
        read(j, "eps", s.eps);
        read(j, "logL", s.logL);
        read(j, "eta", s.eta);
        read(j, "enumerate", s.enumerate);
        read(j, "rows", s.rows);
        read(j, "grid_n", s.grid_n);
        read(j, "out", s.out);
        read(j, "plot", s.plot);
        read(j, "format", s.format);
    } catch (const json::exception& e) {
        fail(ErrorKind::bad_spec, std::string("malformed experiment spec: ") + e.what());
    }
    return s;
}

}  // namespace bootperc
