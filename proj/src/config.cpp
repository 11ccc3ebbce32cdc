#include "phyp/config.hpp"

#include "phyp/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace phyp {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed)
{
    if (!node.IsMap())
        throw ConfigError("'" + where + "' must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in '" + where + "'");
    }
}

template <class T> T read(const YAML::Node& node, const std::string& key, const std::string& where, T fallback)
{
    if (!node[key])
        return fallback;
    try {
        return node[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("bad value for '" + where + "." + key + "'");
    }
}

const std::map<std::string, std::set<std::string>>& system_params()
{
    static const std::map<std::string, std::set<std::string>> p{
        {"linear_damped_scalar", {"speed", "damping", "length", "radius"}},
        {"linear_reflect_2x2", {"speed", "length", "radius"}},
        {"quasilinear_euler_damping", {"gamma", "damping", "sound_speed", "length", "radius"}},
    };
    return p;
}

double param(const RunConfig& cfg, const std::string& key, double fallback)
{
    const auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
}

} // namespace

RunConfig parse_config(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    if (!root || root.IsNull())
        throw ConfigError("config is empty");
    check_keys(root, "config", {"system", "boundary", "grid", "solver", "experiment"});

    RunConfig cfg;
    if (const auto sys = root["system"]) {
        check_keys(sys, "system", {"name", "params"});
        cfg.system = read<std::string>(sys, "name", "system", cfg.system);
        const auto known = system_params().find(cfg.system);
        if (known == system_params().end())
            throw ConfigError("unknown builtin system '" + cfg.system + "'");
        if (const auto p = sys["params"]) {
            check_keys(p, "system.params", known->second);
            for (const auto& kv : p)
                cfg.params[kv.first.as<std::string>()] = read<double>(p, kv.first.as<std::string>(), "system.params", 0);
        }
    }
    if (const auto b = root["boundary"]) {
        check_keys(b, "boundary", {"period", "gain", "gain_left", "gain_right", "quadratic", "forcing"});
        cfg.period = read<double>(b, "period", "boundary", cfg.period);
        const double gain = read<double>(b, "gain", "boundary", 0.0);
        cfg.gain_left = read<double>(b, "gain_left", "boundary", gain);
        cfg.gain_right = read<double>(b, "gain_right", "boundary", gain);
        cfg.quadratic = read<double>(b, "quadratic", "boundary", 0.0);
        if (const auto f = b["forcing"]) {
            if (!f.IsSequence())
                throw ConfigError("'boundary.forcing' must be a list");
            for (const auto& term : f) {
                check_keys(term, "boundary.forcing[]", {"component", "amplitude", "harmonic", "phase"});
                Harmonic h;
                h.component = read<int>(term, "component", "boundary.forcing[]", 1) - 1;
                h.amplitude = read<double>(term, "amplitude", "boundary.forcing[]", 0.0);
                h.multiple = read<int>(term, "harmonic", "boundary.forcing[]", 1);
                h.phase = read<double>(term, "phase", "boundary.forcing[]", 0.0);
                if (h.amplitude < 0.0)
                    throw ConfigError("forcing amplitudes must be nonnegative");
                if (h.multiple < 1)
                    throw ConfigError("forcing harmonic must be a positive integer");
                cfg.forcing.push_back(h);
            }
        }
    }
    if (const auto g = root["grid"]) {
        check_keys(g, "grid", {"nt", "nx"});
        cfg.solver.Nt = read<int>(g, "nt", "grid", cfg.solver.Nt);
        cfg.solver.Nx = read<int>(g, "nx", "grid", cfg.solver.Nx);
    }
    if (const auto s = root["solver"]) {
        check_keys(s, "solver", {"K", "tol", "max_iter", "rescale_time"});
        if (s["K"])
            cfg.solver.K = read<double>(s, "K", "solver", 0.0);
        cfg.solver.tol = read<double>(s, "tol", "solver", cfg.solver.tol);
        cfg.solver.max_iter = read<int>(s, "max_iter", "solver", cfg.solver.max_iter);
        cfg.rescale_time = read<bool>(s, "rescale_time", "solver", false);
    }
    if (const auto e = root["experiment"]) {
        check_keys(e, "experiment",
                   {"mode", "epsilon", "epsilons", "perturbation", "t_end", "records_per_transit"});
        cfg.mode = read<std::string>(e, "mode", "experiment", cfg.mode);
        cfg.epsilon = read<double>(e, "epsilon", "experiment", cfg.epsilon);
        cfg.epsilons = read<std::vector<double>>(e, "epsilons", "experiment", {});
        cfg.perturbation = read<double>(e, "perturbation", "experiment", cfg.perturbation);
        cfg.t_end = read<double>(e, "t_end", "experiment", cfg.t_end);
        cfg.records_per_transit = read<int>(e, "records_per_transit", "experiment", cfg.records_per_transit);
    }

    if (cfg.mode != "validate" && cfg.mode != "periodic" && cfg.mode != "stability" && cfg.mode != "sweep")
        throw ConfigError("unknown experiment mode '" + cfg.mode + "'");
    if (cfg.epsilon < 0.0 || cfg.perturbation < 0.0)
        throw ConfigError("epsilon and perturbation must be nonnegative");
    for (double e : cfg.epsilons)
        if (e < 0.0)
            throw ConfigError("epsilons must be nonnegative");
    if (!(cfg.period > 0.0))
        throw ConfigError("boundary.period must be positive");
    if (cfg.t_end < 0.0 || cfg.records_per_transit < 1)
        throw ConfigError("t_end must be nonnegative and records_per_transit positive");
    cfg.solver.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError(path.string(), "cannot read config");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

Problem build_problem(const RunConfig& cfg, double epsilon)
{
    Problem p;
    const double L = param(cfg, "length", 1.0);
    const double radius = param(cfg, "radius", 0.1);
    if (cfg.system == "linear_damped_scalar")
        p.spec = linear_damped_scalar(param(cfg, "speed", 1.0), param(cfg, "damping", 0.5), L, radius);
    else if (cfg.system == "linear_reflect_2x2")
        p.spec = linear_reflect_2x2(param(cfg, "speed", 1.0), L, radius);
    else if (cfg.system == "quasilinear_euler_damping")
        p.spec = quasilinear_euler_damping(param(cfg, "gamma", 1.4), param(cfg, "damping", 0.2),
                                           param(cfg, "sound_speed", 1.25), L, radius);
    else
        throw ConfigError("unknown builtin system '" + cfg.system + "'");

    double period = cfg.period;
    if (cfg.rescale_time) {
        p.time_scale = time_rescale_factor(p.spec);
        if (p.time_scale > 1.0) {
            p.spec = rescale_time(p.spec);
            period /= p.time_scale;
        }
    }
    auto terms = cfg.forcing;
    for (auto& h : terms)
        h.amplitude *= epsilon;
    p.bspec = feedback_boundary(p.spec.n, p.spec.m, period, cfg.gain_left, cfg.gain_right, cfg.quadratic, terms);
    return p;
}

} // namespace phyp
