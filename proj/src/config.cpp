#include "rd/config.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rd/io.hpp"

namespace rd {

namespace {

constexpr char version[] = "1.0.0";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw bad_value_error(key, "malformed number for '" + key + "': '" + s + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || v < INT_MIN ||
        v > INT_MAX)
        throw bad_value_error(key, "malformed integer for '" + key + "': '" + s + "'");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw bad_value_error(key, "malformed flag for '" + key + "': '" + s + "' (use 0/1)");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& s, Parse parse) {
    std::vector<T> out;
    if (trim(s).empty()) return out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse(key, trim(item)));
    return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, double>)
            out += format_g17(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw bad_value_error(key, "invalid value for '" + key + "': " + what);
}

} // namespace

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "equation")
        cfg.equation = value;
    else if (key == "eps0")
        cfg.eps0 = parse_double(key, value);
    else if (key == "mu")
        cfg.mu = parse_double(key, value);
    else if (key == "nx")
        cfg.nx = parse_int(key, value);
    else if (key == "ht")
        cfg.ht = parse_double(key, value);
    else if (key == "nt")
        cfg.nt = parse_int(key, value);
    else if (key == "windows")
        cfg.windows = parse_int(key, value);
    else if (key == "solver")
        cfg.solver = value;
    else if (key == "tau_u")
        cfg.params.tau_u = parse_double(key, value);
    else if (key == "tau_p")
        cfg.params.tau_p = parse_double(key, value);
    else if (key == "omega")
        cfg.params.omega = parse_double(key, value);
    else if (key == "eps")
        cfg.params.epsilon = parse_double(key, value);
    else if (key == "tol")
        cfg.params.tol = parse_double(key, value);
    else if (key == "max_iter")
        cfg.params.max_iter = parse_int(key, value);
    else if (key == "adaptive")
        cfg.adaptive = parse_bool(key, value);
    else if (key == "ht_cap")
        cfg.ht_cap = parse_double(key, value);
    else if (key == "fast_iters")
        cfg.fast_iters = parse_int(key, value);
    else if (key == "out")
        cfg.out = value;
    else if (key == "jobs")
        cfg.jobs = parse_int(key, value);
    else if (key == "snapshot_times")
        cfg.snapshot_times = parse_list<double>(key, value, parse_double);
    else if (key == "sweep_ht")
        cfg.sweep_ht = parse_list<double>(key, value, parse_double);
    else if (key == "sweep_nt")
        cfg.sweep_nt = parse_list<int>(key, value, parse_int);
    else if (key == "sweep_nx")
        cfg.sweep_nx = parse_list<int>(key, value, parse_int);
    else
        throw unknown_key_error(key, "unknown config key: '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw unknown_key_error(line, "malformed line " + std::to_string(lineno) +
                                              " in " + path + " (expected key=value)");
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::string echo_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "equation=" << cfg.equation << '\n'
        << "eps0=" << format_g17(cfg.eps0) << '\n'
        << "mu=" << format_g17(cfg.mu) << '\n'
        << "nx=" << cfg.nx << '\n'
        << "ht=" << format_g17(cfg.ht) << '\n'
        << "nt=" << cfg.nt << '\n'
        << "windows=" << cfg.windows << '\n'
        << "solver=" << cfg.solver << '\n'
        << "tau_u=" << format_g17(cfg.params.tau_u) << '\n'
        << "tau_p=" << format_g17(cfg.params.tau_p) << '\n'
        << "omega=" << format_g17(cfg.params.omega) << '\n'
        << "eps=" << format_g17(cfg.params.epsilon) << '\n'
        << "tol=" << format_g17(cfg.params.tol) << '\n'
        << "max_iter=" << cfg.params.max_iter << '\n'
        << "adaptive=" << (cfg.adaptive ? 1 : 0) << '\n'
        << "ht_cap=" << format_g17(cfg.ht_cap) << '\n'
        << "fast_iters=" << cfg.fast_iters << '\n'
        << "out=" << cfg.out << '\n'
        << "jobs=" << cfg.jobs << '\n'
        << "snapshot_times=" << join(cfg.snapshot_times) << '\n'
        << "sweep_ht=" << join(cfg.sweep_ht) << '\n'
        << "sweep_nt=" << join(cfg.sweep_nt) << '\n'
        << "sweep_nx=" << join(cfg.sweep_nx) << '\n';
    return out.str();
}

void validate_config(const RunConfig& cfg) {
    require(cfg.nx >= 2 && cfg.nx <= (1 << 14), "nx", "grid size out of range");
    require(cfg.ht > 0.0, "ht", "time step must be positive");
    require(cfg.nt >= 1, "nt", "window length must be at least 1");
    require(cfg.windows >= 1, "windows", "window count must be at least 1");
    require(cfg.eps0 != 0.0, "eps0", "must be nonzero (negative selects the model default)");
    require(cfg.mu >= 0.0, "mu", "mobility contrast must be non-negative");
    require(cfg.params.tau_u > 0.0, "tau_u", "step size must be positive");
    require(cfg.params.tau_p > 0.0, "tau_p", "step size must be positive");
    require(cfg.params.omega >= 0.0, "omega", "extrapolation must be non-negative");
    require(cfg.params.epsilon >= 0.0, "eps", "damping must be non-negative");
    require(cfg.params.tol > 0.0, "tol", "tolerance must be positive");
    require(cfg.params.max_iter >= 1, "max_iter", "iteration cap must be at least 1");
    require(cfg.ht_cap >= 0.0, "ht_cap", "cap must be non-negative");
    if (cfg.adaptive && cfg.ht_cap > 0.0)
        require(cfg.ht_cap >= cfg.ht, "ht_cap", "cap must be at least ht");
    require(cfg.fast_iters >= 1, "fast_iters", "threshold must be at least 1");
    require(cfg.jobs >= 1, "jobs", "job count must be at least 1");
    for (double t : cfg.snapshot_times)
        require(t >= 0.0, "snapshot_times", "times must be non-negative");
    for (double h : cfg.sweep_ht) require(h > 0.0, "sweep_ht", "steps must be positive");
    for (int n : cfg.sweep_nt) require(n >= 1, "sweep_nt", "window lengths must be >= 1");
    for (int n : cfg.sweep_nx) require(n >= 2, "sweep_nx", "grid sizes must be >= 2");
}

RDModel model_from(const RunConfig& cfg) {
    const ModelKind kind = parse_model_kind(cfg.equation);
    ModelParams mp;
    mp.eps0 = cfg.eps0;
    mp.mu = cfg.mu;
    return build_model(kind, cfg.nx, mp);
}

MarchPlan plan_from(const RunConfig& cfg) {
    MarchPlan plan;
    plan.windows = cfg.windows;
    plan.nt = cfg.nt;
    plan.ht = cfg.ht;
    plan.solver = parse_solver_kind(cfg.solver);
    if (cfg.adaptive) {
        AdaptiveRules rules;
        rules.ht_cap = cfg.ht_cap > 0.0 ? cfg.ht_cap : 8.0 * cfg.ht;
        rules.fast_iter_threshold = cfg.fast_iters;
        plan.adaptive = rules;
    }
    plan.snapshot_times = cfg.snapshot_times;
    return plan;
}

std::string manifest_json(const RunConfig& cfg, const std::string& command,
                          double wall_time) {
    nlohmann::json j;
    j["tool"] = "rdsolve";
    j["version"] = version;
    j["compiler"] = __VERSION__;
    j["command"] = command;
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["generated_utc"] = stamp;
    nlohmann::json c;
    c["equation"] = cfg.equation;
    c["eps0"] = cfg.eps0;
    c["mu"] = cfg.mu;
    c["nx"] = cfg.nx;
    c["ht"] = cfg.ht;
    c["nt"] = cfg.nt;
    c["windows"] = cfg.windows;
    c["solver"] = cfg.solver;
    c["tau_u"] = cfg.params.tau_u;
    c["tau_p"] = cfg.params.tau_p;
    c["omega"] = cfg.params.omega;
    c["eps"] = cfg.params.epsilon;
    c["tol"] = cfg.params.tol;
    c["max_iter"] = cfg.params.max_iter;
    c["adaptive"] = cfg.adaptive;
    c["ht_cap"] = cfg.ht_cap;
    c["fast_iters"] = cfg.fast_iters;
    c["out"] = cfg.out;
    c["jobs"] = cfg.jobs;
    c["snapshot_times"] = cfg.snapshot_times;
    c["sweep_ht"] = cfg.sweep_ht;
    c["sweep_nt"] = cfg.sweep_nt;
    c["sweep_nx"] = cfg.sweep_nx;
    j["config"] = c;
    j["wall_time_seconds"] = wall_time;
    return j.dump(2) + "\n";
}

} // namespace rd
