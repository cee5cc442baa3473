#include "fpsi/config.hpp"

#include "fpsi/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace fpsi {

PlateCoeffs PhysicalParams::plate() const { return derive_plate_coefficients(biot); }

std::string_view to_string(ProblemKind p) { return p == ProblemKind::Plate ? "plate" : "biot"; }

PlateCoeffs derive_plate_coefficients(const BulkBiotParams& b) {
    const double m = b.lambda_b + 2.0 * b.mu_b;
    if (!(m > 0.0)) throw DomainError("lambda_b + 2 mu_b must be positive");
    PlateCoeffs p;
    p.kappa_p = b.kappa;
    p.rho_p = b.rho_b;
    p.c0_p = b.c0 + b.alpha * b.alpha / m;
    p.alpha_p = 2.0 * b.alpha * b.mu_b / m;
    p.D = b.mu_b * (b.lambda_b + b.mu_b) / (3.0 * m);
    p.gamma_p = b.gamma;
    return p;
}

WaveSpeed moens_korteweg_speed(const Geometry& g, const FluidParams& f, const BulkBiotParams& b) {
    const double E = b.lambda_b + 2.0 * b.mu_b;
    const double radicand = E * g.H / (2.0 * f.rho_f * g.R_f);
    if (!(radicand > 0.0) || !std::isfinite(radicand)) throw DomainError("Moens-Korteweg radicand must be positive");
    const double c = std::sqrt(radicand);
    return {c, g.L / c};
}

double inlet_pressure(double t, const PulseSpec& pulse) {
    if (t < 0.0 || t >= pulse.t_pulse) return 0.0;
    return 0.5 * pulse.p_max * (1.0 - std::cos(2.0 * std::numbers::pi * t / pulse.t_pulse));
}

double SimConfig::effective_nitsche_penalty() const {
    return nitsche_penalty.value_or(10.0 * std::max(params.fluid.mu_f, 1.0));
}

double SimConfig::effective_x_probe() const { return x_probe.value_or(params.geometry.L); }

std::vector<double> SimConfig::effective_snapshot_times() const {
    if (!snapshot_times.empty()) return snapshot_times;
    if (params.geometry.H < 0.005) return {0.0, 0.031, 0.062, 0.093};
    return {0.0, 0.010, 0.020, 0.030};
}

int SimConfig::step_count() const {
    if (t_end <= 0.0) return 0;
    return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw ValidationError(message);
}

}  // namespace

void validate(const SimConfig& c) {
    const auto& f = c.params.fluid;
    const auto& b = c.params.biot;
    const auto& g = c.params.geometry;
    const auto& p = c.params.pulse;
    require(f.rho_f > 0, "rho_f must be positive");
    require(f.mu_f > 0, "mu_f must be positive");
    require(f.beta >= 0, "beta must be nonnegative");
    require(b.rho_b > 0, "rho_b must be positive");
    require(b.mu_b > 0, "mu_b must be positive");
    require(b.lambda_b > 0, "lambda_b must be positive");
    require(b.lambda_b + 2 * b.mu_b > 0, "lambda_b + 2 mu_b must be positive");
    require(b.kappa > 0, "kappa must be positive");
    require(b.c0 > 0, "c0 must be positive");
    require(b.alpha >= 0 && b.alpha <= 1, "alpha must lie in [0, 1]");
    require(b.gamma >= 0, "gamma must be nonnegative");
    require(g.L > 0, "L must be positive");
    require(g.R_f > 0, "R_f must be positive");
    require(g.H > 0, "H must be positive");
    require(g.H < g.L, "H must be much smaller than L");
    require(p.p_max >= 0, "p_max must be nonnegative");
    require(p.t_pulse > 0, "t_pulse must be positive");
    require(c.nx_f >= 1 && c.ny_f >= 1 && c.nx_p >= 1 && c.ny_p >= 1, "mesh resolutions must be at least 1");
    require(c.nx_f == c.nx_p, "nx_f must equal nx_p (shared interface grid)");
    require(c.dt > 0, "dt must be positive");
    require(c.t_end >= 0, "t_end must be nonnegative");
    require(c.t_end == 0 || c.t_end >= c.dt, "t_end must be at least dt");
    require(c.cadence >= 1, "cadence must be at least 1");
    require(!c.nitsche_penalty || *c.nitsche_penalty > 0, "nitsche_penalty must be positive");
    require(!c.x_probe || (*c.x_probe >= 0 && *c.x_probe <= g.L), "x_probe must lie in [0, L]");
    require(c.arrival_threshold > 0, "arrival_threshold must be positive");
    for (double t : c.snapshot_times) require(t >= 0, "snapshot_times must be nonnegative");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

double parse_double(std::string_view v, int line, const std::string& key) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(line, key, "expected a number, got '" + std::string(v) + "'");
    return out;
}

int parse_int(std::string_view v, int line, const std::string& key) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ParseError(line, key, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

using Setter = std::function<void(SimConfig&, std::string_view, int, const std::string&)>;

template <class F>
Setter number(F field) {
    return [field](SimConfig& c, std::string_view v, int line, const std::string& key) { field(c) = parse_double(v, line, key); };
}

template <class F>
Setter integer(F field) {
    return [field](SimConfig& c, std::string_view v, int line, const std::string& key) { field(c) = parse_int(v, line, key); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        t["fluid.rho_f"] = number([](SimConfig& c) -> double& { return c.params.fluid.rho_f; });
        t["fluid.mu_f"] = number([](SimConfig& c) -> double& { return c.params.fluid.mu_f; });
        t["fluid.beta"] = number([](SimConfig& c) -> double& { return c.params.fluid.beta; });
        t["biot.rho_b"] = number([](SimConfig& c) -> double& { return c.params.biot.rho_b; });
        t["biot.lambda_b"] = number([](SimConfig& c) -> double& { return c.params.biot.lambda_b; });
        t["biot.mu_b"] = number([](SimConfig& c) -> double& { return c.params.biot.mu_b; });
        t["biot.kappa"] = number([](SimConfig& c) -> double& { return c.params.biot.kappa; });
        t["biot.c0"] = number([](SimConfig& c) -> double& { return c.params.biot.c0; });
        t["biot.alpha"] = number([](SimConfig& c) -> double& { return c.params.biot.alpha; });
        t["biot.gamma"] = number([](SimConfig& c) -> double& { return c.params.biot.gamma; });
        t["biot.q_plus"] = number([](SimConfig& c) -> double& { return c.params.q_plus; });
        t["geometry.l"] = number([](SimConfig& c) -> double& { return c.params.geometry.L; });
        t["geometry.r_f"] = number([](SimConfig& c) -> double& { return c.params.geometry.R_f; });
        t["geometry.h"] = number([](SimConfig& c) -> double& { return c.params.geometry.H; });
        t["pulse.p_max"] = number([](SimConfig& c) -> double& { return c.params.pulse.p_max; });
        t["pulse.t_pulse"] = number([](SimConfig& c) -> double& { return c.params.pulse.t_pulse; });
        // the structure grid follows the fluid grid unless set explicitly afterwards
        t["run.nx_f"] = [](SimConfig& c, std::string_view v, int line, const std::string& key) {
            c.nx_f = c.nx_p = parse_int(v, line, key);
        };
        t["run.ny_f"] = integer([](SimConfig& c) -> int& { return c.ny_f; });
        t["run.nx_p"] = integer([](SimConfig& c) -> int& { return c.nx_p; });
        t["run.ny_p"] = integer([](SimConfig& c) -> int& { return c.ny_p; });
        t["run.dt"] = number([](SimConfig& c) -> double& { return c.dt; });
        t["run.t_end"] = number([](SimConfig& c) -> double& { return c.t_end; });
        t["run.cadence"] = integer([](SimConfig& c) -> int& { return c.cadence; });
        t["run.arrival_threshold"] = number([](SimConfig& c) -> double& { return c.arrival_threshold; });
        t["run.initial_bump"] = number([](SimConfig& c) -> double& { return c.initial_bump; });
        t["run.nitsche_penalty"] = [](SimConfig& c, std::string_view v, int line, const std::string& key) {
            c.nitsche_penalty = parse_double(v, line, key);
        };
        t["run.x_probe"] = [](SimConfig& c, std::string_view v, int line, const std::string& key) {
            c.x_probe = parse_double(v, line, key);
        };
        t["run.problem"] = [](SimConfig& c, std::string_view v, int line, const std::string& key) {
            if (v == "plate") c.problem = ProblemKind::Plate;
            else if (v == "biot") c.problem = ProblemKind::Biot;
            else throw ParseError(line, key, "problem must be 'plate' or 'biot'");
        };
        t["run.snapshot_times"] = [](SimConfig& c, std::string_view v, int line, const std::string& key) {
            c.snapshot_times.clear();
            while (!v.empty()) {
                const auto comma = v.find(',');
                const auto item = trim(v.substr(0, comma));
                if (!item.empty()) c.snapshot_times.push_back(parse_double(item, line, key));
                if (comma == std::string_view::npos) break;
                v.remove_prefix(comma + 1);
            }
        };
        return t;
    }();
    return table;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

std::string resolve_key(std::string_view raw, int line) {
    const std::string key = lower(raw);
    if (key.find('.') != std::string::npos) {
        if (!setters().contains(key)) throw ParseError(line, key, "unknown key");
        return key;
    }
    std::string found;
    for (const auto& [full, _] : setters()) {
        if (full.substr(full.find('.') + 1) == key) found = full;
    }
    if (found.empty()) throw ParseError(line, key, "unknown key");
    return found;
}

}  // namespace

SimConfig load_config(std::string_view text) {
    SimConfig cfg;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "", "unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section != "fluid" && section != "biot" && section != "geometry" && section != "pulse" && section != "run")
                throw ParseError(line_no, section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected 'key = value'");
        if (section.empty()) throw ParseError(line_no, std::string(trim(line.substr(0, eq))), "key outside of a section");
        const std::string key = section + "." + lower(trim(line.substr(0, eq)));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ParseError(line_no, key, "unknown key");
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) throw ParseError(line_no, key, "missing value");
        it->second(cfg, value, line_no, key);
    }
    validate(cfg);
    return cfg;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return load_config(ss.str());
}

void apply_override(SimConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ParseError(0, std::string(assignment), "override must be key=value");
    const std::string key = resolve_key(trim(assignment.substr(0, eq)), 0);
    const auto value = trim(assignment.substr(eq + 1));
    setters().at(key)(cfg, value, 0, key);
}

SimConfig preset(std::string_view name) {
    SimConfig c;
    if (name == "full-h01") {
        c.params.geometry.H = 0.01;
        c.t_end = 0.04;
    } else if (name == "full-h001") {
        c.params.geometry.H = 0.001;
        c.t_end = 0.12;
    } else if (name == "desk-h01" || name == "desk-h001") {
        c.nx_f = c.nx_p = 150;
        c.ny_f = 13;
        c.dt = 1e-4;
        c.cadence = 50;
        const bool thin = name == "desk-h001";
        c.params.geometry.H = thin ? 0.001 : 0.01;
        c.t_end = thin ? 0.12 : 0.04;
    } else {
        throw ValidationError("unknown preset '" + std::string(name) + "'");
    }
    validate(c);
    return c;
}

std::vector<std::string> preset_names() { return {"full-h01", "full-h001", "desk-h01", "desk-h001"}; }

std::string dump_config(const SimConfig& c) {
    std::ostringstream o;
    o.precision(17);
    const auto& p = c.params;
    o << "[fluid]\nrho_f = " << p.fluid.rho_f << "\nmu_f = " << p.fluid.mu_f << "\nbeta = " << p.fluid.beta << "\n\n";
    o << "[biot]\nrho_b = " << p.biot.rho_b << "\nlambda_b = " << p.biot.lambda_b << "\nmu_b = " << p.biot.mu_b
      << "\nkappa = " << p.biot.kappa << "\nc0 = " << p.biot.c0 << "\nalpha = " << p.biot.alpha << "\ngamma = " << p.biot.gamma
      << "\nq_plus = " << p.q_plus << "\n\n";
    o << "[geometry]\nl = " << p.geometry.L << "\nr_f = " << p.geometry.R_f << "\nh = " << p.geometry.H << "\n\n";
    o << "[pulse]\np_max = " << p.pulse.p_max << "\nt_pulse = " << p.pulse.t_pulse << "\n\n";
    o << "[run]\nproblem = " << to_string(c.problem) << "\nnx_f = " << c.nx_f << "\nny_f = " << c.ny_f << "\nnx_p = " << c.nx_p
      << "\nny_p = " << c.ny_p << "\ndt = " << c.dt << "\nt_end = " << c.t_end << "\ncadence = " << c.cadence
      << "\nnitsche_penalty = " << c.effective_nitsche_penalty() << "\nx_probe = " << c.effective_x_probe()
      << "\narrival_threshold = " << c.arrival_threshold << "\ninitial_bump = " << c.initial_bump << "\nsnapshot_times = ";
    const auto snaps = c.effective_snapshot_times();
    for (std::size_t i = 0; i < snaps.size(); ++i) o << (i ? ", " : "") << snaps[i];
    o << "\n";
    return o.str();
}

}  // namespace fpsi
