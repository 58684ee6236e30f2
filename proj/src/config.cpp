#include "adseek/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "adseek/errors.hpp"

namespace adseek {

namespace {

using json = nlohmann::json;

struct Field {
    std::string key;
    std::string unit;
    std::string kind;  // "real", "integer", "bool", "string", "real list"
    std::function<json(const RunConfig&)> get;
    std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void mismatch(const Field& f) {
    throw ConfigError("config key '" + f.key + "' expects " + f.kind +
                      (f.unit.empty() ? "" : " [" + f.unit + "]"));
}

template <class Get, class Set>
Field custom(std::string key, std::string unit, std::string kind, Get get, Set set) {
    return Field{std::move(key), std::move(unit), std::move(kind), get, set};
}

template <class Int>
void set_integer(const Field& f, const json& v, Int& target) {
    if (!v.is_number_integer()) {
        mismatch(f);
    }
    target = v.get<Int>();
}

void set_real(const Field& f, const json& v, double& target) {
    if (!v.is_number()) {
        mismatch(f);
    }
    target = v.get<double>();
}

void set_real_list(const Field& f, const json& v, std::vector<double>& target) {
    if (!v.is_array()) {
        mismatch(f);
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            mismatch(f);
        }
        out.push_back(e.get<double>());
    }
    target = std::move(out);
}

#define ADSEEK_INT(KEY, UNIT, EXPR)                                                        \
    custom(KEY, UNIT, "integer", [](const RunConfig& c) { return json(c.EXPR); },          \
           [](RunConfig& c, const json& v) {                                               \
               set_integer(registry_field(KEY), v, c.EXPR);                                \
           })
#define ADSEEK_REAL(KEY, UNIT, EXPR)                                                       \
    custom(KEY, UNIT, "real", [](const RunConfig& c) { return json(c.EXPR); },             \
           [](RunConfig& c, const json& v) { set_real(registry_field(KEY), v, c.EXPR); })
#define ADSEEK_LIST(KEY, UNIT, EXPR)                                                       \
    custom(KEY, UNIT, "real list", [](const RunConfig& c) { return json(c.EXPR); },        \
           [](RunConfig& c, const json& v) { set_real_list(registry_field(KEY), v, c.EXPR); })

const Field& registry_field(const std::string& key);

const std::vector<Field>& registry() {
    static const std::vector<Field> fields = [] {
        std::vector<Field> f;
        // model
        f.push_back(ADSEEK_REAL("v_star", "m/s", model.v_star));
        f.push_back(ADSEEK_REAL("kappa1", "-", model.kappa1));
        f.push_back(ADSEEK_REAL("w1", "-", model.w1));
        f.push_back(ADSEEK_REAL("kappa_v2", "s/m", model.kappa_v2));
        f.push_back(ADSEEK_REAL("kappa_02", "m/s", model.kappa_02));
        f.push_back(ADSEEK_REAL("w2", "-", model.w2));
        f.push_back(ADSEEK_REAL("kappa_c3", "m", model.kappa_c3));
        f.push_back(ADSEEK_REAL("kappa_v3", "s", model.kappa_v3));
        f.push_back(ADSEEK_REAL("kappa_d3", "s", model.kappa_d3));
        f.push_back(ADSEEK_REAL("w3", "-", model.w3));
        f.push_back(ADSEEK_REAL("dt", "s", model.dt));
        f.push_back(ADSEEK_REAL("gamma", "-", model.gamma));
        f.push_back(ADSEEK_INT("H", "-", model.horizon));
        f.push_back(ADSEEK_REAL("lambda", "-", model.lambda));
        f.push_back(ADSEEK_REAL("u_min", "m/s^2", model.u_min));
        f.push_back(ADSEEK_REAL("u_max", "m/s^2", model.u_max));
        f.push_back(ADSEEK_INT("grid_points", "-", model.grid_points));
        f.push_back(ADSEEK_REAL("vehicle_length", "m", model.vehicle_length));
        // ring
        f.push_back(ADSEEK_INT("n_vehicles", "-", n_vehicles));
        f.push_back(ADSEEK_REAL("circumference", "m", circumference));
        f.push_back(custom(
            "rho", "1/m", "real or null",
            [](const RunConfig& c) { return c.rho ? json(*c.rho) : json(nullptr); },
            [](RunConfig& c, const json& v) {
                if (v.is_null()) {
                    c.rho.reset();
                    return;
                }
                double r = 0.0;
                set_real(registry_field("rho"), v, r);
                c.rho = r;
            }));
        // simulate
        f.push_back(ADSEEK_INT("steps", "-", steps));
        f.push_back(ADSEEK_INT("record_every", "-", record_every));
        f.push_back(custom(
            "kick_enabled", "", "bool", [](const RunConfig& c) { return json(c.kick_enabled); },
            [](RunConfig& c, const json& v) {
                if (!v.is_boolean()) {
                    mismatch(registry_field("kick_enabled"));
                }
                c.kick_enabled = v.get<bool>();
            }));
        f.push_back(ADSEEK_REAL("kick_strength", "m/s^2", kick_strength));
        f.push_back(custom(
            "start", "", "string (uniform|fixed_point)",
            [](const RunConfig& c) { return json(c.start); },
            [](RunConfig& c, const json& v) {
                if (!v.is_string()) {
                    mismatch(registry_field("start"));
                }
                c.start = v.get<std::string>();
            }));
        // sweep simulations
        f.push_back(ADSEEK_INT("sim_steps", "-", sim.steps));
        f.push_back(ADSEEK_REAL("transient_fraction", "-", sim.thresholds.transient_fraction));
        f.push_back(ADSEEK_REAL("a_free_flow", "m/s", sim.thresholds.a_free_flow));
        f.push_back(ADSEEK_REAL("a_stop_and_go", "m/s", sim.thresholds.a_stop_and_go));
        f.push_back(ADSEEK_LIST("kick_strengths", "m/s^2", sim.kick_strengths));
        f.push_back(ADSEEK_REAL("kick_duration", "s", sim.kick_duration));
        f.push_back(ADSEEK_REAL("kick_start", "s", sim.kick_start));
        f.push_back(ADSEEK_INT("kick_vehicle", "-", sim.kick_vehicle));
        // equilibrium
        f.push_back(ADSEEK_REAL("rho_min", "1/m", rho_min));
        f.push_back(ADSEEK_REAL("rho_max", "1/m", rho_max));
        f.push_back(ADSEEK_INT("rho_points", "-", rho_points));
        f.push_back(ADSEEK_REAL("residual_tol", "m/s^2", residual_tol));
        // linear stability
        f.push_back(ADSEEK_REAL("fd_step", "-", fd_step));
        f.push_back(ADSEEK_REAL("zero_tol", "-", zero_tol));
        f.push_back(ADSEEK_REAL("c_lo", "m", c_lo));
        f.push_back(ADSEEK_REAL("c_hi", "m", c_hi));
        f.push_back(ADSEEK_REAL("modulus_tol", "-", modulus_tol));
        f.push_back(ADSEEK_REAL("c_width_tol", "m", c_width_tol));
        // sweeps
        f.push_back(ADSEEK_LIST("rho_grid", "1/m", rho_grid));
        f.push_back(ADSEEK_REAL("onset_lo", "1/m", onset_lo));
        f.push_back(ADSEEK_REAL("onset_hi", "1/m", onset_hi));
        f.push_back(ADSEEK_REAL("onset_tol", "1/m", onset_tol));
        f.push_back(ADSEEK_REAL("scan_step", "1/m", scan_step));
        f.push_back(ADSEEK_LIST("v_star_grid", "m/s", v_star_grid));
        f.push_back(ADSEEK_LIST("vsa_rho_grid", "1/m", vsa_rho_grid));
        f.push_back(ADSEEK_REAL("vsa_margin", "m/s", vsa_margin));
        f.push_back(ADSEEK_REAL("vsa_v_min", "m/s", vsa_v_min));
        f.push_back(ADSEEK_REAL("vsa_tol", "m/s", vsa_tol));
        f.push_back(ADSEEK_INT("seed", "-", seed));
        return f;
    }();
    return fields;
}

#undef ADSEEK_INT
#undef ADSEEK_REAL
#undef ADSEEK_LIST

const Field* find_field(const std::string& key) {
    for (const auto& f : registry()) {
        if (f.key == key) {
            return &f;
        }
    }
    return nullptr;
}

const Field& registry_field(const std::string& key) {
    return *find_field(key);
}

void apply_json(RunConfig& cfg, const std::string& key, const json& value) {
    const Field* f = find_field(key);
    if (f == nullptr) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    f->set(cfg, value);
}

}  // namespace

RingConfig RunConfig::ring() const {
    RingConfig r{n_vehicles, circumference, model};
    if (rho) {
        r.circumference = n_vehicles / *rho;
    }
    return r;
}

OnsetOptions RunConfig::onset_options() const {
    return OnsetOptions{onset_tol, scan_step};
}

VsaOptions RunConfig::vsa_options() const {
    return VsaOptions{vsa_margin, vsa_v_min, vsa_tol};
}

CriticalOptions RunConfig::critical_options() const {
    return CriticalOptions{modulus_tol, c_width_tol, 100};
}

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (n_vehicles < 2) {
        throw ConfigError("config key 'n_vehicles' must be >= 2");
    }
    if (rho && !(*rho > 0.0)) {
        throw ConfigError("config key 'rho' must be positive [1/m]");
    }
    if (steps < 1 || sim.steps < 1) {
        throw ConfigError("config keys 'steps' and 'sim_steps' must be >= 1");
    }
    if (record_every < 1) {
        throw ConfigError("config key 'record_every' must be >= 1");
    }
    if (start != "uniform" && start != "fixed_point") {
        throw ConfigError("config key 'start' must be 'uniform' or 'fixed_point'");
    }
    if (sim.kick_strengths.empty()) {
        throw ConfigError("config key 'kick_strengths' must not be empty");
    }
    if (rho_points < 1) {
        throw ConfigError("config key 'rho_points' must be >= 1");
    }
}

std::vector<std::pair<std::string, std::string>> config_keys() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : registry()) {
        out.emplace_back(f.key, f.unit);
    }
    return out;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }
    apply_json(cfg, key, parsed);
}

RunConfig parse_config(const std::optional<std::filesystem::path>& path,
                       const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (path) {
        std::ifstream in(*path);
        if (!in) {
            throw ConfigError("cannot open config file " + path->string());
        }
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
            json doc;
            try {
                doc = json::parse(text);
            } catch (const json::parse_error& e) {
                throw ConfigError("config file " + path->string() + " is not valid JSON: " +
                                  e.what());
            }
            if (!doc.is_object()) {
                throw ConfigError("config file " + path->string() + " must hold a JSON object");
            }
            for (const auto& [key, value] : doc.items()) {
                apply_json(cfg, key, value);
            }
        }
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override '" + ov + "' is not of the form key=value");
        }
        apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    json doc = json::object();
    for (const auto& f : registry()) {
        doc[f.key] = f.get(cfg);
    }
    return doc.dump(2) + "\n";
}

void write_config_snapshot(const RunConfig& cfg, const std::filesystem::path& dir) {
    const auto path = dir / "resolved_config.json";
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << config_to_json(cfg);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace adseek
