#include "qrabi_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qrabi/adiabatic.hpp"
#include "qrabi/lindblad.hpp"
#include "qrabi/spectroscopy.hpp"

namespace qrabi::cli {

namespace {

constexpr const char* kCommandNames[] = {"spectrum", "fidelity", "relax", "drive", "spectroscopy", "validate"};

// Reads keys of one JSON object and remembers which were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    // Marks the key as known; null counts as absent.
    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        return as_number(j_.at(key), key);
    }

    std::optional<double> optional_number(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) return std::nullopt;
        return as_number(j_.at(key), key);
    }

    int integer(const std::string& key, int fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(where(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const json& e : v) out.push_back(as_number(e, key));
        return out;
    }

    std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(where(key) + " must be an array of integers");
        std::vector<int> out;
        for (const json& e : v) {
            if (!e.is_number_integer()) throw ConfigError(where(key) + " must be an array of integers");
            out.push_back(e.get<int>());
        }
        return out;
    }

    // Rejects keys that were never read.
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where());
    }

    std::string where(const std::string& key = "") const {
        std::string p = path_.empty() ? "config" : path_;
        return key.empty() ? p : p + "." + key;
    }

private:
    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where(key) + " must be finite");
        return x;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

RateSpec parse_rate(const json& v, const std::string& where) {
    RateSpec r;
    if (v.is_number()) {
        r.constant = v.get<double>();
        if (!(r.constant >= 0.0) || !std::isfinite(r.constant)) throw ConfigError(where + " must be a non-negative rate");
        return r;
    }
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a number or a non-empty array of [frequency, rate]");
    for (const json& e : v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ConfigError(where + " entries must be [frequency, rate] pairs");
        }
        const double w = e[0].get<double>(), rate = e[1].get<double>();
        if (!(rate >= 0.0) || !std::isfinite(rate) || !std::isfinite(w)) {
            throw ConfigError(where + " rates must be finite and non-negative");
        }
        r.table.emplace_back(w, rate);
    }
    return r;
}

json window_json(const AveragingWindow& w) {
    return {{"t_start", w.t_start}, {"length", w.length}, {"burn_in_factor", w.burn_in_factor}, {"min_periods", w.min_periods}};
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

const char* to_string(Command c) { return kCommandNames[static_cast<int>(c)]; }

Command parse_command(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kCommandNames[i]) return static_cast<Command>(i);
    throw ConfigError("unknown command '" + name + "'");
}

SpectralRate RateSpec::function() const {
    if (table.empty()) return constant_rate(constant);
    return tabulated_rate(table);
}

json RateSpec::to_json() const {
    if (table.empty()) return constant;
    json a = json::array();
    for (const auto& [w, r] : table) a.push_back({w, r});
    return a;
}

RateFunctions RatesConfig::functions() const {
    RateFunctions r;
    r.Gamma = Gamma.function();
    r.gamma = gamma.function();
    r.gamma_f = gamma_f;
    r.temperature = temperature;
    return r;
}

RunConfig parse_config(const json& doc, Command command) {
    RunConfig cfg;
    cfg.command = command;
    Reader top(doc, "");

    if (top.has("experiment")) {
        const std::string e = top.string("experiment", "");
        require(e == to_string(command), "config experiment '" + e + "' does not match command '" + to_string(command) + "'");
    }

    if (top.has("params")) {
        Reader r(top.raw("params"), "params");
        cfg.params.omega = r.number("omega", 1.0);
        cfg.params.omega0 = r.number("omega0", 0.15);
        cfg.params.beta = r.number("beta", 0.1);
        r.finish();
    }
    require(cfg.params.omega == 1.0, "params.omega must be 1 (frequencies are in units of omega)");
    require(cfg.params.omega0 >= 0.0, "params.omega0 must be non-negative");

    if (top.has("rates")) {
        cfg.rates_set = true;
        Reader r(top.raw("rates"), "rates");
        if (r.has("Gamma")) cfg.rates.Gamma = parse_rate(r.raw("Gamma"), "rates.Gamma");
        if (r.has("gamma")) cfg.rates.gamma = parse_rate(r.raw("gamma"), "rates.gamma");
        cfg.rates.gamma_f = r.number("gamma_f", 0.0);
        cfg.rates.temperature = r.number("temperature", 0.0);
        r.finish();
        require(cfg.rates.gamma_f >= 0.0, "rates.gamma_f must be non-negative");
        require(cfg.rates.temperature >= 0.0, "rates.temperature must be non-negative");
    }

    if (top.has("dims")) {
        Reader r(top.raw("dims"), "dims");
        cfg.n_cut = r.integer("n_cut", cfg.n_cut);
        cfg.n_levels = r.integer("n_levels", 0);
        r.finish();
    }

    if (top.has("output")) {
        Reader r(top.raw("output"), "output");
        cfg.out_dir = r.string("dir", cfg.out_dir);
        cfg.prefix = r.string("prefix", "");
        r.finish();
    }

    if (top.has("numerics")) {
        Reader r(top.raw("numerics"), "numerics");
        cfg.integrator.dt = r.number("dt", cfg.integrator.dt);
        cfg.integrator.tolerance = r.number("tolerance", cfg.integrator.tolerance);
        cfg.integrator.check_every = r.integer("check_every", cfg.integrator.check_every);
        cfg.integrator.max_halvings = r.integer("max_halvings", cfg.integrator.max_halvings);
        cfg.threads = r.integer("threads", cfg.threads);
        r.finish();
    }

    // Exactly one experiment block, matching the command.
    for (int i = 0; i < 6; ++i) {
        const std::string name = kCommandNames[i];
        if (top.has(name) && static_cast<Command>(i) != command) {
            throw ConfigError("config has a '" + name + "' block but the command is '" + to_string(command) + "'");
        }
    }
    const std::string block = to_string(command);
    const json empty = json::object();
    Reader b(top.has(block) ? top.raw(block) : empty, block);
    switch (command) {
        case Command::spectrum:
            cfg.spectrum.levels = b.integer("levels", cfg.spectrum.levels);
            break;
        case Command::fidelity:
            cfg.fidelity.n_states = b.integer("n_states", cfg.fidelity.n_states);
            cfg.fidelity.omega0 = b.numbers("omega0", {});
            cfg.fidelity.beta = b.numbers("beta", {});
            break;
        case Command::relax:
            cfg.relax.t_end = b.number("t_end", 0.0);
            cfg.relax.samples = b.integer("samples", cfg.relax.samples);
            cfg.relax.beta_grid = b.numbers("beta_grid", cfg.relax.beta_grid);
            break;
        case Command::drive:
            cfg.drive.pump_amplitudes = b.numbers("pump_amplitudes", {});
            cfg.drive.pump_frequency = b.optional_number("pump_frequency");
            break;
        case Command::spectroscopy: {
            auto& s = cfg.spectroscopy;
            s.reference_rates = b.boolean("reference_rates", false);
            s.nbar = b.numbers("nbar", {});
            s.pump_amplitudes = b.numbers("pump_amplitudes", {});
            s.pump_frequency = b.optional_number("pump_frequency");
            s.spec_amplitude = b.optional_number("spec_amplitude");
            s.points = b.integer("points", s.points);
            s.x_max = b.number("x_max", s.x_max);
            s.omega_s = b.numbers("omega_s", {});
            s.n_levels = b.integers("n_levels", {});
            if (b.has("window")) {
                Reader w(b.raw("window"), "spectroscopy.window");
                s.window.t_start = w.number("t_start", 0.0);
                s.window.length = w.number("length", 0.0);
                s.window.burn_in_factor = w.number("burn_in_factor", s.window.burn_in_factor);
                s.window.min_periods = w.integer("min_periods", s.window.min_periods);
                w.finish();
            }
            break;
        }
        case Command::validate:
            break;
    }
    b.finish();
    top.finish();

    require(cfg.n_cut >= 2, "dims.n_cut must be >= 2");
    require(cfg.n_levels >= 0, "dims.n_levels must be >= 0 (0 selects automatically)");
    require(cfg.integrator.dt > 0.0, "numerics.dt must be positive");
    require(cfg.integrator.tolerance > 0.0, "numerics.tolerance must be positive");
    require(cfg.threads >= 1, "numerics.threads must be >= 1");
    require(cfg.spectrum.levels >= 1, "spectrum.levels must be >= 1");
    require(cfg.fidelity.n_states >= 1, "fidelity.n_states must be >= 1");
    require(cfg.relax.samples >= 1, "relax.samples must be >= 1");
    require(cfg.relax.t_end >= 0.0, "relax.t_end must be non-negative");
    require(cfg.spectroscopy.points >= 2, "spectroscopy.points must be >= 2");
    require(cfg.spectroscopy.nbar.empty() || cfg.spectroscopy.pump_amplitudes.empty(),
            "spectroscopy: give either nbar or pump_amplitudes, not both");
    for (double a : cfg.drive.pump_amplitudes) require(a >= 0.0, "drive.pump_amplitudes must be non-negative");
    for (double a : cfg.spectroscopy.pump_amplitudes) require(a >= 0.0, "spectroscopy.pump_amplitudes must be non-negative");
    for (double a : cfg.spectroscopy.nbar) require(a >= 0.0, "spectroscopy.nbar must be non-negative");
    return cfg;
}

RunConfig load_config(const std::string& path, Command command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, command);
}

namespace {

SpectroscopyConfig apply_reference_rates(RunConfig& cfg) {
    const SpectroscopyConfig ref = reference_config(cfg.params, 0.0);
    cfg.rates.Gamma = RateSpec{ref.rates.oscillator(ref.pump.frequency), {}};
    cfg.rates.gamma = RateSpec{ref.rates.qubit(cfg.params.omega0), {}};
    cfg.rates.gamma_f = ref.rates.gamma_f;
    cfg.rates.temperature = 0.0;
    cfg.rates_set = true;
    return ref;
}

}  // namespace

void resolve(RunConfig& cfg) {
    if (cfg.prefix.empty()) cfg.prefix = to_string(cfg.command);
    try {
        cfg.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const RabiParams& p = cfg.params;
    // dissipative experiments without a rates block use the reference rates
    if (!cfg.rates_set && (cfg.command == Command::relax || cfg.command == Command::drive)) {
        try {
            apply_reference_rates(cfg);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("no rates given and reference rates unavailable: ") + e.what());
        }
    }

    if (cfg.command == Command::spectroscopy) {
        auto& s = cfg.spectroscopy;
        if (s.reference_rates || !cfg.rates_set) {
            const SpectroscopyConfig ref = apply_reference_rates(cfg);
            if (!s.spec_amplitude) s.spec_amplitude = ref.spec_amplitude;
            s.reference_rates = false;
            if (cfg.integrator.dt == IntegratorControls{}.dt && cfg.integrator.tolerance == IntegratorControls{}.tolerance) {
                cfg.integrator = ref.integrator;
            }
        }
        const RateFunctions rates = cfg.rates.functions();
        const double w_minus = ladder_frequency(p, Branch::minus);
        if (!s.pump_frequency) s.pump_frequency = w_minus;
        const double Gamma = rates.oscillator(w_minus);
        if (s.pump_amplitudes.empty()) {
            if (s.nbar.empty()) s.nbar = {1.0};
            for (double n : s.nbar) s.pump_amplitudes.push_back(pump_amplitude_for(n, Gamma));
        }
        if (!s.spec_amplitude) s.spec_amplitude = cross_rate(p, rates, 0);
        if (s.omega_s.empty()) s.omega_s = normalized_grid(p, s.points, s.x_max);
        s.points = static_cast<int>(s.omega_s.size());
        if (s.n_levels.empty()) {
            for (double a : s.pump_amplitudes) {
                if (cfg.n_levels > 0) {
                    s.n_levels.push_back(cfg.n_levels);
                } else {
                    const double nbar = Gamma > 0.0 ? 4.0 * a * a / (Gamma * Gamma) : 0.0;
                    s.n_levels.push_back(std::min(levels_for_occupation(nbar), std::max(2, max_levels(p.beta))));
                }
            }
        }
        require(s.n_levels.size() == s.pump_amplitudes.size(), "spectroscopy.n_levels needs one entry per pump amplitude");
        s.nbar.clear();
    }
    if (cfg.command == Command::drive) {
        auto& d = cfg.drive;
        const RateFunctions rates = cfg.rates.functions();
        const double w_minus = ladder_frequency(p, Branch::minus);
        if (!d.pump_frequency) d.pump_frequency = w_minus;
        if (d.pump_amplitudes.empty()) d.pump_amplitudes = {rates.oscillator(w_minus) / 2.0};
    }
    if (cfg.command == Command::fidelity) {
        if (cfg.fidelity.omega0.empty()) cfg.fidelity.omega0 = {p.omega0};
        if (cfg.fidelity.beta.empty()) cfg.fidelity.beta = {p.beta};
    }
    if (cfg.command == Command::relax && cfg.relax.t_end == 0.0) {
        const double Gamma = cfg.rates.functions().oscillator(p.omega);
        require(Gamma > 0.0, "relax needs Gamma(omega) > 0 or an explicit t_end");
        cfg.relax.t_end = 5.0 / Gamma;
    }
    if (cfg.command == Command::relax && cfg.integrator.dt == IntegratorControls{}.dt &&
        cfg.integrator.tolerance == IntegratorControls{}.tolerance) {
        cfg.integrator.dt = 0.25;
        cfg.integrator.tolerance = 1e-9;
    }
    if (cfg.n_levels == 0 && cfg.command != Command::spectroscopy) {
        const int cap = std::max(2, std::min(cfg.n_cut / 2, max_levels(p.beta)));
        int want = 12;
        if (cfg.command == Command::drive) {
            const RateFunctions rates = cfg.rates.functions();
            const double Gamma = rates.oscillator(ladder_frequency(p, Branch::minus));
            double top = 0.0;
            for (double a : cfg.drive.pump_amplitudes) top = std::max(top, Gamma > 0.0 ? 4.0 * a * a / (Gamma * Gamma) : 0.0);
            want = levels_for_occupation(top, 1e-10);
        }
        cfg.n_levels = std::min(want, cap);
    }
}

json to_json(const RunConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.command);
    j["params"] = {{"omega", cfg.params.omega}, {"omega0", cfg.params.omega0}, {"beta", cfg.params.beta}};
    j["rates"] = {{"Gamma", cfg.rates.Gamma.to_json()},
                  {"gamma", cfg.rates.gamma.to_json()},
                  {"gamma_f", cfg.rates.gamma_f},
                  {"temperature", cfg.rates.temperature}};
    j["dims"] = {{"n_cut", cfg.n_cut}, {"n_levels", cfg.n_levels}};
    j["output"] = {{"dir", cfg.out_dir}, {"prefix", cfg.prefix}};
    j["numerics"] = {{"dt", cfg.integrator.dt},
                     {"tolerance", cfg.integrator.tolerance},
                     {"check_every", cfg.integrator.check_every},
                     {"max_halvings", cfg.integrator.max_halvings},
                     {"threads", cfg.threads}};
    switch (cfg.command) {
        case Command::spectrum:
            j["spectrum"] = {{"levels", cfg.spectrum.levels}};
            break;
        case Command::fidelity:
            j["fidelity"] = {{"n_states", cfg.fidelity.n_states}, {"omega0", cfg.fidelity.omega0}, {"beta", cfg.fidelity.beta}};
            break;
        case Command::relax:
            j["relax"] = {{"t_end", cfg.relax.t_end}, {"samples", cfg.relax.samples}, {"beta_grid", cfg.relax.beta_grid}};
            break;
        case Command::drive: {
            json d = {{"pump_amplitudes", cfg.drive.pump_amplitudes}};
            d["pump_frequency"] = cfg.drive.pump_frequency ? json(*cfg.drive.pump_frequency) : json(nullptr);
            j["drive"] = d;
            break;
        }
        case Command::spectroscopy: {
            const auto& s = cfg.spectroscopy;
            json b = {{"reference_rates", s.reference_rates},
                      {"pump_amplitudes", s.pump_amplitudes},
                      {"points", s.points},
                      {"x_max", s.x_max},
                      {"omega_s", s.omega_s},
                      {"n_levels", s.n_levels},
                      {"window", window_json(s.window)}};
            if (!s.nbar.empty()) b["nbar"] = s.nbar;
            b["pump_frequency"] = s.pump_frequency ? json(*s.pump_frequency) : json(nullptr);
            b["spec_amplitude"] = s.spec_amplitude ? json(*s.spec_amplitude) : json(nullptr);
            j["spectroscopy"] = b;
            break;
        }
        case Command::validate:
            j["validate"] = json::object();
            break;
    }
    return j;
}

}  // namespace qrabi::cli
