#include "backflow/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace backflow {

namespace {

const char* const kKnownKeys[] = {
    "species",        "atom_mass_u",     "omega_x",      "omega_perp",
    "shift_d",        "hold_time_t1",    "expansion_time_t", "sigma_r",
    "n_atoms",        "g3d",             "regime",       "alpha",
    "bragg_q",        "bragg_a2",        "bragg_phase",  "grid_points",
    "grid_half_widths", "center_window",
};

bool known_key(const std::string& key) {
    for (const char* k : kKnownKeys) {
        if (key == k) return true;
    }
    return false;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    const char* start = value.c_str();
    char* end = nullptr;
    const double parsed = std::strtod(start, &end);
    if (end == start || *end != '\0') {
        throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" +
                                    value + "'");
    }
    return parsed;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_number(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw std::invalid_argument("config: key '" + key + "' must be an integer");
    }
    return i;
}

Regime parse_regime(const std::string& value) {
    std::string canon;
    for (char c : value) {
        if (c == '-' || c == '_' || c == ' ') continue;
        canon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (canon == "noninteracting" || canon == "ideal" || canon == "gaussian") {
        return Regime::NonInteracting;
    }
    if (canon == "thomasfermi" || canon == "tf") return Regime::ThomasFermi;
    throw std::invalid_argument("config: regime must be 'noninteracting' or 'thomas-fermi' (got '" +
                                value + "')");
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config: line " << line_no << " is not 'key = value': '" << line << "'";
            throw std::invalid_argument(msg.str());
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw std::invalid_argument("override must be key=value (got '" + assignment + "')");
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) {
        std::ostringstream msg;
        msg << "config: unknown key '" << key << "'; known keys:";
        for (const char* k : kKnownKeys) msg << " " << k;
        throw std::invalid_argument(msg.str());
    }
    if (value.empty()) {
        throw std::invalid_argument("config: key '" + key + "' has an empty value");
    }
    values_[key] = value;
}

Scenario Scenario::from_config(const Config& config) {
    const auto& kv = config.values();
    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    Scenario s;
    if (const auto* species = get("species")) {
        const auto mass = species_mass(*species);
        if (!mass) {
            throw std::invalid_argument("config: unknown species '" + *species +
                                        "' (built-in: 7Li, 87Rb)");
        }
        s.params.atom_mass = *mass;
    }
    if (const auto* v = get("atom_mass_u")) {
        s.params.atom_mass = parse_number("atom_mass_u", *v) * constants::atomic_mass_unit;
    }
    if (s.params.atom_mass <= 0.0) {
        throw std::invalid_argument("config: species or atom_mass_u is required");
    }

    auto require = [&](const char* key) -> double {
        const auto* v = get(key);
        if (!v) throw std::invalid_argument(std::string("config: key '") + key + "' is required");
        return parse_number(key, *v);
    };
    s.params.omega_x = require("omega_x");
    s.params.shift_d = require("shift_d");
    s.params.expansion_time_t = require("expansion_time_t");
    s.params.omega_perp =
        get("omega_perp") ? parse_number("omega_perp", *get("omega_perp"))
                          : 100.0 * s.params.omega_x;
    if (const auto* v = get("hold_time_t1")) s.params.hold_time_t1 = parse_number("hold_time_t1", *v);
    if (const auto* v = get("sigma_r")) s.params.sigma_r = parse_number("sigma_r", *v);
    if (const auto* v = get("n_atoms")) s.params.n_atoms = parse_number("n_atoms", *v);
    if (const auto* v = get("g3d")) s.params.g3d = parse_number("g3d", *v);
    if (const auto* v = get("regime")) s.params.regime = parse_regime(*v);

    s.warnings = validate(s.params);
    s.scales = derive_scales(s.params);

    const auto* alpha_v = get("alpha");
    const auto* q_v = get("bragg_q");
    if (alpha_v && q_v) {
        throw std::invalid_argument("config: give either alpha or bragg_q, not both");
    }
    if (q_v) {
        const double q_si = parse_number("bragg_q", *q_v);
        if (!(q_si > 0.0)) throw std::invalid_argument("config: bragg_q must be positive");
        if (!(s.scales.k1 > 0.0)) {
            throw std::invalid_argument("config: bragg_q needs a nonzero shift_d (k1 = 0)");
        }
        s.alpha = q_si / s.scales.k1;
    } else if (alpha_v) {
        s.alpha = parse_number("alpha", *alpha_v);
    } else {
        throw std::invalid_argument("config: alpha (or bragg_q) is required");
    }
    if (!(s.alpha > 0.0)) throw std::invalid_argument("config: alpha must be positive");

    if (const auto* v = get("bragg_a2")) {
        s.bragg_a2 = parse_number("bragg_a2", *v);
        s.a2_from_alpha = false;
        if (!(s.bragg_a2 >= 0.0 && s.bragg_a2 <= 1.0)) {
            throw std::invalid_argument("config: bragg_a2 must lie in [0,1]");
        }
    } else {
        s.bragg_a2 = optimal_a2(s.alpha);
        s.a2_from_alpha = true;
    }
    if (const auto* v = get("bragg_phase")) s.bragg_phase = parse_number("bragg_phase", *v);

    if (const auto* v = get("grid_points")) {
        s.grid.n_points = parse_int("grid_points", *v);
        if (s.grid.n_points < 2) throw std::invalid_argument("config: grid_points must be >= 2");
    }
    if (const auto* v = get("grid_half_widths")) {
        s.grid.half_widths = parse_number("grid_half_widths", *v);
        if (!(s.grid.half_widths > 0.0)) {
            throw std::invalid_argument("config: grid_half_widths must be positive");
        }
    }
    if (const auto* v = get("center_window")) {
        s.center_window = parse_number("center_window", *v);
        if (!(s.center_window > 0.0)) {
            throw std::invalid_argument("config: center_window must be positive");
        }
    }
    return s;
}

Scenario Scenario::li7_example() {
    Config cfg;
    cfg.set("species", "7Li");
    cfg.set("omega_x", "6.283185307179586");   // 2 pi x 1 Hz
    cfg.set("omega_perp", "628.3185307179587");
    cfg.set("shift_d", "80e-6");
    cfg.set("expansion_time_t", "1.0");
    cfg.set("sigma_r", "3e-6");
    cfg.set("alpha", "3.0");
    cfg.set("bragg_a2", "0.49");
    cfg.set("bragg_phase", "2.854773");
    cfg.set("regime", "noninteracting");
    return from_config(cfg);
}

double Scenario::g1d_natural() const {
    return scales.g1d / (constants::hbar * params.omega_x * scales.a_x);
}

InitialProfile Scenario::initial_profile() const {
    if (params.regime == Regime::NonInteracting) return InitialProfile::gaussian();
    return InitialProfile::thomas_fermi(params.n_atoms, g1d_natural());
}

WavepacketState Scenario::packet() const {
    return WavepacketState::at_time(initial_profile(), k1_natural(), expansion_natural());
}

BraggConfig Scenario::bragg() const {
    return BraggConfig(bragg_a2, q_natural(), bragg_phase);
}

DesignInput Scenario::design_input() const {
    DesignInput input;
    input.alpha = alpha;
    input.d = d_natural();
    input.r0 = initial_profile().width_r0;
    input.regime = params.regime;
    return input;
}

oracle::GridSpec protocol_grid(const Scenario& scenario, int n_points) {
    const InitialProfile profile = scenario.initial_profile();
    const ScalingState end = scaling_evolve(profile.regime, scenario.expansion_natural());
    const double d = scenario.d_natural();
    const double center_end = scenario.k1_natural() * scenario.expansion_natural();

    // Trap stages keep the packet within |x| <= d plus its initial width;
    // the expanded packet needs tails down to ~1e-12 of the peak.
    double expanded_half;
    double trap_half;
    if (profile.regime == Regime::NonInteracting) {
        expanded_half = 5.5 * end.b * profile.width_r0;
        trap_half = d + 8.0 * profile.width_r0;
    } else {
        // GPE tails extend past the scaling-law support (healing layer plus
        // release ripples); leave generous room beyond b * R_TF.
        expanded_half = 1.45 * end.b * profile.width_r0 + 6.0;
        trap_half = d + profile.width_r0 + 6.0;
    }
    oracle::GridSpec grid;
    grid.n_points = n_points;
    grid.x_min = std::min(-trap_half, center_end - expanded_half);
    grid.x_max = std::max(trap_half, center_end + expanded_half);
    return grid;
}

oracle::Simulation run_protocol(const Scenario& scenario, const ProtocolOptions& opts) {
    const oracle::GridSpec grid = protocol_grid(scenario, opts.n_points);
    const double d = scenario.d_natural();
    const double g_eff = scenario.params.regime == Regime::ThomasFermi
                             ? scenario.g1d_natural()
                             : 0.0;
    const double norm = scenario.params.regime == Regime::ThomasFermi
                            ? scenario.params.n_atoms
                            : 1.0;

    // Ground state in the pre-shift trap centered at -d.
    oracle::Simulation sim = oracle::Simulation::ground_state(
        grid, oracle::Potential::harmonic(-d), g_eff, norm, opts.ground_state);

    // Trap shifts to the origin; quarter dipole period brings the packet to
    // x = 0 with velocity v1 = d.
    sim.evolve(scenario.hold_natural(), oracle::Potential::harmonic(0.0), opts.dt);
    // Free expansion.
    sim.evolve(scenario.expansion_natural(), oracle::Potential::free_space(), opts.dt);
    if (opts.apply_kick) sim.bragg_kick(scenario.bragg());
    return sim;
}

}  // namespace backflow
