// Scenario assembly: flat key=value config files (SI units) resolved into a
// validated parameter set, the natural-unit wavepacket/Bragg objects derived
// from it, and the end-to-end oracle protocol runner.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "backflow/design.hpp"
#include "backflow/imaging.hpp"
#include "backflow/oracle.hpp"

namespace backflow {

// Flat key = value file; '#' starts a comment; keys are documented in the
// bundled li7.cfg and README. Unknown keys are errors.
class Config {
  public:
    static Config load(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    // CLI override "key=value"; takes precedence over file values.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

struct GridOptions {
    int n_points = 4096;
    double half_widths = 5.0;
    bool auto_refine = true;
};

// A complete, validated experiment description. SI in `params`; the
// natural-unit physics objects are built on demand.
struct Scenario {
    ExperimentParams params;
    DerivedScales scales{};
    double alpha = 3.0;          // q/k1
    double bragg_a2 = 0.0;       // resolved amplitude
    bool a2_from_alpha = false;  // true when bragg_a2 = optimal_a2(alpha)
    double bragg_phase = 0.0;
    GridOptions grid;
    double center_window = 0.1;  // half-width of the plane-wave window, envelope widths
    std::vector<std::string> warnings;

    static Scenario from_config(const Config& config);
    // The worked 7Li example (also shipped as data/li7.cfg).
    static Scenario li7_example();

    // natural units
    double d_natural() const { return params.shift_d / scales.a_x; }
    double k1_natural() const { return scales.k1 * scales.a_x; }
    double q_natural() const { return alpha * k1_natural(); }
    double expansion_natural() const { return params.expansion_time_t * params.omega_x; }
    double hold_natural() const { return effective_hold_time(params) * params.omega_x; }
    double sigma_r_natural() const { return params.sigma_r / scales.a_x; }
    double g1d_natural() const;

    InitialProfile initial_profile() const;
    WavepacketState packet() const;  // at the expansion time
    BraggConfig bragg() const;
    DesignInput design_input() const;
};

// --- oracle protocol (trap shift -> dipole quarter period -> release ->
//     free expansion -> optional Bragg kick), in release coordinates:
//     the trap is initially centered at -d and shifts to 0, so the packet is
//     at the origin with velocity v1 when the trap switches off. ---

struct ProtocolOptions {
    int n_points = 8192;
    double dt = 1e-3;
    bool apply_kick = true;
    oracle::GroundStateOptions ground_state;
};

oracle::Simulation run_protocol(const Scenario& scenario, const ProtocolOptions& opts);

// Grid that covers every protocol stage for this scenario.
oracle::GridSpec protocol_grid(const Scenario& scenario, int n_points);

}  // namespace backflow
