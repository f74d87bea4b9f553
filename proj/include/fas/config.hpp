#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fas/montecarlo.hpp"
#include "fas/scenario.hpp"

namespace fas {

/// Raw per-node settings as written in a config file (dB and dBm kept as given).
struct NodeInputs {
    ChannelKind channel = ChannelKind::fas;
    int k1 = 2, k2 = 2;
    double w1 = 1.0, w2 = 1.0;
    int antennas = 4;
    double eta = 1.0;
    double omega = 1.0;
    std::optional<double> gamma_db;  // overrides the link budget when set
    double distance_m = 1.0;
    double noise_dbm = -30.0;
};

struct ScenarioInputs {
    NodeInputs bob;
    NodeInputs eve;
    double secrecy_rate = 1.0;
    double path_loss_exponent = 2.1;
    double p_tx_dbm = -27.0;
    double alpha = 1.0;
    double p_circuit_dbm = 20.0;
    double p_activate_dbm = 10.0;
    std::optional<int> active_ports;
    int quad_order = 128;
    double quad_scale = 2.0;
    double mvn_tol = 1e-3;
    double metric_tol = 1e-4;
    std::uint64_t seed = 0;

    ScenarioInputs();
};

/// The one place dB/dBm become linear. Throws DomainError on invalid values.
SecrecyScenario build_scenario(const ScenarioInputs& in);

enum class SweepAxis { gamma_b_db, p_tx_dbm, k_b_ports, w_b_area, d_b_meters };

const char* to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& s);

struct SweepSpec {
    SweepAxis axis = SweepAxis::gamma_b_db;
    std::vector<double> values;
};

/// Copy of `base` with the swept field set to `value`. Throws DomainError if the
/// value is outside the axis domain (k_b_ports must be a positive perfect square).
ScenarioInputs apply_sweep_value(const ScenarioInputs& base, SweepAxis axis, double value);

struct RunConfig {
    ScenarioInputs inputs;
    bool seed_given = false;
    std::optional<SweepSpec> sweep;
    std::uint64_t mc_trials = 1'000'000;
    McChannel mc_channel = McChannel::copula;
    std::vector<std::string> warnings;
};

/// Flat key = value file with optional [section] headers; keys may also be
/// written dotted (bob.gamma_db). Values: numbers, quoted strings, true/false,
/// and [a, b, ...] number lists. '#' starts a comment.
/// Unknown keys throw ConfigError unless `lenient`, in which case they are
/// collected in `warnings`. Errors name the key and line.
RunConfig parse_config(const std::string& text, bool lenient = false);
RunConfig load_config(const std::string& path, bool lenient = false);

}  // namespace fas
