#pragma once

#include <cstdint>
#include <string>

#include "fas/copula.hpp"
#include "fas/geometry.hpp"

namespace fas {

double db_to_linear(double db);
double linear_to_db(double x);
double dbm_to_watts(double dbm);
double watts_to_dbm(double w);

/// P / (d^nu · noise), all linear.
double avg_snr_from_link(double p_tx_watts, double distance_m, double path_loss_exponent, double noise_watts);

enum class Role { bob, eve };
enum class ChannelKind { fas, mrc, sc };

const char* to_string(Role r);
const char* to_string(ChannelKind k);
ChannelKind parse_channel_kind(const std::string& s);  // throws DomainError

/// One receiver. For `fas` the grid and its copula correlation are used; for
/// `mrc` and `sc` the antenna count is used and branches are independent.
struct NodeParams {
    Role role = Role::bob;
    ChannelKind channel = ChannelKind::fas;
    PortGrid grid{1, 1, 0.0, 0.0};
    CorrelationMatrix corr;
    double omega = 1.0;
    int antennas = 1;
    MarginalModel marginal;
    double avg_snr = 1.0;  // linear, per element

    static NodeParams fas(Role role, const PortGrid& grid, const MarginalModel& m, double avg_snr, double omega = 1.0);
    static NodeParams mrc(Role role, int antennas, const MarginalModel& m, double avg_snr);
    static NodeParams sc(Role role, int antennas, const MarginalModel& m, double avg_snr);

    /// Ports or antennas drawn per channel use.
    int elements() const noexcept { return channel == ChannelKind::fas ? grid.ports() : antennas; }

    /// Elements that must be powered: one for FAS and SC, all of them for MRC.
    int activated() const noexcept { return channel == ChannelKind::mrc ? antennas : 1; }

    void validate() const;
};

struct PowerModel {
    double p_tx = 0.0;        // W
    double alpha = 1.0;       // drain efficiency, (0, 1]
    double p_circuit = 0.0;   // W
    double p_activate = 0.0;  // W per active element
    int active_ports = 1;

    double total() const noexcept { return p_tx / alpha + p_circuit + active_ports * p_activate; }
    void validate() const;
};

struct SecrecyScenario {
    NodeParams bob;
    NodeParams eve;
    double secrecy_rate = 1.0;  // bits/s/Hz
    PowerModel power;
    int quad_order = 128;
    double quad_scale = 2.0;
    double mvn_tol = 1e-3;
    double metric_tol = 1e-4;  // target relative estimator error of each metric
    std::uint64_t seed = 0;

    double kappa() const noexcept { return bob.avg_snr / eve.avg_snr; }

    /// Checks every field, including active_ports == bob.activated().
    void validate() const;
};

/// Link-level defaults: P = -27 dBm, d = 1 m, nu = 2.1, noise -30 dBm at Bob and
/// -20 dBm at Eve, eta = 1, both nodes FAS 2x2 over 1 λ², R_s = 1,
/// P_c = 20 dBm, P_act = 10 dBm, alpha = 1.
SecrecyScenario default_scenario();

}  // namespace fas
