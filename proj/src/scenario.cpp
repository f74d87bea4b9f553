#include "fas/scenario.hpp"

#include <cmath>

#include "fas/error.hpp"

namespace fas {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

double avg_snr_from_link(double p_tx_watts, double distance_m, double path_loss_exponent, double noise_watts) {
    if (!(p_tx_watts >= 0.0) || !(distance_m > 0.0) || !(noise_watts > 0.0) || !std::isfinite(path_loss_exponent)) {
        throw DomainError("avg_snr_from_link: need P >= 0, d > 0, noise > 0 and a finite exponent");
    }
    return p_tx_watts / (std::pow(distance_m, path_loss_exponent) * noise_watts);
}

const char* to_string(Role r) { return r == Role::bob ? "bob" : "eve"; }

const char* to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::fas: return "fas";
        case ChannelKind::mrc: return "mrc";
        case ChannelKind::sc: return "sc";
    }
    return "?";
}

ChannelKind parse_channel_kind(const std::string& s) {
    if (s == "fas") return ChannelKind::fas;
    if (s == "mrc") return ChannelKind::mrc;
    if (s == "sc") return ChannelKind::sc;
    throw DomainError("unknown channel kind '" + s + "' (expected fas, mrc or sc)");
}

NodeParams NodeParams::fas(Role role, const PortGrid& grid, const MarginalModel& m, double avg_snr, double omega) {
    NodeParams n;
    n.role = role;
    n.channel = ChannelKind::fas;
    n.grid = grid;
    n.omega = omega;
    n.corr = copula_correlation(jakes_covariance(grid, omega));
    n.antennas = grid.ports();
    n.marginal = m;
    n.avg_snr = avg_snr;
    n.validate();
    return n;
}

NodeParams NodeParams::mrc(Role role, int antennas, const MarginalModel& m, double avg_snr) {
    NodeParams n;
    n.role = role;
    n.channel = ChannelKind::mrc;
    n.antennas = antennas;
    n.marginal = m;
    n.avg_snr = avg_snr;
    n.validate();
    return n;
}

NodeParams NodeParams::sc(Role role, int antennas, const MarginalModel& m, double avg_snr) {
    NodeParams n = mrc(role, antennas, m, avg_snr);
    n.channel = ChannelKind::sc;
    return n;
}

void NodeParams::validate() const {
    const std::string who = std::string(to_string(role)) + ": ";
    if (!(avg_snr >= 0.0) || !std::isfinite(avg_snr)) throw DomainError(who + "average SNR must be finite and >= 0");
    if (!(marginal.eta > 0.0)) throw DomainError(who + "eta must be positive");
    if (channel == ChannelKind::fas) {
        grid.validate();
        if (corr.dim() != grid.ports()) throw DomainError(who + "correlation matrix does not match the port grid");
    } else if (antennas < 1) {
        throw DomainError(who + "antenna count must be >= 1");
    }
}

void PowerModel::validate() const {
    if (!(p_tx >= 0.0) || !(p_circuit >= 0.0) || !(p_activate >= 0.0)) {
        throw DomainError("power: all powers must be >= 0");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("power: alpha must be in (0, 1]");
    if (active_ports < 1) throw DomainError("power: active_ports must be >= 1");
}

void SecrecyScenario::validate() const {
    bob.validate();
    eve.validate();
    power.validate();
    if (bob.role != Role::bob || eve.role != Role::eve) throw DomainError("scenario: node roles are swapped");
    if (!(secrecy_rate >= 0.0) || !std::isfinite(secrecy_rate)) {
        throw DomainError("scenario: secrecy rate must be finite and >= 0");
    }
    if (power.active_ports != bob.activated()) {
        throw DomainError("scenario: active_ports = " + std::to_string(power.active_ports) + " but a " +
                          to_string(bob.channel) + " receiver powers " + std::to_string(bob.activated()));
    }
    if (quad_order < 1 || quad_order > 128) throw DomainError("scenario: quad order must be in [1, 128]");
    if (!(quad_scale > 0.0) || !std::isfinite(quad_scale)) throw DomainError("scenario: quad scale must be > 0");
    if (!(mvn_tol >= 1e-6 && mvn_tol <= 1e-2)) throw DomainError("scenario: mvn tol must be in [1e-6, 1e-2]");
    if (!(metric_tol >= 1e-6 && metric_tol <= 1e-1)) {
        throw DomainError("scenario: metric tol must be in [1e-6, 1e-1]");
    }
}

SecrecyScenario default_scenario() {
    const double p_tx = dbm_to_watts(-27.0);
    const auto m = MarginalModel::rayleigh(1.0);
    SecrecyScenario s;
    s.bob = NodeParams::fas(Role::bob, PortGrid::square(2, 1.0), m, avg_snr_from_link(p_tx, 1.0, 2.1, dbm_to_watts(-30.0)));
    s.eve = NodeParams::fas(Role::eve, PortGrid::square(2, 1.0), m, avg_snr_from_link(p_tx, 1.0, 2.1, dbm_to_watts(-20.0)));
    s.secrecy_rate = 1.0;
    s.power = PowerModel{p_tx, 1.0, dbm_to_watts(20.0), dbm_to_watts(10.0), 1};
    return s;
}

}  // namespace fas
