#include "fas/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "fas/error.hpp"

namespace fas {

ScenarioInputs::ScenarioInputs() { eve.noise_dbm = -20.0; }

SecrecyScenario build_scenario(const ScenarioInputs& in) {
    const double p_tx = dbm_to_watts(in.p_tx_dbm);
    auto node = [&](const NodeInputs& n, Role role) {
        const auto m = MarginalModel::rayleigh(n.eta);
        const double snr = n.gamma_db ? db_to_linear(*n.gamma_db)
                                      : avg_snr_from_link(p_tx, n.distance_m, in.path_loss_exponent,
                                                          dbm_to_watts(n.noise_dbm));
        switch (n.channel) {
            case ChannelKind::fas: return NodeParams::fas(role, PortGrid{n.k1, n.k2, n.w1, n.w2}, m, snr, n.omega);
            case ChannelKind::mrc: return NodeParams::mrc(role, n.antennas, m, snr);
            case ChannelKind::sc: return NodeParams::sc(role, n.antennas, m, snr);
        }
        throw DomainError("unknown channel kind");
    };
    SecrecyScenario s;
    s.bob = node(in.bob, Role::bob);
    s.eve = node(in.eve, Role::eve);
    s.secrecy_rate = in.secrecy_rate;
    s.power = PowerModel{p_tx, in.alpha, dbm_to_watts(in.p_circuit_dbm), dbm_to_watts(in.p_activate_dbm),
                         in.active_ports.value_or(s.bob.activated())};
    s.quad_order = in.quad_order;
    s.quad_scale = in.quad_scale;
    s.mvn_tol = in.mvn_tol;
    s.metric_tol = in.metric_tol;
    s.seed = in.seed;
    s.validate();
    return s;
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::gamma_b_db: return "gamma_b_db";
        case SweepAxis::p_tx_dbm: return "p_tx_dbm";
        case SweepAxis::k_b_ports: return "k_b_ports";
        case SweepAxis::w_b_area: return "w_b_area";
        case SweepAxis::d_b_meters: return "d_b_meters";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string& s) {
    for (auto a : {SweepAxis::gamma_b_db, SweepAxis::p_tx_dbm, SweepAxis::k_b_ports, SweepAxis::w_b_area,
                   SweepAxis::d_b_meters})
        if (s == to_string(a)) return a;
    throw DomainError("unknown sweep axis '" + s +
                      "' (expected gamma_b_db, p_tx_dbm, k_b_ports, w_b_area or d_b_meters)");
}

namespace {

int square_side(double v) {
    const double r = std::round(std::sqrt(v));
    if (!(v >= 1.0) || v != std::round(v) || r * r != v) return -1;
    return static_cast<int>(r);
}

}  // namespace

ScenarioInputs apply_sweep_value(const ScenarioInputs& base, SweepAxis axis, double value) {
    if (!std::isfinite(value)) throw DomainError(std::string("sweep value for ") + to_string(axis) + " is not finite");
    ScenarioInputs in = base;
    switch (axis) {
        case SweepAxis::gamma_b_db:
            in.bob.gamma_db = value;
            break;
        case SweepAxis::p_tx_dbm:
            in.p_tx_dbm = value;
            break;
        case SweepAxis::k_b_ports: {
            const int side = square_side(value);
            if (side < 1) throw DomainError("k_b_ports value " + std::to_string(value) + " is not a perfect square");
            if (in.bob.channel == ChannelKind::fas) {
                in.bob.k1 = in.bob.k2 = side;
            } else {
                in.bob.antennas = side * side;
                if (in.active_ports) in.active_ports.reset();
            }
            break;
        }
        case SweepAxis::w_b_area:
            if (!(value > 0.0)) throw DomainError("w_b_area must be positive");
            in.bob.w1 = in.bob.w2 = std::sqrt(value);
            break;
        case SweepAxis::d_b_meters:
            if (!(value > 0.0)) throw DomainError("d_b_meters must be positive");
            in.bob.distance_m = value;
            in.bob.gamma_db.reset();
            break;
    }
    return in;
}

namespace {

struct Value {
    std::variant<double, std::string, bool, std::vector<double>> v;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& s) {
    std::string t = trim(s);
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

Value parse_value(const std::string& key, const std::string& raw, int line) {
    Value out;
    out.line = line;
    if (raw.empty()) throw ConfigError(key, line, "missing value");
    if (raw.front() == '"') {
        const auto close = raw.find('"', 1);
        if (close == std::string::npos || trim(raw.substr(close + 1)) != "") {
            throw ConfigError(key, line, "unterminated or trailing characters after string");
        }
        out.v = raw.substr(1, close - 1);
    } else if (raw.front() == '[') {
        if (raw.back() != ']') throw ConfigError(key, line, "list must end with ']'");
        std::vector<double> xs;
        std::stringstream ss(raw.substr(1, raw.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            const auto x = parse_number(item);
            if (!x) throw ConfigError(key, line, "list element '" + trim(item) + "' is not a number");
            xs.push_back(*x);
        }
        out.v = xs;
    } else if (raw == "true" || raw == "false") {
        out.v = raw == "true";
    } else if (const auto x = parse_number(raw)) {
        out.v = *x;
    } else {
        out.v = raw;  // bare word
    }
    return out;
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

class Reader {
public:
    Reader(std::map<std::string, Value> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& k) const { return kv_.count(k) > 0; }
    int line(const std::string& k) const { return has(k) ? kv_.at(k).line : 0; }

    double number(const std::string& k) {
        const Value& v = take(k);
        if (const double* d = std::get_if<double>(&v.v)) {
            if (!std::isfinite(*d)) throw ConfigError(k, v.line, "value must be finite");
            return *d;
        }
        throw ConfigError(k, v.line, "expected a number");
    }

    long long integer(const std::string& k, long long lo) {
        const int ln = line(k);
        const double d = number(k);
        if (d != std::round(d) || d < static_cast<double>(lo) || d > 9.0e15) {
            throw ConfigError(k, ln, "expected an integer >= " + std::to_string(lo));
        }
        return static_cast<long long>(d);
    }

    std::string text(const std::string& k) {
        const Value& v = take(k);
        if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
        throw ConfigError(k, v.line, "expected a string");
    }

    const Value& take(const std::string& k) {
        used_.insert(k);
        return kv_.at(k);
    }

    std::vector<std::pair<std::string, int>> unused() const {
        std::vector<std::pair<std::string, int>> out;
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) out.emplace_back(k, v.line);
        return out;
    }

private:
    std::map<std::string, Value> kv_;
    std::set<std::string> used_;
};

void read_node(Reader& r, const std::string& p, NodeInputs& n) {
    const auto key = [&](const char* s) { return p + "." + s; };
    if (r.has(key("channel"))) {
        const int ln = r.line(key("channel"));
        try {
            n.channel = parse_channel_kind(r.text(key("channel")));
        } catch (const DomainError& e) {
            throw ConfigError(key("channel"), ln, e.what());
        }
    }
    if (r.has(key("ports"))) {
        const std::string k = key("ports");
        const Value& v = r.take(k);
        if (const double* d = std::get_if<double>(&v.v)) {
            const int side = square_side(*d);
            if (side < 1) {
                throw ConfigError(k, v.line, "port count must factor as k1 x k2; write ports = [k1, k2] for a "
                                             "non-square grid");
            }
            n.k1 = n.k2 = side;
        } else if (const auto* xs = std::get_if<std::vector<double>>(&v.v)) {
            if (xs->size() != 2) throw ConfigError(k, v.line, "expected [k1, k2]");
            for (double x : *xs)
                if (x != std::round(x) || x < 1.0) throw ConfigError(k, v.line, "k1 and k2 must be positive integers");
            n.k1 = static_cast<int>((*xs)[0]);
            n.k2 = static_cast<int>((*xs)[1]);
        } else {
            throw ConfigError(k, v.line, "expected a square port count or [k1, k2]");
        }
    }
    if (r.has(key("size"))) {
        const std::string k = key("size");
        const Value& v = r.take(k);
        if (const double* d = std::get_if<double>(&v.v)) {
            if (!(*d > 0.0) || !std::isfinite(*d)) throw ConfigError(k, v.line, "area must be positive");
            n.w1 = n.w2 = std::sqrt(*d);
        } else if (const auto* xs = std::get_if<std::vector<double>>(&v.v)) {
            if (xs->size() != 2) throw ConfigError(k, v.line, "expected [w1, w2]");
            for (double x : *xs)
                if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(k, v.line, "sides must be >= 0");
            n.w1 = (*xs)[0];
            n.w2 = (*xs)[1];
        } else {
            throw ConfigError(k, v.line, "expected an area or [w1, w2]");
        }
    }
    if (r.has(key("antennas"))) n.antennas = static_cast<int>(r.integer(key("antennas"), 1));
    if (r.has(key("eta"))) n.eta = r.number(key("eta"));
    if (r.has(key("omega"))) n.omega = r.number(key("omega"));
    if (r.has(key("gamma_db"))) {
        for (const char* other : {"distance_m", "noise_dbm"}) {
            if (r.has(key(other))) {
                const int ln = std::max(r.line(key("gamma_db")), r.line(key(other)));
                throw ConfigError(key("gamma_db"), ln,
                                  std::string("contradicts ") + key(other) +
                                      "; give either the average SNR or the link budget");
            }
        }
        n.gamma_db = r.number(key("gamma_db"));
    }
    if (r.has(key("distance_m"))) n.distance_m = r.number(key("distance_m"));
    if (r.has(key("noise_dbm"))) n.noise_dbm = r.number(key("noise_dbm"));
}

}  // namespace

RunConfig parse_config(const std::string& text, bool lenient) {
    std::map<std::string, Value> kv;
    std::istringstream is(text);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", line_no, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("", line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("", line_no, "expected key = value");
        const std::string k = trim(line.substr(0, eq));
        if (k.empty()) throw ConfigError("", line_no, "missing key");
        const std::string full = section.empty() ? k : section + "." + k;
        if (kv.count(full)) {
            throw ConfigError(full, line_no, "duplicate key (first set on line " + std::to_string(kv[full].line) + ")");
        }
        kv[full] = parse_value(full, trim(line.substr(eq + 1)), line_no);
    }

    Reader r(std::move(kv));
    RunConfig cfg;
    ScenarioInputs& in = cfg.inputs;

    if (r.has("seed")) {
        in.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
        cfg.seed_given = true;
    }
    if (r.has("secrecy_rate")) in.secrecy_rate = r.number("secrecy_rate");
    if (r.has("path_loss_exponent")) in.path_loss_exponent = r.number("path_loss_exponent");
    if (r.has("quad.order")) in.quad_order = static_cast<int>(r.integer("quad.order", 1));
    if (r.has("quad.scale")) in.quad_scale = r.number("quad.scale");
    if (r.has("mvn.tol")) in.mvn_tol = r.number("mvn.tol");
    if (r.has("mvn.metric_tol")) in.metric_tol = r.number("mvn.metric_tol");
    if (r.has("power.p_tx_dbm")) in.p_tx_dbm = r.number("power.p_tx_dbm");
    if (r.has("power.alpha")) in.alpha = r.number("power.alpha");
    if (r.has("power.p_circuit_dbm")) in.p_circuit_dbm = r.number("power.p_circuit_dbm");
    if (r.has("power.p_activate_dbm")) in.p_activate_dbm = r.number("power.p_activate_dbm");
    const int active_line = r.line("power.active_ports");
    if (r.has("power.active_ports")) in.active_ports = static_cast<int>(r.integer("power.active_ports", 1));
    read_node(r, "bob", in.bob);
    read_node(r, "eve", in.eve);

    if (r.has("mc.trials")) cfg.mc_trials = static_cast<std::uint64_t>(r.integer("mc.trials", 1));
    if (r.has("mc.channel")) {
        const int ln = r.line("mc.channel");
        try {
            cfg.mc_channel = parse_mc_channel(r.text("mc.channel"));
        } catch (const DomainError& e) {
            throw ConfigError("mc.channel", ln, e.what());
        }
    }

    const bool any_sweep = r.has("sweep.axis") || r.has("sweep.values") || r.has("sweep.start") ||
                           r.has("sweep.stop") || r.has("sweep.count") || r.has("sweep.scale");
    if (any_sweep) {
        if (!r.has("sweep.axis")) throw ConfigError("sweep.axis", 0, "sweep settings given without an axis");
        SweepSpec spec;
        const int axis_line = r.line("sweep.axis");
        try {
            spec.axis = parse_sweep_axis(r.text("sweep.axis"));
        } catch (const DomainError& e) {
            throw ConfigError("sweep.axis", axis_line, e.what());
        }
        const bool range = r.has("sweep.start") || r.has("sweep.stop") || r.has("sweep.count");
        if (r.has("sweep.values") && range) {
            throw ConfigError("sweep.values", r.line("sweep.values"), "give either values or start/stop/count");
        }
        if (r.has("sweep.values")) {
            const Value& v = r.take("sweep.values");
            if (const auto* xs = std::get_if<std::vector<double>>(&v.v)) {
                spec.values = *xs;
            } else if (const double* d = std::get_if<double>(&v.v)) {
                spec.values = {*d};
            } else {
                throw ConfigError("sweep.values", v.line, "expected a number list");
            }
        } else {
            for (const char* k : {"sweep.start", "sweep.stop", "sweep.count"})
                if (!r.has(k)) throw ConfigError(k, 0, "range sweeps need start, stop and count");
            const double a = r.number("sweep.start");
            const double b = r.number("sweep.stop");
            const auto count = r.integer("sweep.count", 1);
            std::string scale = "linear";
            const int scale_line = r.line("sweep.scale");
            if (r.has("sweep.scale")) scale = r.text("sweep.scale");
            if (scale != "linear" && scale != "log") throw ConfigError("sweep.scale", scale_line, "expected linear or log");
            if (scale == "log" && !(a > 0.0 && b > 0.0)) {
                throw ConfigError("sweep.scale", scale_line, "log ranges need positive start and stop");
            }
            for (long long i = 0; i < count; ++i) {
                const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
                spec.values.push_back(scale == "log" ? a * std::pow(b / a, t) : a + (b - a) * t);
            }
        }
        if (spec.values.empty()) throw ConfigError("sweep.values", r.line("sweep.values"), "no sweep values");
        for (double x : spec.values) {
            try {
                build_scenario(apply_sweep_value(in, spec.axis, x));
            } catch (const DomainError& e) {
                throw ConfigError("sweep.values", r.line("sweep.values"), e.what());
            }
        }
        cfg.sweep = spec;
    }

    for (const auto& [k, ln] : r.unused()) {
        if (!lenient) throw ConfigError(k, ln, "unknown key");
        cfg.warnings.push_back("line " + std::to_string(ln) + ": unknown key '" + k + "' ignored");
    }

    try {
        build_scenario(in);
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        const bool active = msg.find("active_ports") != std::string::npos;
        throw ConfigError(active ? "power.active_ports" : "", active ? active_line : 0, msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path, bool lenient) {
    std::ifstream f(path);
    if (!f) throw ConfigError("", 0, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), lenient);
}

}  // namespace fas
