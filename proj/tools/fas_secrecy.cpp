// fas_secrecy: command-line front end.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 numerical failure,
// 3 validation z-score failure.

#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "fas/config.hpp"
#include "fas/csv.hpp"
#include "fas/error.hpp"
#include "fas/quadrature.hpp"
#include "fas/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("fas");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FAS_SECRECY_LOG")) {
        const auto lvl = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept known ones.
        if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
        else spdlog::warn("FAS_SECRECY_LOG='{}' not recognised, keeping 'warn'", env);
    }
}

// Writes to the file at `path`, or stdout for "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw fas::ConfigError("", 0, "cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

fas::RunConfig read_config(const std::string& path, bool lenient) {
    fas::RunConfig cfg = fas::load_config(path, lenient);
    for (const auto& w : cfg.warnings) spdlog::warn("{}", w);
    return cfg;
}

int cmd_rule(int order) {
    const auto rule = fas::gauss_laguerre_rule(order);
    std::cout << fas::kCsvSchemaLine << '\n';
    fas::write_csv_row(std::cout, {"index", "node", "weight", "scaled_weight"});
    for (int i = 0; i < rule.order; ++i) {
        fas::write_csv_row(std::cout, {std::to_string(i + 1), fas::format_number(rule.nodes[i]),
                                       fas::format_number(rule.weights[i]),
                                       fas::format_number(rule.scaled_weights[i])});
    }
    return kExitOk;
}

int cmd_metrics(const std::string& config, bool lenient) {
    const auto cfg = read_config(config, lenient);
    const auto s = fas::build_scenario(cfg.inputs);
    const auto p = fas::evaluate_point(s);
    std::cout << fas::kCsvSchemaLine << '\n';
    fas::write_csv_row(std::cout, {"metric", "value", "estimator_error", "raw_value", "flag"});
    auto row = [](const char* name, const fas::MetricResult& m) {
        fas::write_csv_row(std::cout, {name, fas::format_number(m.value), fas::format_number(m.estimator_error),
                                       fas::format_number(m.raw_value),
                                       m.clamped ? "clamped" : (m.mvn_capped ? "mvn_capped" : "")});
    };
    row("asc", p.asc);
    row("asc_asymptotic", p.asc_asymptotic);
    row("sop_paper", p.sop_paper);
    row("sop_oracle", p.sop_oracle);
    row("see", p.see);
    fas::write_csv_row(std::cout, {"kappa", fas::format_number(p.kappa), "0", fas::format_number(p.kappa), ""});
    fas::write_csv_row(std::cout, {"p_tot_watts", fas::format_number(s.power.total()), "0",
                                   fas::format_number(s.power.total()), ""});
    fas::write_csv_row(std::cout, {"jitter_applied", fas::format_number(p.jitter), "0", fas::format_number(p.jitter),
                                   ""});
    if (p.sop_paper.clamped) spdlog::warn("density-form SOP {} was clamped to [0, 1]", p.sop_paper.raw_value);
    return p.mvn_flag ? kExitNumerical : kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& out, int jobs, bool lenient) {
    const auto cfg = read_config(config, lenient);
    if (!cfg.sweep) throw fas::ConfigError("sweep.axis", 0, "config has no [sweep] section");
    spdlog::info("sweep over {} with {} points, jobs = {}", fas::to_string(cfg.sweep->axis),
                 cfg.sweep->values.size(), jobs);
    const auto rows = fas::run_sweep(cfg.inputs, *cfg.sweep, jobs);
    Output o(out);
    fas::write_sweep_csv(o.stream(), rows);
    int failed = 0;
    for (const auto& r : rows)
        if (!r.error.empty()) {
            ++failed;
            spdlog::error("sweep point {}: {}", fas::format_number(r.axis_value), r.error);
        }
    return failed ? kExitNumerical : kExitOk;
}

void dump_samples(const std::string& path, const std::vector<double>& cs) {
    const bool binary = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw fas::ConfigError("", 0, "cannot open sample dump '" + path + "'");
    if (binary) {
        f.write(reinterpret_cast<const char*>(cs.data()), static_cast<std::streamsize>(cs.size() * sizeof(double)));
        return;
    }
    f << fas::kCsvSchemaLine << "\ncs\n";
    for (double x : cs) f << fas::format_number(x) << '\n';
}

int cmd_validate(const std::string& config, std::optional<std::uint64_t> trials, std::optional<std::uint64_t> seed,
                 const std::string& dump, const std::string& out, bool lenient) {
    const auto cfg = read_config(config, lenient);
    if (!seed && !cfg.seed_given) {
        throw fas::ConfigError("seed", 0, "validate needs a seed: set 'seed' in the config or pass --seed");
    }
    const std::uint64_t sd = seed.value_or(cfg.inputs.seed);
    const std::uint64_t n = trials.value_or(cfg.mc_trials);
    if (n < 10'000) throw fas::DomainError("validate: --trials must be at least 10000");
    const auto s = fas::build_scenario(cfg.inputs);
    std::vector<double> cs;
    const auto report = fas::run_validation(s, n, sd, cfg.mc_channel, dump.empty() ? nullptr : &cs);
    Output o(out);
    fas::write_validation_report(o.stream(), report);
    if (!dump.empty()) dump_samples(dump, cs);
    if (report.mvn_flag) {
        spdlog::error("an MVN estimate hit its sample cap before reaching the requested tolerance");
        return kExitNumerical;
    }
    return report.passed() ? kExitOk : kExitValidation;
}

int cmd_corr(const std::string& config, const std::string& out, const std::string& node, bool raw, bool lenient) {
    const auto cfg = read_config(config, lenient);
    const auto s = fas::build_scenario(cfg.inputs);
    const fas::NodeParams& n = node == "eve" ? s.eve : s.bob;
    if (n.channel != fas::ChannelKind::fas) {
        throw fas::ConfigError(node + ".channel", 0, "correlation export needs a fas receiver");
    }
    Output o(out);
    fas::write_matrix_csv(o.stream(), raw ? n.corr.entries() : n.corr.regularized());
    if (n.corr.jitter_applied() > 0 || n.corr.eigen_clipped()) {
        spdlog::info("{} correlation regularized: jitter {}, eigen clipped {}", node, n.corr.jitter_applied(),
                     n.corr.eigen_clipped());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Secrecy metrics for fluid-antenna wiretap channels"};
    app.require_subcommand(1);

    bool lenient = false;
    app.add_flag("--lenient", lenient, "Warn about unknown config keys instead of failing");

    int order = 0;
    auto* rule = app.add_subcommand("rule", "Print a Gauss-Laguerre rule");
    rule->add_option("--order", order, "Rule order (1-128)")->required();

    std::string config, out = "-", node = "bob", dump;
    int jobs = 1;
    std::optional<std::uint64_t> trials, seed;
    bool raw = false;

    auto* metrics = app.add_subcommand("metrics", "ASC, SOP and SEE at one scenario");
    metrics->add_option("--config", config, "Config file")->required();

    auto* sweep = app.add_subcommand("sweep", "Evaluate the metrics along the configured sweep axis");
    sweep->add_option("--config", config, "Config file")->required();
    sweep->add_option("--out", out, "Output CSV path ('-' for stdout)");
    sweep->add_option("--jobs", jobs, "Sweep points evaluated concurrently")->check(CLI::Range(1, 1024));

    auto* validate = app.add_subcommand("validate", "Analytical metrics against Monte Carlo");
    validate->add_option("--config", config, "Config file")->required();
    validate->add_option("--trials", trials, "Monte Carlo trials (>= 10000)");
    validate->add_option("--seed", seed, "Seed (overrides the config)");
    validate->add_option("--jobs", jobs, "Threads")->check(CLI::Range(1, 1024));
    validate->add_option("--out", out, "Report path ('-' for stdout)");
    validate->add_option("--dump-samples", dump, "Write every C_s sample (.bin for raw doubles, otherwise CSV)");

    auto* corr = app.add_subcommand("corr", "Export a port correlation matrix");
    corr->add_option("--config", config, "Config file")->required();
    corr->add_option("--out", out, "Output CSV path ('-' for stdout)");
    corr->add_option("--node", node, "bob or eve")->check(CLI::IsMember({"bob", "eve"}));
    corr->add_flag("--raw", raw, "Export the matrix before regularization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate) omp_set_num_threads(jobs);
        if (*rule) return cmd_rule(order);
        if (*metrics) return cmd_metrics(config, lenient);
        if (*sweep) return cmd_sweep(config, out, jobs, lenient);
        if (*validate) return cmd_validate(config, trials, seed, dump, out, lenient);
        if (*corr) return cmd_corr(config, out, node, raw, lenient);
    } catch (const fas::ConfigError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const fas::DomainError& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
    } catch (const fas::NumericalError& e) {
        spdlog::error("{}", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
