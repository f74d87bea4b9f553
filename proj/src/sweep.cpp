#include "fas/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "fas/csv.hpp"

namespace fas {

PointMetrics evaluate_point(const SecrecyScenario& s, Exec exec) {
    PointMetrics p;
    p.asc = asc(s, exec);
    p.asc_asymptotic = asc_asymptotic(s, exec);
    p.sop_paper = sop(s, exec);
    p.sop_oracle = sop_oracle(s, 1000, exec);
    p.see = see_from_asc(s, p.asc);
    p.kappa = s.kappa();
    for (const NodeParams* n : {&s.bob, &s.eve})
        if (n->channel == ChannelKind::fas) p.jitter = std::max(p.jitter, n->corr.jitter_applied());
    p.mvn_flag = p.asc.mvn_capped || p.asc_asymptotic.mvn_capped || p.sop_paper.mvn_capped || p.sop_oracle.mvn_capped;
    return p;
}

std::vector<SweepRow> run_sweep(const ScenarioInputs& base, const SweepSpec& spec, int jobs) {
    const int n = static_cast<int>(spec.values.size());
    std::vector<SweepRow> rows(n);
    auto one = [&](int i, Exec exec) {
        SweepRow& row = rows[i];
        row.axis_value = spec.values[i];
        try {
            ScenarioInputs in = apply_sweep_value(base, spec.axis, spec.values[i]);
            in.seed = base.seed ^ static_cast<std::uint64_t>(i);
            row.m = evaluate_point(build_scenario(in), exec);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) one(i, Exec::parallel);
    } else {
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
        for (int i = 0; i < n; ++i) one(i, Exec::serial);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kCsvSchemaLine << '\n';
    write_csv_row(os, {"axis_value", "asc", "asc_err", "asc_asymptotic", "sop_paper", "sop_oracle", "see", "kappa",
                       "jitter_applied", "mvn_flag", "sop_oracle_err", "sop_paper_raw", "sop_gap", "see_err",
                       "error"});
    for (const auto& r : rows) {
        const auto& m = r.m;
        if (!r.error.empty()) {
            std::vector<std::string> f(15, "nan");
            f[0] = format_number(r.axis_value);
            f[9] = "0";
            f[14] = r.error;
            write_csv_row(os, f);
            continue;
        }
        write_csv_row(os, {format_number(r.axis_value), format_number(m.asc.value),
                           format_number(m.asc.estimator_error), format_number(m.asc_asymptotic.value),
                           format_number(m.sop_paper.value), format_number(m.sop_oracle.value),
                           format_number(m.see.value), format_number(m.kappa), format_number(m.jitter),
                           m.mvn_flag ? "1" : "0", format_number(m.sop_oracle.estimator_error),
                           format_number(m.sop_paper.raw_value),
                           format_number(m.sop_paper.value - m.sop_oracle.value),
                           format_number(m.see.estimator_error), ""});
    }
}

double mean_z(double analytic, double analytic_err, double mc, double mc_err) {
    const double s = std::hypot(analytic_err, mc_err);
    if (s == 0.0) return mc == analytic ? 0.0 : std::copysign(INFINITY, mc - analytic);
    return (mc - analytic) / s;
}

double proportion_z(double analytic, double analytic_err, double p_hat, std::uint64_t trials) {
    const double n = static_cast<double>(trials);
    const double floor = (1.0 / n) * (1.0 - 1.0 / n);
    const double v = std::max({analytic * (1.0 - analytic), p_hat * (1.0 - p_hat), floor}) / n;
    return (p_hat - analytic) / std::sqrt(v + analytic_err * analytic_err);
}

bool ValidationReport::passed() const {
    for (const auto& l : lines)
        if (l.gated && !(std::abs(l.z) <= 3.0)) return false;
    return true;
}

ValidationReport run_validation(const SecrecyScenario& s, std::uint64_t trials, std::uint64_t seed, McChannel channel,
                                std::vector<double>* cs_samples) {
    SecrecyScenario sa = s;
    sa.seed = seed;
    const PointMetrics a = evaluate_point(sa);
    McOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    opt.channel = channel;
    const McResult mc = simulate_metrics(sa, opt, cs_samples);

    ValidationReport r;
    r.trials = trials;
    r.seed = seed;
    r.channel = channel;
    r.mvn_flag = a.mvn_flag;
    const double n = static_cast<double>(trials);
    r.lines.push_back({"asc", a.asc.value, a.asc.estimator_error, mc.asc.mean, mc.asc.std_error,
                       mean_z(a.asc.value, a.asc.estimator_error, mc.asc.mean, mc.asc.std_error), true});
    r.lines.push_back({"sop", a.sop_oracle.value, a.sop_oracle.estimator_error, mc.sop.mean,
                       std::sqrt(std::max(mc.sop.mean * (1.0 - mc.sop.mean), (1.0 / n) * (1.0 - 1.0 / n)) / n),
                       proportion_z(a.sop_oracle.value, a.sop_oracle.estimator_error, mc.sop.mean, trials), true});
    r.lines.push_back({"see", a.see.value, a.see.estimator_error, mc.see.mean, mc.see.std_error,
                       mean_z(a.see.value, a.see.estimator_error, mc.see.mean, mc.see.std_error), true});
    r.lines.push_back({"sop_paper", a.sop_paper.value, a.sop_paper.estimator_error, mc.sop.mean, r.lines[1].mc_err,
                       proportion_z(a.sop_paper.value, a.sop_paper.estimator_error, mc.sop.mean, trials), false});
    r.lines.push_back({"asc_asymptotic", a.asc_asymptotic.value, a.asc_asymptotic.estimator_error, mc.asc.mean,
                       mc.asc.std_error,
                       mean_z(a.asc_asymptotic.value, a.asc_asymptotic.estimator_error, mc.asc.mean, mc.asc.std_error),
                       false});
    return r;
}

void write_validation_report(std::ostream& os, const ValidationReport& r) {
    os << kCsvSchemaLine << '\n';
    write_csv_row(os, {"trials", std::to_string(r.trials)});
    write_csv_row(os, {"seed", std::to_string(r.seed)});
    write_csv_row(os, {"mc_channel", to_string(r.channel)});
    write_csv_row(os, {"mvn_flag", r.mvn_flag ? "1" : "0"});
    write_csv_row(os, {"metric", "analytic", "analytic_err", "mc", "mc_err", "z", "gated"});
    for (const auto& l : r.lines) {
        write_csv_row(os, {l.metric, format_number(l.analytic), format_number(l.analytic_err), format_number(l.mc),
                           format_number(l.mc_err), format_number(l.z), l.gated ? "yes" : "no"});
    }
    write_csv_row(os, {"result", r.passed() ? "PASS" : "FAIL"});
}

}  // namespace fas
