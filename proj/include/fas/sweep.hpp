#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "fas/config.hpp"
#include "fas/metrics.hpp"
#include "fas/montecarlo.hpp"

namespace fas {

/// Every analytical metric for one scenario.
struct PointMetrics {
    MetricResult asc;
    MetricResult asc_asymptotic;
    MetricResult sop_paper;
    MetricResult sop_oracle;
    MetricResult see;
    double kappa = 0.0;
    double jitter = 0.0;  // max over both nodes
    bool mvn_flag = false;
};

PointMetrics evaluate_point(const SecrecyScenario& s, Exec exec = Exec::parallel);

struct SweepRow {
    double axis_value = 0.0;
    PointMetrics m;
    std::string error;  // empty on success
};

/// One row per sweep value, in sweep order. Point i uses seed ^ i. Up to `jobs`
/// points run concurrently; failures land in the row's error field.
std::vector<SweepRow> run_sweep(const ScenarioInputs& base, const SweepSpec& spec, int jobs = 1);

/// Schema line, header, rows.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct ValidationLine {
    std::string metric;
    double analytic = 0.0;
    double analytic_err = 0.0;
    double mc = 0.0;
    double mc_err = 0.0;
    double z = 0.0;
    bool gated = true;  // counts toward the exit code
};

struct ValidationReport {
    std::vector<ValidationLine> lines;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    McChannel channel = McChannel::copula;
    bool mvn_flag = false;
    bool passed() const;  // every gated |z| ≤ 3
};

/// z for a mean: (mc - a)/sqrt(se_mc² + err²).
double mean_z(double analytic, double analytic_err, double mc, double mc_err);

/// z for a proportion with N trials: the binomial variance uses the largest of
/// p0(1-p0), p̂(1-p̂) and (1/N)(1-1/N), so a zero count still has a finite z.
double proportion_z(double analytic, double analytic_err, double p_hat, std::uint64_t trials);

/// Analytical metrics of `s` against simulate_metrics(trials, seed).
/// ASC, SOP (Stieltjes form) and SEE are gated; the density-form SOP is listed
/// for comparison only.
ValidationReport run_validation(const SecrecyScenario& s, std::uint64_t trials, std::uint64_t seed, McChannel channel,
                                std::vector<double>* cs_samples = nullptr);

void write_validation_report(std::ostream& os, const ValidationReport& r);

}  // namespace fas
