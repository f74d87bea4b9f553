// Serial reference vs OpenMP kernels. Results of each pair are bitwise equal;
// only the wall time differs.

#include <benchmark/benchmark.h>

#include <vector>

#include "fas/config.hpp"
#include "fas/copula.hpp"
#include "fas/metrics.hpp"
#include "fas/montecarlo.hpp"
#include "fas/mvn.hpp"

namespace {

fas::CorrelationMatrix grid_corr(int side) {
    return fas::copula_correlation(fas::jakes_covariance(fas::PortGrid::square(side, 1.0)));
}

fas::MvnOptions mvn_opts() {
    fas::MvnOptions o;
    o.rel_tol = 1e-3;
    o.seed = 3;
    return o;
}

void BM_MvnParallel(benchmark::State& st) {
    const auto R = grid_corr(static_cast<int>(st.range(0)));
    const std::vector<double> pt(R.dim(), 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(fas::mvn_cdf(R, pt, mvn_opts()));
}

void BM_MvnSerial(benchmark::State& st) {
    const auto R = grid_corr(static_cast<int>(st.range(0)));
    const std::vector<double> pt(R.dim(), 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(fas::mvn_cdf_serial(R, pt, mvn_opts()));
}

fas::SecrecyScenario scenario(int side) {
    fas::ScenarioInputs in;
    in.seed = 1;
    in.bob.k1 = in.bob.k2 = side;
    in.bob.gamma_db = 10.0;
    return fas::build_scenario(in);
}

void BM_McParallel(benchmark::State& st) {
    const auto s = scenario(static_cast<int>(st.range(0)));
    fas::McOptions o;
    o.trials = 200'000;
    for (auto _ : st) benchmark::DoNotOptimize(fas::simulate_metrics(s, o));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(o.trials));
}

void BM_McSerial(benchmark::State& st) {
    const auto s = scenario(static_cast<int>(st.range(0)));
    fas::McOptions o;
    o.trials = 200'000;
    for (auto _ : st) benchmark::DoNotOptimize(fas::simulate_metrics_serial(s, o));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(o.trials));
}

void BM_AscParallel(benchmark::State& st) {
    const auto s = scenario(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fas::asc(s, fas::Exec::parallel));
}

void BM_AscSerial(benchmark::State& st) {
    const auto s = scenario(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fas::asc(s, fas::Exec::serial));
}

}  // namespace

BENCHMARK(BM_MvnSerial)->Arg(3)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MvnParallel)->Arg(3)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_McSerial)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AscSerial)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AscParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
