#include "fas/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fas/error.hpp"
#include "fas/rng.hpp"

namespace fas {

const char* to_string(McChannel c) { return c == McChannel::copula ? "copula" : "complex"; }

McChannel parse_mc_channel(const std::string& s) {
    if (s == "copula") return McChannel::copula;
    if (s == "complex") return McChannel::complex;
    throw DomainError("unknown Monte Carlo channel '" + s + "' (expected copula or complex)");
}

Eigen::MatrixXd unit_row_factor(const CorrelationMatrix& R) {
    Eigen::MatrixXd L = R.chol();
    for (Eigen::Index i = 0; i < L.rows(); ++i) L.row(i) /= L.row(i).norm();
    return L;
}

double neg_log_normal_sf(double z) {
    if (z < 30.0) return -std::log(0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0));
    // 1 - Φ(z) = φ(z)/d, d = z + 1/(z + 2/(z + 3/(z + ...)))
    double d = z;
    for (int k = 40; k >= 1; --k) d = z + k / d;
    return 0.5 * z * z + 0.5 * std::log(2.0 * std::numbers::pi) + std::log(d);
}

void sample_gains(const Eigen::MatrixXd& factor, const MarginalModel& marginal, std::mt19937_64& rng,
                  std::span<double> gains) {
    const auto k = factor.rows();
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(k), y(k);
    for (Eigen::Index i = 0; i < k; ++i) x(i) = normal(rng);
    for (Eigen::Index i = 0; i < k; ++i) y(i) = normal(rng);
    const Eigen::VectorXd re = factor.triangularView<Eigen::Lower>() * x;
    const Eigen::VectorXd im = factor.triangularView<Eigen::Lower>() * y;
    for (Eigen::Index i = 0; i < k; ++i) gains[i] = 0.5 * (re(i) * re(i) + im(i) * im(i)) / marginal.eta;
}

void sample_gains_copula(const Eigen::MatrixXd& factor, const MarginalModel& marginal, std::mt19937_64& rng,
                         std::span<double> gains) {
    const auto k = factor.rows();
    std::normal_distribution<double> normal;
    Eigen::VectorXd n(k);
    for (Eigen::Index i = 0; i < k; ++i) n(i) = normal(rng);
    const Eigen::VectorXd z = factor.triangularView<Eigen::Lower>() * n;
    for (Eigen::Index i = 0; i < k; ++i) gains[i] = neg_log_normal_sf(z(i)) / marginal.eta;
}

namespace {

// One node's sampler, bound to its own engine.
class NodeSampler {
public:
    NodeSampler(const NodeParams& node, McChannel channel) : node_(node), channel_(channel) {
        if (node.channel == ChannelKind::fas && node.grid.ports() > 1) factor_ = unit_row_factor(node.corr);
    }

    void reseed(std::uint64_t s) { rng_.seed(s); }

    double draw() {
        const double eta = node_.marginal.eta;
        switch (node_.channel) {
            case ChannelKind::fas: {
                if (node_.grid.ports() == 1) return exp_(rng_) / eta;
                const auto k = factor_.rows();
                if (channel_ == McChannel::copula) {
                    // The marginal transform is increasing, so the max can be taken on z.
                    n_.resize(k);
                    for (Eigen::Index i = 0; i < k; ++i) n_(i) = normal_(rng_);
                    const double zmax = (factor_.triangularView<Eigen::Lower>() * n_).maxCoeff();
                    return neg_log_normal_sf(zmax) / eta;
                }
                gains_.resize(k);
                sample_gains(factor_, node_.marginal, rng_, gains_);
                return *std::max_element(gains_.begin(), gains_.end());
            }
            case ChannelKind::mrc: {
                double s = 0.0;
                for (int i = 0; i < node_.antennas; ++i) s += exp_(rng_);
                return s / eta;
            }
            case ChannelKind::sc: {
                double m = 0.0;
                for (int i = 0; i < node_.antennas; ++i) m = std::max(m, exp_(rng_));
                return m / eta;
            }
        }
        return 0.0;
    }

    void reset_distributions() {
        normal_.reset();
        exp_.reset();
    }

private:
    const NodeParams& node_;
    McChannel channel_;
    Eigen::MatrixXd factor_;
    Eigen::VectorXd n_;
    std::vector<double> gains_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    std::exponential_distribution<double> exp_;
};

struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double tot = na + nb;
        mean += d * nb / tot;
        m2 += o.m2 + d * d * na * nb / tot;
        n += o.n;
    }

    double std_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

struct BlockResult {
    Moments cs;
    Moments outage;
};

BlockResult run_block(const SecrecyScenario& s, const McOptions& opt, std::uint64_t block, NodeSampler& bob,
                      NodeSampler& eve, double* cs_out) {
    bob.reseed(rng::derive(opt.seed, {rng::kBobStream, block}));
    eve.reseed(rng::derive(opt.seed, {rng::kEveStream, block}));
    bob.reset_distributions();
    eve.reset_distributions();
    const std::uint64_t first = block * opt.block;
    const std::uint64_t count = std::min(opt.block, opt.trials - first);
    BlockResult r;
    for (std::uint64_t t = 0; t < count; ++t) {
        const double gb = s.bob.avg_snr * bob.draw();
        const double ge = s.eve.avg_snr * eve.draw();
        const double cs = std::max((std::log1p(gb) - std::log1p(ge)) / std::numbers::ln2, 0.0);
        r.cs.add(cs);
        r.outage.add(cs <= s.secrecy_rate ? 1.0 : 0.0);
        if (cs_out) cs_out[t] = cs;
    }
    return r;
}

McResult simulate(const SecrecyScenario& s, const McOptions& opt, std::vector<double>* cs_samples, bool parallel) {
    s.validate();
    if (opt.trials < 10'000) {
        throw DomainError("simulate_metrics: trials = " + std::to_string(opt.trials) + " is below the minimum 10000");
    }
    if (opt.block < 1) throw DomainError("simulate_metrics: block size must be >= 1");
    const double p_tot = s.power.total();
    if (!(p_tot > 0.0)) throw DomainError("simulate_metrics: total power must be positive");

    const std::uint64_t nblocks = (opt.trials + opt.block - 1) / opt.block;
    std::vector<BlockResult> blocks(nblocks);
    if (cs_samples) cs_samples->assign(opt.trials, 0.0);
    double* out = cs_samples ? cs_samples->data() : nullptr;

    if (parallel) {
#pragma omp parallel
        {
            NodeSampler bob(s.bob, opt.channel), eve(s.eve, opt.channel);
#pragma omp for schedule(dynamic)
            for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
                const auto ub = static_cast<std::uint64_t>(b);
                blocks[ub] = run_block(s, opt, ub, bob, eve, out ? out + ub * opt.block : nullptr);
            }
        }
    } else {
        NodeSampler bob(s.bob, opt.channel), eve(s.eve, opt.channel);
        for (std::uint64_t b = 0; b < nblocks; ++b)
            blocks[b] = run_block(s, opt, b, bob, eve, out ? out + b * opt.block : nullptr);
    }

    Moments cs, outage;
    for (const auto& b : blocks) {
        cs.merge(b.cs);
        outage.merge(b.outage);
    }
    McResult r;
    r.asc = {cs.mean, cs.std_error(), opt.trials, opt.seed};
    r.sop = {outage.mean, outage.std_error(), opt.trials, opt.seed};
    r.see = {cs.mean / p_tot, cs.std_error() / p_tot, opt.trials, opt.seed};
    return r;
}

}  // namespace

McResult simulate_metrics(const SecrecyScenario& s, const McOptions& opt, std::vector<double>* cs_samples) {
    return simulate(s, opt, cs_samples, true);
}

McResult simulate_metrics_serial(const SecrecyScenario& s, const McOptions& opt, std::vector<double>* cs_samples) {
    return simulate(s, opt, cs_samples, false);
}

std::vector<double> sample_effective_gains(const NodeParams& node, std::uint64_t trials, std::uint64_t seed,
                                           McChannel channel) {
    node.validate();
    NodeSampler sampler(node, channel);
    sampler.reseed(rng::derive(seed, {node.role == Role::bob ? rng::kBobStream : rng::kEveStream}));
    std::vector<double> g(trials);
    for (auto& x : g) x = sampler.draw();
    return g;
}

}  // namespace fas
