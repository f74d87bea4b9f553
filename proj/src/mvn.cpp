#include "fas/mvn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fas/error.hpp"
#include "fas/normal.hpp"
#include "fas/rng.hpp"

namespace fas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFrechetTol = 1e-14;
constexpr int kBatch = 32;  // lattice points per indicator product

std::vector<double> richtmyer_generator(int dims) {
    std::vector<double> q;
    q.reserve(dims);
    for (int n = 2; static_cast<int>(q.size()) < dims; ++n) {
        bool prime = true;
        for (int d = 2; d * d <= n; ++d)
            if (n % d == 0) {
                prime = false;
                break;
            }
        if (!prime) continue;
        const double r = std::sqrt(static_cast<double>(n));
        q.push_back(r - std::floor(r));
    }
    return q;
}

}  // namespace

// Reordered and factored problem. The first `rank` variables are integrated;
// the rest are linear in them and only checked.
struct MvnIntegrator::Plan {
    int m = 0;
    int rank = 0;
    int sample_dims = 0;
    std::vector<double> b;
    std::vector<double> lower;  // row-major rank x rank
    Eigen::MatrixXd tail;       // (m - rank) x rank
    Eigen::VectorXd tail_b;
    std::vector<double> gen;
    std::vector<std::vector<double>> shifts;

    double shift_sum(int s, std::size_t from, std::size_t to) const;
};

namespace {

std::unique_ptr<MvnIntegrator::Plan> make_plan(const Eigen::MatrixXd& cov, const std::vector<int>& active,
                                               const std::vector<double>& limits, const std::vector<double>& order,
                                               const MvnOptions& opt);

}  // namespace

double MvnIntegrator::Plan::shift_sum(int s, std::size_t from, std::size_t to) const {
    const int d = sample_dims;
    const int r = rank;
    const int tail_rows = m - r;
    const std::vector<double>& sh = shifts[s];
    std::vector<double> w(std::max(d, 1));
    Eigen::MatrixXd Y(r, 2 * kBatch);
    double prod[2 * kBatch];
    double sum = 0.0;

    for (std::size_t i0 = from; i0 < to; i0 += kBatch) {
        const int nb = static_cast<int>(std::min<std::size_t>(kBatch, to - i0));
        for (int p = 0; p < 2 * nb; ++p) {
            const double fi = static_cast<double>(i0 + p / 2 + 1);
            const bool anti = p % 2 == 1;
            for (int j = 0; j < d; ++j) {
                double x = fi * gen[j] + sh[j];
                x -= std::floor(x);
                const double baker = std::abs(2.0 * x - 1.0);
                w[j] = anti ? 1.0 - baker : baker;
            }
            double* y = Y.col(p).data();
            double f = 1.0;
            for (int k = 0; k < r; ++k) {
                const double* row = &lower[static_cast<std::size_t>(k) * r];
                double t = b[k];
                for (int j = 0; j < k; ++j) t -= row[j] * y[j];
                const double e = std_normal_cdf(t / row[k]);
                f *= e;
                if (f == 0.0) break;
                if (k < d) {
                    const double u = std::clamp(w[k] * e, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
                    y[k] = std_normal_quantile_fast(u);
                } else {
                    y[k] = 0.0;
                }
            }
            if (f == 0.0) Y.col(p).setZero();
            prod[p] = f;
        }
        if (tail_rows > 0) {
            const Eigen::MatrixXd T = tail * Y.leftCols(2 * nb);
            for (int p = 0; p < 2 * nb; ++p)
                if (prod[p] > 0.0 && ((T.col(p) - tail_b).array() > 0.0).any()) prod[p] = 0.0;
        }
        for (int p = 0; p < nb; ++p) sum += 0.5 * (prod[2 * p] + prod[2 * p + 1]);
    }
    return sum;
}

namespace {

std::unique_ptr<MvnIntegrator::Plan> make_plan(const Eigen::MatrixXd& cov, const std::vector<int>& active,
                                               const std::vector<double>& limits, const std::vector<double>& order,
                                               const MvnOptions& opt) {
    const int m = static_cast<int>(active.size());
    std::vector<int> perm = active;
    std::vector<double> b = limits;
    std::vector<double> bo = order.empty() ? limits : order;
    std::vector<double> sumsq(m, 0.0), sumy(m, 0.0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);

    int k = 0;
    for (; k < m; ++k) {
        int best = -1;
        double best_score = kInf, best_t = 0.0, best_v = 0.0;
        for (int i = k; i < m; ++i) {
            const double v = cov(perm[i], perm[i]) - sumsq[i];
            if (!(v > opt.rank_tol)) continue;
            const double t = (bo[i] - sumy[i]) / std::sqrt(v);
            const double score = std_normal_cdf(t);
            if (best < 0 || score < best_score) {
                best = i;
                best_score = score;
                best_t = t;
                best_v = v;
            }
        }
        if (best < 0) break;

        if (best != k) {
            std::swap(perm[k], perm[best]);
            std::swap(b[k], b[best]);
            std::swap(bo[k], bo[best]);
            std::swap(sumsq[k], sumsq[best]);
            std::swap(sumy[k], sumy[best]);
            c.row(k).head(k).swap(c.row(best).head(k));
        }
        const double s = std::sqrt(best_v);
        c(k, k) = s;
        const double y = truncated_normal_mean_below(best_t);
        for (int i = k + 1; i < m; ++i) {
            const double dot = k > 0 ? c.row(i).head(k).dot(c.row(k).head(k)) : 0.0;
            const double cik = (cov(perm[i], perm[k]) - dot) / s;
            c(i, k) = cik;
            sumsq[i] += cik * cik;
            sumy[i] += cik * y;
        }
    }
    if (k == 0) throw NumericalError("mvn_cdf: correlation matrix has no usable pivot");

    auto p = std::make_unique<MvnIntegrator::Plan>();
    p->m = m;
    p->rank = k;
    p->sample_dims = k < m ? k : k - 1;
    p->b.assign(b.begin(), b.begin() + k);
    p->lower.resize(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) p->lower[static_cast<std::size_t>(i) * k + j] = c(i, j);
    p->tail = c.block(k, 0, m - k, k);
    p->tail_b = Eigen::Map<const Eigen::VectorXd>(b.data() + k, m - k);

    const int d = std::max(p->sample_dims, 1);
    p->gen = richtmyer_generator(d);
    p->shifts.assign(opt.shifts, std::vector<double>(d));
    for (int s = 0; s < opt.shifts; ++s)
        for (int j = 0; j < p->sample_dims; ++j)
            p->shifts[s][j] = rng::to_unit(
                rng::derive(opt.seed, {rng::kMvnShift, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(j)}));
    return p;
}

}  // namespace

MvnIntegrator::MvnIntegrator(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt,
                             bool parallel)
    : R_(&R), opt_(opt) {
    const int dim = R.dim();
    if (static_cast<int>(point.size()) != dim) {
        throw DomainError("mvn_cdf: point has length " + std::to_string(point.size()) + " but R has dimension " +
                          std::to_string(dim));
    }
    if (!(opt.rel_tol >= 1e-6 && opt.rel_tol <= 1e-2)) {
        throw DomainError("mvn_cdf: rel_tol " + std::to_string(opt.rel_tol) + " outside [1e-6, 1e-2]");
    }
    if (!opt.order_point.empty() && static_cast<int>(opt.order_point.size()) != dim) {
        throw DomainError("mvn_cdf: order_point has length " + std::to_string(opt.order_point.size()) +
                          " but R has dimension " + std::to_string(dim));
    }
    if (!(opt.abs_tol >= 0.0)) throw DomainError("mvn_cdf: abs_tol must be non-negative");
    if (opt.shifts < 2 || opt.initial_points < 1 || opt.max_points < opt.initial_points) {
        throw DomainError("mvn_cdf: need at least 2 shifts and 1 <= initial_points <= max_points");
    }

    exact_ = true;
    const Eigen::MatrixXd& cov = R.regularized();
    double upper = 1.0, lower_sum = 0.0;
    bool zero = false;
    for (int i = 0; i < dim; ++i) {
        const double bi = point[i];
        if (std::isnan(bi)) throw DomainError("mvn_cdf: limit " + std::to_string(i + 1) + " is NaN");
        if (bi == -kInf) zero = true;
        if (bi == kInf || zero) continue;
        active_.push_back(i);
        limits_.push_back(bi);
        if (!opt.order_point.empty()) order_.push_back(opt.order_point[i]);
        const double phi = std_normal_cdf(bi / std::sqrt(cov(i, i)));
        upper = std::min(upper, phi);
        lower_sum += phi;
    }
    const int m = static_cast<int>(active_.size());
    if (zero) {
        est_ = {0.0, 0.0, 0, false, 0};
        return;
    }
    if (m == 0) {
        est_ = {1.0, 0.0, 0, false, 0};
        return;
    }
    if (m == 1) {
        est_ = {upper, 0.0, 0, false, 1};
        return;
    }
    const double lower = std::max(0.0, lower_sum - (m - 1));
    if (upper - lower <= kFrechetTol) {
        est_ = {0.5 * (upper + lower), 0.5 * (upper - lower), 0, false, 0};
        return;
    }
    exact_ = false;
    sums_.assign(opt.shifts, 0.0);
    run_round(opt.initial_points, parallel);
}

MvnIntegrator::~MvnIntegrator() = default;
MvnIntegrator::MvnIntegrator(MvnIntegrator&&) noexcept = default;
MvnIntegrator& MvnIntegrator::operator=(MvnIntegrator&&) noexcept = default;

void MvnIntegrator::ensure_plan() {
    if (!plan_) plan_ = make_plan(R_->regularized(), active_, limits_, order_, opt_);
}

void MvnIntegrator::run_round(std::size_t target, bool parallel) {
    ensure_plan();
    const Plan& plan = *plan_;
    const int S = opt_.shifts;
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int s = 0; s < S; ++s) sums_[s] += plan.shift_sum(s, done_, target);
    } else {
        for (int s = 0; s < S; ++s) sums_[s] += plan.shift_sum(s, done_, target);
    }
    done_ = target;

    double mean = 0.0;
    for (int s = 0; s < S; ++s) mean += sums_[s] / static_cast<double>(done_);
    mean /= S;
    double var = 0.0;
    for (int s = 0; s < S; ++s) {
        const double dev = sums_[s] / static_cast<double>(done_) - mean;
        var += dev * dev;
    }
    var /= static_cast<double>(S) * (S - 1);

    est_.value = std::clamp(mean, 0.0, 1.0);
    est_.std_error = std::sqrt(var);
    est_.samples_used = static_cast<std::size_t>(S) * done_ * 2;
    est_.rank = plan.rank;
    est_.capped = done_ >= opt_.max_points && !converged();
}

bool MvnIntegrator::can_refine() const noexcept { return !exact_ && done_ < opt_.max_points; }

bool MvnIntegrator::converged() const noexcept {
    return exact_ || est_.std_error <= std::max(opt_.abs_tol, opt_.rel_tol * std::max(est_.value, 1e-3));
}

void MvnIntegrator::refine(bool parallel) {
    if (!can_refine()) return;
    run_round(std::min(done_ * 2, opt_.max_points), parallel);
}

void MvnIntegrator::release() noexcept { plan_.reset(); }

namespace {

MvnEstimate estimate(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt,
                     bool parallel) {
    MvnIntegrator it(R, point, opt, parallel);
    while (!it.converged() && it.can_refine()) it.refine(parallel);
    return it.estimate();
}

}  // namespace

MvnEstimate mvn_cdf(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt) {
    return estimate(R, point, opt, true);
}

MvnEstimate mvn_cdf(const CorrelationMatrix& R, std::span<const double> point, double rel_tol, std::uint64_t seed) {
    MvnOptions opt;
    opt.rel_tol = rel_tol;
    opt.seed = seed;
    return estimate(R, point, opt, true);
}

MvnEstimate mvn_cdf_serial(const CorrelationMatrix& R, std::span<const double> point, const MvnOptions& opt) {
    return estimate(R, point, opt, false);
}

}  // namespace fas
