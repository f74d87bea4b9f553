#include "fas/copula.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fas/error.hpp"
#include "fas/normal.hpp"

namespace fas {

double rayleigh_gain_cdf(double r, double eta) {
    if (!(eta > 0.0)) throw DomainError("rayleigh_gain_cdf: eta must be positive");
    if (!(r > 0.0)) return 0.0;
    return -std::expm1(-eta * r);
}

double rayleigh_gain_pdf(double r, double eta) {
    if (!(eta > 0.0)) throw DomainError("rayleigh_gain_pdf: eta must be positive");
    if (r < 0.0) return 0.0;
    return eta * std::exp(-eta * r);
}

double MarginalModel::cdf(double r) const { return rayleigh_gain_cdf(r, eta); }
double MarginalModel::pdf(double r) const { return rayleigh_gain_pdf(r, eta); }
double MarginalModel::mean() const { return 1.0 / eta; }

double MarginalModel::quantile(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("MarginalModel::quantile: p outside [0, 1)");
    return -std::log1p(-p) / eta;
}

MarginalModel MarginalModel::rayleigh(double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("MarginalModel: eta must be positive and finite");
    return {MarginalKind::rayleigh_exponential, eta};
}

namespace {

void check_dim(std::span<const double> u, const CorrelationMatrix& R, const char* who) {
    if (static_cast<int>(u.size()) != R.dim()) {
        throw DomainError(std::string(who) + ": vector length " + std::to_string(u.size()) +
                          " does not match dimension " + std::to_string(R.dim()));
    }
}

double clamp_u(double u) { return std::clamp(u, kCopulaClamp, 1.0 - kCopulaClamp); }

void check_ports(const PortGrid& grid, const CorrelationMatrix& R, const char* who) {
    grid.validate();
    if (grid.ports() != R.dim()) {
        throw DomainError(std::string(who) + ": grid has " + std::to_string(grid.ports()) +
                          " ports but the correlation matrix has dimension " + std::to_string(R.dim()));
    }
}

}  // namespace

MvnEstimate gaussian_copula_cdf(std::span<const double> u, const CorrelationMatrix& R, double rel_tol,
                                std::uint64_t seed) {
    check_dim(u, R, "gaussian_copula_cdf");
    std::vector<int> keep;
    for (int i = 0; i < R.dim(); ++i) {
        if (!(u[i] >= 0.0 && u[i] <= 1.0)) {
            throw DomainError("gaussian_copula_cdf: coordinate " + std::to_string(i + 1) + " outside [0, 1]");
        }
        if (u[i] == 0.0) return {0.0, 0.0, 0, false, 0};
        if (u[i] < 1.0) keep.push_back(i);
    }
    if (keep.empty()) return {1.0, 0.0, 0, false, 0};
    if (keep.size() == 1) return {u[keep[0]], 0.0, 0, false, 1};

    std::vector<double> point(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) point[j] = std_normal_quantile(clamp_u(u[keep[j]]));

    if (static_cast<int>(keep.size()) == R.dim()) return mvn_cdf(R, point, rel_tol, seed);

    const auto n = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = R.entries()(keep[a], keep[b]);
    return mvn_cdf(copula_correlation(sub), point, rel_tol, seed);
}

double gaussian_copula_log_density(std::span<const double> u, const CorrelationMatrix& R) {
    check_dim(u, R, "gaussian_copula_density");
    const int d = R.dim();
    Eigen::VectorXd phi(d);
    for (int i = 0; i < d; ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0)) {
            throw DomainError("gaussian_copula_density: coordinate " + std::to_string(i + 1) +
                              " not strictly inside (0, 1)");
        }
        phi(i) = std_normal_quantile(u[i]);
    }
    if (!std::isfinite(R.log_det())) throw NumericalError("gaussian_copula_density: log det R is not finite");
    const Eigen::VectorXd v = R.chol().triangularView<Eigen::Lower>().solve(phi);
    return -0.5 * (v.squaredNorm() - phi.squaredNorm()) - 0.5 * R.log_det();
}

double gaussian_copula_density(std::span<const double> u, const CorrelationMatrix& R) {
    return std::exp(gaussian_copula_log_density(u, R));
}

MvnEstimate fas_gain_cdf(double r, const PortGrid& grid, const MarginalModel& marginal, const CorrelationMatrix& R,
                         double rel_tol, std::uint64_t seed) {
    check_ports(grid, R, "fas_gain_cdf");
    if (std::isnan(r)) throw DomainError("fas_gain_cdf: r is NaN");
    const double f = marginal.cdf(r);
    if (R.dim() == 1 || f == 0.0 || f == 1.0) return {f, 0.0, 0, false, f == 0.0 || f == 1.0 ? 0 : 1};
    const std::vector<double> u(R.dim(), f);
    return gaussian_copula_cdf(u, R, rel_tol, seed);
}

double fas_gain_log_pdf_paper(double r, const PortGrid& grid, const MarginalModel& marginal,
                              const CorrelationMatrix& R) {
    check_ports(grid, R, "fas_gain_pdf_paper");
    if (!(r > 0.0)) throw DomainError("fas_gain_pdf_paper: r must be positive");
    const double log_f = std::log(marginal.pdf(r));
    if (R.dim() == 1) return log_f;
    const std::vector<double> u(R.dim(), clamp_u(marginal.cdf(r)));
    return R.dim() * log_f + gaussian_copula_log_density(u, R);
}

double fas_gain_pdf_paper(double r, const PortGrid& grid, const MarginalModel& marginal, const CorrelationMatrix& R) {
    return std::exp(fas_gain_log_pdf_paper(r, grid, marginal, R));
}

DerivativeEstimate fas_gain_cdf_derivative(double r, const PortGrid& grid, const MarginalModel& marginal,
                                           const CorrelationMatrix& R, double rel_tol, std::uint64_t seed,
                                           double step, double abs_tol) {
    if (!(r > 0.0)) throw DomainError("fas_gain_cdf_derivative: r must be positive");
    if (!(step > 0.0)) throw DomainError("fas_gain_cdf_derivative: step must be positive");
    const double lo = std::max(0.0, r - step);
    const double hi = r + step;
    check_ports(grid, R, "fas_gain_cdf_derivative");
    DerivativeEstimate out;
    const double fa = marginal.cdf(lo), fb = marginal.cdf(hi);
    if (R.dim() == 1 || fa == 0.0 || fb == 1.0) {
        const MvnEstimate a = fas_gain_cdf(lo, grid, marginal, R, rel_tol, seed);
        const MvnEstimate b = fas_gain_cdf(hi, grid, marginal, R, rel_tol, seed);
        out.raw = (b.value - a.value) / (hi - lo);
        out.std_error = std::hypot(a.std_error, b.std_error) / (hi - lo);
    } else {
        // Same variable order, lattice size and shifts at both ends, so the
        // error is judged on the paired per-shift differences.
        MvnOptions opt;
        opt.rel_tol = rel_tol;
        opt.seed = seed;
        opt.order_point.assign(R.dim(), std_normal_quantile(clamp_u(marginal.cdf(0.5 * (lo + hi)))));
        const std::vector<double> pa(R.dim(), std_normal_quantile(clamp_u(fa)));
        const std::vector<double> pb(R.dim(), std_normal_quantile(clamp_u(fb)));
        MvnIntegrator ia(R, pa, opt), ib(R, pb, opt);
        for (;;) {
            const auto& sa = ia.shift_sums();
            const auto& sb = ib.shift_sums();
            if (sa.empty() || sb.empty()) {
                const MvnEstimate a = ia.estimate(), b = ib.estimate();
                out.raw = (b.value - a.value) / (hi - lo);
                out.std_error = std::hypot(a.std_error, b.std_error) / (hi - lo);
                break;
            }
            const double n = static_cast<double>(ia.points_per_shift());
            const int S = static_cast<int>(sa.size());
            double mean = 0.0, var = 0.0;
            for (int s = 0; s < S; ++s) mean += (sb[s] - sa[s]) / n;
            mean /= S;
            for (int s = 0; s < S; ++s) {
                const double dev = (sb[s] - sa[s]) / n - mean;
                var += dev * dev;
            }
            out.raw = mean / (hi - lo);
            out.std_error = std::sqrt(var / (static_cast<double>(S) * (S - 1))) / (hi - lo);
            if (out.std_error <= std::max(abs_tol, rel_tol * std::max(out.raw, 1e-3)) || !ia.can_refine()) break;
            ia.refine();
            ib.refine();
        }
    }
    out.negative = out.raw < -4.0 * out.std_error;
    out.value = std::max(0.0, out.raw);
    return out;
}

}  // namespace fas
