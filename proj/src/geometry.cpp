#include "fas/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fas/error.hpp"

namespace fas {

void PortGrid::validate() const {
    if (k1 < 1 || k2 < 1) {
        throw DomainError("PortGrid: port counts must be >= 1 (got " + std::to_string(k1) + "x" +
                          std::to_string(k2) + ")");
    }
    if (!std::isfinite(w1) || !std::isfinite(w2) || w1 < 0.0 || w2 < 0.0) {
        throw DomainError("PortGrid: sizes must be finite and non-negative");
    }
    if ((k1 > 1 && !(w1 > 0.0)) || (k2 > 1 && !(w2 > 0.0))) {
        throw DomainError("PortGrid: an axis with several ports needs a positive length");
    }
}

PortGrid PortGrid::square(int side, double area) {
    const double len = std::sqrt(area);
    PortGrid g{side, side, len, len};
    g.validate();
    return g;
}

std::pair<int, int> port_index_map(const PortGrid& grid, int k) {
    if (k < 1 || k > grid.ports()) {
        throw DomainError("port_index_map: index " + std::to_string(k) + " outside [1, " +
                          std::to_string(grid.ports()) + "]");
    }
    return {(k - 1) / grid.k2 + 1, (k - 1) % grid.k2 + 1};
}

int port_flat_index(const PortGrid& grid, int i1, int i2) {
    if (i1 < 1 || i1 > grid.k1 || i2 < 1 || i2 > grid.k2) {
        throw DomainError("port_flat_index: (" + std::to_string(i1) + ", " + std::to_string(i2) +
                          ") outside the grid");
    }
    return (i1 - 1) * grid.k2 + i2;
}

double spherical_bessel_j0(double t) {
    const double a = std::abs(t);
    if (a < 1e-4) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

Eigen::MatrixXd jakes_covariance(const PortGrid& grid, double omega) {
    grid.validate();
    if (!(omega > 0.0)) throw DomainError("jakes_covariance: omega must be positive");

    const int n = grid.ports();
    const double step1 = grid.k1 > 1 ? grid.w1 / (grid.k1 - 1) : 0.0;
    const double step2 = grid.k2 > 1 ? grid.w2 / (grid.k2 - 1) : 0.0;

    Eigen::MatrixXd cov(n, n);
    for (int a = 0; a < n; ++a) {
        const int a1 = a / grid.k2;
        const int a2 = a % grid.k2;
        cov(a, a) = omega;
        for (int b = a + 1; b < n; ++b) {
            const double d1 = (a1 - b / grid.k2) * step1;
            const double d2 = (a2 - b % grid.k2) * step2;
            const double v = omega * spherical_bessel_j0(2.0 * std::numbers::pi * std::hypot(d1, d2));
            cov(a, b) = v;
            cov(b, a) = v;
        }
    }
    return cov;
}

namespace {

constexpr double kJitterStart = 1e-12;
constexpr double kJitterCap = 1e-6;
constexpr double kEigenFloor = 1e-10;

bool try_cholesky(const Eigen::MatrixXd& m, Eigen::MatrixXd& lower) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return false;
    lower = llt.matrixL();
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) return false;
    }
    return true;
}

}  // namespace

CorrelationMatrix copula_correlation(const Eigen::MatrixXd& cov) {
    const Eigen::Index n = cov.rows();
    if (n < 1 || cov.cols() != n) throw DomainError("copula_correlation: matrix must be square and non-empty");

    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(cov(i, i) > 0.0) || !std::isfinite(cov(i, i))) {
            throw DomainError("copula_correlation: diagonal entry " + std::to_string(i + 1) + " is not positive");
        }
        scale(i) = 1.0 / std::sqrt(cov(i, i));
    }

    CorrelationMatrix out;
    out.entries_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.entries_(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double sym_tol = 1e-12 * std::max({1.0, std::abs(cov(i, j)), std::abs(cov(j, i))});
            if (std::abs(cov(i, j) - cov(j, i)) > sym_tol) {
                throw DomainError("copula_correlation: covariance is not symmetric at (" + std::to_string(i + 1) +
                                  ", " + std::to_string(j + 1) + ")");
            }
            double r = 0.5 * (cov(i, j) + cov(j, i)) * scale(i) * scale(j);
            if (std::abs(r) > 1.0 + 1e-12 || !std::isfinite(r)) {
                throw DomainError("copula_correlation: normalized entry (" + std::to_string(i + 1) + ", " +
                                  std::to_string(j + 1) + ") = " + std::to_string(r) + " outside [-1, 1]");
            }
            r = std::clamp(r, -1.0, 1.0);
            out.entries_(i, j) = r;
            out.entries_(j, i) = r;
        }
    }

    out.regularized_ = out.entries_;
    if (!try_cholesky(out.regularized_, out.chol_)) {
        bool ok = false;
        for (double jitter = kJitterStart; jitter <= kJitterCap * (1.0 + 1e-9); jitter *= 10.0) {
            out.regularized_ = out.entries_;
            out.regularized_.diagonal().array() += jitter;
            if (try_cholesky(out.regularized_, out.chol_)) {
                out.jitter_ = jitter;
                ok = true;
                break;
            }
        }
        if (!ok) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.entries_);
            Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(kEigenFloor);
            Eigen::MatrixXd clipped = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
            const Eigen::VectorXd d = clipped.diagonal().cwiseSqrt().cwiseInverse();
            clipped = d.asDiagonal() * clipped * d.asDiagonal();
            clipped = 0.5 * (clipped + clipped.transpose());
            clipped.diagonal().setOnes();
            out.regularized_ = clipped;
            out.clipped_ = true;
            out.jitter_ = 0.0;
            if (!try_cholesky(out.regularized_, out.chol_)) {
                // Round-off after rescaling can still leave a zero pivot.
                out.regularized_.diagonal().array() += kJitterStart;
                out.jitter_ = kJitterStart;
                if (!try_cholesky(out.regularized_, out.chol_)) {
                    throw NumericalError("copula_correlation: matrix could not be repaired to positive definite");
                }
            }
        }
    }
    out.log_det_ = 2.0 * out.chol_.diagonal().array().log().sum();
    return out;
}

CorrelationMatrix CorrelationMatrix::identity(int dim) {
    if (dim < 1) throw DomainError("CorrelationMatrix::identity: dim must be >= 1");
    return copula_correlation(Eigen::MatrixXd::Identity(dim, dim));
}

CorrelationMatrix CorrelationMatrix::equicorrelated(int dim, double rho) {
    if (dim < 1) throw DomainError("CorrelationMatrix::equicorrelated: dim must be >= 1");
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim, dim, rho);
    m.diagonal().setOnes();
    return copula_correlation(m);
}

}  // namespace fas
