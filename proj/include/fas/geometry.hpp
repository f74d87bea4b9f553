#pragma once

#include <Eigen/Dense>
#include <utility>

namespace fas {

/// Planar fluid-antenna port grid: k1 x k2 ports spread evenly over a
/// w1 x w2 surface (side lengths in wavelengths).
struct PortGrid {
    int k1 = 1;
    int k2 = 1;
    double w1 = 0.0;
    double w2 = 0.0;

    int ports() const noexcept { return k1 * k2; }
    double area() const noexcept { return w1 * w2; }

    /// Throws DomainError when counts are < 1 or a multi-port axis has no extent.
    void validate() const;

    /// Square grid side x side over a square of the given area.
    static PortGrid square(int side, double area);
};

/// Row-major map from the 1-based flat index k to 1-based (k1, k2).
std::pair<int, int> port_index_map(const PortGrid& grid, int k);
int port_flat_index(const PortGrid& grid, int i1, int i2);

/// sin(t)/t with the removable singularity filled in. This is the only place
/// the spatial correlation kernel is defined.
double spherical_bessel_j0(double t);

/// Isotropic-scattering covariance between every pair of ports:
/// omega * j0(2π · normalized distance). A single-port axis contributes no
/// displacement.
Eigen::MatrixXd jakes_covariance(const PortGrid& grid, double omega = 1.0);

/// Unit-diagonal correlation matrix together with a Cholesky factor of its
/// (possibly regularized) version.
///
/// Regularization: plain Cholesky first; on failure, diagonal jitter starting at
/// 1e-12 and growing tenfold up to 1e-6; if that still fails, eigenvalues are
/// clipped at 1e-10 and the result is rescaled to unit diagonal.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;

    int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    const Eigen::MatrixXd& regularized() const noexcept { return regularized_; }
    const Eigen::MatrixXd& chol() const noexcept { return chol_; }
    double jitter_applied() const noexcept { return jitter_; }
    bool eigen_clipped() const noexcept { return clipped_; }

    /// log det of the regularized matrix.
    double log_det() const noexcept { return log_det_; }

    static CorrelationMatrix identity(int dim);

    /// Equicorrelated matrix with every off-diagonal entry equal to rho.
    static CorrelationMatrix equicorrelated(int dim, double rho);

    friend CorrelationMatrix copula_correlation(const Eigen::MatrixXd& cov);

private:
    Eigen::MatrixXd entries_;
    Eigen::MatrixXd regularized_;
    Eigen::MatrixXd chol_;
    double jitter_ = 0.0;
    bool clipped_ = false;
    double log_det_ = 0.0;
};

/// Normalize a covariance to a correlation matrix and factor it. Throws
/// DomainError if the input is not symmetric with positive diagonal or if any
/// normalized entry leaves [-1-1e-12, 1+1e-12]; entries inside that band are clamped.
CorrelationMatrix copula_correlation(const Eigen::MatrixXd& cov);

}  // namespace fas
