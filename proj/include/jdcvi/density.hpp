#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "jdcvi/errors.hpp"

namespace jdcvi {

/// Multivariate Gaussian fitted by maximum likelihood. The covariance keeps
/// its lower Cholesky factor cached; all divergence evaluations go through
/// triangular solves rather than explicit inverses.
class GaussianModel {
public:
    GaussianModel(Eigen::VectorXd mean, Eigen::MatrixXd cov, Eigen::Index n_fit)
        : mean_(std::move(mean)), cov_(std::move(cov)), n_fit_(n_fit) {
        if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size())
            throw std::invalid_argument("GaussianModel: mean/cov dimensions disagree");
        if (((cov_ - cov_.transpose()).array().abs() > 1e-12).any())
            throw std::invalid_argument("GaussianModel: covariance must be symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(cov_);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("GaussianModel: covariance is not positive definite");
        chol_ = llt.matrixL();
    }

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }
    const Eigen::MatrixXd& chol() const { return chol_; }
    Eigen::Index dim() const { return mean_.size(); }
    Eigen::Index n_fit() const { return n_fit_; }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd chol_;  // lower triangular, chol * chol^T == cov
    Eigen::Index n_fit_ = 0;
};

/// MLE fit: sample mean and 1/N-normalized scatter matrix. The covariance is
/// nudged by eps*I with eps = max(1e-8 * trace/d, 1e-12) so the Cholesky
/// factorization succeeds even for singleton or collinear clusters.
inline GaussianModel fit_gaussian(const Eigen::MatrixXd& points) {
    if (points.rows() < 1) throw InsufficientPointsError("fit_gaussian: need at least one point");
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    Eigen::VectorXd mean = points.colwise().mean();
    Eigen::MatrixXd centered = points.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    cov = 0.5 * (cov + cov.transpose());
    double eps = std::max(1e-8 * cov.trace() / static_cast<double>(d), 1e-12);
    cov.diagonal().array() += eps;
    return GaussianModel(std::move(mean), std::move(cov), n);
}

/// Closed-form Jeffrey divergence between two Gaussians:
///   1/2 (tr(S1^-1 S2) + tr(S2^-1 S1))
///   + 1/2 (mu1-mu2)^T (S1^-1 + S2^-1) (mu1-mu2) - d.
/// Each term is a sum of squares of triangular-solve results, so the value
/// is nonnegative up to rounding and exactly symmetric in (a, b).
inline double jd_gaussian(const GaussianModel& a, const GaussianModel& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("jd_gaussian: models have different dimensions");
    const double d = static_cast<double>(a.dim());
    auto lower_a = a.chol().triangularView<Eigen::Lower>();
    auto lower_b = b.chol().triangularView<Eigen::Lower>();

    // tr(Sa^-1 Sb) = ||La^-1 Lb||_F^2
    double trace_ab = lower_a.solve(b.chol()).squaredNorm();
    double trace_ba = lower_b.solve(a.chol()).squaredNorm();

    Eigen::VectorXd delta = a.mean() - b.mean();
    double mean_a = lower_a.solve(delta).squaredNorm();
    double mean_b = lower_b.solve(delta).squaredNorm();

    return 0.5 * (trace_ab + trace_ba) + 0.5 * (mean_a + mean_b) - d;
}

/// Kernel density estimate with a Gaussian kernel and a per-dimension
/// diagonal bandwidth. `bandwidth` holds the diagonal of H (squared scales).
class KdeModel {
public:
    KdeModel(Eigen::MatrixXd samples, Eigen::VectorXd bandwidth)
        : samples_(std::move(samples)), bandwidth_(std::move(bandwidth)) {
        if (samples_.rows() < 1) throw InsufficientPointsError("KdeModel: need at least one sample");
        if (bandwidth_.size() != samples_.cols())
            throw std::invalid_argument("KdeModel: bandwidth size must equal dimension");
        if ((bandwidth_.array() <= 0.0).any())
            throw std::invalid_argument("KdeModel: bandwidth entries must be positive");
        const double d = static_cast<double>(samples_.cols());
        log_norm_ = -0.5 * bandwidth_.array().log().sum() -
                    0.5 * d * std::log(2.0 * std::acos(-1.0));
        inv_bandwidth_ = bandwidth_.cwiseInverse();
    }

    const Eigen::MatrixXd& samples() const { return samples_; }
    const Eigen::VectorXd& bandwidth() const { return bandwidth_; }
    double log_norm() const { return log_norm_; }
    Eigen::Index dim() const { return samples_.cols(); }
    Eigen::Index n_samples() const { return samples_.rows(); }

    /// p_hat(x): mean of the kernel over all samples.
    double density(const Eigen::VectorXd& x) const {
        const double norm = std::exp(log_norm_);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
            double q = 0.0;
            for (Eigen::Index j = 0; j < samples_.cols(); ++j) {
                double u = x(j) - samples_(i, j);
                q += u * u * inv_bandwidth_(j);
            }
            acc += std::exp(-0.5 * q);
        }
        return norm * acc / static_cast<double>(samples_.rows());
    }

private:
    Eigen::MatrixXd samples_;
    Eigen::VectorXd bandwidth_;      // diagonal of H
    Eigen::VectorXd inv_bandwidth_;  // cached 1/H_jj
    double log_norm_ = 0.0;          // log(|H|^-1/2 (2 pi)^-d/2)
};

/// Scott's rule per dimension: H_jj = N^(-2/(d+4)) * var_j, with the
/// per-dimension variance floored at 1e-12 so constant coordinates still
/// yield a usable bandwidth.
inline KdeModel fit_kde(const Eigen::MatrixXd& points) {
    if (points.rows() < 2) throw InsufficientPointsError("fit_kde: need at least two points");
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    Eigen::VectorXd mean = points.colwise().mean();
    Eigen::VectorXd var = (points.rowwise() - mean.transpose()).array().square().colwise().mean();
    var = var.cwiseMax(1e-12);
    double scale = std::pow(static_cast<double>(n), -2.0 / (static_cast<double>(d) + 4.0));
    return KdeModel(points, scale * var);
}

/// Plug-in symmetric KL estimate from the models' own samples:
///   KL(a||b) ~= 1/N_a * sum over a.samples of ln(max(pa,floor)/max(pb,floor))
/// summed both ways. Exactly symmetric, and finite for every input thanks to
/// the density floor.
inline double jd_kde(const KdeModel& a, const KdeModel& b, double floor = 1e-300) {
    if (a.dim() != b.dim()) throw std::invalid_argument("jd_kde: models have different dimensions");
    auto kl = [floor](const KdeModel& p, const KdeModel& q) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < p.n_samples(); ++i) {
            Eigen::VectorXd x = p.samples().row(i);
            double pa = std::max(p.density(x), floor);
            double pb = std::max(q.density(x), floor);
            acc += std::log(pa / pb);
        }
        return acc / static_cast<double>(p.n_samples());
    };
    return kl(a, b) + kl(b, a);
}

}  // namespace jdcvi
