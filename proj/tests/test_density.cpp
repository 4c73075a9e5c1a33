#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "jdcvi/density.hpp"
#include "jdcvi/errors.hpp"

namespace {

using namespace jdcvi;

GaussianModel make_model(std::vector<double> mean, std::vector<std::vector<double>> cov) {
    Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(mean.data(), mean.size());
    Eigen::MatrixXd sigma(cov.size(), cov.size());
    for (std::size_t r = 0; r < cov.size(); ++r)
        for (std::size_t c = 0; c < cov.size(); ++c) sigma(r, c) = cov[r][c];
    return GaussianModel(mu, sigma, 0);
}

GaussianModel random_spd_model(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = normal(rng);
    Eigen::MatrixXd cov = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd mean(d);
    for (int r = 0; r < d; ++r) mean(r) = 3.0 * normal(rng);
    return GaussianModel(mean, cov, 0);
}

double jd_direct_inverse(const GaussianModel& a, const GaussianModel& b) {
    Eigen::MatrixXd ia = a.cov().inverse();
    Eigen::MatrixXd ib = b.cov().inverse();
    Eigen::VectorXd delta = a.mean() - b.mean();
    double trace = (ia * b.cov()).trace() + (ib * a.cov()).trace();
    double mean_term = delta.dot((ia + ib) * delta);
    return 0.5 * trace + 0.5 * mean_term - static_cast<double>(a.dim());
}

TEST(GaussianModel, ValidatesInputs) {
    Eigen::VectorXd mean(2);
    mean << 0, 0;
    Eigen::MatrixXd asym(2, 2);
    asym << 1, 0.2, 0.3, 1;
    EXPECT_THROW(GaussianModel(mean, asym, 0), std::invalid_argument);

    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1, 2, 2, 1;
    EXPECT_THROW(GaussianModel(mean, indefinite, 0), std::invalid_argument);

    Eigen::VectorXd mean3(3);
    mean3 << 0, 0, 0;
    EXPECT_THROW(GaussianModel(mean3, Eigen::MatrixXd::Identity(2, 2), 0),
                 std::invalid_argument);
}

TEST(GaussianModel, CholeskyFactorReproducesCovariance) {
    std::mt19937_64 rng(7);
    GaussianModel m = random_spd_model(rng, 4);
    Eigen::MatrixXd rebuilt = m.chol() * m.chol().transpose();
    EXPECT_LT((rebuilt - m.cov()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitGaussian, MatchesHandComputedMoments) {
    Eigen::MatrixXd corners(4, 2);
    corners << 0, 0, 2, 0, 0, 2, 2, 2;
    GaussianModel m = fit_gaussian(corners);
    EXPECT_DOUBLE_EQ(m.mean()(0), 1.0);
    EXPECT_DOUBLE_EQ(m.mean()(1), 1.0);
    EXPECT_DOUBLE_EQ(m.cov()(0, 0), 1.0 + 1e-8);
    EXPECT_DOUBLE_EQ(m.cov()(1, 1), 1.0 + 1e-8);
    EXPECT_DOUBLE_EQ(m.cov()(0, 1), 0.0);
    EXPECT_EQ(m.n_fit(), 4);
}

TEST(FitGaussian, SingletonGetsTinyRidge) {
    Eigen::MatrixXd one(1, 3);
    one << 4, -1, 2;
    GaussianModel m = fit_gaussian(one);
    EXPECT_DOUBLE_EQ(m.mean()(0), 4.0);
    EXPECT_DOUBLE_EQ(m.cov()(0, 0), 1e-12);
    EXPECT_DOUBLE_EQ(m.cov()(1, 1), 1e-12);
}

TEST(FitGaussian, RejectsEmptyInput) {
    EXPECT_THROW(fit_gaussian(Eigen::MatrixXd(0, 2)), InsufficientPointsError);
}

TEST(FitGaussian, CollinearPointsStayFactorizable) {
    Eigen::MatrixXd line(5, 2);
    line << 0, 0, 1, 2, 2, 4, 3, 6, 4, 8;
    GaussianModel m = fit_gaussian(line);
    EXPECT_NO_THROW(jd_gaussian(m, m));
    EXPECT_DOUBLE_EQ(jd_gaussian(m, m), 0.0);
}

TEST(JdGaussian, IdenticalModelsGiveZero) {
    std::mt19937_64 rng(12);
    for (int d = 1; d <= 5; ++d) {
        GaussianModel m = random_spd_model(rng, d);
        EXPECT_NEAR(jd_gaussian(m, m), 0.0, 1e-9);
    }
}

TEST(JdGaussian, ExactlySymmetric) {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 50; ++trial) {
        int d = 1 + trial % 5;
        GaussianModel a = random_spd_model(rng, d);
        GaussianModel b = random_spd_model(rng, d);
        EXPECT_EQ(jd_gaussian(a, b), jd_gaussian(b, a));
    }
}

TEST(JdGaussian, NonNegativeOnRandomPairs) {
    std::mt19937_64 rng(56);
    for (int trial = 0; trial < 200; ++trial) {
        int d = 1 + trial % 5;
        GaussianModel a = random_spd_model(rng, d);
        GaussianModel b = random_spd_model(rng, d);
        EXPECT_GE(jd_gaussian(a, b), 0.0);
    }
}

TEST(JdGaussian, MatchesDirectInverseEvaluation) {
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 100; ++trial) {
        int d = 1 + trial % 5;
        GaussianModel a = random_spd_model(rng, d);
        GaussianModel b = random_spd_model(rng, d);
        double via_chol = jd_gaussian(a, b);
        double via_inverse = jd_direct_inverse(a, b);
        EXPECT_NEAR(via_chol, via_inverse, 1e-8 * std::max(1.0, std::abs(via_inverse)));
    }
}

TEST(JdGaussian, IdentityCovarianceReducesToSquaredMeanGap) {
    GaussianModel a = make_model({0, 0}, {{1, 0}, {0, 1}});
    GaussianModel b = make_model({3, 0}, {{1, 0}, {0, 1}});
    GaussianModel c = make_model({5, 0}, {{1, 0}, {0, 1}});
    EXPECT_EQ(jd_gaussian(a, b), 9.0);
    EXPECT_EQ(jd_gaussian(a, c), 25.0);
    EXPECT_EQ(jd_gaussian(b, c), 4.0);
}

TEST(JdGaussian, MatchesFrozenGenericCase) {
    GaussianModel a = make_model({0, 0}, {{2, 0.3}, {0.3, 1}});
    GaussianModel b = make_model({1, -1}, {{1, -0.2}, {-0.2, 1.5}});
    EXPECT_NEAR(jd_gaussian(a, b), 2.1510793946783338, 1e-9);
}

TEST(JdGaussian, TranslationInvariant) {
    GaussianModel a = make_model({0, 1}, {{2, 0.3}, {0.3, 1}});
    GaussianModel b = make_model({4, -2}, {{1, -0.2}, {-0.2, 1.5}});
    GaussianModel a2 = make_model({10, 101}, {{2, 0.3}, {0.3, 1}});
    GaussianModel b2 = make_model({14, 98}, {{1, -0.2}, {-0.2, 1.5}});
    EXPECT_EQ(jd_gaussian(a, b), jd_gaussian(a2, b2));
}

TEST(JdGaussian, GrowsWithMeanSeparation) {
    GaussianModel base = make_model({0}, {{1}});
    double previous = 0.0;
    for (int step = 1; step <= 6; ++step) {
        GaussianModel shifted = make_model({0.5 * step}, {{1}});
        double value = jd_gaussian(base, shifted);
        EXPECT_GT(value, previous);
        previous = value;
    }
}

TEST(JdGaussian, RejectsDimensionMismatch) {
    GaussianModel a = make_model({0}, {{1}});
    GaussianModel b = make_model({0, 0}, {{1, 0}, {0, 1}});
    EXPECT_THROW(jd_gaussian(a, b), std::invalid_argument);
}

TEST(KdeModel, ValidatesInputs) {
    Eigen::MatrixXd samples(2, 1);
    samples << 0, 1;
    Eigen::VectorXd bw(1);
    bw << 0.5;
    EXPECT_NO_THROW(KdeModel(samples, bw));
    EXPECT_THROW(KdeModel(Eigen::MatrixXd(0, 1), bw), InsufficientPointsError);
    Eigen::VectorXd bad_size(2);
    bad_size << 0.5, 0.5;
    EXPECT_THROW(KdeModel(samples, bad_size), std::invalid_argument);
    Eigen::VectorXd nonpositive(1);
    nonpositive << 0.0;
    EXPECT_THROW(KdeModel(samples, nonpositive), std::invalid_argument);
}

TEST(FitKde, UsesScottBandwidth) {
    Eigen::MatrixXd samples(4, 1);
    samples << 0, 1, 2, 3;
    KdeModel m = fit_kde(samples);
    EXPECT_NEAR(m.bandwidth()(0), 0.7179364718731468, 1e-14);

    Eigen::MatrixXd pair(2, 1);
    pair << 0, 1;
    KdeModel p = fit_kde(pair);
    EXPECT_NEAR(p.bandwidth()(0), 0.18946457081379975, 1e-14);
}

TEST(FitKde, FlooredVarianceOnConstantCoordinate) {
    Eigen::MatrixXd samples(3, 2);
    samples << 0, 5, 1, 5, 2, 5;
    KdeModel m = fit_kde(samples);
    EXPECT_GT(m.bandwidth()(0), 1e-3);
    EXPECT_GT(m.bandwidth()(1), 0.0);
    EXPECT_LT(m.bandwidth()(1), 1e-10);
}

TEST(FitKde, RejectsFewerThanTwoPoints) {
    EXPECT_THROW(fit_kde(Eigen::MatrixXd(1, 2)), InsufficientPointsError);
}

TEST(KdeModel, DensityMatchesFrozenValue) {
    Eigen::MatrixXd samples(2, 1);
    samples << 0, 1;
    KdeModel m = fit_kde(samples);
    Eigen::VectorXd x(1);
    x << 0.5;
    EXPECT_NEAR(m.density(x), 0.47382564054103765, 1e-12);
}

TEST(KdeModel, DensityIntegratesToOneIn1d) {
    Eigen::MatrixXd samples(5, 1);
    samples << -1, 0, 0.5, 2, 3;
    KdeModel m = fit_kde(samples);
    double integral = 0.0;
    const double lo = -15.0, hi = 18.0, step = 0.005;
    Eigen::VectorXd x(1);
    double prev = 0.0;
    x(0) = lo;
    prev = m.density(x);
    for (double t = lo + step; t <= hi; t += step) {
        x(0) = t;
        double cur = m.density(x);
        integral += 0.5 * (prev + cur) * step;
        prev = cur;
    }
    EXPECT_NEAR(integral, 1.0, 1e-6);
}

TEST(KdeModel, DensityPeaksNearSamples) {
    Eigen::MatrixXd samples(3, 2);
    samples << 0, 0, 0.2, -0.1, -0.1, 0.2;
    KdeModel m = fit_kde(samples);
    Eigen::VectorXd center(2), far(2);
    center << 0, 0;
    far << 50, 50;
    EXPECT_GT(m.density(center), m.density(far));
    EXPECT_GE(m.density(far), 0.0);
}

TEST(JdKde, IdenticalModelsGiveZero) {
    Eigen::MatrixXd samples(6, 1);
    samples << 0, 0.5, 1, 1.5, 2, 2.5;
    KdeModel m = fit_kde(samples);
    EXPECT_DOUBLE_EQ(jd_kde(m, m), 0.0);
}

TEST(JdKde, ExactlySymmetric) {
    std::mt19937_64 rng(90);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(20, 2), b(20, 2);
    for (Eigen::Index i = 0; i < 20; ++i) {
        a(i, 0) = normal(rng);
        a(i, 1) = normal(rng);
        b(i, 0) = 2.0 + normal(rng);
        b(i, 1) = -1.0 + normal(rng);
    }
    KdeModel ma = fit_kde(a), mb = fit_kde(b);
    EXPECT_EQ(jd_kde(ma, mb), jd_kde(mb, ma));
}

TEST(JdKde, GrowsWithSeparation) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd base(40, 1);
    for (Eigen::Index i = 0; i < 40; ++i) base(i, 0) = normal(rng);
    KdeModel ma = fit_kde(base);
    double close = jd_kde(ma, fit_kde((base.array() + 1.0).matrix()));
    double far = jd_kde(ma, fit_kde((base.array() + 3.0).matrix()));
    EXPECT_GT(far, close);
    EXPECT_GT(close, 0.0);
}

TEST(JdKde, RejectsDimensionMismatch) {
    Eigen::MatrixXd a(3, 1), b(3, 2);
    a << 0, 1, 2;
    b << 0, 0, 1, 1, 2, 2;
    EXPECT_THROW(jd_kde(fit_kde(a), fit_kde(b)), std::invalid_argument);
}

}  // namespace
