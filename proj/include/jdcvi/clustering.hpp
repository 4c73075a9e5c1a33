#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "jdcvi/core.hpp"
#include "jdcvi/errors.hpp"

namespace jdcvi {

struct FcmConfig {
    int k = 2;
    double m = 2.0;  // fuzzifier exponent, must be > 1
    int max_iter = 300;
    double tol = 1e-6;  // on the maximum center displacement
    std::uint64_t seed = 0;

    void validate() const {
        if (k < 1) throw std::invalid_argument("FcmConfig: k must be >= 1");
        if (!(m > 1.0)) throw std::invalid_argument("FcmConfig: fuzzifier m must be > 1");
        if (max_iter < 1) throw std::invalid_argument("FcmConfig: max_iter must be >= 1");
        if (!(tol > 0.0)) throw std::invalid_argument("FcmConfig: tol must be > 0");
    }
};

struct KmeansResult {
    CrispPartition partition;
    Eigen::MatrixXd centers;  // k×d
    double objective = 0.0;   // sum of squared point-to-center distances
    int iterations = 0;
    std::vector<double> objective_history;  // one entry per iteration
};

struct FcmResult {
    MembershipMatrix membership;
    double objective = 0.0;  // sum of u^m weighted squared distances
    int iterations = 0;
    std::vector<double> objective_history;
};

namespace detail {

/// k row indices via distance-squared weighted seeding (k-means++ style):
/// the first drawn uniformly, each next with probability proportional to the
/// squared distance to the nearest row already chosen. Spreads the initial
/// centers across the data's modes far more reliably than uniform sampling.
inline std::vector<Eigen::Index> sample_spread_rows(const Eigen::MatrixXd& x, int k,
                                                    std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    std::uniform_int_distribution<Eigen::Index> uniform_row(0, n - 1);
    chosen.push_back(uniform_row(rng));
    Eigen::VectorXd nearest_d2 = (x.rowwise() - x.row(chosen.front())).rowwise().squaredNorm();
    for (int i = 1; i < k; ++i) {
        const double total = nearest_d2.sum();
        Eigen::Index next = -1;
        if (total > 0.0) {
            std::uniform_real_distribution<double> pick(0.0, total);
            const double r = pick(rng);
            double acc = 0.0;
            Eigen::Index last_positive = -1;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (nearest_d2(j) > 0.0) last_positive = j;
                acc += nearest_d2(j);
                if (r < acc) {
                    next = j;
                    break;
                }
            }
            if (next < 0) next = last_positive;  // rounding pushed r past the last bin
        } else {
            // every point coincides with a chosen row: take the first unchosen index
            for (Eigen::Index j = 0; j < n; ++j)
                if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) {
                    next = j;
                    break;
                }
            if (next < 0) next = uniform_row(rng);
        }
        chosen.push_back(next);
        nearest_d2 = nearest_d2.cwiseMin((x.rowwise() - x.row(next)).rowwise().squaredNorm());
    }
    return chosen;
}

/// Squared Euclidean distances between every point (row of x) and every
/// center (row of c), as an n×k matrix. Clamped at zero against rounding.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
    Eigen::VectorXd xn = x.rowwise().squaredNorm();
    Eigen::VectorXd cn = c.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * x * c.transpose()).rowwise() + cn.transpose();
    d2.colwise() += xn;
    return d2.cwiseMax(0.0);
}

}  // namespace detail

/// Lloyd iterations from seeded spread sample points. An empty cluster is
/// re-seeded once per iteration at the point farthest from its current
/// center; a cluster still empty at termination raises EmptyClusterError.
inline KmeansResult kmeans(const Dataset& ds, int k, std::uint64_t seed, int max_iter = 300) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (k > ds.n()) throw std::invalid_argument("kmeans: k must not exceed the point count");

    const Eigen::MatrixXd& x = ds.points();
    const Eigen::Index n = ds.n();
    const Eigen::Index d = ds.dim();

    Eigen::MatrixXd centers(k, d);
    auto init = detail::sample_spread_rows(x, k, seed);
    for (int i = 0; i < k; ++i) centers.row(i) = x.row(init[static_cast<std::size_t>(i)]);

    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    std::vector<double> history;
    int iter = 0;
    bool changed = true;
    while (changed && iter < max_iter) {
        ++iter;
        changed = false;

        Eigen::MatrixXd d2 = detail::squared_distances(x, centers);
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::Index best;
            d2.row(j).minCoeff(&best);
            if (assignment[static_cast<std::size_t>(j)] != static_cast<int>(best)) {
                assignment[static_cast<std::size_t>(j)] = static_cast<int>(best);
                changed = true;
            }
        }

        std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
        for (int id : assignment) ++sizes[static_cast<std::size_t>(id)];
        for (int i = 0; i < k; ++i) {
            if (sizes[static_cast<std::size_t>(i)] > 0) continue;
            // farthest point from its own center, among clusters that can
            // spare one
            Eigen::Index donor = -1;
            double worst = -1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                int a = assignment[static_cast<std::size_t>(j)];
                if (sizes[static_cast<std::size_t>(a)] < 2) continue;
                double dist = d2(j, a);
                if (dist > worst) {
                    worst = dist;
                    donor = j;
                }
            }
            if (donor < 0) continue;
            --sizes[static_cast<std::size_t>(assignment[static_cast<std::size_t>(donor)])];
            assignment[static_cast<std::size_t>(donor)] = i;
            sizes[static_cast<std::size_t>(i)] = 1;
            changed = true;
        }

        centers.setZero();
        for (Eigen::Index j = 0; j < n; ++j)
            centers.row(assignment[static_cast<std::size_t>(j)]) += x.row(j);
        for (int i = 0; i < k; ++i) {
            if (sizes[static_cast<std::size_t>(i)] == 0)
                throw EmptyClusterError("kmeans: cluster " + std::to_string(i) +
                                        " is empty and could not be re-seeded");
            centers.row(i) /= static_cast<double>(sizes[static_cast<std::size_t>(i)]);
        }

        double objective = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            objective += (x.row(j) - centers.row(assignment[static_cast<std::size_t>(j)])).squaredNorm();
        history.push_back(objective);
    }

    double objective = history.empty() ? 0.0 : history.back();
    return KmeansResult{CrispPartition(std::move(assignment), k), std::move(centers), objective,
                        iter, std::move(history)};
}

namespace detail {

/// FCM membership update from precomputed squared distances (n×k). A point
/// coinciding with a center gets crisp membership there (lowest such center
/// on ties).
inline Eigen::MatrixXd fcm_memberships_from_d2(const Eigen::MatrixXd& d2, double m) {
    const Eigen::Index n = d2.rows();
    const int k = static_cast<int>(d2.cols());
    Eigen::MatrixXd u(k, n);
    const double expo = 1.0 / (m - 1.0);
    Eigen::VectorXd t(k);
    for (Eigen::Index j = 0; j < n; ++j) {
        int zero_at = -1;
        for (int i = 0; i < k; ++i) {
            if (d2(j, i) == 0.0) {
                zero_at = i;
                break;
            }
        }
        if (zero_at >= 0) {
            u.col(j).setZero();
            u(zero_at, j) = 1.0;
            continue;
        }
        if (m == 2.0) {
            for (int i = 0; i < k; ++i) t(i) = 1.0 / d2(j, i);
        } else {
            for (int i = 0; i < k; ++i) t(i) = std::pow(d2(j, i), -expo);
        }
        double sum = t.sum();
        if (!std::isfinite(sum)) {
            // a vanishing distance overflowed the power; treat as coincident
            int at = 0;
            for (int i = 0; i < k; ++i)
                if (std::isinf(t(i))) {
                    at = i;
                    break;
                }
            u.col(j).setZero();
            u(at, j) = 1.0;
            continue;
        }
        u.col(j) = t / sum;
    }
    return u;
}

inline Eigen::MatrixXd fcm_memberships(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                                       double m) {
    return fcm_memberships_from_d2(squared_distances(x, centers), m);
}

/// Objective from precomputed squared distances (n×k) and memberships (k×n).
inline double fcm_objective(const Eigen::MatrixXd& d2, const Eigen::MatrixXd& u, double m) {
    if (m == 2.0) return (u.array().square() * d2.transpose().array()).sum();
    return (u.array().pow(m) * d2.transpose().array()).sum();
}

}  // namespace detail

/// Alternating membership/center optimization until the maximum center
/// displacement drops below cfg.tol or cfg.max_iter is reached. The returned
/// memberships are consistent with the returned centers.
inline FcmResult fcm(const Dataset& ds, const FcmConfig& cfg) {
    cfg.validate();
    if (cfg.k > ds.n()) throw std::invalid_argument("fcm: k must not exceed the point count");

    const Eigen::MatrixXd& x = ds.points();
    const Eigen::Index d = ds.dim();
    const int k = cfg.k;

    Eigen::MatrixXd centers(k, d);
    auto init = detail::sample_spread_rows(x, k, cfg.seed);
    for (int i = 0; i < k; ++i) centers.row(i) = x.row(init[static_cast<std::size_t>(i)]);

    Eigen::MatrixXd u, d2;
    std::vector<double> history;
    int iter = 0;
    for (; iter < cfg.max_iter; ++iter) {
        d2 = detail::squared_distances(x, centers);
        u = detail::fcm_memberships_from_d2(d2, cfg.m);
        history.push_back(detail::fcm_objective(d2, u, cfg.m));

        Eigen::MatrixXd w;
        if (cfg.m == 2.0)
            w = u.array().square();
        else
            w = u.array().pow(cfg.m);
        Eigen::VectorXd mass = w.rowwise().sum();
        Eigen::MatrixXd next = w * x;
        for (int i = 0; i < k; ++i) {
            if (mass(i) > 0.0)
                next.row(i) /= mass(i);
            else
                next.row(i) = centers.row(i);  // starved center keeps its place
        }

        double shift = (next - centers).rowwise().norm().maxCoeff();
        centers = std::move(next);
        if (shift < cfg.tol) {
            ++iter;
            break;
        }
    }
    // final membership refresh so u matches the returned centers
    d2 = detail::squared_distances(x, centers);
    u = detail::fcm_memberships_from_d2(d2, cfg.m);
    double objective = detail::fcm_objective(d2, u, cfg.m);

    return FcmResult{MembershipMatrix(std::move(u), std::move(centers)), objective, iter,
                     std::move(history)};
}

}  // namespace jdcvi
