#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jdcvi/errors.hpp"

namespace jdcvi {

/// A set of n points in d dimensions with optional 0-based ground-truth
/// labels. Rows of `points` are points. Immutable after construction.
class Dataset {
public:
    Dataset(Eigen::MatrixXd points, std::optional<std::vector<int>> labels = std::nullopt,
            std::string name = "")
        : points_(std::move(points)), labels_(std::move(labels)), name_(std::move(name)) {
        if (points_.rows() < 1 || points_.cols() < 1)
            throw std::invalid_argument("Dataset: need at least one point and one dimension");
        if (!points_.allFinite())
            throw std::invalid_argument("Dataset: coordinates must be finite");
        if (labels_) {
            if (static_cast<Eigen::Index>(labels_->size()) != points_.rows())
                throw std::invalid_argument("Dataset: label count does not match point count");
            int max_id = -1;
            for (int id : *labels_) {
                if (id < 0) throw std::invalid_argument("Dataset: negative label id");
                max_id = std::max(max_id, id);
            }
            std::vector<bool> seen(static_cast<std::size_t>(max_id) + 1, false);
            for (int id : *labels_) seen[static_cast<std::size_t>(id)] = true;
            for (bool s : seen)
                if (!s) throw std::invalid_argument("Dataset: label ids must be contiguous from 0");
        }
    }

    const Eigen::MatrixXd& points() const { return points_; }
    Eigen::Index n() const { return points_.rows(); }
    Eigen::Index dim() const { return points_.cols(); }
    bool has_labels() const { return labels_.has_value(); }
    const std::vector<int>& labels() const {
        if (!labels_) throw MissingLabelsError("Dataset '" + name_ + "' has no labels");
        return *labels_;
    }
    const std::string& name() const { return name_; }

private:
    Eigen::MatrixXd points_;
    std::optional<std::vector<int>> labels_;
    std::string name_;
};

/// Fuzzy clustering result: k×n memberships u (rows are clusters, columns
/// points) plus the k×d cluster centers. Every column of u sums to 1 within
/// 1e-9; this is checked at construction.
class MembershipMatrix {
public:
    MembershipMatrix(Eigen::MatrixXd u, Eigen::MatrixXd centers)
        : u_(std::move(u)), centers_(std::move(centers)) {
        if (u_.rows() < 1) throw std::invalid_argument("MembershipMatrix: k must be >= 1");
        if (centers_.rows() != u_.rows())
            throw std::invalid_argument("MembershipMatrix: centers row count must equal k");
        if ((u_.array() < -1e-12).any() || (u_.array() > 1.0 + 1e-12).any())
            throw std::invalid_argument("MembershipMatrix: memberships must lie in [0,1]");
        Eigen::RowVectorXd sums = u_.colwise().sum();
        if (((sums.array() - 1.0).abs() > 1e-9).any())
            throw std::invalid_argument("MembershipMatrix: columns must sum to 1 within 1e-9");
    }

    const Eigen::MatrixXd& u() const { return u_; }
    const Eigen::MatrixXd& centers() const { return centers_; }
    Eigen::Index k() const { return u_.rows(); }
    Eigen::Index n() const { return u_.cols(); }

private:
    Eigen::MatrixXd u_;
    Eigen::MatrixXd centers_;
};

/// Crisp assignment of n points to k clusters. Ids lie in [0, k).
struct CrispPartition {
    std::vector<int> assignment;
    int k = 0;

    CrispPartition(std::vector<int> assignment_, int k_)
        : assignment(std::move(assignment_)), k(k_) {
        if (k < 1) throw std::invalid_argument("CrispPartition: k must be >= 1");
        for (int id : assignment)
            if (id < 0 || id >= k)
                throw std::invalid_argument("CrispPartition: assignment id out of [0,k)");
    }

    Eigen::Index n() const { return static_cast<Eigen::Index>(assignment.size()); }

    std::vector<Eigen::Index> cluster_sizes() const {
        std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
        for (int id : assignment) ++sizes[static_cast<std::size_t>(id)];
        return sizes;
    }
};

/// Per-point argmax over memberships; ties break toward the lowest cluster
/// index. Centers carry over by id (cluster i of the result is row i of
/// m.centers()).
inline CrispPartition harden(const MembershipMatrix& m) {
    std::vector<int> assignment(static_cast<std::size_t>(m.n()));
    for (Eigen::Index j = 0; j < m.n(); ++j) {
        int best = 0;
        double best_u = m.u()(0, j);
        for (Eigen::Index i = 1; i < m.k(); ++i) {
            if (m.u()(i, j) > best_u) {
                best_u = m.u()(i, j);
                best = static_cast<int>(i);
            }
        }
        assignment[static_cast<std::size_t>(j)] = best;
    }
    return CrispPartition(std::move(assignment), static_cast<int>(m.k()));
}

/// Rows of ds belonging to cluster i, in dataset order. May have zero rows.
inline Eigen::MatrixXd cluster_members(const CrispPartition& p, const Dataset& ds, int i) {
    if (i < 0 || i >= p.k) throw std::invalid_argument("cluster_members: cluster id out of range");
    if (p.n() != ds.n()) throw LengthMismatchError("cluster_members: partition size != dataset size");
    Eigen::Index count = 0;
    for (int id : p.assignment)
        if (id == i) ++count;
    Eigen::MatrixXd members(count, ds.dim());
    Eigen::Index row = 0;
    for (Eigen::Index j = 0; j < ds.n(); ++j)
        if (p.assignment[static_cast<std::size_t>(j)] == i) members.row(row++) = ds.points().row(j);
    return members;
}

/// Indices of the points assigned to cluster i, in dataset order.
inline std::vector<Eigen::Index> cluster_member_indices(const CrispPartition& p, int i) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < p.n(); ++j)
        if (p.assignment[static_cast<std::size_t>(j)] == i) idx.push_back(j);
    return idx;
}

/// Builds the crisp (0/1) membership matrix equivalent to p, reusing the
/// given centers.
inline MembershipMatrix to_membership(const CrispPartition& p, const Eigen::MatrixXd& centers) {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(p.k, p.n());
    for (Eigen::Index j = 0; j < p.n(); ++j) u(p.assignment[static_cast<std::size_t>(j)], j) = 1.0;
    return MembershipMatrix(std::move(u), centers);
}

/// Reads a crisp partition off ground-truth labels.
inline CrispPartition partition_from_labels(const std::vector<int>& labels) {
    if (labels.empty()) throw std::invalid_argument("partition_from_labels: empty label vector");
    int k = 0;
    for (int id : labels) k = std::max(k, id + 1);
    return CrispPartition(labels, k);
}

}  // namespace jdcvi
