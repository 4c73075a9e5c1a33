#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jdcvi/core.hpp"
#include "jdcvi/density.hpp"
#include "jdcvi/errors.hpp"

namespace jdcvi {

enum class Index : int { PC = 0, PE, P, XB, PBMF, PBM_FVG, OS, I };
enum class Direction { Minimize, Maximize };
enum class DivergenceBackend { Gaussian, Kde };

inline constexpr std::array<const char*, 8> kIndexNames = {"PC", "PE",      "P",  "XB",
                                                           "PBMF", "PBM_FVG", "OS", "I"};

inline constexpr std::array<Direction, 8> kIndexDirections = {
    Direction::Maximize,  // PC
    Direction::Minimize,  // PE
    Direction::Maximize,  // P
    Direction::Minimize,  // XB
    Direction::Maximize,  // PBMF
    Direction::Maximize,  // PBM_FVG
    Direction::Minimize,  // OS
    Direction::Minimize,  // I
};

inline const char* index_name(Index id) { return kIndexNames[static_cast<std::size_t>(id)]; }
inline Direction index_direction(Index id) {
    return kIndexDirections[static_cast<std::size_t>(id)];
}

/// Values of all eight indexes for one partition. An index that raised a
/// domain error holds nullopt ("undefined").
struct CviReport {
    int k = 0;
    std::array<std::optional<double>, 8> values{};

    std::optional<double> value(Index id) const { return values[static_cast<std::size_t>(id)]; }
};

/// Partition coefficient: mean squared membership. In [1/k, 1]; higher is
/// better.
inline double pc(const MembershipMatrix& m) {
    return m.u().array().square().sum() / static_cast<double>(m.n());
}

/// Partition entropy with natural log and 0*log(0) := 0. In [0, log k];
/// lower is better.
inline double pe(const MembershipMatrix& m) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.k(); ++i)
        for (Eigen::Index j = 0; j < m.n(); ++j) {
            double u = m.u()(i, j);
            if (u > 0.0) acc += u * std::log(u);
        }
    return -acc / static_cast<double>(m.n());
}

/// Mean top membership minus mean pairwise membership overlap, the latter
/// averaged over the K = k(k-1)/2 cluster pairs. Higher is better.
inline double p_index(const MembershipMatrix& m) {
    const Eigen::Index k = m.k();
    if (k < 2) throw InsufficientClustersError("p_index: needs at least two clusters");
    const double n = static_cast<double>(m.n());
    double crispness = m.u().colwise().maxCoeff().sum() / n;
    double overlap = 0.0;
    for (Eigen::Index i = 0; i + 1 < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j)
            overlap += m.u().row(i).cwiseMin(m.u().row(j)).sum() / n;
    const double pairs = static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
    return crispness - overlap / pairs;
}

/// Xie-Beni: squared-membership-weighted compactness over the minimum
/// squared center separation. Lower is better.
inline double xb(const Dataset& ds, const MembershipMatrix& m) {
    const Eigen::Index k = m.k();
    if (k < 2) throw InsufficientClustersError("xb: needs at least two clusters");
    double num = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < ds.n(); ++j) {
            double u = m.u()(i, j);
            num += u * u * (ds.points().row(j) - m.centers().row(i)).squaredNorm();
        }
    double min_sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < k; ++i)
        for (Eigen::Index l = i + 1; l < k; ++l)
            min_sep = std::min(min_sep, (m.centers().row(i) - m.centers().row(l)).squaredNorm());
    if (min_sep == 0.0) throw DegenerateCentersError("xb: two cluster centers coincide");
    return num / (static_cast<double>(ds.n()) * min_sep);
}

namespace detail {

inline double max_center_distance(const Eigen::MatrixXd& centers) {
    double dc = 0.0;
    for (Eigen::Index i = 0; i + 1 < centers.rows(); ++i)
        for (Eigen::Index j = i + 1; j < centers.rows(); ++j)
            dc = std::max(dc, (centers.row(i) - centers.row(j)).norm());
    return dc;
}

}  // namespace detail

/// PBMF: ((1/k) * (E1 / J_m) * D_c)^2 with first-power memberships in J_m,
/// E1 the dispersion around the grand mean, and D_c the center diameter.
/// Higher is better.
inline double pbmf(const Dataset& ds, const MembershipMatrix& m) {
    const Eigen::Index k = m.k();
    if (k < 2) throw InsufficientClustersError("pbmf: needs at least two clusters");
    double j_m = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < ds.n(); ++j)
            j_m += m.u()(i, j) * (ds.points().row(j) - m.centers().row(i)).norm();
    if (j_m == 0.0) throw ZeroDispersionError("pbmf: membership-weighted dispersion is zero");
    Eigen::RowVectorXd grand_mean = ds.points().colwise().mean();
    double e1 = (ds.points().rowwise() - grand_mean).rowwise().norm().sum();
    double dc = detail::max_center_distance(m.centers());
    double v = (e1 / j_m) * dc / static_cast<double>(k);
    return v * v;
}

/// PBM_FVG: ((1/k) * D_c / sqrt(gran_error))^2 where gran_error is the
/// squared reconstruction error of points from their squared-membership-
/// weighted centers. A zero granulation error signals ideal reconstruction
/// and reports +infinity. Higher is better.
inline double pbm_fvg(const Dataset& ds, const MembershipMatrix& m) {
    const Eigen::Index k = m.k();
    if (k < 2) throw InsufficientClustersError("pbm_fvg: needs at least two clusters");
    double gran_error = 0.0;
    for (Eigen::Index j = 0; j < ds.n(); ++j) {
        Eigen::RowVectorXd reconstructed = Eigen::RowVectorXd::Zero(ds.dim());
        double mass = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            double w = m.u()(i, j) * m.u()(i, j);
            reconstructed += w * m.centers().row(i);
            mass += w;
        }
        reconstructed /= mass;
        gran_error += (ds.points().row(j) - reconstructed).squaredNorm();
    }
    if (gran_error == 0.0) return std::numeric_limits<double>::infinity();
    double dc = detail::max_center_distance(m.centers());
    double v = dc / (std::sqrt(gran_error) * static_cast<double>(k));
    return v * v;
}

/// Overlap-separation index. Per point: a is its mean distance to own-cluster
/// members, b to non-members; the point counts a/b when the contrast
/// (b-a)/(b+a) falls below 0.4. The total overlap is divided by the summed
/// nearest-center distances. Lower is better.
inline double os(const Dataset& ds, const CrispPartition& p, const Eigen::MatrixXd& centers) {
    const int k = p.k;
    if (k < 2) throw InsufficientClustersError("os: needs at least two clusters");
    if (p.n() != ds.n()) throw LengthMismatchError("os: partition size != dataset size");
    auto sizes = p.cluster_sizes();
    for (int i = 0; i < k; ++i)
        if (sizes[static_cast<std::size_t>(i)] == 0)
            throw EmptyClusterError("os: cluster " + std::to_string(i) + " is empty");

    double denom = 0.0;
    for (int i = 0; i < k; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j)
            if (j != i) nearest = std::min(nearest, (centers.row(i) - centers.row(j)).norm());
        denom += nearest;
    }
    if (denom == 0.0) throw DegenerateCentersError("os: all nearest-center distances are zero");

    const Eigen::Index n = ds.n();
    double overlap = 0.0;
    Eigen::VectorXd dists(n);
    std::vector<double> per_cluster(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < n; ++j) {
        dists = (ds.points().rowwise() - ds.points().row(j)).rowwise().norm();
        std::fill(per_cluster.begin(), per_cluster.end(), 0.0);
        double total = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
            per_cluster[static_cast<std::size_t>(p.assignment[static_cast<std::size_t>(l)])] +=
                dists(l);
            total += dists(l);
        }
        int own = p.assignment[static_cast<std::size_t>(j)];
        double own_size = static_cast<double>(sizes[static_cast<std::size_t>(own)]);
        double a = per_cluster[static_cast<std::size_t>(own)] / own_size;
        double b = (total - per_cluster[static_cast<std::size_t>(own)]) /
                   (static_cast<double>(n) - own_size);
        if (a + b == 0.0) continue;
        if ((b - a) / (b + a) < 0.4) overlap += a / b;
    }
    return overlap / denom;
}

/// Compactness V: per cluster, the squared distance of its farthest member
/// to the center, summed over clusters. Lower is better.
inline double compactness_v(const Dataset& ds, const CrispPartition& p,
                            const Eigen::MatrixXd& centers) {
    if (p.n() != ds.n()) throw LengthMismatchError("compactness_v: partition size != dataset size");
    auto sizes = p.cluster_sizes();
    double v = 0.0;
    for (int i = 0; i < p.k; ++i) {
        if (sizes[static_cast<std::size_t>(i)] == 0)
            throw EmptyClusterError("compactness_v: cluster " + std::to_string(i) + " is empty");
        double worst = 0.0;
        for (Eigen::Index j = 0; j < ds.n(); ++j) {
            if (p.assignment[static_cast<std::size_t>(j)] != i) continue;
            worst = std::max(worst, (ds.points().row(j) - centers.row(i)).squaredNorm());
        }
        v += worst;
    }
    return v;
}

struct SeparationResult {
    double total = 0.0;
    std::vector<double> per_cluster;  // Sep_i = min divergence to any other cluster
};

/// Separation S: each cluster contributes its minimum divergence to any other
/// cluster; S is the sum of those minima.
template <typename Model, typename DivergenceFn>
SeparationResult separation_s(const std::vector<Model>& models, DivergenceFn&& divergence) {
    const std::size_t k = models.size();
    if (k < 2) throw InsufficientClustersError("separation_s: needs at least two models");
    // cache the symmetric pairwise divergences
    std::vector<std::vector<double>> jd(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i + 1 < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) jd[i][j] = jd[j][i] = divergence(models[i], models[j]);
    SeparationResult result;
    result.per_cluster.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        double sep = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) sep = std::min(sep, jd[i][j]);
        result.per_cluster[i] = sep;
        result.total += sep;
    }
    return result;
}

inline SeparationResult separation_s(const std::vector<GaussianModel>& models) {
    return separation_s(models, [](const GaussianModel& a, const GaussianModel& b) {
        return jd_gaussian(a, b);
    });
}

inline SeparationResult separation_s(const std::vector<KdeModel>& models, double floor = 1e-300) {
    return separation_s(models, [floor](const KdeModel& a, const KdeModel& b) {
        return jd_kde(a, b, floor);
    });
}

/// The proposed index I = V / S: hardens the partition, fits one density
/// model per cluster with the chosen backend, and divides the compactness by
/// the Jeffrey-divergence separation. Lower is better.
inline double index_i(const Dataset& ds, const MembershipMatrix& m,
                      DivergenceBackend backend = DivergenceBackend::Gaussian,
                      double kde_floor = 1e-300) {
    if (m.k() < 2) throw InsufficientClustersError("index_i: needs at least two clusters");
    CrispPartition p = harden(m);
    std::vector<Eigen::MatrixXd> members;
    members.reserve(static_cast<std::size_t>(p.k));
    for (int i = 0; i < p.k; ++i) {
        members.push_back(cluster_members(p, ds, i));
        if (members.back().rows() == 0)
            throw EmptyClusterError("index_i: hardened cluster " + std::to_string(i) + " is empty");
    }
    double v = compactness_v(ds, p, m.centers());
    double s = 0.0;
    if (backend == DivergenceBackend::Gaussian) {
        std::vector<GaussianModel> models;
        models.reserve(members.size());
        for (const auto& pts : members) models.push_back(fit_gaussian(pts));
        s = separation_s(models).total;
    } else {
        std::vector<KdeModel> models;
        models.reserve(members.size());
        for (const auto& pts : members) models.push_back(fit_kde(pts));
        s = separation_s(models, kde_floor).total;
    }
    if (s <= 0.0) throw ZeroSeparationError("index_i: separation is zero");
    return v / s;
}

/// Evaluates all eight indexes; any index raising a domain error records
/// nullopt instead of aborting the report.
inline CviReport evaluate_all(const Dataset& ds, const MembershipMatrix& m,
                              DivergenceBackend backend = DivergenceBackend::Gaussian,
                              double kde_floor = 1e-300) {
    if (m.k() < 2) throw InsufficientClustersError("evaluate_all: needs at least two clusters");
    CviReport report;
    report.k = static_cast<int>(m.k());
    auto record = [&report](Index id, auto&& compute) {
        try {
            report.values[static_cast<std::size_t>(id)] = compute();
        } catch (const Error&) {
            report.values[static_cast<std::size_t>(id)] = std::nullopt;
        }
    };
    CrispPartition p = harden(m);
    record(Index::PC, [&] { return pc(m); });
    record(Index::PE, [&] { return pe(m); });
    record(Index::P, [&] { return p_index(m); });
    record(Index::XB, [&] { return xb(ds, m); });
    record(Index::PBMF, [&] { return pbmf(ds, m); });
    record(Index::PBM_FVG, [&] { return pbm_fvg(ds, m); });
    record(Index::OS, [&] { return os(ds, p, m.centers()); });
    record(Index::I, [&] { return index_i(ds, m, backend, kde_floor); });
    return report;
}

}  // namespace jdcvi
