#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "jdcvi/clustering.hpp"
#include "jdcvi/core.hpp"
#include "jdcvi/cvi.hpp"
#include "jdcvi/errors.hpp"
#include "jdcvi/similarity.hpp"

namespace jdcvi {

namespace detail {

/// Shortest decimal rendering that round-trips the exact double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline double parse_csv_double(std::string_view field, std::size_t row, std::size_t col) {
    std::string_view token = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("csv row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse \"" + std::string(token) + "\" as a number");
    return value;
}

inline long long parse_csv_int(std::string_view field, std::size_t row, std::size_t col) {
    std::string_view token = trim(field);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("csv row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse \"" + std::string(token) + "\" as an integer label");
    return value;
}

/// splitmix64 finalizer over (base, run) so per-run streams are independent.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t run) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (run + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset CSV I/O
// ---------------------------------------------------------------------------

/// Reads a dataset CSV: a header row, feature columns, and an optional
/// trailing integer column named "label". Label values may be any integers;
/// they are remapped to 0..k-1 by sorted value.
inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("load_csv: " + path + " has no header row");
    auto header = detail::split_fields(detail::trim(line));
    bool has_label = !header.empty() && detail::trim(header.back()) == "label";
    const std::size_t n_cols = header.size();
    const std::size_t n_features = n_cols - (has_label ? 1 : 0);
    if (n_features < 1) throw ParseError("load_csv: " + path + " has no feature columns");

    std::vector<double> values;
    std::vector<long long> raw_labels;
    std::size_t n_rows = 0;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        std::string_view stripped = detail::trim(line);
        if (stripped.empty()) continue;
        auto fields = detail::split_fields(stripped);
        if (fields.size() != n_cols)
            throw DimensionMismatchError("load_csv: row " + std::to_string(row) + " has " +
                                         std::to_string(fields.size()) + " fields, expected " +
                                         std::to_string(n_cols));
        for (std::size_t c = 0; c < n_features; ++c)
            values.push_back(detail::parse_csv_double(fields[c], row, c + 1));
        if (has_label) raw_labels.push_back(detail::parse_csv_int(fields.back(), row, n_cols));
        ++n_rows;
    }
    if (n_rows == 0) throw ParseError("load_csv: " + path + " has no data rows");

    Eigen::MatrixXd points(static_cast<Eigen::Index>(n_rows),
                           static_cast<Eigen::Index>(n_features));
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < n_features; ++c)
            points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                values[r * n_features + c];

    std::optional<std::vector<int>> labels;
    if (has_label) {
        std::vector<long long> distinct = raw_labels;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        labels.emplace();
        labels->reserve(raw_labels.size());
        for (long long raw : raw_labels) {
            auto it = std::lower_bound(distinct.begin(), distinct.end(), raw);
            labels->push_back(static_cast<int>(it - distinct.begin()));
        }
    }
    return Dataset(std::move(points), std::move(labels), path);
}

/// Writes a dataset CSV with features rendered at full round-trip precision.
inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_csv: cannot open " + path + " for writing");
    for (Eigen::Index c = 0; c < ds.dim(); ++c) {
        if (c > 0) out << ',';
        out << 'f' << c;
    }
    if (ds.has_labels()) out << ",label";
    out << '\n';
    for (Eigen::Index r = 0; r < ds.n(); ++r) {
        for (Eigen::Index c = 0; c < ds.dim(); ++c) {
            if (c > 0) out << ',';
            out << detail::format_double(ds.points()(r, c));
        }
        if (ds.has_labels()) out << ',' << ds.labels()[static_cast<std::size_t>(r)];
        out << '\n';
    }
    if (!out) throw IoError("save_csv: write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// Gaussian-mixture generation
// ---------------------------------------------------------------------------

struct MixtureComponent {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Seeded recipe for a labeled Gaussian-mixture dataset.
struct MixtureSpec {
    std::string name;
    std::vector<MixtureComponent> components;
    int n_total = 0;
    std::uint64_t seed = 0;

    void validate() const {
        if (components.empty()) throw std::invalid_argument("MixtureSpec: no components");
        if (n_total < 1) throw std::invalid_argument("MixtureSpec: n_total must be >= 1");
        const Eigen::Index d = components.front().mean.size();
        if (d < 1) throw std::invalid_argument("MixtureSpec: zero-dimensional mean");
        double weight_sum = 0.0;
        for (std::size_t i = 0; i < components.size(); ++i) {
            const auto& comp = components[i];
            if (!(comp.weight > 0.0))
                throw std::invalid_argument("MixtureSpec: component " + std::to_string(i) +
                                            " has non-positive weight");
            weight_sum += comp.weight;
            if (comp.mean.size() != d)
                throw std::invalid_argument("MixtureSpec: component " + std::to_string(i) +
                                            " mean dimension mismatch");
            if (comp.cov.rows() != d || comp.cov.cols() != d)
                throw std::invalid_argument("MixtureSpec: component " + std::to_string(i) +
                                            " covariance is not " + std::to_string(d) + "x" +
                                            std::to_string(d));
            Eigen::LLT<Eigen::MatrixXd> llt(comp.cov);
            if (llt.info() != Eigen::Success)
                throw std::invalid_argument("MixtureSpec: component " + std::to_string(i) +
                                            " covariance is not positive definite");
        }
        if (std::abs(weight_sum - 1.0) > 1e-9)
            throw std::invalid_argument("MixtureSpec: weights sum to " +
                                        detail::format_double(weight_sum) + ", expected 1");
    }
};

/// Draws the dataset: each point picks a component by weight, then applies the
/// component's Cholesky factor to standard normals. Labels carry the
/// component ids.
inline Dataset generate(const MixtureSpec& spec) {
    spec.validate();
    const Eigen::Index d = spec.components.front().mean.size();
    std::vector<Eigen::MatrixXd> chol;
    std::vector<double> weights;
    chol.reserve(spec.components.size());
    for (const auto& comp : spec.components) {
        chol.push_back(Eigen::LLT<Eigen::MatrixXd>(comp.cov).matrixL());
        weights.push_back(comp.weight);
    }
    std::mt19937_64 rng(spec.seed);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd points(spec.n_total, d);
    std::vector<int> labels(static_cast<std::size_t>(spec.n_total));
    Eigen::VectorXd z(d);
    for (int i = 0; i < spec.n_total; ++i) {
        int comp = pick(rng);
        for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(rng);
        points.row(i) =
            (spec.components[static_cast<std::size_t>(comp)].mean + chol[static_cast<std::size_t>(comp)] * z)
                .transpose();
        labels[static_cast<std::size_t>(i)] = comp;
    }
    return Dataset(std::move(points), std::move(labels), spec.name);
}

inline MixtureSpec mixture_from_json(const nlohmann::json& j) {
    try {
        MixtureSpec spec;
        spec.name = j.value("name", std::string{});
        spec.n_total = j.at("n_total").get<int>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& jc : j.at("components")) {
            MixtureComponent comp;
            comp.weight = jc.at("weight").get<double>();
            auto mean = jc.at("mean").get<std::vector<double>>();
            comp.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                          static_cast<Eigen::Index>(mean.size()));
            auto rows = jc.at("cov").get<std::vector<std::vector<double>>>();
            comp.cov.resize(static_cast<Eigen::Index>(rows.size()),
                            rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows.front().size())
                    throw ParseError("mixture spec: ragged covariance matrix");
                for (std::size_t c = 0; c < rows[r].size(); ++c)
                    comp.cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        rows[r][c];
            }
            spec.components.push_back(std::move(comp));
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mixture spec: ") + e.what());
    }
}

inline nlohmann::ordered_json mixture_to_json(const MixtureSpec& spec) {
    nlohmann::ordered_json j;
    j["name"] = spec.name;
    j["n_total"] = spec.n_total;
    j["seed"] = spec.seed;
    j["components"] = nlohmann::ordered_json::array();
    for (const auto& comp : spec.components) {
        nlohmann::ordered_json jc;
        jc["weight"] = comp.weight;
        jc["mean"] = std::vector<double>(comp.mean.data(), comp.mean.data() + comp.mean.size());
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < comp.cov.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(comp.cov.cols()));
            for (Eigen::Index c = 0; c < comp.cov.cols(); ++c)
                row[static_cast<std::size_t>(c)] = comp.cov(r, c);
            rows.push_back(row);
        }
        jc["cov"] = rows;
        j["components"].push_back(std::move(jc));
    }
    return j;
}

inline MixtureSpec load_mixture_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_mixture_spec: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("load_mixture_spec: " + path + ": " + e.what());
    }
    MixtureSpec spec = mixture_from_json(j);
    if (spec.name.empty()) spec.name = path;
    return spec;
}

namespace detail {

struct PresetGeometry {
    std::vector<Eigen::Vector2d> centers;
    std::vector<double> sigma;  // one spread per component
};

/// 15 components on a jittered 4x4 grid (one corner dropped), spacing 10.
/// The spread parameter scales the overlap from crisp to heavy.
inline PresetGeometry grid_preset(double sigma) {
    static constexpr std::array<std::array<double, 2>, 15> jitter = {{
        {0.8, -1.2}, {-1.1, 0.5}, {1.4, 0.9},  {-0.3, -0.7}, {0.2, 1.3},
        {-1.4, -0.2}, {0.6, 0.4}, {1.1, -1.0}, {-0.9, 1.1},  {0.3, -0.4},
        {-0.6, -1.3}, {1.2, 0.7}, {-1.3, 0.2}, {0.5, -0.9},  {-0.2, 0.6},
    }};
    PresetGeometry g;
    int idx = 0;
    for (int row = 0; row < 4; ++row)
        for (int col = 0; col < 4; ++col) {
            if (row == 3 && col == 3) continue;
            g.centers.emplace_back(10.0 * col + jitter[static_cast<std::size_t>(idx)][0],
                                   10.0 * row + jitter[static_cast<std::size_t>(idx)][1]);
            g.sigma.push_back(sigma);
            ++idx;
        }
    return g;
}

/// Reduced-spacing variant: 15 components on ten jittered anchor sites
/// (spacing 15). Five alternating sites hold a close pair, a narrow component
/// and a broad one 7.5 apart, so nearest-neighbor spacing is non-uniform;
/// the remaining five sites hold a single mid-spread component.
inline PresetGeometry paired_preset(double slim, double fat, double single_spread) {
    static constexpr std::array<std::array<int, 2>, 10> cells = {{
        {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {2, 2},
    }};
    static constexpr std::array<std::array<double, 2>, 10> jitter = {{
        {0.9, -1.1}, {-1.2, 0.6}, {1.3, 0.8}, {-0.4, -0.8}, {0.3, 1.2},
        {-1.3, -0.3}, {0.7, 0.5}, {1.2, -0.9}, {-0.8, 1.0}, {0.4, -0.5},
    }};
    const double r = 0.7071067811865475;  // 1/sqrt(2)
    const std::array<Eigen::Vector2d, 5> axes = {
        Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(r, r),
        Eigen::Vector2d(1, 0), Eigen::Vector2d(r, -r),
    };
    const double gap = 7.5;
    PresetGeometry g;
    std::size_t pair_idx = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Eigen::Vector2d anchor(15.0 * cells[i][1] + jitter[i][0],
                               15.0 * cells[i][0] + jitter[i][1]);
        if (i % 2 == 0) {
            const Eigen::Vector2d& axis = axes[pair_idx++];
            g.centers.push_back(anchor - 0.5 * gap * axis);
            g.sigma.push_back(slim);
            g.centers.push_back(anchor + 0.5 * gap * axis);
            g.sigma.push_back(fat);
        } else {
            g.centers.push_back(anchor);
            g.sigma.push_back(single_spread);
        }
    }
    return g;
}

/// 15 components in rings: one center, six at radius 8, eight at radius 16.
inline PresetGeometry ring_preset(double sigma) {
    PresetGeometry g;
    g.centers.emplace_back(0.0, 0.0);
    g.sigma.push_back(sigma);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < 6; ++i) {
        double angle = 2.0 * pi * i / 6.0;
        g.centers.emplace_back(8.0 * std::cos(angle), 8.0 * std::sin(angle));
        g.sigma.push_back(sigma);
    }
    for (int i = 0; i < 8; ++i) {
        double angle = 2.0 * pi * i / 8.0 + pi / 8.0;
        g.centers.emplace_back(16.0 * std::cos(angle), 16.0 * std::sin(angle));
        g.sigma.push_back(sigma);
    }
    return g;
}

inline MixtureSpec preset_from_geometry(const PresetGeometry& g, const std::string& name,
                                        int n_total, std::uint64_t seed) {
    static constexpr std::array<std::array<double, 2>, 15> stretch = {{
        {1.00, 0.90}, {0.85, 1.10}, {1.15, 1.00}, {0.95, 0.85}, {1.05, 1.15},
        {0.90, 1.00}, {1.10, 0.95}, {1.00, 1.05}, {0.85, 0.90}, {1.15, 1.10},
        {0.95, 1.00}, {1.05, 0.85}, {0.90, 1.15}, {1.10, 1.00}, {1.00, 0.95},
    }};
    MixtureSpec spec;
    spec.name = name;
    spec.n_total = n_total;
    spec.seed = seed;
    const double weight = 1.0 / static_cast<double>(g.centers.size());
    for (std::size_t i = 0; i < g.centers.size(); ++i) {
        MixtureComponent comp;
        comp.weight = weight;
        comp.mean = g.centers[i];
        double sx = g.sigma[i] * stretch[i % stretch.size()][0];
        double sy = g.sigma[i] * stretch[i % stretch.size()][1];
        comp.cov = Eigen::Vector2d(sx * sx, sy * sy).asDiagonal();
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

}  // namespace detail

/// Shipped 15-component recipes. s1/s2 use a uniform jittered grid with low
/// and moderate overlap; s3/s4 use the reduced, non-uniform spacing layout
/// with increasing overlap; r15 is a ring arrangement. Throws
/// std::invalid_argument for an unknown name.
inline MixtureSpec preset_mixture(const std::string& name, int n_total = 5000,
                                  std::uint64_t seed = 42) {
    if (name == "s1") return detail::preset_from_geometry(detail::grid_preset(1.9), name, n_total, seed);
    if (name == "s2") return detail::preset_from_geometry(detail::grid_preset(2.4), name, n_total, seed);
    if (name == "s3")
        return detail::preset_from_geometry(detail::paired_preset(1.7, 2.5, 1.8), name, n_total, seed);
    if (name == "s4")
        return detail::preset_from_geometry(detail::paired_preset(2.0, 2.9, 2.1), name, n_total, seed);
    if (name == "r15") return detail::preset_from_geometry(detail::ring_preset(0.70), name, n_total, seed);
    throw std::invalid_argument("preset_mixture: unknown preset \"" + name +
                                "\" (expected s1, s2, s3, s4, or r15)");
}

// ---------------------------------------------------------------------------
// Classic sweep
// ---------------------------------------------------------------------------

inline DivergenceBackend backend_from_string(const std::string& s) {
    if (s == "gaussian") return DivergenceBackend::Gaussian;
    if (s == "kde") return DivergenceBackend::Kde;
    throw std::invalid_argument("divergence backend must be \"gaussian\" or \"kde\", got \"" + s +
                                "\"");
}

inline const char* backend_name(DivergenceBackend b) {
    return b == DivergenceBackend::Gaussian ? "gaussian" : "kde";
}

struct SweepConfig {
    int k_min = 2;
    int k_max = 10;
    double m = 2.0;
    double tol = 1e-6;
    int max_iter = 300;
    int restarts = 8;  // FCM initializations screened per k; best objective wins
    std::uint64_t seed = 0;
    DivergenceBackend backend = DivergenceBackend::Gaussian;
};

struct SweepResult {
    SweepConfig config;
    std::vector<CviReport> per_k;
    std::array<std::optional<int>, 8> best_k{};
};

/// Best k for one index across reports (assumed sorted by ascending k):
/// strict improvement by the index's direction, so ties keep the smaller k;
/// undefined entries never win.
inline std::optional<int> select_best_k(const std::vector<CviReport>& reports, Index id) {
    const Direction dir = index_direction(id);
    std::optional<int> best_k;
    double best_value = 0.0;
    for (const auto& report : reports) {
        auto value = report.value(id);
        if (!value) continue;
        bool better = !best_k.has_value() ||
                      (dir == Direction::Minimize ? *value < best_value : *value > best_value);
        if (better) {
            best_k = report.k;
            best_value = *value;
        }
    }
    return best_k;
}

namespace detail {

/// Restarted FCM at one k: screens cfg.restarts seeded initializations at a
/// loose tolerance, then polishes the best-objective one at full tolerance.
/// Restart seeds derive from (seed, k, restart), so runs are independent
/// across k and deterministic.
inline FcmResult fcm_best_of(const Dataset& ds, const SweepConfig& cfg, int k) {
    FcmConfig fcm_cfg;
    fcm_cfg.k = k;
    fcm_cfg.m = cfg.m;
    fcm_cfg.tol = cfg.tol;
    fcm_cfg.max_iter = cfg.max_iter;

    const std::uint64_t k_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
    fcm_cfg.seed = mix_seed(k_seed, 0);
    if (cfg.restarts > 1) {
        FcmConfig screen_cfg = fcm_cfg;
        screen_cfg.tol = std::max(cfg.tol, 1e-3);
        screen_cfg.max_iter = std::min(cfg.max_iter, 60);
        double best_objective = std::numeric_limits<double>::infinity();
        for (int r = 0; r < cfg.restarts; ++r) {
            screen_cfg.seed = mix_seed(k_seed, static_cast<std::uint64_t>(r));
            double objective = fcm(ds, screen_cfg).objective;
            if (objective < best_objective) {
                best_objective = objective;
                fcm_cfg.seed = screen_cfg.seed;
            }
        }
    }
    return fcm(ds, fcm_cfg);
}

}  // namespace detail

/// Restarted FCM and full index evaluation per k in [k_min, k_max]. Any
/// per-k failure yields an all-undefined row instead of aborting the sweep.
inline SweepResult classic_sweep(const Dataset& ds, const SweepConfig& cfg) {
    if (cfg.k_min < 2 || cfg.k_min > cfg.k_max)
        throw std::invalid_argument("classic_sweep: need 2 <= k_min <= k_max");
    if (static_cast<Eigen::Index>(cfg.k_max) > ds.n())
        throw std::invalid_argument("classic_sweep: k_max exceeds the number of points");
    if (cfg.restarts < 1) throw std::invalid_argument("classic_sweep: restarts must be >= 1");
    SweepResult result;
    result.config = cfg;
    result.per_k.reserve(static_cast<std::size_t>(cfg.k_max - cfg.k_min + 1));
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        CviReport report;
        report.k = k;
        try {
            FcmResult run = detail::fcm_best_of(ds, cfg, k);
            report = evaluate_all(ds, run.membership, cfg.backend);
        } catch (const Error&) {
        }
        result.per_k.push_back(std::move(report));
    }
    for (std::size_t i = 0; i < kIndexNames.size(); ++i)
        result.best_k[i] = select_best_k(result.per_k, static_cast<Index>(i));
    return result;
}

// ---------------------------------------------------------------------------
// Alternative evaluation methodology
// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 4> kMeasureNames = {"Rand", "FM", "Jacc", "ARI"};

inline double similarity_measure(std::size_t measure, const PairCounts& pc) {
    switch (measure) {
        case 0: return rand_index(pc);
        case 1: return fowlkes_mallows(pc);
        case 2: return jaccard(pc);
        default: return adjusted_rand(pc);
    }
}

struct AltEvalConfig {
    std::vector<int> k_candidates;
    int runs = 100;
    double m = 2.0;
    double tol = 1e-6;
    int max_iter = 300;
    std::uint64_t seed = 0;
    DivergenceBackend backend = DivergenceBackend::Gaussian;
};

/// Outcome of a single run: the reference-best k per similarity measure, the
/// best k per index, and the success grid (measure x index).
struct AltEvalRunOutcome {
    std::array<std::optional<int>, 4> reference_best_k{};
    std::array<std::optional<int>, 8> index_best_k{};
    std::array<std::array<bool, 8>, 4> success{};
};

struct AltEvalResult {
    AltEvalConfig config;
    std::array<std::array<int, 8>, 4> successes{};  // [measure][index]
};

namespace detail {

inline std::vector<int> sorted_candidates(const AltEvalConfig& cfg, Eigen::Index n) {
    if (cfg.k_candidates.empty())
        throw std::invalid_argument("alt_eval: k_candidates must not be empty");
    std::vector<int> ks = cfg.k_candidates;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks)
        if (k < 2 || static_cast<Eigen::Index>(k) > n)
            throw std::invalid_argument("alt_eval: candidate k=" + std::to_string(k) +
                                        " outside [2, n]");
    return ks;
}

}  // namespace detail

/// One run of the alternative methodology, deterministic in (cfg.seed,
/// run_index). Clusters at every candidate k with a run-specific seed, finds
/// the partition most similar to the labels per measure, and marks each index
/// successful when its best-by-direction k matches that reference.
inline AltEvalRunOutcome alt_eval_run(const Dataset& ds, const AltEvalConfig& cfg, int run_index) {
    CrispPartition truth = partition_from_labels(ds.labels());
    std::vector<int> ks = detail::sorted_candidates(cfg, ds.n());
    const std::uint64_t run_seed = detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(run_index));

    std::vector<CviReport> reports;
    std::vector<std::optional<CrispPartition>> partitions;
    reports.reserve(ks.size());
    partitions.reserve(ks.size());
    for (int k : ks) {
        CviReport report;
        report.k = k;
        std::optional<CrispPartition> partition;
        try {
            FcmConfig fcm_cfg;
            fcm_cfg.k = k;
            fcm_cfg.m = cfg.m;
            fcm_cfg.tol = cfg.tol;
            fcm_cfg.max_iter = cfg.max_iter;
            fcm_cfg.seed = run_seed;
            FcmResult run = fcm(ds, fcm_cfg);
            report = evaluate_all(ds, run.membership, cfg.backend);
            partition = harden(run.membership);
        } catch (const Error&) {
        }
        reports.push_back(std::move(report));
        partitions.push_back(std::move(partition));
    }

    AltEvalRunOutcome outcome;
    for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
        std::optional<int> ref_k;
        double ref_value = 0.0;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (!partitions[i]) continue;
            double value = 0.0;
            try {
                value = similarity_measure(m, pair_counts(*partitions[i], truth));
            } catch (const Error&) {
                continue;
            }
            if (!ref_k.has_value() || value > ref_value) {
                ref_k = ks[i];
                ref_value = value;
            }
        }
        outcome.reference_best_k[m] = ref_k;
    }
    for (std::size_t i = 0; i < kIndexNames.size(); ++i)
        outcome.index_best_k[i] = select_best_k(reports, static_cast<Index>(i));
    for (std::size_t m = 0; m < kMeasureNames.size(); ++m)
        for (std::size_t i = 0; i < kIndexNames.size(); ++i)
            outcome.success[m][i] = outcome.reference_best_k[m].has_value() &&
                                    outcome.index_best_k[i].has_value() &&
                                    *outcome.reference_best_k[m] == *outcome.index_best_k[i];
    return outcome;
}

/// Aggregates alt_eval_run over runs 0..R-1. Counts are monotone under
/// seed-prefix extension: the first R' runs of a larger R contribute exactly
/// the R'-run totals.
inline AltEvalResult alt_eval(const Dataset& ds, const AltEvalConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("alt_eval: runs must be >= 1");
    if (!ds.has_labels()) throw MissingLabelsError("alt_eval: dataset has no ground-truth labels");
    AltEvalResult result;
    result.config = cfg;
    result.config.k_candidates = detail::sorted_candidates(cfg, ds.n());
    for (int r = 0; r < cfg.runs; ++r) {
        AltEvalRunOutcome outcome = alt_eval_run(ds, cfg, r);
        for (std::size_t m = 0; m < kMeasureNames.size(); ++m)
            for (std::size_t i = 0; i < kIndexNames.size(); ++i)
                if (outcome.success[m][i]) ++result.successes[m][i];
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

enum class ReportFormat { Csv, Json };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw std::invalid_argument("report format must be \"csv\" or \"json\", got \"" + s + "\"");
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write to " + path + " failed");
}

inline std::string render_value(const std::optional<double>& v) {
    return v ? detail::format_double(*v) : std::string("NA");
}

inline std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "k";
    for (const char* name : kIndexNames) out << ',' << name;
    out << '\n';
    for (const auto& report : result.per_k) {
        out << report.k;
        for (std::size_t i = 0; i < kIndexNames.size(); ++i)
            out << ',' << render_value(report.values[i]);
        out << '\n';
    }
    return out.str();
}

namespace detail {

inline nlohmann::ordered_json fcm_config_json(double m, double tol, int max_iter,
                                              std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["m"] = m;
    j["tol"] = tol;
    j["max_iter"] = max_iter;
    j["seed"] = seed;
    return j;
}

}  // namespace detail

inline nlohmann::ordered_json sweep_to_json(const SweepResult& result) {
    nlohmann::ordered_json j;
    j["type"] = "sweep";
    j["config"] = detail::fcm_config_json(result.config.m, result.config.tol,
                                          result.config.max_iter, result.config.seed);
    j["config"]["k_min"] = result.config.k_min;
    j["config"]["k_max"] = result.config.k_max;
    j["config"]["divergence"] = backend_name(result.config.backend);
    j["per_k"] = nlohmann::ordered_json::array();
    for (const auto& report : result.per_k) {
        nlohmann::ordered_json row;
        row["k"] = report.k;
        for (std::size_t i = 0; i < kIndexNames.size(); ++i) {
            if (report.values[i])
                row[kIndexNames[i]] = *report.values[i];
            else
                row[kIndexNames[i]] = nullptr;
        }
        j["per_k"].push_back(std::move(row));
    }
    j["best_k"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < kIndexNames.size(); ++i) {
        if (result.best_k[i])
            j["best_k"][kIndexNames[i]] = *result.best_k[i];
        else
            j["best_k"][kIndexNames[i]] = nullptr;
    }
    return j;
}

inline std::string alt_eval_to_csv(const AltEvalResult& result) {
    std::ostringstream out;
    out << "measure";
    for (const char* name : kIndexNames) out << ',' << name;
    out << '\n';
    for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
        out << kMeasureNames[m];
        for (std::size_t i = 0; i < kIndexNames.size(); ++i) out << ',' << result.successes[m][i];
        out << '\n';
    }
    return out.str();
}

inline nlohmann::ordered_json alt_eval_to_json(const AltEvalResult& result) {
    nlohmann::ordered_json j;
    j["type"] = "alt-eval";
    j["config"] = detail::fcm_config_json(result.config.m, result.config.tol,
                                          result.config.max_iter, result.config.seed);
    j["config"]["runs"] = result.config.runs;
    j["config"]["k_candidates"] = result.config.k_candidates;
    j["config"]["divergence"] = backend_name(result.config.backend);
    j["successes"] = nlohmann::ordered_json::object();
    for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
        nlohmann::ordered_json row;
        for (std::size_t i = 0; i < kIndexNames.size(); ++i)
            row[kIndexNames[i]] = result.successes[m][i];
        j["successes"][kMeasureNames[m]] = std::move(row);
    }
    return j;
}

inline void emit_report(const SweepResult& result, ReportFormat format, const std::string& path) {
    if (format == ReportFormat::Csv)
        write_text_file(path, sweep_to_csv(result));
    else
        write_text_file(path, sweep_to_json(result).dump(2) + "\n");
}

inline void emit_report(const AltEvalResult& result, ReportFormat format,
                        const std::string& path) {
    if (format == ReportFormat::Csv)
        write_text_file(path, alt_eval_to_csv(result));
    else
        write_text_file(path, alt_eval_to_json(result).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Run configuration files
// ---------------------------------------------------------------------------

/// Parsed experiment config: a dataset source (CSV path or inline mixture
/// spec), FCM settings with either a fixed k or a k range, the divergence
/// backend, and alt-eval settings.
struct RunConfig {
    std::optional<std::string> dataset_path;
    std::optional<MixtureSpec> mixture;
    std::optional<int> k;
    std::optional<std::array<int, 2>> k_range;
    double m = 2.0;
    double tol = 1e-6;
    int max_iter = 300;
    std::uint64_t seed = 0;
    DivergenceBackend backend = DivergenceBackend::Gaussian;
    std::optional<int> runs;
    std::optional<std::vector<int>> k_list;
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    try {
        RunConfig cfg;
        if (j.contains("dataset")) {
            if (j["dataset"].is_string())
                cfg.dataset_path = j["dataset"].get<std::string>();
            else
                cfg.mixture = mixture_from_json(j["dataset"]);
        }
        if (j.contains("fcm")) {
            const auto& f = j["fcm"];
            if (f.contains("k")) cfg.k = f["k"].get<int>();
            if (f.contains("k_range")) {
                auto range = f["k_range"].get<std::vector<int>>();
                if (range.size() != 2)
                    throw ParseError("run config: fcm.k_range must hold exactly [k_min, k_max]");
                cfg.k_range = {range[0], range[1]};
            }
            cfg.m = f.value("m", cfg.m);
            cfg.tol = f.value("tol", cfg.tol);
            cfg.max_iter = f.value("max_iter", cfg.max_iter);
            cfg.seed = f.value("seed", cfg.seed);
        }
        if (j.contains("divergence")) cfg.backend = backend_from_string(j["divergence"].get<std::string>());
        if (j.contains("runs")) cfg.runs = j["runs"].get<int>();
        if (j.contains("k_list")) cfg.k_list = j["k_list"].get<std::vector<int>>();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("run config: ") + e.what());
    }
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_run_config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("load_run_config: " + path + ": " + e.what());
    }
    return run_config_from_json(j);
}

/// Materializes the config's dataset: loads the CSV if a path is set,
/// otherwise generates from the inline mixture spec.
inline Dataset load_config_dataset(const RunConfig& cfg) {
    if (cfg.dataset_path) return load_csv(*cfg.dataset_path);
    if (cfg.mixture) return generate(*cfg.mixture);
    throw std::invalid_argument("run config: no dataset (need a CSV path or a mixture spec)");
}

}  // namespace jdcvi
