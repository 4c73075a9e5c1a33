#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "jdcvi/core.hpp"
#include "jdcvi/errors.hpp"

namespace jdcvi {

/// Point-pair agreement counts between two partitions of the same dataset:
///   a  same cluster in both
///   b  different cluster in both
///   c  same in the first, different in the second
///   d  different in the first, same in the second
struct PairCounts {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d = 0;

    std::int64_t total() const { return a + b + c + d; }
};

/// Counts agreeing and disagreeing point pairs through the k1 x k2
/// contingency table, in O(n + k1*k2) instead of O(n^2).
inline PairCounts pair_counts(const CrispPartition& p1, const CrispPartition& p2) {
    if (p1.n() != p2.n()) throw LengthMismatchError("pair_counts: partitions differ in size");
    const std::int64_t n = static_cast<std::int64_t>(p1.n());
    if (n < 2) throw UndefinedSimilarityError("pair_counts: fewer than two points, no pairs");

    std::vector<std::int64_t> table(static_cast<std::size_t>(p1.k) * static_cast<std::size_t>(p2.k),
                                    0);
    std::vector<std::int64_t> rows(static_cast<std::size_t>(p1.k), 0);
    std::vector<std::int64_t> cols(static_cast<std::size_t>(p2.k), 0);
    for (std::size_t j = 0; j < p1.assignment.size(); ++j) {
        int r = p1.assignment[j];
        int c = p2.assignment[j];
        ++table[static_cast<std::size_t>(r) * static_cast<std::size_t>(p2.k) +
                static_cast<std::size_t>(c)];
        ++rows[static_cast<std::size_t>(r)];
        ++cols[static_cast<std::size_t>(c)];
    }
    auto choose2 = [](std::int64_t v) { return v * (v - 1) / 2; };
    std::int64_t a = 0;
    for (std::int64_t cell : table) a += choose2(cell);
    std::int64_t s1 = 0;
    for (std::int64_t r : rows) s1 += choose2(r);
    std::int64_t s2 = 0;
    for (std::int64_t c : cols) s2 += choose2(c);
    const std::int64_t t = choose2(n);

    PairCounts counts;
    counts.a = a;
    counts.c = s1 - a;
    counts.d = s2 - a;
    counts.b = t - counts.a - counts.c - counts.d;
    return counts;
}

/// Rand index: fraction of pairs both partitions agree on. In [0, 1].
inline double rand_index(const PairCounts& pc) {
    return static_cast<double>(pc.a + pc.b) / static_cast<double>(pc.total());
}

/// Fowlkes-Mallows: a / sqrt((a+c)(a+d)), the geometric mean of the two
/// pairwise precisions. Undefined when either partition has no co-clustered
/// pair.
inline double fowlkes_mallows(const PairCounts& pc) {
    const double m1 = static_cast<double>(pc.a + pc.c);
    const double m2 = static_cast<double>(pc.a + pc.d);
    if (m1 == 0.0 || m2 == 0.0)
        throw UndefinedSimilarityError("fowlkes_mallows: a partition has no co-clustered pair");
    return static_cast<double>(pc.a) / std::sqrt(m1 * m2);
}

/// Jaccard: a / (a + c + d). Undefined when both partitions are all
/// singletons.
inline double jaccard(const PairCounts& pc) {
    const std::int64_t denom = pc.a + pc.c + pc.d;
    if (denom == 0)
        throw UndefinedSimilarityError("jaccard: both partitions are all singletons");
    return static_cast<double>(pc.a) / static_cast<double>(denom);
}

/// Adjusted Rand: (a - E) / (M - E) with E = (a+c)(a+d)/T the chance-level
/// agreement and M = ((a+c) + (a+d)) / 2. Equals 1 for identical partitions
/// and is 0 in expectation for independent ones. Undefined when M = E.
inline double adjusted_rand(const PairCounts& pc) {
    const double m1 = static_cast<double>(pc.a + pc.c);
    const double m2 = static_cast<double>(pc.a + pc.d);
    const double t = static_cast<double>(pc.total());
    const double expected = m1 * m2 / t;
    const double max_term = (m1 + m2) / 2.0;
    if (max_term == expected)
        throw UndefinedSimilarityError("adjusted_rand: zero denominator");
    return (static_cast<double>(pc.a) - expected) / (max_term - expected);
}

inline double rand_index(const CrispPartition& p1, const CrispPartition& p2) {
    return rand_index(pair_counts(p1, p2));
}
inline double fowlkes_mallows(const CrispPartition& p1, const CrispPartition& p2) {
    return fowlkes_mallows(pair_counts(p1, p2));
}
inline double jaccard(const CrispPartition& p1, const CrispPartition& p2) {
    return jaccard(pair_counts(p1, p2));
}
inline double adjusted_rand(const CrispPartition& p1, const CrispPartition& p2) {
    return adjusted_rand(pair_counts(p1, p2));
}

}  // namespace jdcvi
