#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "jdcvi/core.hpp"
#include "jdcvi/errors.hpp"
#include "jdcvi/similarity.hpp"

namespace {

using namespace jdcvi;

PairCounts brute_force_counts(const CrispPartition& p1, const CrispPartition& p2) {
    PairCounts counts;
    const std::size_t n = p1.assignment.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool together1 = p1.assignment[i] == p1.assignment[j];
            bool together2 = p2.assignment[i] == p2.assignment[j];
            if (together1 && together2)
                ++counts.a;
            else if (!together1 && !together2)
                ++counts.b;
            else if (together1)
                ++counts.c;
            else
                ++counts.d;
        }
    return counts;
}

CrispPartition random_partition(std::mt19937_64& rng, int n, int k_max) {
    std::uniform_int_distribution<int> pick_k(1, k_max);
    int k = pick_k(rng);
    std::uniform_int_distribution<int> pick_id(0, k - 1);
    std::vector<int> assignment(static_cast<std::size_t>(n));
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    for (int& id : assignment) {
        id = pick_id(rng);
        used[static_cast<std::size_t>(id)] = true;
    }
    // compact unused ids so the partition constructor accepts k
    std::vector<int> remap(static_cast<std::size_t>(k), 0);
    int next = 0;
    for (int i = 0; i < k; ++i)
        if (used[static_cast<std::size_t>(i)]) remap[static_cast<std::size_t>(i)] = next++;
    for (int& id : assignment) id = remap[static_cast<std::size_t>(id)];
    return CrispPartition(std::move(assignment), next);
}

TEST(PairCounts, MatchesBruteForceOnRandomPairs) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick_n(2, 100);
    for (int trial = 0; trial < 200; ++trial) {
        int n = pick_n(rng);
        CrispPartition p1 = random_partition(rng, n, 8);
        CrispPartition p2 = random_partition(rng, n, 8);
        PairCounts fast = pair_counts(p1, p2);
        PairCounts slow = brute_force_counts(p1, p2);
        EXPECT_EQ(fast.a, slow.a);
        EXPECT_EQ(fast.b, slow.b);
        EXPECT_EQ(fast.c, slow.c);
        EXPECT_EQ(fast.d, slow.d);
        EXPECT_EQ(fast.total(), static_cast<std::int64_t>(n) * (n - 1) / 2);
    }
}

TEST(PairCounts, ValidatesInputs) {
    CrispPartition p1({0, 1, 0}, 2);
    CrispPartition p2({0, 1}, 2);
    EXPECT_THROW(pair_counts(p1, p2), LengthMismatchError);
    CrispPartition single({0}, 1);
    EXPECT_THROW(pair_counts(single, single), UndefinedSimilarityError);
}

TEST(Similarity, IdenticalPartitionsScoreOneEverywhere) {
    CrispPartition p({0, 0, 1, 2, 2, 1}, 3);
    EXPECT_DOUBLE_EQ(rand_index(p, p), 1.0);
    EXPECT_DOUBLE_EQ(fowlkes_mallows(p, p), 1.0);
    EXPECT_DOUBLE_EQ(jaccard(p, p), 1.0);
    EXPECT_DOUBLE_EQ(adjusted_rand(p, p), 1.0);
}

TEST(Similarity, MatchesTextbookThreePointExample) {
    CrispPartition p1({0, 0, 1}, 2);
    CrispPartition p2({0, 1, 1}, 2);
    PairCounts counts = pair_counts(p1, p2);
    EXPECT_EQ(counts.a, 0);
    EXPECT_EQ(counts.b, 1);
    EXPECT_EQ(counts.c, 1);
    EXPECT_EQ(counts.d, 1);
    EXPECT_DOUBLE_EQ(rand_index(counts), 1.0 / 3.0);
}

TEST(Similarity, MatchesFourPointHandValues) {
    CrispPartition p1({0, 0, 1, 1}, 2);
    CrispPartition p2({0, 0, 1, 2}, 3);
    PairCounts counts = pair_counts(p1, p2);
    EXPECT_DOUBLE_EQ(rand_index(counts), 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(fowlkes_mallows(counts), 1.0 / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(jaccard(counts), 0.5);
    EXPECT_DOUBLE_EQ(adjusted_rand(counts), 4.0 / 7.0);
}

TEST(Similarity, SingletonPartitionsAreUndefinedWhereExpected) {
    CrispPartition singletons({0, 1, 2}, 3);
    EXPECT_DOUBLE_EQ(rand_index(singletons, singletons), 1.0);
    EXPECT_THROW(fowlkes_mallows(singletons, singletons), UndefinedSimilarityError);
    EXPECT_THROW(jaccard(singletons, singletons), UndefinedSimilarityError);
    EXPECT_THROW(adjusted_rand(singletons, singletons), UndefinedSimilarityError);
}

TEST(Similarity, BoundsAndSymmetryOnRandomPairs) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> pick_n(3, 60);
    for (int trial = 0; trial < 100; ++trial) {
        int n = pick_n(rng);
        CrispPartition p1 = random_partition(rng, n, 5);
        CrispPartition p2 = random_partition(rng, n, 5);
        PairCounts forward = pair_counts(p1, p2);
        PairCounts backward = pair_counts(p2, p1);

        double r = rand_index(forward);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
        EXPECT_DOUBLE_EQ(r, rand_index(backward));

        try {
            double j = jaccard(forward);
            EXPECT_GE(j, 0.0);
            EXPECT_LE(j, 1.0);
            EXPECT_DOUBLE_EQ(j, jaccard(backward));
        } catch (const UndefinedSimilarityError&) {
        }
        try {
            double ari = adjusted_rand(forward);
            EXPECT_LE(ari, 1.0 + 1e-12);
            EXPECT_DOUBLE_EQ(ari, adjusted_rand(backward));
        } catch (const UndefinedSimilarityError&) {
        }
        try {
            double fm = fowlkes_mallows(forward);
            EXPECT_GE(fm, 0.0);
            EXPECT_LE(fm, 1.0 + 1e-12);
            EXPECT_DOUBLE_EQ(fm, fowlkes_mallows(backward));
        } catch (const UndefinedSimilarityError&) {
        }
    }
}

TEST(Similarity, RefinementKeepsJaccardBelowOne) {
    CrispPartition coarse({0, 0, 0, 0, 1, 1}, 2);
    CrispPartition fine({0, 0, 1, 1, 2, 2}, 3);
    PairCounts counts = pair_counts(coarse, fine);
    EXPECT_EQ(counts.d, 0);
    EXPECT_GT(counts.c, 0);
    EXPECT_LT(jaccard(counts), 1.0);
    EXPECT_LT(adjusted_rand(counts), 1.0);
}

}  // namespace
