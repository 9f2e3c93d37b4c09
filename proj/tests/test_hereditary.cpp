#include <gtest/gtest.h>

#include "muntz/hereditary.hpp"
#include "support.hpp"

using namespace muntz;
using muntz::test::near_rel;
using muntz::test::S;

namespace {

BiorthogonalSystem system_for(std::size_t n)
{
    return compute_biorthogonal(build_space(validate_exponents(squares_family(n)), Interval("0", "1"), {}));
}

} // namespace

TEST(Partition, MaskConvention)
{
    const Partition p(4, 0b0101);
    EXPECT_EQ(p.n1(), (std::vector<std::size_t>{2, 4}));
    EXPECT_EQ(p.n2(), (std::vector<std::size_t>{1, 3}));
    EXPECT_TRUE(p.in_n2(1));
    EXPECT_FALSE(p.in_n2(2));
    EXPECT_EQ(p.dual().mask(), 0b1010u);
    EXPECT_EQ(p.dual().dual().mask(), p.mask());
    EXPECT_EQ(Partition::from_sets(4, {2, 4}, {1, 3}).mask(), p.mask());
}

TEST(Partition, RejectsBadSets)
{
    EXPECT_THROW(Partition(0, 0), UsageError);
    EXPECT_THROW(Partition(64, 0), UsageError);
    EXPECT_THROW(Partition(3, 0b1000), UsageError);
    EXPECT_THROW(Partition::from_sets(3, {1, 2}, {2, 3}), UsageError);
    EXPECT_THROW(Partition::from_sets(3, {1}, {3}), UsageError);
    EXPECT_THROW(Partition::from_sets(3, {0, 1}, {2, 3}), UsageError);
    EXPECT_THROW(Partition::from_sets(3, {1, 2}, {4}), UsageError);
}

TEST(MixedGram, BlockOrderAndCrossBlock)
{
    const auto b = system_for(4);
    const TruncatedSpace& s = *b.space;
    PrecisionScope scope(s.bits);
    // N1 = {2, 4}, N2 = {1, 3}: order e_2, e_4, r_1, r_3
    const SpdMatrix m = mixed_gram(b, Partition(4, 0b0101));
    EXPECT_EQ(m(0, 0), s.gram(1, 1));
    EXPECT_EQ(m(1, 0), s.gram(3, 1));
    EXPECT_EQ(m(2, 2), b.coefficients(0, 0));
    EXPECT_EQ(m(3, 2), b.coefficients(2, 0));
    // <e_n, r_m> = delta_nm; n in N1 and m in N2 never coincide
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 2; j < 4; ++j)
            EXPECT_LT(abs(m(i, j)), S("1e-40"));
}

TEST(MixedGram, AllEAndAllRAreTheGramAndItsInverse)
{
    const auto b = system_for(3);
    PrecisionScope scope(b.space->bits);
    const SpdMatrix e = mixed_gram(b, Partition(3, 0));
    const SpdMatrix r = mixed_gram(b, Partition(3, 0b111));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(e(i, j), b.space->gram(i, j));
            EXPECT_EQ(r(i, j), b.coefficients(i, j));
        }
    EXPECT_THROW(mixed_gram(b, Partition(4, 0)), UsageError);
}

TEST(Completeness, SinglePartitionReport)
{
    const auto b = system_for(4);
    const auto rep = completeness_metric(b, Partition(4, 0b0101));
    EXPECT_TRUE(rep.complete);
    EXPECT_TRUE(rep.cholesky_ok);
    EXPECT_FALSE(rep.undecided);
    EXPECT_EQ(rep.null_dimension, 0u);
    EXPECT_LT(rep.entry_residual, S("1e-40"));
    // mpmath, tests/oracles/reference_values.py
    EXPECT_TRUE(near_rel(rep.sigma_min, "1.998657828280404490473468995666333845583e-1", 1e-30));
}

TEST(Sweep, ExhaustiveFourIndexSystem)
{
    const auto b = system_for(4);
    const auto r = sweep_partitions(b, SweepMode::exhaustive(), 2);
    ASSERT_EQ(r.reports.size(), 16u);
    for (std::size_t i = 0; i < 16; ++i)
        EXPECT_EQ(r.reports[i].partition.mask(), i);
    EXPECT_TRUE(r.all_complete);
    EXPECT_EQ(r.undecided, 0u);
    EXPECT_EQ(r.argmin_mask, 0u);
    EXPECT_TRUE(near_rel(r.min_sigma, "2.824341076213557098870333364733121903141e-3", 1e-30));
    EXPECT_LE(r.min_sigma, r.median_sigma);
}

TEST(Sweep, ThreadCountDoesNotChangeResults)
{
    const auto b = system_for(5);
    const auto one = sweep_partitions(b, SweepMode::exhaustive(), 1);
    const auto three = sweep_partitions(b, SweepMode::exhaustive(), 3);
    ASSERT_EQ(one.reports.size(), three.reports.size());
    for (std::size_t i = 0; i < one.reports.size(); ++i)
        EXPECT_EQ(one.reports[i].sigma_min, three.reports[i].sigma_min);
    EXPECT_EQ(one.median_sigma, three.median_sigma);
}

TEST(Sweep, RandomSampleIsSeeded)
{
    const auto b = system_for(8);
    const auto x = sweep_partitions(b, SweepMode::random_sample(12, 99));
    const auto y = sweep_partitions(b, SweepMode::random_sample(12, 99));
    const auto z = sweep_partitions(b, SweepMode::random_sample(12, 100));
    ASSERT_EQ(x.reports.size(), 12u);
    bool differs = false;
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(x.reports[i].partition.mask(), y.reports[i].partition.mask());
        EXPECT_LT(x.reports[i].partition.mask(), 256u);
        differs = differs || x.reports[i].partition.mask() != z.reports[i].partition.mask();
    }
    EXPECT_TRUE(differs);
    EXPECT_TRUE(x.all_complete);
}

TEST(Sweep, ExhaustiveLimit)
{
    const auto b = system_for(15);
    EXPECT_THROW(sweep_partitions(b, SweepMode::exhaustive()), UsageError);
}

TEST(Sweep, DualPartitionsAreBothComplete)
{
    const auto b = system_for(6);
    for (std::uint64_t m : {0b000111u, 0b101010u, 0b110001u}) {
        const Partition p(6, m);
        EXPECT_TRUE(completeness_metric(b, p).complete) << m;
        EXPECT_TRUE(completeness_metric(b, p.dual()).complete) << m;
    }
}

TEST(MixedGram, TwoByTwoExample)
{
    const auto b = compute_biorthogonal(build_space(validate_exponents({"1", "2"}), Interval("0", "1"), {}));
    PrecisionScope scope(b.space->bits);
    const SpdMatrix m = mixed_gram(b, Partition::from_sets(2, {1}, {2}));
    EXPECT_TRUE(near_rel(m(0, 0), "3.19452804946532511361521373028750390659", 1e-38));
    EXPECT_TRUE(near_rel(m(1, 1), "1.369796648460230521573320809904267209941", 1e-38));
    EXPECT_LT(abs(m(1, 0)), S("1e-100"));
}
