#include <gtest/gtest.h>

#include "muntz/operators.hpp"
#include "muntz/sampling.hpp"
#include "support.hpp"

using namespace muntz;
using muntz::test::near_rel;
using muntz::test::S;

namespace {

std::shared_ptr<const BiorthogonalSystem> system_for(const std::vector<std::string>& exps, PrecisionConfig cfg = {})
{
    return std::make_shared<const BiorthogonalSystem>(
        compute_biorthogonal(build_space(validate_exponents(exps), Interval("0", "1"), cfg)));
}

DiagonalOperator shift_operator(std::shared_ptr<const BiorthogonalSystem> bio, const Scalar& delta)
{
    PrecisionScope scope(bio->space->bits);
    WeightSequence w = make_weights(delta, bio->space->exponents, WeightSpec::shift_weights());
    return make_operator(std::move(bio), std::move(w));
}

DiagonalOperator ln2_pair()
{
    PrecisionScope scope(512);
    return shift_operator(system_for({"1", "2"}), log(Scalar(2)));
}

} // namespace

TEST(Weights, ShiftWeightsAreExponentialsOfTheShift)
{
    const DiagonalOperator op = ln2_pair();
    PrecisionScope scope(512);
    EXPECT_TRUE(op.weights.shift);
    EXPECT_TRUE(near_rel(op.weights.u[0].re, "0.5", 1e-150));
    EXPECT_TRUE(near_rel(op.weights.u[1].re, "0.25", 1e-150));
    EXPECT_TRUE(op.weights.u[1].im.is_zero());
}

TEST(Weights, CustomListsAreValidated)
{
    PrecisionScope scope(512);
    const auto exps = validate_exponents({"1", "2"});
    const Scalar delta = S("0.5");
    EXPECT_THROW(make_weights(delta, exps, WeightSpec::custom_weights({Complex(S("0.1")), Complex(S("0.1"))})),
                 DistinctnessError);
    const Scalar bound = exp(-delta);
    EXPECT_THROW(make_weights(delta, exps, WeightSpec::custom_weights({Complex(S("1.01") * bound), Complex(S("0.1"))})),
                 WeightBoundError);
    EXPECT_THROW(make_weights(delta, exps, WeightSpec::custom_weights({Complex(), Complex(S("0.1"))})), DomainError);
    EXPECT_THROW(make_weights(delta, exps, WeightSpec::custom_weights({Complex(S("0.1"))})), UsageError);
    EXPECT_THROW(make_weights(Scalar(0), exps, WeightSpec::shift_weights()), DomainError);
    const auto w =
        make_weights(delta, exps, WeightSpec::custom_weights({Complex(S("0.3"), S("0.2")), Complex(S("-0.1"))}));
    EXPECT_FALSE(w.shift);
    try {
        (void)make_weights(delta, exps, WeightSpec::custom_weights({Complex(S("0.1")), Complex(S("0.5"))}));
        FAIL() << "expected WeightBoundError";
    } catch (const WeightBoundError& e) {
        EXPECT_EQ(e.index(), 2u);
    }
}

TEST(Operator, ShiftActsOnFunctionValues)
{
    const DiagonalOperator op = ln2_pair();
    PrecisionScope scope(512);
    SpanElement f = SpanElement::zero(2);
    f.coeffs = {Complex(1), Complex(1)};
    const SpanElement tf = apply_T(op, f);
    const Complex at0 = evaluate(tf, op.space(), Complex(0));
    EXPECT_TRUE(near_rel(at0.re, "0.75", 1e-150));
    const Complex at_half = evaluate(tf, op.space(), Complex(S("0.5")));
    // mpmath, tests/oracles/reference_values.py
    EXPECT_TRUE(near_rel(at_half.re, "1.503931092464825382264397261745247410266", 1e-38));
    const Complex direct = evaluate(f, op.space(), Complex(S("0.5") - log(Scalar(2))));
    EXPECT_TRUE(near_rel(at_half.re, direct.re, 1e-140));
}

TEST(Operator, ShiftConsistencyOnComplexPointsAndSmallShifts)
{
    const auto bio = system_for(squares_family(6));
    PrecisionScope scope(512);
    Rng rng(5);
    for (const char* d : {"0.5", "0.1", "0.01"}) {
        const DiagonalOperator op = shift_operator(bio, S(d));
        const SpanElement f = random_span_element(rng, 6);
        ComplexVector z = sample_points(rng, 20, Scalar(-1), Scalar(1));
        z.emplace_back(S("0.25"), S("3"));
        EXPECT_LT(shift_consistency(op, f, z), S("1e-30")) << "delta " << d;
        // T tends to the identity as delta -> 0
        const SpanElement tf = apply_T(op, f);
        Scalar diff;
        for (std::size_t k = 0; k < 6; ++k)
            diff = max(diff, abs(tf.coeffs[k] - f.coeffs[k]));
        EXPECT_LE(diff, (Scalar(1) - exp(-S(d) * Scalar(36))) * max_abs(f.coeffs) + pow2(-400));
    }
}

TEST(Operator, ShiftConsistencyNeedsShiftWeights)
{
    const auto bio = system_for({"1", "2"});
    PrecisionScope scope(512);
    const auto w = make_weights(S("0.5"), bio->space->exponents,
                                WeightSpec::custom_weights({Complex(S("0.1")), Complex(S("0.2"))}));
    const DiagonalOperator op = make_operator(bio, w);
    EXPECT_THROW(shift_consistency(op, SpanElement::unit(2, 1), {Complex(0)}), UsageError);
}

TEST(Operator, AdjointIdentityOnRandomPairs)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(8)), S("0.5"));
    PrecisionScope scope(512);
    Rng rng(314);
    for (int trial = 0; trial < 100; ++trial) {
        const SpanElement h = random_span_element(rng, 8);
        const SpanElement f = random_span_element(rng, 8);
        EXPECT_LT(adjoint_consistency(op, h, f), S("1e-30"));
    }
    EXPECT_LT(adjoint_consistency(op, SpanElement::unit(8, 1), SpanElement::unit(8, 1)), S("1e-30"));
    EXPECT_LT(adjoint_consistency(op, SpanElement::unit(8, 1), SpanElement::unit(8, 2)), S("1e-30"));
}

TEST(Operator, AdjointIdentityWithComplexWeights)
{
    const auto bio = system_for({"1", "2", "3"});
    PrecisionScope scope(512);
    const auto w = make_weights(
        S("0.5"), bio->space->exponents,
        WeightSpec::custom_weights({Complex(S("0.3"), S("0.4")), Complex(S("-0.2"), S("0.1")), Complex(S("0"), S("-0.2"))}));
    const DiagonalOperator op = make_operator(bio, w);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial)
        EXPECT_LT(adjoint_consistency(op, random_span_element(rng, 3), random_span_element(rng, 3)), S("1e-30"));
    const auto rep = verify_eigensystem(op);
    EXPECT_LT(rep.recovered_eigenvalue_error, S("1e-35"));
    EXPECT_TRUE(near_rel(rep.recovered_adjoint_eigenvalues[0].im, "-0.4", 1e-35));
}

TEST(Eigen, ReferenceSystem)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(8)), S("0.5"));
    const auto rep = verify_eigensystem(op);
    ASSERT_EQ(rep.t_residuals.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_TRUE(rep.t_residuals[k].is_zero());
        EXPECT_LT(rep.t_star_residuals[k], S("1e-35"));
    }
    EXPECT_LT(rep.recovered_eigenvalue_error, S("1e-35"));
    EXPECT_TRUE(rep.kernel_trivial);
    EXPECT_TRUE(rep.simple);
    ASSERT_EQ(rep.spectrum.size(), 9u);
    EXPECT_FALSE(rep.spectrum.front().eigenvalue);
    EXPECT_TRUE(rep.spectrum.front().value.is_zero());
    EXPECT_EQ(rep.spectrum[3].value, op.weights.u[2]);
}

TEST(Commutator, TwoByTwoMatchesOracle)
{
    const DiagonalOperator op = ln2_pair();
    const Scalar c = commutator_norm(op);
    // mpmath, tests/oracles/reference_values.py
    EXPECT_TRUE(near_rel(c, "1.115477451000638638778637711130144311565", 1e-38));
    EXPECT_GT(c, Scalar(1000) * pow2(-512));
    EXPECT_THROW(commutator_norm(op.space().gram, {Complex(1)}), UsageError);
}

TEST(Commutator, OrthogonalControlIsNormal)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(8)), S("0.5"));
    PrecisionScope scope(512);
    EXPECT_LT(commutator_norm(diagonal_gram(op.space().gram), op.weights.u), S("1e-40"));
}

TEST(Commutator, InvariantUnderUnimodularScaling)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(5)), S("0.5"));
    PrecisionScope scope(512);
    const Complex phase(S("0.6"), S("0.8"));
    ComplexVector u = op.weights.u;
    for (auto& x : u)
        x = phase * x;
    EXPECT_TRUE(near_rel(commutator_norm(op.space().gram, u), commutator_norm(op), 1e-100));
}

TEST(Tail, RankOneAndEmptyTails)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(8)), S("0.5"));
    PrecisionScope scope(512);
    const Scalar eps = tail_epsilon(op);
    EXPECT_EQ(eps, S("0.05"));
    const TailNorm last = tail_norm(op, 8, eps);
    EXPECT_TRUE(last.computed.is_zero());
    EXPECT_TRUE(last.analytic_bound.is_zero());
    const TailNorm one = tail_norm(op, 7, eps);
    // rank one: u_8 ||e_8|| ||r_8||, mpmath
    EXPECT_TRUE(near_rel(one.computed, "2.14648622442091519936752519537884207576e-12", 1e-30));
    EXPECT_LE(one.computed, one.analytic_bound);
    for (std::size_t m = 0; m <= 8; ++m) {
        const TailNorm t = tail_norm(op, m, eps);
        EXPECT_LE(t.computed, t.analytic_bound) << "m = " << m;
    }
    EXPECT_THROW(tail_norm(op, 9, eps), UsageError);
    EXPECT_THROW(tail_norm(op, 3, S("0.5")), DomainError);
}

TEST(Tail, HeadTermsAreNotMonotone)
{
    // removing the first spectral term raises the norm for this non-normal T
    const DiagonalOperator op = shift_operator(system_for(squares_family(8)), S("0.5"));
    PrecisionScope scope(512);
    const Scalar eps = tail_epsilon(op);
    // mpmath, top eigenvalue of G^{-1} D G D
    EXPECT_TRUE(near_rel(tail_norm(op, 0, eps).computed, "1.737745591136863239580300884703374673198", 1e-30));
    EXPECT_TRUE(near_rel(tail_norm(op, 1, eps).computed, "2.975989799452404542985402360506723362821", 1e-30));
    EXPECT_TRUE(near_rel(tail_norm(op, 2, eps).computed, "1.146410234740253091657874413994338712665", 1e-30));
}

TEST(Tail, EpsilonFallsBackToHalfDelta)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(4)), S("0.04"));
    PrecisionScope scope(512);
    EXPECT_EQ(tail_epsilon(op), S("0.02"));
}

TEST(Krylov, SingleAndPairSupports)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(8)), S("0.5"));
    PrecisionScope scope(512);
    const auto single = krylov_synthesis_check(op, SpanElement::unit(8, 3));
    EXPECT_EQ(single.dimension, 1u);
    EXPECT_EQ(single.support, (std::vector<std::size_t>{3}));
    EXPECT_TRUE(single.passed());

    SpanElement pair = SpanElement::zero(8);
    pair.coeffs[0] = pair.coeffs[1] = Complex(1);
    const auto two = krylov_synthesis_check(op, pair);
    EXPECT_EQ(two.dimension, 2u);
    EXPECT_TRUE(two.passed());

    const auto none = krylov_synthesis_check(op, SpanElement::zero(8));
    EXPECT_EQ(none.dimension, 0u);
    EXPECT_TRUE(none.passed());
}

TEST(Krylov, RandomSupportsSynthesize)
{
    const DiagonalOperator op = shift_operator(system_for(squares_family(6)), S("0.5"));
    PrecisionScope scope(512);
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const SpanElement f = random_supported_element(rng, 6);
        const auto rep = krylov_synthesis_check(op, f);
        EXPECT_TRUE(rep.passed()) << "trial " << trial;
        EXPECT_LT(rep.krylov_to_eigen_residual, half_precision_tolerance(512));
        EXPECT_LT(rep.eigen_to_krylov_residual, half_precision_tolerance(512));
    }
}
