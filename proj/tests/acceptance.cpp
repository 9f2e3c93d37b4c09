// Acceptance suite: one PASS/FAIL line per criterion on the reference
// configuration (lambda_n = n^2, N = 8, (0, 1), 512 bits) unless noted.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "muntz/muntz.hpp"
#include "muntz/sampling.hpp"

using namespace muntz;

namespace {

constexpr long kBits = 512;

struct Outcome
{
    bool passed = false;
    std::string detail;
};

Scalar S(const char* text) { return Scalar::parse(text); }

std::string sci(const Scalar& x) { return x.to_string(6); }

std::shared_ptr<const BiorthogonalSystem> squares(std::size_t n, long bits = kBits)
{
    PrecisionScope scope(bits);
    return std::make_shared<const BiorthogonalSystem>(
        compute_biorthogonal(build_space(validate_exponents(squares_family(n)), Interval("0", "1"),
                                         PrecisionConfig{bits, std::max(bits, 4096L)})));
}

DiagonalOperator shift(std::shared_ptr<const BiorthogonalSystem> bio, const char* delta)
{
    PrecisionScope scope(bio->space->bits);
    WeightSequence w = make_weights(S(delta), bio->space->exponents, WeightSpec::shift_weights());
    return make_operator(std::move(bio), std::move(w));
}

// Least-squares distance of e_n from the other exponentials, by solving the
// normal equations of the reduced Gram matrix: D^2 = G_nn - g^T G_red^{-1} g.
Scalar least_squares_distance(const TruncatedSpace& s, std::size_t n)
{
    const std::size_t dim = s.size();
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < dim; ++k)
        if (k != n)
            others.push_back(k);
    if (others.empty())
        return s.norms[n];
    RealMatrix red(others.size(), others.size());
    RealVector g(others.size());
    for (std::size_t i = 0; i < others.size(); ++i) {
        g[i] = s.gram(others[i], n);
        for (std::size_t j = 0; j < others.size(); ++j)
            red(i, j) = s.gram(others[i], others[j]);
    }
    const RealVector x = spd_solve(SpdMatrix::from_lower(red), g);
    return sqrt(s.gram(n, n) - dot(g, x));
}

Outcome ac1()
{
    const auto bio = squares(8);
    const TruncatedSpace& s = *bio->space;
    PrecisionScope scope(kBits);
    Scalar worst;
    for (std::size_t n = 1; n <= 8; ++n) {
        const SpanElement r = biorthogonal_element(*bio, n);
        for (std::size_t m = 1; m <= 8; ++m)
            worst = max(worst, abs(inner_product(r, SpanElement::unit(8, m), s) - Complex(n == m ? 1 : 0)));
    }
    return {worst < S("1e-40"), "max |<r_n, e_m> - delta_nm| = " + sci(worst)};
}

Outcome ac2()
{
    const auto bio = squares(6);
    PrecisionScope scope(kBits);
    Scalar worst;
    for (std::size_t n = 0; n < 6; ++n) {
        const Scalar ls = least_squares_distance(*bio->space, n);
        worst = max(worst, abs(bio->distances[n] - ls) / ls);
    }
    return {worst < S("1e-30"), "max relative difference " + sci(worst)};
}

Outcome ac3()
{
    const auto bio = squares(8);
    const TruncatedSpace& s = *bio->space;
    PrecisionScope scope(kBits);
    Scalar stored, recomputed;
    for (std::size_t n = 1; n <= 8; ++n) {
        const Scalar d = distance(*bio, n);
        stored = max(stored, abs(bio->r_norms[n - 1] * d - Scalar(1)));
        recomputed = max(recomputed, abs(norm(biorthogonal_element(*bio, n), s) * d - Scalar(1)));
    }
    const bool ok = stored <= pow2(-kBits + 2) && recomputed < S("1e-30");
    return {ok, "stored |r D - 1| = " + sci(stored) + ", quadratic form " + sci(recomputed)};
}

Outcome ac4()
{
    const auto lo = squares(10, 512);
    const auto hi = squares(10, 1024);
    PrecisionScope scope(1024);
    const auto eps = default_epsilons(*lo->space);
    const auto d_lo = fit_distance_bound(*lo, eps);
    const auto d_hi = fit_distance_bound(*hi, eps);
    const auto r_hi = fit_norm_bound(*hi, eps);
    const Scalar slope = d_hi.front().slope;
    bool ok = slope >= Scalar(0.5) && slope <= Scalar(1.1);
    ok = ok && abs(r_hi.front().slope + slope) <= pow2(-500) * abs(slope);
    for (std::size_t n = 0; n < 10; ++n) {
        ok = ok && log(hi->distances[n]) <= log(hi->space->norms[n]);
        ok = ok && abs(hi->distances[n] - lo->distances[n]) / hi->distances[n] < S("1e-3");
    }
    Scalar change;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        change = max(change, abs(d_hi[i].slope - d_lo[i].slope) / abs(d_hi[i].slope));
        change = max(change, abs(d_hi[i].log_constant - d_lo[i].log_constant) / abs(d_hi[i].log_constant));
    }
    ok = ok && change < S("1e-3");
    return {ok, "slope " + slope.to_string(8) + ", mirror " + r_hi.front().slope.to_string(8) +
                    ", change 512 -> 1024 bits " + sci(change)};
}

Outcome ac5()
{
    const auto bio = squares(8);
    const TruncatedSpace& s = *bio->space;
    PrecisionScope scope(kBits);
    Rng rng(20240601);
    Scalar coeff, resid;
    for (int trial = 0; trial < 50; ++trial) {
        const SpanElement f = random_span_element(rng, 8);
        const auto r = analyze(f, *bio);
        const Scalar scale = max_abs(f.coeffs);
        for (std::size_t n = 0; n < 8; ++n)
            coeff = max(coeff, abs(r.coeffs[n] - f.coeffs[n]) / scale);
        resid = max(resid, r.residual_norm / norm(f, s));
    }
    return {coeff < S("1e-35") && resid < S("1e-35"),
            "coefficient error " + sci(coeff) + ", residual / ||f|| " + sci(resid)};
}

Outcome ac6()
{
    const auto bio = squares(10);
    try {
        const auto r = sweep_partitions(*bio, SweepMode::exhaustive());
        bool positive = true;
        for (const auto& rep : r.reports)
            positive = positive && rep.sigma_min > Scalar(0);
        const bool ok = r.reports.size() == 1024 && r.all_complete && r.undecided == 0 && positive;
        return {ok, std::to_string(r.reports.size()) + " partitions, min sigma " + sci(r.min_sigma) + " (mask " +
                        std::to_string(r.argmin_mask) + "), undecided " + std::to_string(r.undecided)};
    } catch (const InternalConsistencyError& e) {
        return {false, std::string("certification paths disagree: ") + e.what()};
    }
}

Outcome ac7()
{
    const DiagonalOperator op = shift(squares(8), "0.1");
    PrecisionScope scope(kBits);
    Rng rng(7);
    Scalar worst;
    for (int trial = 0; trial < 50; ++trial) {
        const SpanElement f = random_span_element(rng, 8);
        worst = max(worst, shift_consistency(op, f, sample_points(rng, 50, Scalar(-1), Scalar(1))));
    }
    return {worst < S("1e-30"), "max normalized discrepancy " + sci(worst)};
}

Outcome ac8()
{
    const DiagonalOperator op = shift(squares(8), "0.5");
    PrecisionScope scope(kBits);
    Rng rng(8);
    Scalar worst;
    for (int trial = 0; trial < 100; ++trial) {
        const SpanElement h = random_span_element(rng, 8);
        const SpanElement f = random_span_element(rng, 8);
        worst = max(worst, adjoint_consistency(op, h, f));
    }
    return {worst < S("1e-30"), "max normalized residual " + sci(worst)};
}

Outcome ac9()
{
    const DiagonalOperator op = shift(squares(8), "0.5");
    const auto rep = verify_eigensystem(op);
    PrecisionScope scope(kBits);
    bool exact = true;
    Scalar star;
    for (std::size_t k = 0; k < 8; ++k) {
        exact = exact && rep.t_residuals[k].is_zero();
        star = max(star, rep.t_star_residuals[k]);
    }
    return {exact && star < S("1e-35"),
            std::string("T e_k exact: ") + (exact ? "yes" : "no") + ", max T* r_k residual " + sci(star)};
}

Outcome ac10()
{
    const DiagonalOperator op = shift(squares(8), "0.5");
    PrecisionScope scope(kBits);
    const Scalar c = commutator_norm(op);
    const Scalar control = commutator_norm(diagonal_gram(op.space().gram), op.weights.u);
    return {c > Scalar(1000) * pow2(-kBits) && control < S("1e-40"),
            "commutator " + sci(c) + ", diagonal control " + sci(control)};
}

Outcome ac11()
{
    const DiagonalOperator op = shift(squares(8), "0.5");
    PrecisionScope scope(kBits);
    const Scalar eps = tail_epsilon(op);
    bool monotone = true, bounded = true;
    std::size_t first_rise = 0;
    std::ostringstream out;
    out << "eps " << eps.to_string(3) << ";";
    Scalar previous;
    for (std::size_t m = 0; m <= 8; ++m) {
        const TailNorm t = tail_norm(op, m, eps);
        if (m > 0 && t.computed > previous && monotone) {
            monotone = false;
            first_rise = m;
        }
        bounded = bounded && t.computed <= t.analytic_bound;
        const std::string ratio = t.analytic_bound.is_zero() ? "-" : (t.computed / t.analytic_bound).to_string(3);
        out << " m" << m << " " << t.computed.to_string(6) << " (ratio " << ratio << ")";
        previous = t.computed;
    }
    std::string verdict = std::string(monotone ? "non-increasing" : "NOT non-increasing") +
                          (monotone ? "" : " (first rise at m = " + std::to_string(first_rise) + ")") +
                          (bounded ? ", all within bound; " : ", bound VIOLATED; ");
    return {monotone && bounded, verdict + out.str()};
}

Outcome ac12()
{
    const DiagonalOperator op = shift(squares(8), "0.5");
    PrecisionScope scope(kBits);
    Rng rng(12);
    std::size_t failures = 0, undecided = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const SpanElement f = random_supported_element(rng, 8);
        try {
            if (!krylov_synthesis_check(op, f).passed())
                ++failures;
        } catch (const RankUndecided&) {
            ++undecided;
        }
    }
    return {failures == 0 && undecided == 0,
            "100 supports, failures " + std::to_string(failures) + ", undecided " + std::to_string(undecided)};
}

} // namespace

int main()
{
    struct Criterion
    {
        const char* name;
        std::function<Outcome()> run;
        double time_limit; // seconds, 0 = none
    };
    const std::vector<Criterion> criteria{
        {"AC1  biorthogonality", ac1, 10},
        {"AC2  distance vs least squares (N=6)", ac2, 10},
        {"AC3  ||r_n|| D_n = 1", ac3, 0},
        {"AC4  distance asymptotics (N=10)", ac4, 0},
        {"AC5  expansion round-trip", ac5, 0},
        {"AC6  hereditary sweep (N=10)", ac6, 300},
        {"AC7  shift operator (delta=0.1)", ac7, 0},
        {"AC8  adjoint identity", ac8, 0},
        {"AC9  eigen checks", ac9, 0},
        {"AC10 non-normality", ac10, 0},
        {"AC11 tail norms", ac11, 0},
        {"AC12 spectral synthesis", ac12, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0 && secs >= c.time_limit) {
            o.passed = false;
            o.detail += "; over time limit";
        }
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (o.passed ? "PASS " : "FAIL ") << c.name << "  [" << timing << "]  " << o.detail << std::endl;
        failed += o.passed ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
