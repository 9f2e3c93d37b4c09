#pragma once

// The biorthogonal family {r_n} of the exponentials inside the truncated
// span, the distances D_n = dist(e_n, span{e_m : m != n}), the best
// approximation remainders Phi_n and the exponential distance bound fits.
//
// r_n is stored by its coefficients in the exponential basis: column n of
// C = G^{-1}. Then <r_n, e_m> = (G C)_{mn} = delta_nm, ||r_n||^2 = C_nn and
// D_n = 1 / ||r_n||.

#include <cstddef>
#include <string>
#include <vector>

#include "muntz/errors.hpp"
#include "muntz/numerics/linalg.hpp"
#include "muntz/spaces.hpp"

namespace muntz {

struct BiorthogonalSystem
{
    SpacePtr space;
    RealMatrix coefficients; // C = G^{-1}, column n holds r_n
    RealVector r_norms;      // sqrt(C_nn)
    RealVector distances;    // 1 / r_norms[n]
    Scalar residual;         // max |G C - I|
    Scalar residual_bound;   // N^2 2^(-bits+8) max|G| max|C|

    std::size_t size() const noexcept { return r_norms.size(); }
    bool within_bound() const { return residual <= residual_bound; }
};

inline BiorthogonalSystem compute_biorthogonal(SpacePtr space)
{
    const TruncatedSpace& s = *space;
    PrecisionScope scope(s.bits);
    const std::size_t n = s.size();
    RealMatrix c(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        RealVector rhs(n);
        rhs[j] = Scalar(1);
        c.set_column(j, s.gram_factor.solve(std::move(rhs)));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            Scalar avg = (c(i, j) + c(j, i)) / Scalar(2);
            c(i, j) = avg;
            c(j, i) = std::move(avg);
        }

    BiorthogonalSystem bio;
    bio.space = std::move(space);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(c(k, k) > Scalar(0)))
            throw InternalConsistencyError("diagonal of the inverse Gram is not positive at n = " +
                                           std::to_string(k + 1));
        Scalar rn = sqrt(c(k, k));
        bio.distances.push_back(Scalar(1) / rn);
        bio.r_norms.push_back(std::move(rn));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Scalar sum = i == j ? Scalar(-1) : Scalar();
            for (std::size_t k = 0; k < n; ++k)
                sum += s.gram(i, k) * c(k, j);
            bio.residual = max(bio.residual, abs(sum));
        }
    bio.residual_bound = solver_residual_bound(n, s.bits, s.gram.max_abs() * max_abs(c));
    bio.coefficients = std::move(c);
    return bio;
}

namespace detail {
inline std::size_t checked_index(const BiorthogonalSystem& bio, std::size_t n)
{
    if (n < 1 || n > bio.size())
        throw UsageError("index " + std::to_string(n) + " out of range 1.." + std::to_string(bio.size()));
    return n - 1;
}
} // namespace detail

// D_n, 1-based.
inline const Scalar& distance(const BiorthogonalSystem& bio, std::size_t n)
{
    return bio.distances[detail::checked_index(bio, n)];
}

inline SpanElement biorthogonal_element(const BiorthogonalSystem& bio, std::size_t n)
{
    const std::size_t k = detail::checked_index(bio, n);
    SpanElement r = SpanElement::zero(bio.size());
    for (std::size_t m = 0; m < bio.size(); ++m)
        r.coeffs[m] = Complex(bio.coefficients(m, k));
    return r;
}

// Phi_n = e_n - D_n^2 r_n, the best approximation of e_n from the others.
inline SpanElement projection_remainder(const BiorthogonalSystem& bio, std::size_t n)
{
    const std::size_t k = detail::checked_index(bio, n);
    PrecisionScope scope(bio.space->bits);
    const Scalar d2 = bio.distances[k] * bio.distances[k];
    SpanElement phi = SpanElement::zero(bio.size());
    for (std::size_t m = 0; m < bio.size(); ++m)
        phi.coeffs[m] = Complex((m == k ? Scalar(1) : Scalar()) - d2 * bio.coefficients(m, k));
    // e_n - D_n^2 r_n has no e_n component analytically
    phi.coeffs[k] = Complex();
    return phi;
}

// One epsilon of the fit  D_n >= m_eps e^{(b - eps) lambda_n}  (or its mirror
// ||r_n|| <= M_eps e^{(-b + eps) lambda_n}). The constant is the extremal one
// that holds on the data, so every margin is >= 0 and the tightest is 0.
struct BoundFit
{
    Scalar epsilon;
    Scalar log_constant; // ln m_eps (distances) or ln M_eps (norms)
    Scalar constant;
    Scalar slope;        // least squares slope of the log quantity against lambda_n
    RealVector margins;
};

inline RealVector default_epsilons(const TruncatedSpace& space)
{
    PrecisionScope scope(space.bits);
    const Scalar len = space.interval.length();
    return {Scalar::parse("0.05") * len, Scalar::parse("0.1") * len, Scalar::parse("0.2") * len};
}

namespace detail {

inline Scalar regression_slope(const RealVector& x, const RealVector& y)
{
    const Scalar n(static_cast<long>(x.size()));
    Scalar mx, my;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    Scalar sxy, sxx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace detail

inline std::vector<BoundFit> fit_distance_bound(const BiorthogonalSystem& bio, const RealVector& epsilons)
{
    if (bio.size() < 3)
        throw UsageError("bound fit needs at least 3 exponents");
    const TruncatedSpace& s = *bio.space;
    PrecisionScope scope(s.bits);
    RealVector log_d;
    for (const auto& d : bio.distances)
        log_d.push_back(log(d));
    const Scalar slope = detail::regression_slope(s.exponents.lambdas, log_d);

    std::vector<BoundFit> fits;
    for (const auto& eps : epsilons) {
        RealVector excess;
        for (std::size_t n = 0; n < bio.size(); ++n)
            excess.push_back(log_d[n] - (s.interval.b() - eps) * s.exponents.lambdas[n]);
        Scalar lo = excess.front();
        for (const auto& e : excess)
            lo = min(lo, e);
        BoundFit fit{eps, lo, exp(lo), slope, {}};
        for (auto& e : excess)
            fit.margins.push_back(e - lo);
        fits.push_back(std::move(fit));
    }
    return fits;
}

// Mirror fit on ||r_n||, computed from the stored norms rather than by
// negating the distance fit.
inline std::vector<BoundFit> fit_norm_bound(const BiorthogonalSystem& bio, const RealVector& epsilons)
{
    if (bio.size() < 3)
        throw UsageError("bound fit needs at least 3 exponents");
    const TruncatedSpace& s = *bio.space;
    PrecisionScope scope(s.bits);
    RealVector log_r;
    for (const auto& r : bio.r_norms)
        log_r.push_back(log(r));
    const Scalar slope = detail::regression_slope(s.exponents.lambdas, log_r);

    std::vector<BoundFit> fits;
    for (const auto& eps : epsilons) {
        RealVector excess;
        for (std::size_t n = 0; n < bio.size(); ++n)
            excess.push_back(log_r[n] + (s.interval.b() - eps) * s.exponents.lambdas[n]);
        Scalar hi = excess.front();
        for (const auto& e : excess)
            hi = max(hi, e);
        BoundFit fit{eps, hi, exp(hi), slope, {}};
        for (auto& e : excess)
            fit.margins.push_back(hi - e);
        fits.push_back(std::move(fit));
    }
    return fits;
}

// ||r_n^{(N+1)} - r_n^{(N)}|| for n <= N, measured in the larger space. The
// larger system's exponents must extend the smaller one's.
inline RealVector truncation_differences(const BiorthogonalSystem& smaller, const BiorthogonalSystem& larger)
{
    const TruncatedSpace& big = *larger.space;
    if (smaller.size() >= larger.size())
        throw UsageError("truncation_differences needs a strictly larger system");
    for (std::size_t i = 0; i < smaller.size(); ++i)
        if (smaller.space->exponents.source[i] != big.exponents.source[i])
            throw UsageError("larger system does not extend the smaller one");
    PrecisionScope scope(big.bits);
    RealVector out;
    for (std::size_t n = 1; n <= smaller.size(); ++n) {
        SpanElement diff = biorthogonal_element(larger, n);
        for (std::size_t m = 0; m < smaller.size(); ++m)
            diff.coeffs[m] -= Complex(smaller.coefficients(m, n - 1));
        out.push_back(norm(diff, big));
    }
    return out;
}

} // namespace muntz
