#pragma once

// The diagonal operator T f = sum <f, r_n> u_n e_n on the truncated span and
// its adjoint T* f = sum <f, e_n> conj(u_n) r_n.
//
// Coordinates are coefficients in the exponential basis. There T = diag(u)
// and T* = G^{-1} diag(conj u) G. Operator norms are taken in the orthonormal
// frame y = L^T x (G = L L^T), where the L^2 norm is the Euclidean one.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "muntz/biorth.hpp"
#include "muntz/errors.hpp"
#include "muntz/numerics/linalg.hpp"
#include "muntz/spaces.hpp"

namespace muntz {

struct WeightSequence
{
    ComplexVector u;
    Scalar delta;
    bool shift = false; // u_n = e^{-delta lambda_n} exactly

    std::size_t size() const noexcept { return u.size(); }
};

struct WeightSpec
{
    enum class Kind { shift, custom };
    Kind kind = Kind::shift;
    ComplexVector custom;

    static WeightSpec shift_weights() { return {}; }
    static WeightSpec custom_weights(ComplexVector u) { return {Kind::custom, std::move(u)}; }
};

// Validates delta > 0, and for custom lists: one weight per exponent, all
// nonzero, pairwise distinct, |u_n| <= e^{-delta lambda_n}.
inline WeightSequence make_weights(const Scalar& delta, const ExponentSequence& exps, const WeightSpec& spec)
{
    if (!(delta > Scalar(0)))
        throw DomainError("delta must be positive");
    WeightSequence w;
    w.delta = delta;
    w.shift = spec.kind == WeightSpec::Kind::shift;
    if (w.shift) {
        for (const auto& lambda : exps.lambdas)
            w.u.emplace_back(exp(-delta * lambda));
        return w;
    }
    if (spec.custom.size() != exps.size())
        throw UsageError("expected " + std::to_string(exps.size()) + " weights, got " +
                         std::to_string(spec.custom.size()));
    for (std::size_t n = 0; n < spec.custom.size(); ++n) {
        const Complex& un = spec.custom[n];
        if (un.is_zero())
            throw DomainError("weight u_" + std::to_string(n + 1) + " is zero");
        for (std::size_t m = 0; m < n; ++m)
            if (spec.custom[m] == un)
                throw DistinctnessError("weights u_" + std::to_string(m + 1) + " and u_" + std::to_string(n + 1) +
                                        " are equal");
        if (abs(un) > exp(-delta * exps.lambdas[n]))
            throw WeightBoundError(n + 1);
    }
    w.u = spec.custom;
    return w;
}

struct DiagonalOperator
{
    std::shared_ptr<const BiorthogonalSystem> bio;
    WeightSequence weights;

    const TruncatedSpace& space() const { return *bio->space; }
    std::size_t size() const noexcept { return weights.size(); }
};

inline DiagonalOperator make_operator(std::shared_ptr<const BiorthogonalSystem> bio, WeightSequence weights)
{
    if (weights.size() != bio->size())
        throw UsageError("weight count does not match the space dimension");
    return {std::move(bio), std::move(weights)};
}

namespace detail {

inline void check_dimension(const DiagonalOperator& op, const SpanElement& f)
{
    if (f.size() != op.size())
        throw UsageError("span element dimension does not match the operator");
}

inline Scalar gram_norm(const ComplexVector& x, const TruncatedSpace& space)
{
    return norm(SpanElement{x}, space);
}

// L^{-T} as a dense matrix.
inline RealMatrix inverse_transpose_factor(const LowerFactor& l)
{
    const std::size_t n = l.dim();
    RealMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        RealVector e(n);
        e[j] = Scalar(1);
        out.set_column(j, l.backward(std::move(e)));
    }
    return out;
}

// L^T diag(d) L^{-T}: the coordinate matrix of a basis-diagonal operator in
// the orthonormal frame.
inline ComplexMatrix orthonormal_frame(const LowerFactor& l, const ComplexVector& d)
{
    const std::size_t n = l.dim();
    const RealMatrix inv_t = inverse_transpose_factor(l);
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex s;
            for (std::size_t k = i; k < n; ++k) // (L^T)_{ik} = L_{ki}, zero for k < i
                if (!d[k].is_zero())
                    s += d[k] * (l.at(k, i) * inv_t(k, j));
            out(i, j) = std::move(s);
        }
    return out;
}

inline ComplexMatrix adjoint(const ComplexMatrix& a)
{
    ComplexMatrix h(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            h(j, i) = conj(a(i, j));
    return h;
}

inline Scalar complex_spectral_norm(const ComplexMatrix& a) { return spectral_norm(real_embedding(a)); }

} // namespace detail

// Coefficientwise c_n -> u_n c_n.
inline SpanElement apply_T(const DiagonalOperator& op, const SpanElement& f)
{
    detail::check_dimension(op, f);
    PrecisionScope scope(op.space().bits);
    SpanElement out = SpanElement::zero(f.size());
    for (std::size_t n = 0; n < f.size(); ++n)
        out.coeffs[n] = op.weights.u[n] * f.coeffs[n];
    return out;
}

// x -> G^{-1} diag(conj u) G x via the cached factor.
inline SpanElement apply_T_star(const DiagonalOperator& op, const SpanElement& f)
{
    detail::check_dimension(op, f);
    const TruncatedSpace& space = op.space();
    PrecisionScope scope(space.bits);
    ComplexVector y = multiply(space.gram, f.coeffs);
    for (std::size_t n = 0; n < y.size(); ++n)
        y[n] = conj(op.weights.u[n]) * y[n];
    return {space.gram_factor.solve(std::move(y))};
}

// |<T h, f> - <h, T* f>| / (||h|| ||f|| max|u_n| + 2^(-bits))
inline Scalar adjoint_consistency(const DiagonalOperator& op, const SpanElement& h, const SpanElement& f)
{
    const TruncatedSpace& space = op.space();
    PrecisionScope scope(space.bits);
    const Complex lhs = inner_product(apply_T(op, h), f, space);
    const Complex rhs = inner_product(h, apply_T_star(op, f), space);
    const Scalar scale = norm(h, space) * norm(f, space) * max_abs(op.weights.u) + pow2(-space.bits);
    return abs(lhs - rhs) / scale;
}

struct SpectrumPoint
{
    Complex value;
    bool eigenvalue = true;
    std::string note;
};

struct EigenReport
{
    RealVector t_residuals;      // max_n |(T e_k - u_k e_k)_n|, exact in coordinates
    RealVector t_star_residuals; // ||T* r_k - conj(u_k) r_k|| / (|u_k| ||r_k||)
    ComplexVector recovered_adjoint_eigenvalues;
    Scalar recovered_eigenvalue_error; // max relative |mu_k - conj(u_k)|
    bool kernel_trivial = false;
    bool simple = false;
    std::vector<SpectrumPoint> spectrum;
};

// Checks T e_k = u_k e_k, T* r_k = conj(u_k) r_k, trivial kernel, simple
// eigenvalues, and lists the spectrum {0} u {u_k}. The adjoint eigenvalues
// are also recovered independently as G-Rayleigh quotients
// <T* r_k, r_k> / <r_k, r_k>.
inline EigenReport verify_eigensystem(const DiagonalOperator& op)
{
    const TruncatedSpace& space = op.space();
    PrecisionScope scope(space.bits);
    const std::size_t n = op.size();
    EigenReport rep;
    rep.kernel_trivial = true;
    rep.simple = true;
    for (std::size_t k = 1; k <= n; ++k) {
        const Complex& uk = op.weights.u[k - 1];
        const SpanElement ek = SpanElement::unit(n, k);
        const SpanElement tek = apply_T(op, ek);
        Scalar r;
        for (std::size_t m = 0; m < n; ++m)
            r = max(r, abs(tek.coeffs[m] - uk * ek.coeffs[m]));
        rep.t_residuals.push_back(std::move(r));

        const SpanElement rk = biorthogonal_element(*op.bio, k);
        const SpanElement trk = apply_T_star(op, rk);
        ComplexVector diff(n);
        for (std::size_t m = 0; m < n; ++m)
            diff[m] = trk.coeffs[m] - conj(uk) * rk.coeffs[m];
        rep.t_star_residuals.push_back(detail::gram_norm(diff, space) / (abs(uk) * op.bio->r_norms[k - 1]));

        const Complex mu = inner_product(trk, rk, space) / inner_product(rk, rk, space);
        rep.recovered_eigenvalue_error = max(rep.recovered_eigenvalue_error, abs(mu - conj(uk)) / abs(uk));
        rep.recovered_adjoint_eigenvalues.push_back(mu);

        if (uk.is_zero())
            rep.kernel_trivial = false;
        for (std::size_t m = 0; m + 1 < k; ++m)
            if (op.weights.u[m] == uk)
                rep.simple = false;
    }
    rep.spectrum.push_back({Complex(), false, "limit point of {u_n}, not an eigenvalue at truncation"});
    for (std::size_t k = 0; k < n; ++k)
        rep.spectrum.push_back({op.weights.u[k], true, "simple eigenvalue, eigenvector e_" + std::to_string(k + 1)});
    return rep;
}

// ||T T* - T* T|| in L^2 for weights u and a Gram matrix G. The commutator is
// self-adjoint, so its norm is the largest eigenvalue magnitude of its
// Hermitian matrix in the orthonormal frame.
inline Scalar commutator_norm(const SpdMatrix& gram, const ComplexVector& u)
{
    if (u.size() < 2)
        throw UsageError("commutator_norm needs N >= 2");
    const LowerFactor l = cholesky_spd(gram);
    const ComplexMatrix t = detail::orthonormal_frame(l, u);
    const ComplexMatrix th = detail::adjoint(t);
    const ComplexMatrix a = multiply(t, th);
    const ComplexMatrix b = multiply(th, t);
    ComplexMatrix k(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            k(i, j) = a(i, j) - b(i, j);
    const RealVector ev = symmetric_eigenvalues(real_embedding(k));
    Scalar top;
    for (const auto& e : ev)
        top = max(top, abs(e));
    return top;
}

inline Scalar commutator_norm(const DiagonalOperator& op)
{
    PrecisionScope scope(op.space().bits);
    return commutator_norm(op.space().gram, op.weights.u);
}

// diag(G): the Gram matrix an orthogonal basis with the same norms would have.
inline SpdMatrix diagonal_gram(const SpdMatrix& gram)
{
    SpdMatrix d(gram.dim());
    for (std::size_t i = 0; i < gram.dim(); ++i)
        d.set(i, i, gram(i, i));
    return d;
}

struct TailNorm
{
    std::size_t cutoff = 0;
    Scalar computed;       // ||T - T_m||
    Scalar analytic_bound; // kappa * M_eps * sum_{n>m} e^{(-delta+eps) lambda_n}
};

// Default epsilon for the tail bound: the smallest default fit epsilon below
// delta, else delta / 2.
inline Scalar tail_epsilon(const DiagonalOperator& op)
{
    PrecisionScope scope(op.space().bits);
    const auto grid = default_epsilons(op.space());
    for (const auto& e : grid)
        if (e < op.weights.delta)
            return e;
    return op.weights.delta / Scalar(2);
}

// ||T - T_m|| with T_m = sum_{n<=m} <., r_n> u_n e_n, against the estimate
//   ||T - T_m|| <= sum_{n>m} ||r_n|| |u_n| ||e_n||
//             <= kappa * M_eps * sum_{n>m} e^{(-delta+eps) lambda_n},
// where M_eps is the fitted constant of ||r_n|| <= M_eps e^{(-b+eps) lambda_n}
// and kappa = max(1, max_n ||e_n|| e^{-b lambda_n}) (kappa = 1 when b - a <= 1).
inline TailNorm tail_norm(const DiagonalOperator& op, std::size_t m, const Scalar& epsilon)
{
    const std::size_t n = op.size();
    if (m > n)
        throw UsageError("cutoff " + std::to_string(m) + " out of range 0.." + std::to_string(n));
    if (!(epsilon > Scalar(0)) || !(epsilon < op.weights.delta))
        throw DomainError("tail bound needs 0 < eps < delta");
    const TruncatedSpace& space = op.space();
    PrecisionScope scope(space.bits);
    TailNorm out;
    out.cutoff = m;
    ComplexVector tail(n);
    for (std::size_t k = m; k < n; ++k)
        tail[k] = op.weights.u[k];
    out.computed = m == n ? Scalar() : detail::complex_spectral_norm(detail::orthonormal_frame(space.gram_factor, tail));

    const Scalar& b = space.interval.b();
    Scalar kappa(1);
    for (std::size_t k = 0; k < n; ++k)
        kappa = max(kappa, space.norms[k] * exp(-b * space.exponents.lambdas[k]));
    Scalar constant;
    if (n >= 3) {
        constant = fit_norm_bound(*op.bio, {epsilon}).front().constant;
    } else {
        Scalar hi;
        for (std::size_t k = 0; k < n; ++k) {
            const Scalar v = op.bio->r_norms[k] * exp((b - epsilon) * space.exponents.lambdas[k]);
            hi = k == 0 ? v : max(hi, v);
        }
        constant = hi;
    }
    Scalar sum;
    for (std::size_t k = m; k < n; ++k)
        sum += exp((epsilon - op.weights.delta) * space.exponents.lambdas[k]);
    out.analytic_bound = kappa * constant * sum;
    return out;
}

// max_z |(T f)(z) - f(z - delta)| / (1 + |f(z - delta)|) over the sample points.
inline Scalar shift_consistency(const DiagonalOperator& op, const SpanElement& f, const ComplexVector& points)
{
    if (!op.weights.shift)
        throw UsageError("shift_consistency needs shift weights u_n = e^{-delta lambda_n}");
    detail::check_dimension(op, f);
    const TruncatedSpace& space = op.space();
    PrecisionScope scope(space.bits);
    const SpanElement tf = apply_T(op, f);
    Scalar worst;
    for (const auto& z : points) {
        const Complex shifted = evaluate(f, space, Complex(z.re - op.weights.delta, z.im));
        const Complex image = evaluate(tf, space, z);
        worst = max(worst, abs(image - shifted) / (Scalar(1) + abs(shifted)));
    }
    return worst;
}

struct KrylovReport
{
    std::vector<std::size_t> support;  // 1-based indices n with c_n numerically nonzero
    std::size_t dimension = 0;         // dim span{f, Tf, ..., T^{N-1} f}
    RealVector relative_singular_values;
    Scalar krylov_to_eigen_residual;   // worst Krylov vector distance from span{e_n : n in S}
    Scalar eigen_to_krylov_residual;   // worst e_n (n in S) distance from the Krylov span
    bool dimension_matches = false;
    bool spans_match = false;
    bool passed() const { return dimension_matches && spans_match; }
};

// The smallest T-invariant subspace containing f is its Krylov space; with
// distinct weights it must equal span{e_n : c_n != 0}. Rank decisions use the
// relative threshold 2^(-bits/2) on singular values of the normalized Krylov
// vectors in the orthonormal frame, and abort with RankUndecided when a value
// lies within [2^(-3 bits/4), 2^(-bits/4)].
inline KrylovReport krylov_synthesis_check(const DiagonalOperator& op, const SpanElement& f)
{
    detail::check_dimension(op, f);
    const TruncatedSpace& space = op.space();
    const long bits = space.bits;
    PrecisionScope scope(bits);
    const std::size_t n = op.size();
    const Scalar tol = half_precision_tolerance(bits);
    const Scalar band_hi = pow2(-bits / 4);
    const Scalar band_lo = pow2(-(3 * bits) / 4);
    const LowerFactor& l = space.gram_factor;

    KrylovReport rep;
    const Scalar cmax = max_abs(f.coeffs);
    for (std::size_t k = 0; k < n; ++k)
        if (!cmax.is_zero() && abs(f.coeffs[k]) > tol * cmax)
            rep.support.push_back(k + 1);
    if (cmax.is_zero()) {
        rep.dimension_matches = rep.spans_match = true;
        return rep;
    }

    // Krylov vectors u^k o c in the orthonormal frame, normalized.
    std::vector<RealVector> krylov;
    ComplexMatrix kmat(n, n);
    ComplexVector v = f.coeffs;
    for (std::size_t k = 0; k < n; ++k) {
        ComplexVector y = l.apply_transpose(v);
        Scalar nrm;
        for (const auto& c : y)
            nrm += norm2(c);
        nrm = sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = y[i] / nrm;
            kmat(i, k) = y[i];
        }
        krylov.push_back(real_embedding(y));
        for (std::size_t i = 0; i < n; ++i)
            v[i] = op.weights.u[i] * v[i];
    }
    const auto sv = singular_values(real_embedding(kmat));
    const Scalar top = sv.values.front();
    std::size_t real_rank = 0;
    for (const auto& s : sv.values) {
        const Scalar rel = s / top;
        if (rel > band_lo && rel < band_hi)
            throw RankUndecided("Krylov singular value " + rel.to_string(10) + " lies in the guard band at " +
                                std::to_string(bits) + " bits");
        if (rel > tol)
            ++real_rank;
        rep.relative_singular_values.push_back(rel);
    }
    if (real_rank % 2)
        throw InternalConsistencyError("real embedding produced an odd rank");
    rep.dimension = real_rank / 2;
    rep.dimension_matches = rep.dimension == rep.support.size();

    std::vector<RealVector> krylov_basis(sv.left.begin(), sv.left.begin() + static_cast<std::ptrdiff_t>(real_rank));

    // Orthonormal basis of span{e_n : n in S} (complex span, so both e and i e).
    RealMatrix eig(2 * n, 2 * rep.support.size());
    std::vector<RealVector> eigen_vectors;
    for (std::size_t j = 0; j < rep.support.size(); ++j) {
        RealVector e(n);
        e[rep.support[j] - 1] = Scalar(1);
        RealVector y = l.apply_transpose(e);
        const Scalar nrm = norm(y);
        RealVector re(2 * n), im(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            re[i] = y[i] / nrm;
            im[i + n] = re[i];
            eig(i, 2 * j) = re[i];
            eig(i + n, 2 * j + 1) = re[i];
        }
        eigen_vectors.push_back(std::move(re));
        eigen_vectors.push_back(std::move(im));
    }
    const auto esv = singular_values(eig);
    std::vector<RealVector> eigen_basis;
    for (std::size_t j = 0; j < esv.left.size(); ++j)
        if (esv.values[j] / esv.values.front() > tol)
            eigen_basis.push_back(esv.left[j]);

    for (const auto& kv : krylov)
        rep.krylov_to_eigen_residual = max(rep.krylov_to_eigen_residual, projection_residual(eigen_basis, kv));
    for (const auto& ev : eigen_vectors)
        rep.eigen_to_krylov_residual = max(rep.eigen_to_krylov_residual, projection_residual(krylov_basis, ev));
    rep.spans_match = rep.krylov_to_eigen_residual < tol && rep.eigen_to_krylov_residual < tol;
    return rep;
}

} // namespace muntz
