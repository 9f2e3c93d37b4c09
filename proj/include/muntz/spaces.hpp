#pragma once

// Exponent sequences, the interval, closed-form Gram matrices and finite
// Dirichlet polynomials sum_n c_n e^{lambda_n z}: the finite-dimensional
// stand-in for the closed span of {e^{lambda_n t}} in L^2(a, b).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "muntz/errors.hpp"
#include "muntz/interval.hpp"
#include "muntz/numerics/complex.hpp"
#include "muntz/numerics/linalg.hpp"
#include "muntz/numerics/matrix.hpp"
#include "muntz/numerics/scalar.hpp"

namespace muntz {

// Validated truncation lambda_1 < ... < lambda_N. The decimal sources are kept
// so a rerun at higher precision converts them again instead of reusing
// rounded values.
struct ExponentSequence
{
    std::vector<std::string> source; // ascending, parallel to lambdas
    RealVector lambdas;
    Scalar gap;                      // min consecutive difference; +inf when N = 1
    Scalar muntz_partial_sum;        // sum of 1/lambda_n

    std::size_t size() const noexcept { return lambdas.size(); }
};

inline ExponentSequence validate_exponents(const std::vector<std::string>& raw)
{
    if (raw.empty())
        throw DomainError("exponent list is empty");
    std::vector<std::pair<Scalar, std::string>> parsed;
    parsed.reserve(raw.size());
    for (const auto& text : raw) {
        Scalar v = Scalar::parse(text);
        if (!(v > Scalar(0)))
            throw DomainError("exponent must be positive, got '" + text + "'");
        parsed.emplace_back(std::move(v), text);
    }
    std::stable_sort(parsed.begin(), parsed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    ExponentSequence seq;
    seq.gap = Scalar(std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (i > 0) {
            if (parsed[i].first == seq.lambdas.back())
                throw DistinctnessError("exponents '" + seq.source.back() + "' and '" + parsed[i].second +
                                        "' are equal");
            seq.gap = min(seq.gap, parsed[i].first - seq.lambdas.back());
        }
        seq.muntz_partial_sum += Scalar(1) / parsed[i].first;
        seq.lambdas.push_back(std::move(parsed[i].first));
        seq.source.push_back(std::move(parsed[i].second));
    }
    return seq;
}

// Re-converts the decimal sources at the current working precision.
inline ExponentSequence rebound(const ExponentSequence& seq) { return validate_exponents(seq.source); }

// lambda_n = n^2, n = 1..N. Satisfies sum 1/lambda_n < inf and gap >= 3 in
// the infinite limit.
inline std::vector<std::string> squares_family(std::size_t n)
{
    if (n == 0)
        throw DomainError("family size must be positive");
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= n; ++k)
        out.push_back(std::to_string(k * k));
    return out;
}

namespace detail {

// Exact decimal as digits * 10^exponent.
struct Decimal
{
    bool negative = false;
    std::string digits; // no sign, may carry leading zeros
    long exponent = 0;
};

inline Decimal parse_decimal(const std::string& text)
{
    if (!Scalar::is_decimal_literal(text))
        throw DomainError("not a decimal number: '" + text + "'");
    Decimal d;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-')
        d.negative = text[i++] == '-';
    for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
        if (text[i] == '.')
            continue;
        d.digits += text[i];
    }
    const auto dot = text.find('.');
    const auto e = text.find_first_of("eE");
    if (dot != std::string::npos)
        d.exponent -= static_cast<long>((e == std::string::npos ? text.size() : e) - dot - 1);
    if (e != std::string::npos)
        d.exponent += std::stol(text.substr(e + 1));
    return d;
}

inline Decimal multiply(const Decimal& x, const Decimal& y)
{
    std::vector<int> acc(x.digits.size() + y.digits.size(), 0);
    for (std::size_t i = x.digits.size(); i-- > 0;)
        for (std::size_t j = y.digits.size(); j-- > 0;) {
            const std::size_t pos = i + j + 1;
            const int v = acc[pos] + (x.digits[i] - '0') * (y.digits[j] - '0');
            acc[pos] = v % 10;
            acc[pos - 1] += v / 10;
        }
    Decimal r;
    r.negative = x.negative != y.negative;
    r.exponent = x.exponent + y.exponent;
    for (int d : acc)
        r.digits += static_cast<char>('0' + d);
    return r;
}

inline std::string to_text(const Decimal& d)
{
    const auto first = d.digits.find_first_not_of('0');
    if (first == std::string::npos)
        return "0";
    std::string out = (d.negative ? "-" : "") + d.digits.substr(first);
    if (d.exponent != 0)
        out += "e" + std::to_string(d.exponent);
    return out;
}

} // namespace detail

// lambda_n = q r^n, n = 1..N, as exact decimal strings. With q > 0 and r > 1
// the infinite sequence has sum 1/lambda_n < inf and gap q r (r - 1) > 0.
inline std::vector<std::string> geometric_family(const std::string& q, const std::string& r, std::size_t n)
{
    if (n == 0)
        throw DomainError("family size must be positive");
    if (!(Scalar::parse(q) > Scalar(0)))
        throw DomainError("geometric family needs q > 0");
    if (!(Scalar::parse(r) > Scalar(1)))
        throw DomainError("geometric family needs r > 1");
    const auto ratio = detail::parse_decimal(r);
    auto term = detail::parse_decimal(q);
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= n; ++k) {
        term = detail::multiply(term, ratio);
        out.push_back(detail::to_text(term));
    }
    return out;
}

// Finite Dirichlet polynomial f(z) = sum_n coeffs[n] e^{lambda_n z}.
struct SpanElement
{
    ComplexVector coeffs;

    std::size_t size() const noexcept { return coeffs.size(); }

    static SpanElement zero(std::size_t n) { return {ComplexVector(n)}; }

    // e_k, 1-based
    static SpanElement unit(std::size_t n, std::size_t k)
    {
        if (k < 1 || k > n)
            throw UsageError("basis index " + std::to_string(k) + " out of range 1.." + std::to_string(n));
        SpanElement e = zero(n);
        e.coeffs[k - 1] = Complex(1);
        return e;
    }
};

inline SpanElement linear_combination(const Complex& alpha, const SpanElement& f, const Complex& beta,
                                      const SpanElement& g)
{
    if (f.size() != g.size())
        throw UsageError("span elements of different dimension");
    SpanElement h = SpanElement::zero(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        h.coeffs[i] = alpha * f.coeffs[i] + beta * g.coeffs[i];
    return h;
}

// Exponents + interval + Gram matrix G_nm = <e_n, e_m> with its Cholesky
// factor, all at `bits` of precision.
struct TruncatedSpace
{
    ExponentSequence exponents;
    Interval interval;
    long bits = 0;
    long escalation_limit = 0;
    SpdMatrix gram;
    LowerFactor gram_factor;
    RealVector norms;               // ||e_n|| = sqrt(G_nn)
    std::vector<long> escalations;  // precisions at which factorization failed

    std::size_t size() const noexcept { return exponents.size(); }

    // G_nm / (||e_n|| ||e_m||)
    SpdMatrix normalized_gram() const
    {
        PrecisionScope scope(bits);
        SpdMatrix g(size());
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                g.set(i, j, i == j ? Scalar(1) : gram(i, j) / (norms[i] * norms[j]));
        return g;
    }
};

using SpacePtr = std::shared_ptr<const TruncatedSpace>;

// (e^{s b} - e^{s a}) / s, written with expm1 so small s(b - a) keeps its digits.
inline Scalar exponential_moment(const Scalar& s, const Interval& interval)
{
    return exp(s * interval.b()) * (-expm1(-s * interval.length())) / s;
}

inline SpdMatrix assemble_gram(const ExponentSequence& exps, const Interval& interval)
{
    const std::size_t n = exps.size();
    SpdMatrix g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            g.set(i, j, exponential_moment(exps.lambdas[i] + exps.lambdas[j], interval));
    return g;
}

// Assembles and factors the Gram matrix, doubling the precision (up to the
// escalation limit) while the factorization reports a non-positive pivot.
inline SpacePtr build_space(const ExponentSequence& exponents, const Interval& interval, const PrecisionConfig& cfg)
{
    cfg.validate();
    std::vector<long> failed;
    for (long bits = cfg.mantissa_bits;;) {
        PrecisionScope scope(bits);
        ExponentSequence exps = rebound(exponents);
        Interval iv = interval.rebound();
        SpdMatrix g = assemble_gram(exps, iv);
        try {
            LowerFactor l = cholesky_spd(g);
            auto space = std::make_shared<TruncatedSpace>(TruncatedSpace{
                std::move(exps), std::move(iv), bits, cfg.escalation_limit, std::move(g), std::move(l), {}, failed});
            for (std::size_t i = 0; i < space->size(); ++i)
                space->norms.push_back(sqrt(space->gram(i, i)));
            return space;
        } catch (const NotPositiveDefinite&) {
            failed.push_back(bits);
            if (bits >= cfg.escalation_limit)
                throw PrecisionExhausted(cfg.escalation_limit, "Gram factorization");
            bits = std::min(2 * bits, cfg.escalation_limit);
        }
    }
}

// The same data at a different precision, rebuilt from the decimal sources.
inline SpacePtr rebuild_at(const TruncatedSpace& space, long bits)
{
    PrecisionConfig cfg{bits, std::max(bits, space.escalation_limit)};
    return build_space(space.exponents, space.interval, cfg);
}

namespace detail {
inline void check_dimension(const SpanElement& f, const TruncatedSpace& space)
{
    if (f.size() != space.size())
        throw UsageError("span element has " + std::to_string(f.size()) + " coefficients, space dimension is " +
                         std::to_string(space.size()));
}
} // namespace detail

// sum_n c_n e^{lambda_n z}, ascending n, no compensation.
inline Complex evaluate(const SpanElement& f, const TruncatedSpace& space, const Complex& z)
{
    detail::check_dimension(f, space);
    PrecisionScope scope(space.bits);
    Complex sum;
    for (std::size_t n = 0; n < space.size(); ++n)
        sum += f.coeffs[n] * exp(Complex(space.exponents.lambdas[n] * z.re, space.exponents.lambdas[n] * z.im));
    return sum;
}

// <f, g> = sum_{n,m} f_n conj(g_m) G_nm
inline Complex inner_product(const SpanElement& f, const SpanElement& g, const TruncatedSpace& space)
{
    detail::check_dimension(f, space);
    detail::check_dimension(g, space);
    PrecisionScope scope(space.bits);
    Complex sum;
    for (std::size_t n = 0; n < space.size(); ++n) {
        Complex row;
        for (std::size_t m = 0; m < space.size(); ++m)
            row += conj(g.coeffs[m]) * space.gram(n, m);
        sum += f.coeffs[n] * row;
    }
    return sum;
}

inline Scalar norm(const SpanElement& f, const TruncatedSpace& space)
{
    PrecisionScope scope(space.bits);
    const Scalar sq = inner_product(f, f, space).re;
    return sq.sign() <= 0 ? Scalar() : sqrt(sq);
}

} // namespace muntz
