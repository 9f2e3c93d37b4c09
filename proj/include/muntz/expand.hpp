#pragma once

// Fourier-type Dirichlet expansion: the coefficients c_n = <f, r_n> of an
// element of the truncated span, or of the orthogonal projection of an
// external function onto it, with the L^2 residual ||f - sum c_n e_n||.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "muntz/biorth.hpp"
#include "muntz/errors.hpp"
#include "muntz/numerics/quadrature.hpp"
#include "muntz/spaces.hpp"

namespace muntz {

// Built-in smooth functions on (a, b): t^k, e^{mu t}, sin(w t), cos(w t).
class ExternalFunction
{
  public:
    enum class Kind { power, exponential, sine, cosine };

    static ExternalFunction power(unsigned k) { return {Kind::power, k, "0"}; }
    static ExternalFunction exponential(std::string mu) { return {Kind::exponential, 0, std::move(mu)}; }
    static ExternalFunction sine(std::string w) { return {Kind::sine, 0, std::move(w)}; }
    static ExternalFunction cosine(std::string w) { return {Kind::cosine, 0, std::move(w)}; }

    // "t^3", "exp(2.5)", "sin(1)", "cos(0.5)"
    static ExternalFunction parse(const std::string& name)
    {
        auto inner = [&](const std::string& prefix) -> std::optional<std::string> {
            if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size() + 1 && name.back() == ')')
                return name.substr(prefix.size(), name.size() - prefix.size() - 1);
            return std::nullopt;
        };
        if (name.rfind("t^", 0) == 0 && name.size() > 2 &&
            name.find_first_not_of("0123456789", 2) == std::string::npos)
            return power(static_cast<unsigned>(std::stoul(name.substr(2))));
        if (name == "t")
            return power(1);
        auto checked = [&](std::string p) {
            if (!Scalar::is_decimal_literal(p))
                throw UsageError("built-in function '" + name + "' needs a decimal parameter");
            return p;
        };
        if (auto p = inner("exp("))
            return exponential(checked(*p));
        if (auto p = inner("sin("))
            return sine(checked(*p));
        if (auto p = inner("cos("))
            return cosine(checked(*p));
        throw UsageError("unknown built-in function '" + name + "' (expected t^k, exp(mu), sin(w) or cos(w))");
    }

    std::string name() const
    {
        switch (kind_) {
        case Kind::power:
            return "t^" + std::to_string(k_);
        case Kind::exponential:
            return "exp(" + param_ + ")";
        case Kind::sine:
            return "sin(" + param_ + ")";
        case Kind::cosine:
            return "cos(" + param_ + ")";
        }
        return {};
    }

    // Pointwise evaluator with the parameter converted at working precision.
    std::function<Scalar(const Scalar&)> evaluator() const
    {
        const Scalar p = Scalar::parse(param_);
        switch (kind_) {
        case Kind::power:
            return [k = static_cast<long>(k_)](const Scalar& t) { return pow(t, k); };
        case Kind::exponential:
            return [p](const Scalar& t) { return exp(p * t); };
        case Kind::sine:
            return [p](const Scalar& t) { return sin(p * t); };
        case Kind::cosine:
            return [p](const Scalar& t) { return cos(p * t); };
        }
        throw UsageError("bad function kind");
    }

  private:
    ExternalFunction(Kind kind, unsigned k, std::string param)
        : kind_(kind)
        , k_(k)
        , param_(std::move(param))
    {
    }

    Kind kind_;
    unsigned k_;
    std::string param_;
};

enum class ExpansionSource { span_element, external_function };

struct ExpansionResult
{
    ComplexVector coeffs;
    Scalar residual_norm;
    ExpansionSource source;
};

// sqrt of a radicand that should be >= 0. Negatives within 2^(-bits/2) * scale
// are roundoff and read as 0; anything more negative is a bug upstream.
inline Scalar clamped_sqrt(const Scalar& radicand, const Scalar& scale, long bits)
{
    if (radicand.sign() >= 0)
        return sqrt(radicand);
    if (abs(radicand) <= half_precision_tolerance(bits) * scale)
        return Scalar();
    throw InternalConsistencyError("residual radicand " + radicand.to_string(20) + " is negative beyond roundoff");
}

namespace detail {

inline SpanElement synthesize(const ComplexVector& coeffs) { return {coeffs}; }

// Moments <f, e_m> = int f e^{lambda_m t} dt and ||f||^2 by quadrature.
struct ExternalMoments
{
    ComplexVector moments;
    Scalar norm2;
};

inline ExternalMoments external_moments(const ExternalFunction& fn, const TruncatedSpace& space,
                                        const PrecisionConfig& cfg)
{
    PrecisionConfig qcfg{space.bits, std::max(space.bits, cfg.escalation_limit)};
    PrecisionScope scope(space.bits);
    const auto f = fn.evaluator();
    ExternalMoments out;
    for (const auto& lambda : space.exponents.lambdas)
        out.moments.emplace_back(quadrature_integrate(
            [&](const Scalar& t) { return f(t) * exp(lambda * t); }, space.interval, qcfg));
    out.norm2 = quadrature_integrate(
        [&](const Scalar& t) {
            const Scalar v = f(t);
            return v * v;
        },
        space.interval, qcfg);
    return out;
}

} // namespace detail

// ||f - sum c_n e_n|| for f in the span.
inline Scalar residual_norm(const SpanElement& f, const ComplexVector& coeffs, const TruncatedSpace& space)
{
    detail::check_dimension(f, space);
    if (coeffs.size() != space.size())
        throw UsageError("coefficient list does not match the space dimension");
    PrecisionScope scope(space.bits);
    const SpanElement g = detail::synthesize(coeffs);
    const Scalar ff = inner_product(f, f, space).re;
    const Scalar gg = inner_product(g, g, space).re;
    const Scalar fg = inner_product(f, g, space).re;
    return clamped_sqrt(ff - Scalar(2) * fg + gg, ff + gg, space.bits);
}

// ||f - sum c_n e_n|| for a built-in external function.
inline Scalar residual_norm(const ExternalFunction& fn, const ComplexVector& coeffs, const TruncatedSpace& space,
                            const PrecisionConfig& cfg)
{
    if (coeffs.size() != space.size())
        throw UsageError("coefficient list does not match the space dimension");
    const auto m = detail::external_moments(fn, space, cfg);
    PrecisionScope scope(space.bits);
    const SpanElement g = detail::synthesize(coeffs);
    const Scalar gg = inner_product(g, g, space).re;
    // <f, g> = sum_n conj(c_n) <f, e_n>
    Complex fg;
    for (std::size_t n = 0; n < space.size(); ++n)
        fg += conj(coeffs[n]) * m.moments[n];
    return clamped_sqrt(m.norm2 - Scalar(2) * fg.re + gg, m.norm2 + gg, space.bits);
}

// c_n = <f, r_n> = (f^T G C)_n computed through the Gram algebra.
inline ExpansionResult analyze(const SpanElement& f, const BiorthogonalSystem& bio)
{
    const TruncatedSpace& space = *bio.space;
    detail::check_dimension(f, space);
    PrecisionScope scope(space.bits);
    const std::size_t n = space.size();
    ComplexVector fg(n); // (f^T G)_k = <f, e_k>
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t m = 0; m < n; ++m)
            fg[k] += f.coeffs[m] * space.gram(m, k);
    ExpansionResult out{ComplexVector(n), Scalar(), ExpansionSource::span_element};
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            out.coeffs[j] += fg[k] * bio.coefficients(k, j);
    out.residual_norm = residual_norm(f, out.coeffs, space);
    return out;
}

// Orthogonal projection of an external function onto the truncated span:
// c_n = <f, r_n> = sum_m C_mn <f, e_m>.
inline ExpansionResult analyze(const ExternalFunction& fn, const BiorthogonalSystem& bio, const PrecisionConfig& cfg)
{
    const TruncatedSpace& space = *bio.space;
    const auto m = detail::external_moments(fn, space, cfg);
    PrecisionScope scope(space.bits);
    const std::size_t n = space.size();
    ExpansionResult out{ComplexVector(n), Scalar(), ExpansionSource::external_function};
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            out.coeffs[j] += m.moments[k] * bio.coefficients(k, j);
    const SpanElement g = detail::synthesize(out.coeffs);
    const Scalar gg = inner_product(g, g, space).re;
    Complex fg;
    for (std::size_t k = 0; k < n; ++k)
        fg += conj(out.coeffs[k]) * m.moments[k];
    out.residual_norm = clamped_sqrt(m.norm2 - Scalar(2) * fg.re + gg, m.norm2 + gg, space.bits);
    return out;
}

} // namespace muntz
