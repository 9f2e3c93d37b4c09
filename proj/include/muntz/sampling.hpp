#pragma once

// Seeded draws for randomized checks. std::mt19937_64 is fully specified by
// the standard but the standard distributions are not, so the conversions
// to numbers are done here to keep runs reproducible across toolchains.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "muntz/numerics/complex.hpp"
#include "muntz/numerics/scalar.hpp"
#include "muntz/spaces.hpp"

namespace muntz {

using Rng = std::mt19937_64;

// Uniform on [lo, hi) with 53 random bits.
inline Scalar uniform(Rng& rng, const Scalar& lo, const Scalar& hi)
{
    const Scalar unit = ldexp(Scalar(static_cast<long>(rng() >> 11)), -53);
    return lo + (hi - lo) * unit;
}

// Real and imaginary parts uniform on [-1, 1).
inline Complex uniform_complex(Rng& rng)
{
    Scalar re = uniform(rng, Scalar(-1), Scalar(1));
    Scalar im = uniform(rng, Scalar(-1), Scalar(1));
    return {std::move(re), std::move(im)};
}

inline SpanElement random_span_element(Rng& rng, std::size_t n)
{
    SpanElement f = SpanElement::zero(n);
    for (auto& c : f.coeffs)
        c = uniform_complex(rng);
    return f;
}

// A uniformly drawn nonempty subset of 1..n as a coefficient pattern:
// random complex coefficients on the subset, zero elsewhere.
inline SpanElement random_supported_element(Rng& rng, std::size_t n)
{
    const std::uint64_t all = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    std::uint64_t mask = 0;
    while (mask == 0)
        mask = rng() & all;
    SpanElement f = SpanElement::zero(n);
    for (std::size_t k = 0; k < n; ++k)
        if ((mask >> k) & 1u) {
            f.coeffs[k] = uniform_complex(rng);
            while (f.coeffs[k].is_zero())
                f.coeffs[k] = uniform_complex(rng);
        }
    return f;
}

// Real sample points uniform on [lo, hi).
inline ComplexVector sample_points(Rng& rng, std::size_t count, const Scalar& lo, const Scalar& hi)
{
    ComplexVector z;
    for (std::size_t i = 0; i < count; ++i)
        z.emplace_back(uniform(rng, lo, hi));
    return z;
}

} // namespace muntz
