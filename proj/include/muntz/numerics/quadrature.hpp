#pragma once

// Gauss-Legendre quadrature at working precision with order doubling.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "muntz/errors.hpp"
#include "muntz/interval.hpp"
#include "muntz/numerics/matrix.hpp"
#include "muntz/numerics/scalar.hpp"

namespace muntz {

struct GaussLegendreRule
{
    RealVector nodes;   // on [-1, 1], ascending
    RealVector weights;
};

namespace detail {

// (P_n(x), P_{n-1}(x)) by the three-term recurrence.
inline std::pair<Scalar, Scalar> legendre_pair(std::size_t n, const Scalar& x)
{
    Scalar prev(1), cur = x;
    for (std::size_t k = 2; k <= n; ++k) {
        Scalar next = (Scalar(static_cast<long>(2 * k - 1)) * x * cur - Scalar(static_cast<long>(k - 1)) * prev) /
                      Scalar(static_cast<long>(k));
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {std::move(cur), std::move(prev)};
}

// Nodes from Newton iteration on P_n, started from the Tricomi estimate, at
// 32 guard bits above working precision.
inline GaussLegendreRule compute_gauss_legendre(std::size_t n)
{
    const long bits = working_precision();
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    PrecisionScope guard(bits + 32);
    const Scalar one(1);
    const Scalar order(static_cast<long>(n));
    const Scalar tol = pow2(-bits - 8);
    auto derivative = [&](const Scalar& x) {
        const auto [p, q] = legendre_pair(n, x);
        return std::pair{p, order * (x * p - q) / (x * x - one)};
    };
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        Scalar x = cos(pi() * (Scalar(static_cast<long>(i)) + Scalar(0.75)) / (order + Scalar(0.5)));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = derivative(x);
            const Scalar dx = p / dp;
            x -= dx;
            if (abs(dx) <= tol)
                break;
        }
        if (2 * i + 1 == n)
            x = Scalar(0); // odd order: the middle root is exactly 0
        const Scalar dp = derivative(x).second;
        Scalar w = Scalar(2) / ((one - x * x) * dp * dp);
        // roots come out descending; store ascending and mirror
        PrecisionScope round(bits);
        rule.nodes[n - 1 - i] = x + Scalar();
        rule.nodes[i] = -x;
        rule.weights[i] = w + Scalar();
        rule.weights[n - 1 - i] = w + Scalar();
    }
    return rule;
}

} // namespace detail

// Cached per (order, working precision).
inline std::shared_ptr<const GaussLegendreRule> gauss_legendre(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, long>, std::shared_ptr<const GaussLegendreRule>> cache;
    const auto key = std::pair{n, working_precision()};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }
    auto rule = std::make_shared<const GaussLegendreRule>(detail::compute_gauss_legendre(n));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

// Gauss-Legendre value of a fixed order on (a, b).
template <class F>
Scalar gauss_legendre_integrate(F&& f, const Scalar& a, const Scalar& b, std::size_t order)
{
    const auto rule = gauss_legendre(order);
    const Scalar half = (b - a) / Scalar(2);
    const Scalar mid = (b + a) / Scalar(2);
    Scalar sum;
    for (std::size_t i = 0; i < order; ++i)
        sum += rule->weights[i] * f(mid + half * rule->nodes[i]);
    return sum * half;
}

inline constexpr std::size_t kQuadratureStartOrder = 8;
inline constexpr std::size_t kQuadratureMaxOrder = 4096;

// Doubles the order until two successive values agree to 2^(-bits/2)
// relative (absolute when the value is zero) and returns the last value.
template <class F>
Scalar quadrature_integrate(F&& f, const Interval& interval, const PrecisionConfig& cfg,
                            std::size_t max_order = kQuadratureMaxOrder)
{
    PrecisionScope scope(cfg.mantissa_bits);
    const Scalar tol = half_precision_tolerance(cfg.mantissa_bits);
    Scalar previous = gauss_legendre_integrate(f, interval.a(), interval.b(), kQuadratureStartOrder);
    Scalar current;
    for (std::size_t order = 2 * kQuadratureStartOrder; order <= max_order; order *= 2) {
        current = gauss_legendre_integrate(f, interval.a(), interval.b(), order);
        const Scalar scale = current.is_zero() ? Scalar(1) : abs(current);
        if (abs(current - previous) <= tol * scale)
            return current;
        if (2 * order <= max_order)
            previous = current;
    }
    throw QuadratureFailure(previous.to_string(20), current.to_string(20));
}

} // namespace muntz
