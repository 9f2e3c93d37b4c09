#pragma once

#include <string>

#include <gtest/gtest.h>

#include "muntz/numerics/scalar.hpp"

namespace muntz::test {

inline Scalar S(const std::string& text) { return Scalar::parse(text); }

inline Scalar rel_err(const Scalar& x, const Scalar& ref) { return abs(x - ref) / abs(ref); }

// |x - ref| / |ref| < tol, with the value printed on failure.
inline ::testing::AssertionResult near_rel(const Scalar& x, const std::string& ref, double tol)
{
    const Scalar err = rel_err(x, S(ref));
    if (err < Scalar(tol))
        return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << x.to_string() << " vs " << ref << " (rel err " << err.to_string(5)
                                         << ")";
}

inline ::testing::AssertionResult near_rel(const Scalar& x, const Scalar& ref, double tol)
{
    const Scalar err = rel_err(x, ref);
    if (err < Scalar(tol))
        return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << x.to_string() << " vs " << ref.to_string() << " (rel err "
                                         << err.to_string(5) << ")";
}

inline ::testing::AssertionResult below(const Scalar& x, const Scalar& bound)
{
    if (x < bound)
        return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << x.to_string(10) << " is not below " << bound.to_string(10);
}

} // namespace muntz::test
