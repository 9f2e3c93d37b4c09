#pragma once

// Binary floating point with an explicit mantissa width, backed by MPFR.
//
// Every arithmetic result is rounded to the calling thread's working
// precision, which PrecisionScope sets for a lexical region. Values keep the
// precision they were created with until they are reassigned.

#include <mpfr.h>

#include <compare>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

#include "muntz/errors.hpp"

namespace muntz {

struct PrecisionConfig
{
    long mantissa_bits = 512;
    long escalation_limit = 4096;

    void validate() const
    {
        if (mantissa_bits < 128)
            throw DomainError("mantissa_bits must be at least 128, got " +
                              std::to_string(mantissa_bits));
        if (escalation_limit < mantissa_bits)
            throw DomainError("escalation_limit must be at least mantissa_bits");
    }
};

namespace detail {
inline thread_local mpfr_prec_t working_bits = 512;
}

inline long working_precision() noexcept { return static_cast<long>(detail::working_bits); }

class PrecisionScope
{
  public:
    explicit PrecisionScope(long bits)
        : saved_(detail::working_bits)
    {
        if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX)
            throw DomainError("precision out of range: " + std::to_string(bits));
        detail::working_bits = static_cast<mpfr_prec_t>(bits);
    }
    ~PrecisionScope() { detail::working_bits = saved_; }

    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    mpfr_prec_t saved_;
};

class Scalar
{
  public:
    Scalar()
    {
        mpfr_init2(v_, detail::working_bits);
        mpfr_set_zero(v_, 1);
    }
    Scalar(int x)
        : Scalar(static_cast<long>(x))
    {
    }
    Scalar(long x)
    {
        mpfr_init2(v_, detail::working_bits);
        mpfr_set_si(v_, x, MPFR_RNDN);
    }
    Scalar(double x)
    {
        mpfr_init2(v_, detail::working_bits);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }

    // Parses a decimal literal ("1", "-0.25", "3e-4") at working precision.
    static Scalar parse(std::string_view text)
    {
        std::string s(text);
        if (!is_decimal_literal(s))
            throw DomainError("not a decimal number: '" + s + "'");
        Scalar r;
        mpfr_strtofr(r.v_, s.c_str(), nullptr, 10, MPFR_RNDN);
        if (!mpfr_number_p(r.v_))
            throw DomainError("not a finite number: '" + s + "'");
        return r;
    }

    // [+-]digits[.digits][e[+-]digits], at least one mantissa digit.
    static bool is_decimal_literal(std::string_view s) noexcept
    {
        std::size_t i = 0;
        auto digits = [&] {
            std::size_t start = i;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9')
                ++i;
            return i - start;
        };
        if (i < s.size() && (s[i] == '+' || s[i] == '-'))
            ++i;
        std::size_t mantissa = digits();
        if (i < s.size() && s[i] == '.') {
            ++i;
            mantissa += digits();
        }
        if (mantissa == 0)
            return false;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-'))
                ++i;
            if (digits() == 0)
                return false;
        }
        return i == s.size();
    }

    Scalar(const Scalar& o)
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Scalar(Scalar&& o) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set_zero(v_, 1);
        mpfr_swap(v_, o.v_);
    }
    Scalar& operator=(const Scalar& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Scalar& operator=(Scalar&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Scalar() { mpfr_clear(v_); }

    long precision() const noexcept { return static_cast<long>(mpfr_get_prec(v_)); }
    mpfr_srcptr get() const noexcept { return v_; }
    mpfr_ptr get() noexcept { return v_; }

    double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
    int sign() const noexcept { return mpfr_sgn(v_); }

    // Scientific notation with `digits` significant digits. Deterministic for
    // a given value and digit count; negative zero prints as zero.
    std::string to_string(int digits = 40) const
    {
        if (mpfr_nan_p(v_))
            return "nan";
        if (mpfr_inf_p(v_))
            return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
        char* buf = nullptr;
        if (mpfr_zero_p(v_)) {
            Scalar z(0);
            mpfr_asprintf(&buf, "%.*Re", digits - 1, z.v_);
        } else {
            mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
        }
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    Scalar operator-() const
    {
        Scalar r;
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return binary(a, b, mpfr_add); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return binary(a, b, mpfr_sub); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) { return binary(a, b, mpfr_mul); }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return binary(a, b, mpfr_div); }

    Scalar& operator+=(const Scalar& o) { return compound(o, mpfr_add); }
    Scalar& operator-=(const Scalar& o) { return compound(o, mpfr_sub); }
    Scalar& operator*=(const Scalar& o) { return compound(o, mpfr_mul); }
    Scalar& operator/=(const Scalar& o) { return compound(o, mpfr_div); }

    // *this += a * b with a single rounding.
    Scalar& add_product(const Scalar& a, const Scalar& b)
    {
        if (mpfr_get_prec(v_) != detail::working_bits)
            return *this = *this + a * b;
        mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN);
        return *this;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b)
    {
        if (mpfr_unordered_p(a.v_, b.v_))
            return std::partial_ordering::unordered;
        const int c = mpfr_cmp(a.v_, b.v_);
        return c < 0 ? std::partial_ordering::less
                     : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
    }

    friend Scalar exp(const Scalar& x) { return unary(x, mpfr_exp); }
    friend Scalar expm1(const Scalar& x) { return unary(x, mpfr_expm1); }
    friend Scalar log(const Scalar& x) { return unary(x, mpfr_log); }
    friend Scalar sqrt(const Scalar& x) { return unary(x, mpfr_sqrt); }
    friend Scalar abs(const Scalar& x) { return unary(x, mpfr_abs); }
    friend Scalar sin(const Scalar& x) { return unary(x, mpfr_sin); }
    friend Scalar cos(const Scalar& x) { return unary(x, mpfr_cos); }
    friend Scalar hypot(const Scalar& a, const Scalar& b) { return binary(a, b, mpfr_hypot); }
    friend Scalar pow(const Scalar& x, long k)
    {
        Scalar r;
        mpfr_pow_si(r.v_, x.v_, k, MPFR_RNDN);
        return r;
    }
    // x * 2^k, exact.
    friend Scalar ldexp(const Scalar& x, long k)
    {
        Scalar r;
        mpfr_mul_2si(r.v_, x.v_, k, MPFR_RNDN);
        return r;
    }

  private:
    template <class Op>
    static Scalar unary(const Scalar& a, Op op)
    {
        Scalar r;
        op(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    template <class Op>
    Scalar& compound(const Scalar& o, Op op)
    {
        if (mpfr_get_prec(v_) != detail::working_bits)
            return *this = binary(*this, o, op);
        op(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    template <class Op>
    static Scalar binary(const Scalar& a, const Scalar& b, Op op)
    {
        Scalar r;
        op(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }

    mpfr_t v_;
};

inline Scalar pi()
{
    Scalar r;
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

// 2^(-bits)
inline Scalar pow2(long exponent) { return ldexp(Scalar(1), exponent); }

// Relative numerical-zero threshold 2^(-bits/2) used throughout for
// "agrees to working precision" decisions.
inline Scalar half_precision_tolerance(long bits) { return pow2(-bits / 2); }

inline const Scalar& max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
inline const Scalar& min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }

} // namespace muntz
