#pragma once

#include "muntz/numerics/scalar.hpp"

namespace muntz {

struct Complex
{
    Scalar re;
    Scalar im;

    Complex() = default;
    Complex(Scalar real)
        : re(std::move(real))
    {
    }
    Complex(Scalar real, Scalar imag)
        : re(std::move(real))
        , im(std::move(imag))
    {
    }
    Complex(int real)
        : re(real)
    {
    }
    Complex(double real)
        : re(real)
    {
    }

    bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }

    std::string to_string(int digits = 40) const
    {
        return re.to_string(digits) + (im.sign() < 0 ? "" : "+") + im.to_string(digits) + "i";
    }

    Complex operator-() const { return {-re, -im}; }

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator*(const Complex& a, const Complex& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Complex& a, const Scalar& s) { return {a.re * s, a.im * s}; }
    friend Complex operator*(const Scalar& s, const Complex& a) { return {a.re * s, a.im * s}; }
    friend Complex operator/(const Complex& a, const Scalar& s) { return {a.re / s, a.im / s}; }
    friend Complex operator/(const Complex& a, const Complex& b)
    {
        // Smith's scaling keeps |b|^2 from overflowing.
        if (abs(b.re) >= abs(b.im)) {
            const Scalar r = b.im / b.re;
            const Scalar d = b.re + b.im * r;
            return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
        }
        const Scalar r = b.re / b.im;
        const Scalar d = b.re * r + b.im;
        return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
    }

    Complex& operator+=(const Complex& o) { return *this = *this + o; }
    Complex& operator-=(const Complex& o) { return *this = *this - o; }
    Complex& operator*=(const Complex& o) { return *this = *this * o; }

    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
};

inline Complex conj(const Complex& z) { return {z.re, -z.im}; }

inline Scalar abs(const Complex& z) { return hypot(z.re, z.im); }

// |z|^2
inline Scalar norm2(const Complex& z) { return z.re * z.re + z.im * z.im; }

inline Complex exp(const Complex& z)
{
    const Scalar m = exp(z.re);
    if (z.im.is_zero())
        return {m, Scalar()};
    return {m * cos(z.im), m * sin(z.im)};
}

} // namespace muntz
