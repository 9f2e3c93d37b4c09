#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "muntz/errors.hpp"
#include "muntz/numerics/complex.hpp"
#include "muntz/numerics/scalar.hpp"

namespace muntz {

using RealVector = std::vector<Scalar>;
using ComplexVector = std::vector<Complex>;

// Dense row-major matrix.
template <class T>
class Matrix
{
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows)
        , cols_(cols)
        , data_(rows * cols)
    {
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<T> column(std::size_t j) const
    {
        std::vector<T> c;
        c.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            c.push_back((*this)(i, j));
        return c;
    }

    void set_column(std::size_t j, const std::vector<T>& c)
    {
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, j) = c[i];
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<Scalar>;
using ComplexMatrix = Matrix<Complex>;

// Symmetric matrix storing only the lower triangle, so symmetry holds by
// construction. Positive definiteness is certified by cholesky_spd.
class SpdMatrix
{
  public:
    SpdMatrix() = default;
    explicit SpdMatrix(std::size_t n)
        : n_(n)
        , lower_(n * (n + 1) / 2)
    {
    }

    static SpdMatrix identity(std::size_t n)
    {
        SpdMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            m.set(i, i, Scalar(1));
        return m;
    }

    // Takes the lower triangle of a square matrix.
    static SpdMatrix from_lower(const RealMatrix& m)
    {
        if (m.rows() != m.cols())
            throw UsageError("SpdMatrix needs a square matrix");
        SpdMatrix s(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                s.set(i, j, m(i, j));
        return s;
    }

    std::size_t dim() const noexcept { return n_; }

    const Scalar& operator()(std::size_t i, std::size_t j) const { return lower_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, Scalar v) { lower_[index(i, j)] = std::move(v); }

    Scalar max_abs() const
    {
        Scalar m;
        for (const auto& x : lower_)
            m = max(m, abs(x));
        return m;
    }

    RealMatrix to_dense() const
    {
        RealMatrix d(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                d(i, j) = (*this)(i, j);
        return d;
    }

  private:
    static std::size_t index(std::size_t i, std::size_t j) noexcept
    {
        if (i < j)
            std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }

    std::size_t n_ = 0;
    std::vector<Scalar> lower_;
};

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b)
{
    if (a.cols() != b.rows())
        throw UsageError("matrix product dimension mismatch");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            T s{};
            for (std::size_t k = 0; k < a.cols(); ++k)
                s += a(i, k) * b(k, j);
            c(i, j) = std::move(s);
        }
    return c;
}

inline RealMatrix transpose(const RealMatrix& a)
{
    RealMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

inline Scalar max_abs(const RealMatrix& a)
{
    Scalar m;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            m = max(m, abs(a(i, j)));
    return m;
}

// y = M x for symmetric M and real or complex x.
template <class V>
std::vector<V> multiply(const SpdMatrix& m, const std::vector<V>& x)
{
    if (x.size() != m.dim())
        throw UsageError("matrix-vector dimension mismatch");
    std::vector<V> y(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i) {
        V s{};
        for (std::size_t j = 0; j < m.dim(); ++j)
            s += x[j] * m(i, j);
        y[i] = std::move(s);
    }
    return y;
}

template <class V>
Scalar max_abs(const std::vector<V>& x)
{
    Scalar m;
    for (const auto& v : x)
        m = max(m, abs(v));
    return m;
}

// Real embedding of a complex matrix A + iB as [[A, -B], [B, A]]. Singular
// values and Hermitian eigenvalues of the original each appear twice.
inline RealMatrix real_embedding(const ComplexMatrix& z)
{
    const std::size_t m = z.rows(), n = z.cols();
    RealMatrix r(2 * m, 2 * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            r(i, j) = z(i, j).re;
            r(i + m, j + n) = z(i, j).re;
            r(i, j + n) = -z(i, j).im;
            r(i + m, j) = z(i, j).im;
        }
    return r;
}

// [Re v; Im v]
inline RealVector real_embedding(const ComplexVector& v)
{
    RealVector r(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        r[i] = v[i].re;
        r[i + v.size()] = v[i].im;
    }
    return r;
}

} // namespace muntz
