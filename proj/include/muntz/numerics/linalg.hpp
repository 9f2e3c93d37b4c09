#pragma once

// Dense linear algebra at working precision: Cholesky for SPD matrices,
// triangular solves, cyclic Jacobi for symmetric eigenvalues and one-sided
// (Hestenes) Jacobi for singular values. Sizes here are a few dozen at most.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "muntz/errors.hpp"
#include "muntz/numerics/matrix.hpp"

namespace muntz {

// N^2 * 2^(-bits+8) * scale
inline Scalar solver_residual_bound(std::size_t n, long bits, const Scalar& scale)
{
    return Scalar(static_cast<long>(n * n)) * pow2(-bits + 8) * scale;
}

// Packed lower-triangular factor L with L L^T = M.
class LowerFactor
{
  public:
    LowerFactor() = default;
    explicit LowerFactor(std::size_t n)
        : n_(n)
        , data_(n * (n + 1) / 2)
    {
    }

    std::size_t dim() const noexcept { return n_; }

    // Entries above the diagonal read as zero.
    Scalar operator()(std::size_t i, std::size_t j) const
    {
        return j > i ? Scalar() : data_[i * (i + 1) / 2 + j];
    }
    const Scalar& at(std::size_t i, std::size_t j) const { return data_[i * (i + 1) / 2 + j]; }
    Scalar& at(std::size_t i, std::size_t j) { return data_[i * (i + 1) / 2 + j]; }

    RealMatrix to_dense() const
    {
        RealMatrix d(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                d(i, j) = at(i, j);
        return d;
    }

    // Solves L y = b.
    template <class V>
    std::vector<V> forward(std::vector<V> b) const
    {
        check(b.size());
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < i; ++j)
                b[i] -= b[j] * at(i, j);
            b[i] = b[i] / at(i, i);
        }
        return b;
    }

    // Solves L^T x = y.
    template <class V>
    std::vector<V> backward(std::vector<V> y) const
    {
        check(y.size());
        for (std::size_t ii = n_; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n_; ++j)
                y[ii] -= y[j] * at(j, ii);
            y[ii] = y[ii] / at(ii, ii);
        }
        return y;
    }

    // x = L^T v
    template <class V>
    std::vector<V> apply_transpose(const std::vector<V>& v) const
    {
        check(v.size());
        std::vector<V> x(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            V s{};
            for (std::size_t j = i; j < n_; ++j)
                s += v[j] * at(j, i);
            x[i] = std::move(s);
        }
        return x;
    }

    // Solves L L^T x = b.
    template <class V>
    std::vector<V> solve(std::vector<V> b) const
    {
        return backward(forward(std::move(b)));
    }

  private:
    void check(std::size_t len) const
    {
        if (len != n_)
            throw UsageError("factor dimension " + std::to_string(n_) + " does not match vector length " +
                             std::to_string(len));
    }

    std::size_t n_ = 0;
    std::vector<Scalar> data_;
};

// Throws NotPositiveDefinite on the first non-positive pivot (1-based index).
inline LowerFactor cholesky_spd(const SpdMatrix& m)
{
    const std::size_t n = m.dim();
    LowerFactor l(n);
    for (std::size_t j = 0; j < n; ++j) {
        Scalar d = m(j, j);
        for (std::size_t k = 0; k < j; ++k)
            d -= l.at(j, k) * l.at(j, k);
        if (!(d > Scalar(0)))
            throw NotPositiveDefinite(j + 1, d.to_string(20));
        l.at(j, j) = sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            Scalar s = m(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l.at(i, k) * l.at(j, k);
            l.at(i, j) = s / l.at(j, j);
        }
    }
    return l;
}

template <class V>
std::vector<V> spd_solve(const SpdMatrix& m, std::vector<V> rhs)
{
    return cholesky_spd(m).solve(std::move(rhs));
}

// max |(L L^T - M)_{ij}|
inline Scalar reconstruction_residual(const LowerFactor& l, const SpdMatrix& m)
{
    Scalar worst;
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            Scalar s;
            for (std::size_t k = 0; k <= j; ++k)
                s += l.at(i, k) * l.at(j, k);
            worst = max(worst, abs(s - m(i, j)));
        }
    return worst;
}

namespace detail {

inline Scalar frobenius(const RealMatrix& a, bool off_diagonal_only)
{
    Scalar s;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!off_diagonal_only || i != j)
                s += a(i, j) * a(i, j);
    return sqrt(s);
}

// tan of the Jacobi rotation angle annihilating the (p,q) coupling, with
// theta = (a_qq - a_pp) / (2 a_pq).
inline Scalar jacobi_tangent(const Scalar& theta)
{
    Scalar t = Scalar(1) / (abs(theta) + sqrt(theta * theta + Scalar(1)));
    return theta.sign() < 0 ? -t : t;
}

} // namespace detail

// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi sweeps run until
// the off-diagonal Frobenius mass drops below 2^(-bits/2) * ||M||_F.
inline RealVector symmetric_eigenvalues(RealMatrix a)
{
    const std::size_t n = a.rows();
    if (n != a.cols())
        throw UsageError("symmetric_eigenvalues needs a square matrix");
    const Scalar norm = detail::frobenius(a, false);
    const Scalar tol = half_precision_tolerance(working_precision()) * norm;
    for (int sweep = 0; sweep < 200 && detail::frobenius(a, true) >= tol && !norm.is_zero(); ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q).is_zero())
                    continue;
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
                const Scalar t = detail::jacobi_tangent(theta);
                const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
                const Scalar s = t * c;
                const Scalar apq = a(p, q);
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = Scalar();
                a(q, p) = Scalar();
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q)
                        continue;
                    const Scalar arp = a(r, p);
                    const Scalar arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(p, r) = a(r, p);
                    a(r, q) = s * arp + c * arq;
                    a(q, r) = a(r, q);
                }
            }
    }
    RealVector ev;
    ev.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ev.push_back(a(i, i));
    std::sort(ev.begin(), ev.end(), [](const Scalar& x, const Scalar& y) { return x < y; });
    return ev;
}

// Smallest eigenvalue magnitude of a symmetric matrix; for SPD input this is
// the smallest singular value.
inline Scalar min_singular_value(const RealMatrix& m)
{
    const RealVector ev = symmetric_eigenvalues(m);
    Scalar best = abs(ev.front());
    for (const auto& e : ev)
        best = min(best, abs(e));
    return best;
}

inline Scalar min_singular_value(const SpdMatrix& m) { return min_singular_value(m.to_dense()); }

struct SingularValues
{
    RealVector values;        // descending
    std::vector<RealVector> left; // unit left singular vectors for nonzero values, same order
};

// One-sided Jacobi: orthogonalize the columns of A by plane rotations; the
// column norms are then the singular values. Accurate for small singular
// values when the columns are well scaled.
inline SingularValues singular_values(const RealMatrix& a)
{
    const std::size_t m = a.rows(), n = a.cols();
    const Scalar tol = pow2(-(working_precision() - 8));
    std::vector<RealVector> col;
    col.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        col.push_back(a.column(j));
    auto dot = [&](std::size_t p, std::size_t q) {
        Scalar s;
        for (std::size_t i = 0; i < m; ++i)
            s.add_product(col[p][i], col[q][i]);
        return s;
    };
    std::vector<Scalar> sq(n);
    Scalar x, y;
    for (int sweep = 0; sweep < 200; ++sweep) {
        for (std::size_t j = 0; j < n; ++j)
            sq[j] = dot(j, j);
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const Scalar gamma = dot(p, q);
                if (gamma.is_zero() || abs(gamma) <= tol * sqrt(sq[p] * sq[q]))
                    continue;
                rotated = true;
                const Scalar zeta = (sq[q] - sq[p]) / (Scalar(2) * gamma);
                const Scalar t = detail::jacobi_tangent(zeta);
                const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
                const Scalar s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    Scalar& ap = col[p][i];
                    Scalar& aq = col[q][i];
                    mpfr_mul(x.get(), s.get(), aq.get(), MPFR_RNDN);
                    mpfr_fms(x.get(), c.get(), ap.get(), x.get(), MPFR_RNDN); // c ap - s aq
                    mpfr_mul(y.get(), c.get(), aq.get(), MPFR_RNDN);
                    mpfr_fma(y.get(), s.get(), ap.get(), y.get(), MPFR_RNDN); // s ap + c aq
                    mpfr_swap(ap.get(), x.get());
                    mpfr_swap(aq.get(), y.get());
                }
                // alpha' = alpha - t gamma, beta' = beta + t gamma; recompute
                // directly when the update cancels badly
                const Scalar shift = t * gamma;
                const Scalar half_p = sq[p] / Scalar(2);
                sq[p] -= shift;
                sq[q] += shift;
                if (sq[p] < half_p)
                    sq[p] = dot(p, p);
            }
        if (!rotated)
            break;
    }
    std::vector<Scalar> norms;
    norms.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        norms.push_back(sqrt(dot(j, j)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) { return norms[v] < norms[u]; });

    SingularValues out;
    for (std::size_t j : order) {
        out.values.push_back(norms[j]);
        if (!norms[j].is_zero()) {
            RealVector u(m);
            for (std::size_t i = 0; i < m; ++i)
                u[i] = col[j][i] / norms[j];
            out.left.push_back(std::move(u));
        }
    }
    return out;
}

inline Scalar spectral_norm(const RealMatrix& a)
{
    const auto sv = singular_values(a);
    return sv.values.empty() ? Scalar() : sv.values.front();
}

inline Scalar dot(const RealVector& x, const RealVector& y)
{
    Scalar s;
    for (std::size_t i = 0; i < x.size(); ++i)
        s.add_product(x[i], y[i]);
    return s;
}

inline Scalar norm(const RealVector& x) { return sqrt(dot(x, x)); }

// || x - Q Q^T x || for orthonormal columns Q.
inline Scalar projection_residual(const std::vector<RealVector>& basis, RealVector x)
{
    // two passes of classical Gram-Schmidt against the basis
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) {
            const Scalar c = dot(q, x);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] -= c * q[i];
        }
    return norm(x);
}

} // namespace muntz
