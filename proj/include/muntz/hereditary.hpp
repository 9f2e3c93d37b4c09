#pragma once

// Mixed systems {e_n : n in N1} u {r_n : n in N2} and their completeness in
// the truncated span, for single partitions and sweeps over partitions.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "muntz/biorth.hpp"
#include "muntz/errors.hpp"
#include "muntz/numerics/linalg.hpp"
#include "muntz/spaces.hpp"

namespace muntz {

// Bit n-1 of the mask set means index n is in N2 (contributes r_n);
// clear means N1 (contributes e_n).
class Partition
{
  public:
    Partition(std::size_t n, std::uint64_t n2_mask)
        : n_(n)
        , mask_(n2_mask)
    {
        if (n == 0 || n > 63)
            throw UsageError("partition size must be in 1..63");
        if (n2_mask >> n)
            throw UsageError("partition mask has bits beyond index " + std::to_string(n));
    }

    // 1-based index sets; must be disjoint and cover 1..n.
    static Partition from_sets(std::size_t n, const std::vector<std::size_t>& n1, const std::vector<std::size_t>& n2)
    {
        std::vector<int> seen(n + 1, 0);
        std::uint64_t mask = 0;
        for (auto k : n1) {
            if (k < 1 || k > n || seen[k]++)
                throw UsageError("N1 index " + std::to_string(k) + " invalid or repeated");
        }
        for (auto k : n2) {
            if (k < 1 || k > n || seen[k]++)
                throw UsageError("N2 index " + std::to_string(k) + " invalid or shared with N1");
            mask |= std::uint64_t{1} << (k - 1);
        }
        if (std::count(seen.begin() + 1, seen.end(), 1) != static_cast<long>(n))
            throw UsageError("N1 and N2 do not cover 1.." + std::to_string(n));
        return Partition(n, mask);
    }

    std::size_t size() const noexcept { return n_; }
    std::uint64_t mask() const noexcept { return mask_; }
    bool in_n2(std::size_t k) const noexcept { return (mask_ >> (k - 1)) & 1u; }

    std::vector<std::size_t> n1() const { return collect(false); }
    std::vector<std::size_t> n2() const { return collect(true); }

    // Exchange the roles of N1 and N2.
    Partition dual() const { return Partition(n_, ~mask_ & ((std::uint64_t{1} << n_) - 1)); }

  private:
    std::vector<std::size_t> collect(bool second) const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 1; k <= n_; ++k)
            if (in_n2(k) == second)
                out.push_back(k);
        return out;
    }

    std::size_t n_;
    std::uint64_t mask_;
};

struct MixedSystemReport
{
    Partition partition;
    SpdMatrix mixed_gram;      // block order: N1 ascending, then N2 ascending
    Scalar sigma_min;          // smallest eigenvalue of the normalized mixed Gram
    Scalar entry_residual;     // max |<e_n, r_m> - delta_nm| over the cross block
    Scalar null_sigma_min;     // relative smallest singular value of the orthogonality constraints
    std::size_t null_dimension = 0;
    bool cholesky_ok = false;
    bool undecided = false;    // a rank decision fell in the guard band
    bool complete = false;
};

namespace detail {

// Precomputed products shared by every partition of one system.
class MixedSystemBuilder
{
  public:
    explicit MixedSystemBuilder(const BiorthogonalSystem& bio)
        : bio_(bio)
        , space_(*bio.space)
        , gc_(space_.size(), space_.size())
    {
        PrecisionScope scope(space_.bits);
        const std::size_t n = space_.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Scalar s;
                for (std::size_t k = 0; k < n; ++k)
                    s += space_.gram(i, k) * bio.coefficients(k, j);
                gc_(i, j) = std::move(s);
            }
    }

    // <e_n, r_m> as computed, 0-based.
    const Scalar& er(std::size_t n, std::size_t m) const { return gc_(n, m); }

    SpdMatrix mixed_gram(const Partition& p) const
    {
        check(p);
        const auto order = ordering(p);
        PrecisionScope scope(space_.bits);
        SpdMatrix m(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const auto [ki, ri] = order[i];
                const auto [kj, rj] = order[j];
                if (!ri && !rj)
                    m.set(i, j, space_.gram(ki, kj));
                else if (ri && rj)
                    m.set(i, j, bio_.coefficients(ki, kj));
                else if (!ri)
                    m.set(i, j, gc_(ki, kj)); // <e_ki, r_kj>
                else
                    m.set(i, j, gc_(kj, ki)); // <r_ki, e_kj> = <e_kj, r_ki> (real)
            }
        return m;
    }

    MixedSystemReport report(const Partition& p) const
    {
        PrecisionScope scope(space_.bits);
        const std::size_t n = space_.size();
        MixedSystemReport rep{p, mixed_gram(p), {}, {}, {}, 0, false, false, false};

        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (!p.in_n2(a + 1) && p.in_n2(b + 1))
                    rep.entry_residual = max(rep.entry_residual, abs(gc_(a, b) - (a == b ? Scalar(1) : Scalar())));

        const SpdMatrix& mg = rep.mixed_gram;
        RealVector diag;
        for (std::size_t i = 0; i < n; ++i)
            diag.push_back(sqrt(mg(i, i)));
        RealMatrix normalized(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                normalized(i, j) = i == j ? Scalar(1) : mg(i, j) / (diag[i] * diag[j]);
        rep.sigma_min = min_singular_value(normalized);

        try {
            (void)cholesky_spd(mg);
            rep.cholesky_ok = true;
        } catch (const NotPositiveDefinite&) {
            rep.cholesky_ok = false;
        }

        // Constraints on f = sum y_k e_k / ||e_k|| orthogonal to the mixed
        // system: row n in N1 is <., e_n / ||e_n||>, row m in N2 is
        // <., ||e_m|| r_m>. Only y = 0 should satisfy all of them.
        RealMatrix constraints(n, n);
        for (std::size_t row = 0; row < n; ++row)
            for (std::size_t k = 0; k < n; ++k) {
                if (p.in_n2(row + 1))
                    constraints(row, k) = space_.norms[row] / space_.norms[k] * gc_(k, row);
                else
                    constraints(row, k) = k == row ? Scalar(1)
                                                   : space_.gram(k, row) / (space_.norms[k] * space_.norms[row]);
            }
        const auto sv = singular_values(constraints);
        const Scalar top = sv.values.front();
        const long bits = space_.bits;
        const Scalar zero_tol = half_precision_tolerance(bits);
        const Scalar band_hi = pow2(-bits / 4);
        const Scalar band_lo = pow2(-(3 * bits) / 4);
        rep.null_sigma_min = top.is_zero() ? Scalar() : sv.values.back() / top;
        for (const auto& s : sv.values) {
            const Scalar rel = top.is_zero() ? Scalar() : s / top;
            if (rel <= zero_tol)
                ++rep.null_dimension;
            if (rel > band_lo && rel < band_hi)
                rep.undecided = true;
        }

        const bool null_ok = rep.null_dimension == 0;
        if (rep.undecided) {
            rep.complete = false;
        } else if (rep.cholesky_ok != null_ok) {
            throw InternalConsistencyError("partition mask " + std::to_string(p.mask()) +
                                           ": Cholesky and null-space certification disagree");
        } else {
            rep.complete = rep.cholesky_ok && null_ok && rep.sigma_min > Scalar(0);
        }
        return rep;
    }

  private:
    void check(const Partition& p) const
    {
        if (p.size() != space_.size())
            throw UsageError("partition size does not match the space dimension");
    }

    // (0-based index, is r) in block order
    static std::vector<std::pair<std::size_t, bool>> ordering(const Partition& p)
    {
        std::vector<std::pair<std::size_t, bool>> out;
        for (auto k : p.n1())
            out.emplace_back(k - 1, false);
        for (auto k : p.n2())
            out.emplace_back(k - 1, true);
        return out;
    }

    const BiorthogonalSystem& bio_;
    const TruncatedSpace& space_;
    RealMatrix gc_;
};

} // namespace detail

inline SpdMatrix mixed_gram(const BiorthogonalSystem& bio, const Partition& p)
{
    return detail::MixedSystemBuilder(bio).mixed_gram(p);
}

inline MixedSystemReport completeness_metric(const BiorthogonalSystem& bio, const Partition& p)
{
    return detail::MixedSystemBuilder(bio).report(p);
}

struct SweepMode
{
    enum class Kind { exhaustive, random_sample };
    Kind kind = Kind::exhaustive;
    std::size_t count = 0;
    std::uint64_t seed = 0;

    static SweepMode exhaustive() { return {}; }
    static SweepMode random_sample(std::size_t count, std::uint64_t seed) { return {Kind::random_sample, count, seed}; }
};

inline constexpr std::size_t kMaxExhaustiveSize = 14;

struct SweepResult
{
    std::vector<MixedSystemReport> reports; // in generation order
    Scalar min_sigma;
    Scalar median_sigma;
    std::uint64_t argmin_mask = 0;
    bool all_complete = true;
    std::size_t undecided = 0;
};

// Exhaustive mode covers all 2^N masks in increasing order; random mode draws
// `count` masks from a 64-bit Mersenne twister seeded with `seed`. Reports are
// computed in parallel and stored in generation order.
inline SweepResult sweep_partitions(const BiorthogonalSystem& bio, const SweepMode& mode, unsigned threads = 0)
{
    const std::size_t n = bio.size();
    std::vector<std::uint64_t> masks;
    if (mode.kind == SweepMode::Kind::exhaustive) {
        if (n > kMaxExhaustiveSize)
            throw UsageError("exhaustive sweep limited to N <= " + std::to_string(kMaxExhaustiveSize));
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
            masks.push_back(m);
    } else {
        std::mt19937_64 rng(mode.seed);
        const std::uint64_t all = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        for (std::size_t i = 0; i < mode.count; ++i)
            masks.push_back(rng() & all);
    }

    const detail::MixedSystemBuilder builder(bio);
    std::vector<std::optional<MixedSystemReport>> slots(masks.size());
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, masks.size())));
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned t) {
        try {
            PrecisionScope scope(bio.space->bits);
            for (std::size_t i = t; i < masks.size(); i += threads)
                slots[i].emplace(builder.report(Partition(n, masks[i])));
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t);
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    SweepResult out;
    PrecisionScope scope(bio.space->bits);
    RealVector sigmas;
    for (auto& s : slots) {
        out.reports.push_back(std::move(*s));
        const auto& r = out.reports.back();
        if (sigmas.empty() || r.sigma_min < out.min_sigma) {
            out.min_sigma = r.sigma_min;
            out.argmin_mask = r.partition.mask();
        }
        sigmas.push_back(r.sigma_min);
        out.all_complete = out.all_complete && r.complete;
        out.undecided += r.undecided ? 1 : 0;
    }
    if (!sigmas.empty()) {
        std::sort(sigmas.begin(), sigmas.end(), [](const Scalar& x, const Scalar& y) { return x < y; });
        const std::size_t mid = sigmas.size() / 2;
        out.median_sigma = sigmas.size() % 2 ? sigmas[mid] : (sigmas[mid - 1] + sigmas[mid]) / Scalar(2);
    }
    return out;
}

} // namespace muntz
