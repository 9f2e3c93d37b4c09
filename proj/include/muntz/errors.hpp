#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace muntz {

// Base of every error raised by the library. Callers that only need a
// message can catch this; the CLI maps the concrete kinds to exit codes.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain (non-positive exponent, a >= b, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

class DistinctnessError : public Error
{
  public:
    using Error::Error;
};

// Dimension mismatch, wrong operator kind, index out of range.
class UsageError : public Error
{
  public:
    using Error::Error;
};

class NotPositiveDefinite : public Error
{
  public:
    NotPositiveDefinite(std::size_t pivot_index, std::string pivot_value)
        : Error("matrix is not positive definite: pivot " + std::to_string(pivot_index) +
                " = " + pivot_value)
        , pivot_index_(pivot_index)
        , pivot_value_(std::move(pivot_value))
    {
    }

    std::size_t pivot_index() const noexcept { return pivot_index_; }
    const std::string& pivot_value() const noexcept { return pivot_value_; }

  private:
    std::size_t pivot_index_;
    std::string pivot_value_;
};

class PrecisionExhausted : public Error
{
  public:
    explicit PrecisionExhausted(long limit_bits, const std::string& what_failed)
        : Error(what_failed + ": precision exhausted at escalation limit of " +
                std::to_string(limit_bits) + " bits")
        , limit_bits_(limit_bits)
    {
    }

    long limit_bits() const noexcept { return limit_bits_; }

  private:
    long limit_bits_;
};

class QuadratureFailure : public Error
{
  public:
    QuadratureFailure(std::string previous, std::string last)
        : Error("quadrature did not converge: last estimates " + previous + " and " + last)
        , previous_(std::move(previous))
        , last_(std::move(last))
    {
    }

    const std::string& previous_estimate() const noexcept { return previous_; }
    const std::string& last_estimate() const noexcept { return last_; }

  private:
    std::string previous_;
    std::string last_;
};

class WeightBoundError : public Error
{
  public:
    explicit WeightBoundError(std::size_t index)
        : Error("weight u_" + std::to_string(index) + " exceeds the bound exp(-delta*lambda_" +
                std::to_string(index) + ")")
        , index_(index)
    {
    }

    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

// Two independent computations of the same fact disagree, or a value that
// can only be roundoff is too large to be roundoff.
class InternalConsistencyError : public Error
{
  public:
    using Error::Error;
};

// A numerical rank decision would depend on values sitting in the guard band
// around the zero threshold. Retry at higher precision.
class RankUndecided : public Error
{
  public:
    using Error::Error;
};

class ConfigError : public Error
{
  public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations))
        , violations_(std::move(violations))
    {
    }

    const std::vector<std::string>& violations() const noexcept { return violations_; }

  private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid configuration:";
        for (const auto& s : v)
            out += "\n  - " + s;
        return out;
    }

    std::vector<std::string> violations_;
};

} // namespace muntz
