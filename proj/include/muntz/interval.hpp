#pragma once

#include <optional>
#include <string>
#include <utility>

#include "muntz/errors.hpp"
#include "muntz/numerics/scalar.hpp"

namespace muntz {

// Bounded interval (a, b) with a < b.
//
// When built from decimal strings the strings are kept, so the endpoints can
// be re-converted exactly at a higher precision.
class Interval
{
  public:
    Interval(std::string a, std::string b)
        : a_(Scalar::parse(a))
        , b_(Scalar::parse(b))
        , source_(std::pair{std::move(a), std::move(b)})
    {
        check();
    }

    Interval(Scalar a, Scalar b)
        : a_(std::move(a))
        , b_(std::move(b))
    {
        check();
    }

    const Scalar& a() const noexcept { return a_; }
    const Scalar& b() const noexcept { return b_; }
    Scalar length() const { return b_ - a_; }

    std::string a_text() const { return source_ ? source_->first : a_.to_string(); }
    std::string b_text() const { return source_ ? source_->second : b_.to_string(); }

    // Re-converts the endpoints at the current working precision.
    Interval rebound() const
    {
        if (source_)
            return Interval(source_->first, source_->second);
        return Interval(a_ + Scalar(), b_ + Scalar());
    }

  private:
    void check() const
    {
        if (!a_.is_finite() || !b_.is_finite())
            throw DomainError("interval endpoints must be finite");
        if (!(a_ < b_))
            throw DomainError("interval needs a < b, got a = " + a_.to_string(20) + ", b = " + b_.to_string(20));
    }

    Scalar a_;
    Scalar b_;
    std::optional<std::pair<std::string, std::string>> source_;
};

} // namespace muntz
