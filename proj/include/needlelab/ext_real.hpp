#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace needlelab {

/// An extended real: either a finite double or a semantic +infinity marker.
/// The marker never leaks into plain arithmetic unflagged; callers must
/// branch on is_infinite() (or use the absorbing helpers below).
class ExtReal {
public:
    ExtReal() : value_(0.0), infinite_(false) {}
    explicit ExtReal(double v) : value_(v), infinite_(false) {}

    static ExtReal infinity() {
        ExtReal r;
        r.infinite_ = true;
        r.value_ = std::numeric_limits<double>::infinity();
        return r;
    }

    bool is_infinite() const { return infinite_; }

    /// Finite value; calling this on the infinity marker is a logic error,
    /// so it returns +inf to make misuse loud rather than silent.
    double value() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    /// +infinity absorbs under max.
    friend ExtReal max(const ExtReal& a, const ExtReal& b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return ExtReal(a.value_ > b.value_ ? a.value_ : b.value_);
    }

    /// +infinity absorbs under multiplication by a positive scalar.
    ExtReal scaled(double positive) const {
        if (infinite_) return infinity();
        return ExtReal(value_ * positive);
    }

    bool operator==(const ExtReal& o) const {
        if (infinite_ || o.infinite_) return infinite_ == o.infinite_;
        return value_ == o.value_;
    }

    std::string str() const;

private:
    double value_;
    bool infinite_;
};

} // namespace needlelab
