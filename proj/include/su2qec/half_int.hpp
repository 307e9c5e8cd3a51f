#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace su2qec {

// Exact half-integer quantum number (s, J, M, j1, m1, ...).
//
// Stored as twice the value in a signed integer so that equality, ordering
// and hashing are exact. All angular-momentum bookkeeping in this library
// runs on HalfInt; doubles appear only at the point where a coefficient is
// actually evaluated.
class HalfInt {
  public:
    constexpr HalfInt() = default;
    constexpr HalfInt(long long v) : tw_(2ll * v) {}  // NOLINT: implicit by design

    static constexpr HalfInt from_twice(long long twice) {
        HalfInt h;
        h.tw_ = twice;
        return h;
    }

    // Fails unless twice the value is an exact integer.
    static HalfInt from_double(double x) {
        const double t = 2.0 * x;
        if (!std::isfinite(t) || std::nearbyint(t) != t ||
            std::abs(t) > 9.0e15) {
            throw std::domain_error("HalfInt: " + std::to_string(x) +
                                    " is not an exact half-integer");
        }
        return from_twice(static_cast<long long>(t));
    }

    constexpr long long twice() const { return tw_; }
    constexpr double value() const { return static_cast<double>(tw_) / 2.0; }
    constexpr bool is_integer() const { return tw_ % 2 == 0; }
    constexpr bool is_negative() const { return tw_ < 0; }

    constexpr HalfInt operator-() const { return from_twice(-tw_); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(tw_ + o.tw_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(tw_ - o.tw_); }
    constexpr HalfInt& operator+=(HalfInt o) { tw_ += o.tw_; return *this; }
    constexpr HalfInt& operator-=(HalfInt o) { tw_ -= o.tw_; return *this; }

    friend constexpr HalfInt operator*(HalfInt h, long long k) {
        return from_twice(h.tw_ * k);
    }
    friend constexpr HalfInt operator*(long long k, HalfInt h) { return h * k; }

    constexpr auto operator<=>(const HalfInt&) const = default;

    HalfInt abs() const { return from_twice(tw_ < 0 ? -tw_ : tw_); }

    // "3", "-5", "1/2", "-3/2"
    std::string str() const {
        if (is_integer()) return std::to_string(tw_ / 2);
        return std::to_string(tw_) + "/2";
    }

  private:
    long long tw_ = 0;
};

// Parses "1", "-3", "1/2", "-3/2". Anything else is a domain error.
inline HalfInt parse_half_int(const std::string& text) {
    std::size_t pos = 0;
    try {
        const long long num = std::stoll(text, &pos);
        if (pos == text.size()) return HalfInt(num);
        if (text.substr(pos) == "/2") return HalfInt::from_twice(num);
    } catch (const std::exception&) {
        // fall through to the domain error below
    }
    throw std::domain_error("not a half-integer: '" + text + "'");
}

// True when a and b sit on the same magnetic ladder (difference integral).
inline bool same_ladder(HalfInt a, HalfInt b) {
    return (a.twice() - b.twice()) % 2 == 0;
}

}  // namespace su2qec

template <>
struct std::hash<su2qec::HalfInt> {
    std::size_t operator()(const su2qec::HalfInt& h) const noexcept {
        return std::hash<long long>{}(h.twice());
    }
};
