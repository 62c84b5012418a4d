#pragma once

#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mbs {

// Angular-momentum quantum number stored as twice its value, so that
// half-integers stay exact and usable as map keys. J-type values are >= 0;
// M-type values range over -J..J in integer steps of the same parity.
class HalfInt {
  public:
    constexpr HalfInt() = default;
    constexpr HalfInt(int whole) : twice_(2 * whole) {}

    static constexpr HalfInt from_twice(int twice) {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return (twice_ & 1) == 0; }
    constexpr int multiplicity() const { return twice_ + 1; }

    friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) {
        return from_twice(a.twice_ + b.twice_);
    }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) {
        return from_twice(a.twice_ - b.twice_);
    }
    constexpr HalfInt operator-() const { return from_twice(-twice_); }

    std::string to_string() const {
        if (is_integer())
            return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    int twice_ = 0;
};

constexpr HalfInt half_twice(int twice) { return HalfInt::from_twice(twice); }

inline HalfInt abs(HalfInt h) { return HalfInt::from_twice(std::abs(h.twice())); }

inline HalfInt min(HalfInt a, HalfInt b) { return a < b ? a : b; }
inline HalfInt max(HalfInt a, HalfInt b) { return a < b ? b : a; }

// Checks |m| <= j with j - m integer, the condition for m to be a valid
// projection of spin j.
inline bool valid_projection(HalfInt j, HalfInt m) {
    return abs(m) <= j && ((j.twice() - m.twice()) & 1) == 0;
}

inline void require_spin(HalfInt j, const char* what) {
    if (j.twice() < 0)
        throw std::domain_error(std::string(what) + ": negative spin " + j.to_string());
}

inline void require_projection(HalfInt j, HalfInt m, const char* what) {
    require_spin(j, what);
    if (!valid_projection(j, m))
        throw std::domain_error(std::string(what) + ": projection " + m.to_string() +
                                " invalid for spin " + j.to_string());
}

} // namespace mbs
