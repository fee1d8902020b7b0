#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace guichard {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Point = Vec3;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr double length() const noexcept { return hi - lo; }
    constexpr double mid() const noexcept { return 0.5 * (lo + hi); }
    constexpr bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// Axis-aligned box in R^3.
struct Box {
    std::array<Interval, 3> axes{};

    constexpr double extent(std::size_t axis) const noexcept { return axes[axis].length(); }

    constexpr bool contains(const Point& p) const noexcept {
        return axes[0].contains(p[0]) && axes[1].contains(p[1]) && axes[2].contains(p[2]);
    }

    constexpr Point center() const noexcept { return {axes[0].mid(), axes[1].mid(), axes[2].mid()}; }

    /// Corner selected by the low three bits of `mask`.
    constexpr Point corner(unsigned mask) const noexcept {
        return {(mask & 1u) ? axes[0].hi : axes[0].lo, (mask & 2u) ? axes[1].hi : axes[1].lo,
                (mask & 4u) ? axes[2].hi : axes[2].lo};
    }
};

inline double dot(const Vec3& a, const Vec3& b) noexcept {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

/// The two indices different from i (ascending), for i in {0,1,2}.
constexpr std::array<std::size_t, 2> others(std::size_t i) noexcept {
    return i == 0 ? std::array<std::size_t, 2>{1, 2}
                  : (i == 1 ? std::array<std::size_t, 2>{0, 2} : std::array<std::size_t, 2>{0, 1});
}

/// The index different from i and j.
constexpr std::size_t third(std::size_t i, std::size_t j) noexcept { return 3 - i - j; }

/// Sign pattern of the Guichard condition: +1, -1, +1 (0-based indices).
constexpr int epsilon(std::size_t s) noexcept { return s == 1 ? -1 : 1; }

} // namespace guichard
