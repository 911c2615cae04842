#pragma once

#include <array>
#include <cstddef>

namespace moser {

inline constexpr std::size_t kDims = 5;
using Vec5 = std::array<double, kDims>;

/// Axis-aligned box [lo_0, hi_0] x ... x [lo_4, hi_4] in (x1, y1, x2, y2, theta).
struct Box5 {
    Vec5 lo{};
    Vec5 hi{};

    /// Throws std::invalid_argument unless every bound is finite and lo <= hi.
    static Box5 make(const Vec5& lo, const Vec5& hi);

    Vec5 center() const;
    Vec5 half_widths() const;
    double width(std::size_t i) const { return hi[i] - lo[i]; }
    double volume() const;
    bool contains(const Vec5& z, double tol = 0.0) const;

    friend bool operator==(const Box5&, const Box5&) = default;
};

}  // namespace moser
