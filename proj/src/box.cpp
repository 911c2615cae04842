#include "moser/box.hpp"

#include <cmath>
#include <stdexcept>

namespace moser {

Box5 Box5::make(const Vec5& lo, const Vec5& hi) {
    for (std::size_t i = 0; i < kDims; ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            throw std::invalid_argument("Box5: non-finite bound");
        if (lo[i] > hi[i]) throw std::invalid_argument("Box5: lower bound exceeds upper bound");
    }
    return Box5{lo, hi};
}

Vec5 Box5::center() const {
    Vec5 c;
    for (std::size_t i = 0; i < kDims; ++i) c[i] = (lo[i] + hi[i]) / 2.0;
    return c;
}

Vec5 Box5::half_widths() const {
    Vec5 d;
    for (std::size_t i = 0; i < kDims; ++i) d[i] = (hi[i] - lo[i]) / 2.0;
    return d;
}

double Box5::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < kDims; ++i) v *= hi[i] - lo[i];
    return v;
}

bool Box5::contains(const Vec5& z, double tol) const {
    for (std::size_t i = 0; i < kDims; ++i) {
        if (z[i] < lo[i] - tol || z[i] > hi[i] + tol) return false;
    }
    return true;
}

}  // namespace moser
