#include "moser/kernels.hpp"

#include <algorithm>

namespace moser::kernels {
namespace {

std::size_t edge_visibility_scalar(const double* x, const double* y, const double* ex,
                                   const double* ey, std::size_t n, double px, double py,
                                   std::uint64_t* visible) {
    std::fill(visible, visible + (n + 63) / 64, std::uint64_t{0});
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = ex[k] * (py - y[k]) - ey[k] * (px - x[k]);
        if (c < 0.0) {
            visible[k / 64] |= std::uint64_t{1} << (k % 64);
            ++count;
        }
    }
    return count;
}

double shoelace_scalar(const double* x, const double* y, std::size_t n) {
    if (n < 3) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += x[i] * y[i + 1] - x[i + 1] * y[i];
    sum += x[n - 1] * y[0] - x[0] * y[n - 1];
    return sum;
}

double max_dist2_scalar(const double* x, const double* y, std::size_t n, double px, double py) {
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = x[k] - px;
        const double dy = y[k] - py;
        best = std::max(best, dx * dx + dy * dy);
    }
    return best;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", &edge_visibility_scalar, &shoelace_scalar,
                                   &max_dist2_scalar};
    return table;
}

}  // namespace moser::kernels
