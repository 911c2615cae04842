#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops of the hull evaluator. Every kernel has a scalar
// reference and (on x86-64) an AVX2 variant; the variant is chosen once at
// runtime. Arrays are structure-of-arrays, unaligned, any length.
//
// Products and differences are evaluated in the same order in every variant,
// so per-element results (edge_visibility) are bit-identical. Reductions
// (shoelace, max_dist2) may differ in the last bits because the vector
// variants accumulate in lanes.

namespace moser::kernels {

struct KernelTable {
    std::string_view name;

    /// For edges k = 0..n-1 running from (x[k], y[k]) with direction
    /// (ex[k], ey[k]), sets bit k of the packed mask `visible` (bit k % 64 of
    /// word k / 64) when the point (px, py) lies strictly on the outer
    /// (right) side of the edge. Writes (n + 63) / 64 words; bits past n are
    /// zero. Returns the number of visible edges.
    std::size_t (*edge_visibility)(const double* x, const double* y, const double* ex,
                                   const double* ey, std::size_t n, double px, double py,
                                   std::uint64_t* visible);

    /// Twice the signed area of the closed ring (x[0], y[0]) .. (x[n-1], y[n-1]).
    double (*shoelace)(const double* x, const double* y, std::size_t n);

    /// max_k (x[k] - px)^2 + (y[k] - py)^2, or 0 for n == 0.
    double (*max_dist2)(const double* x, const double* y, std::size_t n, double px, double py);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// The table used by the library. AVX2 when available, unless the
/// environment variable MOSER_KERNELS=scalar forces the reference.
const KernelTable& active_kernels();

}  // namespace moser::kernels
