// Compiled with -mavx2. Only reached through avx2_kernels() after a CPU check.
#include "moser/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <bit>

namespace moser::kernels {
namespace {

std::size_t edge_visibility_avx2(const double* x, const double* y, const double* ex,
                                 const double* ey, std::size_t n, double px, double py,
                                 std::uint64_t* visible) {
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpy = _mm256_set1_pd(py);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t count = 0;
    std::size_t k = 0;
    for (std::size_t w = 0; w < (n + 63) / 64; ++w) {
        std::uint64_t word = 0;
        const std::size_t end = std::min(n, (w + 1) * 64);
        for (; k + 4 <= end; k += 4) {
            const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(y + k));
            const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(x + k));
            const __m256d c = _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(ex + k), dy),
                                            _mm256_mul_pd(_mm256_loadu_pd(ey + k), dx));
            const auto mask = static_cast<std::uint64_t>(
                _mm256_movemask_pd(_mm256_cmp_pd(c, zero, _CMP_LT_OQ)));
            word |= mask << (k % 64);
        }
        for (; k < end; ++k) {
            const double c = ex[k] * (py - y[k]) - ey[k] * (px - x[k]);
            if (c < 0.0) word |= std::uint64_t{1} << (k % 64);
        }
        visible[w] = word;
        count += static_cast<std::size_t>(std::popcount(word));
    }
    return count;
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return std::max(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

double shoelace_avx2(const double* x, const double* y, std::size_t n) {
    if (n < 3) return 0.0;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    // Terms i = 0 .. n-2 read element i+1, so the vector loop stops one short.
    for (; i + 5 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(x + i);
        const __m256d y0 = _mm256_loadu_pd(y + i);
        const __m256d x1 = _mm256_loadu_pd(x + i + 1);
        const __m256d y1 = _mm256_loadu_pd(y + i + 1);
        acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_mul_pd(x0, y1), _mm256_mul_pd(x1, y0)));
    }
    double sum = hsum(acc);
    for (; i + 1 < n; ++i) sum += x[i] * y[i + 1] - x[i + 1] * y[i];
    sum += x[n - 1] * y[0] - x[0] * y[n - 1];
    return sum;
}

double max_dist2_avx2(const double* x, const double* y, std::size_t n, double px, double py) {
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpy = _mm256_set1_pd(py);
    __m256d best4 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + k), vpx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + k), vpy);
        best4 = _mm256_max_pd(best4, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    }
    double best = hmax(best4);
    for (; k < n; ++k) {
        const double dx = x[k] - px;
        const double dy = y[k] - py;
        best = std::max(best, dx * dx + dy * dy);
    }
    return best;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{"avx2", &edge_visibility_avx2, &shoelace_avx2,
                                   &max_dist2_avx2};
    return table;
}

}  // namespace moser::kernels
