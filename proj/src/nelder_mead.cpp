#include "moser/nelder_mead.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace moser {

NelderMeadResult nelder_mead(const std::function<double(const Vec5&)>& f, const Vec5& x0,
                             const Vec5& step, const NelderMeadOptions& opt) {
    constexpr std::size_t n = kDims;
    std::array<Vec5, n + 1> x;
    std::array<double, n + 1> fx;
    NelderMeadResult res;

    auto eval = [&](const Vec5& p) {
        ++res.evaluations;
        return f(p);
    };

    x.fill(x0);
    for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(x[i]);

    std::array<std::size_t, n + 1> idx;
    auto affine = [](const Vec5& a, const Vec5& b, double t) {
        Vec5 r;
        for (std::size_t j = 0; j < n; ++j) r[j] = a[j] + t * (b[j] - a[j]);
        return r;
    };

    while (true) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];

        double spread = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) spread = std::max(spread, std::abs(x[idx[i]][j] - x[best][j]));
        if (fx[worst] - fx[best] <= opt.f_tol && spread <= opt.x_tol) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opt.max_evaluations) break;

        Vec5 c{};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c[j] += x[idx[i]][j];
        for (double& v : c) v /= static_cast<double>(n);

        const Vec5 xr = affine(c, x[worst], -1.0);
        const double fr = eval(xr);
        if (fr < fx[best]) {
            const Vec5 xe = affine(c, x[worst], -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                x[worst] = xe;
                fx[worst] = fe;
            } else {
                x[worst] = xr;
                fx[worst] = fr;
            }
            continue;
        }
        if (fr < fx[second]) {
            x[worst] = xr;
            fx[worst] = fr;
            continue;
        }
        // Outside contraction if the reflection helped at all, inside otherwise.
        const bool outside = fr < fx[worst];
        const Vec5 xc = outside ? affine(c, xr, 0.5) : affine(c, x[worst], 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fx[worst])) {
            x[worst] = xc;
            fx[worst] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            x[idx[i]] = affine(x[best], x[idx[i]], 0.5);
            fx[idx[i]] = eval(x[idx[i]]);
        }
    }

    const std::size_t best = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    res.x = x[best];
    res.value = fx[best];
    return res;
}

}  // namespace moser
