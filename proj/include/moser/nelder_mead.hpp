#pragma once

#include <cstddef>
#include <functional>

#include "moser/box.hpp"

namespace moser {

struct NelderMeadOptions {
    std::size_t max_evaluations = 4000;
    /// Stop when the simplex values spread by less than this...
    double f_tol = 1e-14;
    /// ...and every vertex is within this of the best one (max norm).
    double x_tol = 1e-10;
};

struct NelderMeadResult {
    Vec5 x{};
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Standard simplex descent (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) starting from x0 and x0 + step_i e_i. Deterministic; never
/// returns a point worse than x0.
NelderMeadResult nelder_mead(const std::function<double(const Vec5&)>& f, const Vec5& x0,
                             const Vec5& step, const NelderMeadOptions& opt = {});

}  // namespace moser
