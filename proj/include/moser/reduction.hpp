#pragma once

#include <numbers>
#include <utility>

#include "moser/box.hpp"
#include "moser/geometry.hpp"
#include "moser/objective.hpp"

namespace moser {

/// The search region. Outside it the analytic side conditions below already
/// force the hull area above the bound, and symmetry covers the rest.
struct RegionZ {
    static constexpr Vec5 lo{0.0, 0.0, -0.17, -0.13, 0.0};
    static constexpr Vec5 hi{0.05, 0.04, 0.17, 0.13, 2.0 * std::numbers::pi / 3.0};

    static Box5 box() { return Box5{lo, hi}; }
    static double volume();
    static bool contains(const ConfigParams& p, double tol = 0.0) {
        return box().contains(p.to_array(), tol);
    }
};

struct ReductionReport {
    double bound = 0.0975;
    double psi_x_boundary = 0.0;  // psi(0.05, 0)
    double psi_y_boundary = 0.0;  // psi(0, 0.04)
    double trapezoid_min = 0.0;   // trapezoid bound at distance 0.17
    double claim1_min = 0.0;      // claim1 bound at y2 = 0.13
    bool all_pass = false;
};

/// (psi(0.05, 0), psi(0, 0.04)): the polygon-plus-rectangle hull area on the
/// two boundaries of the rectangle-centre range.
std::pair<double, double> check_psi_boundaries(const ShapeSpec& s);

/// Lower bound on the hull area when the triangle centre is at distance
/// |(x2, y2)| from the origin: the trapezoid between the polygon chord and the
/// triangle's incircle chord perpendicular to the centre line, plus half the
/// polygon and half the incircle. Throws std::invalid_argument at (0, 0).
double trapezoid_bound(double x2, double y2, const ShapeSpec& s);

/// Hull area of the rectangle centred on the Y axis, the lowest polygon
/// point (0, -r) and a triangle point at height y2 + inradius:
/// u (1/2 - u) + (1/2) (1/2 - u) ((y2 + inradius) + r - u).
double claim1_bound(double y2, const ShapeSpec& s);

/// Whether every configuration point fits in a 0.644 (x) by 0.386 (y)
/// axis-aligned rectangle. Throws std::invalid_argument if p is outside Z.
bool bounding_rectangle_check(const ConfigParams& p, const ShapeSpec& s,
                              const BoundingEnvelope& env = {});

ReductionReport reduction_report(const ShapeSpec& s, double bound = 0.0975);

}  // namespace moser
