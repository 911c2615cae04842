#include "moser/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace moser {

double RegionZ::volume() { return box().volume(); }

std::pair<double, double> check_psi_boundaries(const ShapeSpec& s) {
    const Objective obj(s);
    return {obj.psi(0.05, 0.0), obj.psi(0.0, 0.04)};
}

double trapezoid_bound(double x2, double y2, const ShapeSpec& s) {
    if (x2 == 0.0 && y2 == 0.0)
        throw std::invalid_argument("trapezoid_bound: triangle centre at the origin");
    const double r = s.polygon_radius;
    const double chord = 2.0 * r * std::cos(std::numbers::pi / s.polygon_sides);
    const double incircle = s.triangle_inradius();
    const double dist = std::hypot(x2, y2);
    return 0.5 * (chord + 2.0 * incircle) * dist + s.polygon_area() / 2.0 +
           std::numbers::pi * incircle * incircle / 2.0;
}

double claim1_bound(double y2, const ShapeSpec& s) {
    const double u = s.rect_width;
    const double v = s.rect_length();
    return u * v + 0.5 * v * ((y2 + s.triangle_inradius()) + s.polygon_radius - u);
}

bool bounding_rectangle_check(const ConfigParams& p, const ShapeSpec& s,
                              const BoundingEnvelope& env) {
    if (!RegionZ::contains(p))
        throw std::invalid_argument("bounding_rectangle_check: configuration outside region Z");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Point& q : config_points(p, s)) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    return xmax - xmin <= env.width && ymax - ymin <= env.height;
}

ReductionReport reduction_report(const ShapeSpec& s, double bound) {
    ReductionReport rep;
    rep.bound = bound;
    std::tie(rep.psi_x_boundary, rep.psi_y_boundary) = check_psi_boundaries(s);
    rep.trapezoid_min = trapezoid_bound(RegionZ::hi[2], 0.0, s);
    rep.claim1_min = claim1_bound(RegionZ::hi[3], s);
    rep.all_pass = rep.psi_x_boundary > bound && rep.psi_y_boundary > bound &&
                   rep.trapezoid_min > bound && rep.claim1_min > bound;
    return rep;
}

}  // namespace moser
