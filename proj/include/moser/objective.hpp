#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "moser/box.hpp"
#include "moser/geometry.hpp"

namespace moser {

/// Placement of the rectangle (centre x1, y1) and the triangle (centre x2, y2,
/// rotation theta) relative to the polygon centred at the origin. theta is
/// meaningful modulo 2*pi/3.
struct ConfigParams {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double theta = 0.0;

    Vec5 to_array() const { return {x1, y1, x2, y2, theta}; }
    static ConfigParams from_array(const Vec5& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

    friend bool operator==(const ConfigParams&, const ConfigParams&) = default;
};

/// Area change per unit step in each parameter (c5 is per radian).
struct LipschitzConstants {
    Vec5 c{};

    double weighted_sum(const Vec5& d) const {
        return d[0] * c[0] + d[1] * c[1] + d[2] * c[2] + d[3] * c[3] + d[4] * c[4];
    }
    friend bool operator==(const LipschitzConstants&, const LipschitzConstants&) = default;
};

/// The published constants (0.212, 0.322, 0.326, 0.398, 0.134).
LipschitzConstants paper_constants();

/// Envelope of every configuration in the search region: it fits in a
/// width x height axis-aligned rectangle, and the polygon-plus-rectangle
/// part has diameter below diameter_fr.
struct BoundingEnvelope {
    double width = 0.644;
    double height = 0.386;
    double diameter_fr = 0.46402;
};

/// Polygon vertices, then R1..R4, then T1..T3.
std::vector<Point> config_points(const ConfigParams& p, const ShapeSpec& s);

/// Reference route: monotone-chain hull of config_points, shoelace area.
double f_reference(const ConfigParams& p, const ShapeSpec& s);
double psi_reference(double x1, double y1, const ShapeSpec& s);

/// Hull-area evaluator for a fixed shape. The polygon is cached in
/// structure-of-arrays form, and each evaluation merges the extra points into
/// the polygon's angular order and runs a linear Graham scan, so one call is
/// O(n) in the polygon size. Immutable after construction; evaluations use
/// thread-local scratch and may run concurrently.
class Objective {
public:
    explicit Objective(ShapeSpec shape);

    const ShapeSpec& shape() const { return shape_; }

    /// Hull area of polygon, rectangle and triangle.
    double operator()(const ConfigParams& p) const;
    double f(const ConfigParams& p) const { return (*this)(p); }

    /// Hull area of polygon and rectangle only.
    double psi(double x1, double y1) const;

    /// Hull area of the polygon together with arbitrary extra points.
    double hull_area_with(std::span<const Point> extras) const;

    /// Hull vertices of the full configuration (reference route), for export.
    ConvexPolygon hull(const ConfigParams& p) const;

    double polygon_area() const { return polygon_area_; }

private:
    ShapeSpec shape_;
    std::vector<double> x_, y_, ex_, ey_;
    double inradius_ = 0.0;
    double polygon_area_ = 0.0;
};

inline double f(const ConfigParams& p, const ShapeSpec& s) { return Objective(s)(p); }
inline double psi(double x1, double y1, const ShapeSpec& s) { return Objective(s).psi(x1, y1); }

/// One inequality from the derivation of a Lipschitz constant: the constant
/// must be at least `required`.
struct ConstantDerivation {
    std::string name;
    std::string formula;
    double required = 0.0;
    double constant = 0.0;
    bool pass = false;
};

/// Recomputes the lower bound each constant must satisfy from the shape and
/// the envelope. `diameter_fr` is the measured diameter of polygon plus
/// rectangle at the extreme rectangle position; it enters the c5 bound
/// through the envelope, and must itself not exceed the envelope value.
std::vector<ConstantDerivation> audit_constant_derivations(const LipschitzConstants& c,
                                                           const ShapeSpec& s,
                                                           const BoundingEnvelope& env,
                                                           double diameter_fr);

/// Diameter of polygon plus rectangle with the rectangle centred at (x1, y1).
double polygon_rectangle_diameter(double x1, double y1, const ShapeSpec& s);

struct AuditResult {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    /// Lipschitz audit only: violations where the smaller of the two values is
    /// at most the sublevel threshold.
    std::uint64_t sublevel_violations = 0;
    /// Lipschitz audit: largest |df| / (C_i eps). Convexity audit: most
    /// negative second difference.
    double worst = 0.0;
};

/// Random coordinate i, random eps in (0, max_step], random z with z and
/// z + eps e_i both in `region`: checks |f(z + eps e_i) - f(z)| <= C_i eps + 1e-12.
/// The envelope behind C1 only holds where f <= 0.0975, so violations with
/// min(f) <= sublevel are counted separately.
AuditResult lipschitz_audit(const Objective& obj, const LipschitzConstants& c, const Box5& region,
                            std::uint64_t samples, std::uint64_t seed, double max_step = 0.02,
                            double sublevel = 0.0975);

/// Random z in `region`, random translation coordinate i in {x1, y1, x2, y2},
/// random h in (0, max_step]: checks f(z - h e_i) + f(z + h e_i) - 2 f(z) >= -1e-12.
AuditResult convexity_audit(const Objective& obj, const Box5& region, std::uint64_t samples,
                            std::uint64_t seed, double max_step = 0.01);

}  // namespace moser
