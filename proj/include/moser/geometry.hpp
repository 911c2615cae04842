#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace moser {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Vertices in counter-clockwise order. Degenerate hulls (one point, or the
/// two extreme points of a collinear set) are allowed and have zero area.
class ConvexPolygon {
public:
    ConvexPolygon() = default;

    /// Takes vertices that are already convex and CCW; throws
    /// std::invalid_argument if they are not.
    explicit ConvexPolygon(std::vector<Point> ccw_vertices);

    std::span<const Point> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }
    const Point& operator[](std::size_t i) const { return vertices_[i]; }

    /// Orientation test against every edge; points on the boundary (within
    /// `tol`) count as inside.
    bool contains(const Point& p, double tol = 1e-12) const;

private:
    struct Unchecked {};
    ConvexPolygon(Unchecked, std::vector<Point> v) : vertices_(std::move(v)) {}
    friend ConvexPolygon convex_hull(std::span<const Point>);
    friend ConvexPolygon regular_polygon(int, double, double);

    std::vector<Point> vertices_;
};

/// The three bodies of a configuration: a regular polygon standing in for the
/// circle of perimeter 1, an axis-aligned rectangle of perimeter 1, and an
/// equilateral triangle of perimeter 1.
struct ShapeSpec {
    int polygon_sides = 500;
    double polygon_radius = 1.0 / (2.0 * std::numbers::pi);
    double polygon_phase = 0.0;
    double rect_width = 0.0375;
    double triangle_circumradius = std::numbers::sqrt3 / 9.0;

    double rect_length() const { return 0.5 - rect_width; }
    double triangle_side() const { return triangle_circumradius * std::numbers::sqrt3; }
    double triangle_inradius() const { return triangle_circumradius / 2.0; }
    double polygon_perimeter() const;
    double polygon_area() const;

    /// Throws std::invalid_argument on a malformed spec. A zero rectangle width
    /// (the rectangle collapses to a segment) is allowed.
    void validate() const;
    /// True when the polygon fits inside the circle of perimeter 1, which is
    /// what makes hull areas valid lower bounds.
    bool polygon_inscribed() const;

    friend bool operator==(const ShapeSpec&, const ShapeSpec&) = default;
};

ConvexPolygon regular_polygon(int n, double radius, double phase = 0.0);

/// R1..R4 per the configuration convention: R1 top-left, R2 top-right,
/// R3 bottom-right, R4 bottom-left. Width `u` is the Y extent.
std::array<Point, 4> rectangle_vertices(double x1, double y1, double u);

/// Same corners as rectangle_vertices without the (0, 1/2) width check, so a
/// degenerate width-0 rectangle is representable.
std::array<Point, 4> rectangle_corners(double x1, double y1, double width, double length);

std::array<Point, 3> triangle_vertices(double x2, double y2, double theta,
                                       double circumradius = std::numbers::sqrt3 / 9.0);

/// Andrew's monotone chain. Collinear points are dropped.
ConvexPolygon convex_hull(std::span<const Point> points);

/// Shoelace area; 0 for fewer than three vertices.
double polygon_area(const ConvexPolygon& p);

/// Rotating calipers over the hull.
double diameter(std::span<const Point> points);

/// All-pairs maximum distance. Quadratic; intended for small inputs and for
/// cross-checking `diameter`.
double diameter_brute_force(std::span<const Point> points);

/// Largest distance from `from` to any point of `points`.
double max_distance_from(const Point& from, std::span<const Point> points);

}  // namespace moser
