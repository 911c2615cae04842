#include "moser/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "moser/kernels.hpp"

namespace moser {

ConvexPolygon::ConvexPolygon(std::vector<Point> ccw_vertices) : vertices_(std::move(ccw_vertices)) {
    const std::size_t n = vertices_.size();
    for (const Point& p : vertices_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("ConvexPolygon: non-finite vertex");
    }
    for (std::size_t i = 0; i < n && n > 1; ++i) {
        if (vertices_[i] == vertices_[(i + 1) % n])
            throw std::invalid_argument("ConvexPolygon: repeated consecutive vertex at " +
                                        std::to_string(i));
    }
    if (n < 3) return;
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(vertices_[i], vertices_[(i + 1) % n], vertices_[(i + 2) % n]) < 0.0)
            throw std::invalid_argument("ConvexPolygon: reflex or clockwise turn at " +
                                        std::to_string((i + 1) % n));
    }
}

bool ConvexPolygon::contains(const Point& p, double tol) const {
    const std::size_t n = vertices_.size();
    if (n == 0) return false;
    if (n == 1) return std::hypot(p.x - vertices_[0].x, p.y - vertices_[0].y) <= tol;
    if (n == 2) {
        const Point& a = vertices_[0];
        const Point& b = vertices_[1];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (std::abs(cross(a, b, p)) > tol * len) return false;
        const double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
        return t >= -tol && t <= 1.0 + tol;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % n];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (cross(a, b, p) < -tol * len) return false;
    }
    return true;
}

double ShapeSpec::polygon_perimeter() const {
    return 2.0 * polygon_sides * polygon_radius * std::sin(std::numbers::pi / polygon_sides);
}

double ShapeSpec::polygon_area() const {
    return 0.5 * polygon_sides * polygon_radius * polygon_radius *
           std::sin(2.0 * std::numbers::pi / polygon_sides);
}

void ShapeSpec::validate() const {
    if (polygon_sides < 3) throw std::invalid_argument("ShapeSpec: polygon needs at least 3 sides");
    if (!(polygon_radius > 0.0) || !std::isfinite(polygon_radius))
        throw std::invalid_argument("ShapeSpec: polygon radius must be positive");
    if (!(rect_width >= 0.0 && rect_width < 0.5))
        throw std::invalid_argument("ShapeSpec: rectangle width must lie in [0, 1/2)");
    if (!(triangle_circumradius > 0.0) || !std::isfinite(triangle_circumradius))
        throw std::invalid_argument("ShapeSpec: triangle circumradius must be positive");
    if (!std::isfinite(polygon_phase)) throw std::invalid_argument("ShapeSpec: non-finite phase");
}

bool ShapeSpec::polygon_inscribed() const {
    return polygon_radius <= 1.0 / (2.0 * std::numbers::pi);
}

ConvexPolygon regular_polygon(int n, double radius, double phase) {
    if (n < 3) throw std::invalid_argument("regular_polygon: n must be at least 3");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("regular_polygon: radius must be positive");
    std::vector<Point> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double a = phase + 2.0 * std::numbers::pi * k / n;
        v[static_cast<std::size_t>(k)] = {radius * std::cos(a), radius * std::sin(a)};
    }
    return ConvexPolygon(ConvexPolygon::Unchecked{}, std::move(v));
}

std::array<Point, 4> rectangle_corners(double x1, double y1, double width, double length) {
    const double hl = length / 2.0;
    const double hw = width / 2.0;
    return {Point{x1 - hl, y1 + hw}, Point{x1 + hl, y1 + hw}, Point{x1 + hl, y1 - hw},
            Point{x1 - hl, y1 - hw}};
}

std::array<Point, 4> rectangle_vertices(double x1, double y1, double u) {
    if (!(u > 0.0 && u < 0.5))
        throw std::invalid_argument("rectangle_vertices: width must lie in (0, 1/2)");
    return rectangle_corners(x1, y1, u, 0.5 - u);
}

std::array<Point, 3> triangle_vertices(double x2, double y2, double theta, double circumradius) {
    constexpr double third = 2.0 * std::numbers::pi / 3.0;
    std::array<Point, 3> t;
    for (int j = 0; j < 3; ++j) {
        const double a = theta + third * j;
        t[static_cast<std::size_t>(j)] = {x2 + circumradius * std::cos(a),
                                          y2 + circumradius * std::sin(a)};
    }
    return t;
}

ConvexPolygon convex_hull(std::span<const Point> points) {
    if (points.empty()) throw std::invalid_argument("convex_hull: empty point set");
    std::vector<Point> pts(points.begin(), points.end());
    for (const Point& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("convex_hull: non-finite point");
    }
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return ConvexPolygon(ConvexPolygon::Unchecked{}, std::move(pts));

    std::vector<Point> hull;
    hull.reserve(2 * pts.size());
    for (const Point& p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    const std::size_t lower = hull.size() + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), pts[i]) <= 0.0)
            hull.pop_back();
        hull.push_back(pts[i]);
    }
    hull.pop_back();
    return ConvexPolygon(ConvexPolygon::Unchecked{}, std::move(hull));
}

double polygon_area(const ConvexPolygon& p) {
    const auto v = p.vertices();
    const std::size_t n = v.size();
    if (n < 3) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % n];
        sum += a.x * b.y - b.x * a.y;
    }
    return std::max(0.0, 0.5 * sum);
}

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double diameter(std::span<const Point> points) {
    if (points.size() < 2) throw std::invalid_argument("diameter: need at least two points");
    const ConvexPolygon hull = convex_hull(points);
    const auto v = hull.vertices();
    const std::size_t n = v.size();
    if (n == 1) return 0.0;
    if (n == 2) return dist(v[0], v[1]);

    // For each edge (i, i+1), walk j to the vertex farthest from the edge's
    // supporting line; antipodal pairs are checked as they appear.
    double best = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % n];
        while (std::abs(cross(a, b, v[(j + 1) % n])) > std::abs(cross(a, b, v[j])))
            j = (j + 1) % n;
        best = std::max({best, dist(a, v[j]), dist(b, v[j])});
    }
    return best;
}

double diameter_brute_force(std::span<const Point> points) {
    if (points.size() < 2) throw std::invalid_argument("diameter: need at least two points");
    std::vector<double> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    const auto& k = kernels::active_kernels();
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        best = std::max(best, k.max_dist2(xs.data() + i + 1, ys.data() + i + 1,
                                          points.size() - i - 1, xs[i], ys[i]));
    return std::sqrt(best);
}

double max_distance_from(const Point& from, std::span<const Point> points) {
    double best = 0.0;
    for (const Point& p : points) best = std::max(best, dist(from, p));
    return best;
}

}  // namespace moser
