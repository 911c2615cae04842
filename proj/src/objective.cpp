#include "moser/objective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "moser/kernels.hpp"

namespace moser {

LipschitzConstants paper_constants() { return {{0.212, 0.322, 0.326, 0.398, 0.134}}; }

std::vector<Point> config_points(const ConfigParams& p, const ShapeSpec& s) {
    const ConvexPolygon poly = regular_polygon(s.polygon_sides, s.polygon_radius, s.polygon_phase);
    std::vector<Point> pts(poly.vertices().begin(), poly.vertices().end());
    for (const Point& q : rectangle_corners(p.x1, p.y1, s.rect_width, s.rect_length()))
        pts.push_back(q);
    for (const Point& q : triangle_vertices(p.x2, p.y2, p.theta, s.triangle_circumradius))
        pts.push_back(q);
    return pts;
}

double f_reference(const ConfigParams& p, const ShapeSpec& s) {
    const std::vector<Point> pts = config_points(p, s);
    return polygon_area(convex_hull(pts));
}

double psi_reference(double x1, double y1, const ShapeSpec& s) {
    const ConvexPolygon poly = regular_polygon(s.polygon_sides, s.polygon_radius, s.polygon_phase);
    std::vector<Point> pts(poly.vertices().begin(), poly.vertices().end());
    for (const Point& q : rectangle_corners(x1, y1, s.rect_width, s.rect_length())) pts.push_back(q);
    return polygon_area(convex_hull(pts));
}

Objective::Objective(ShapeSpec shape) : shape_(shape) {
    shape_.validate();
    const ConvexPolygon poly =
        regular_polygon(shape_.polygon_sides, shape_.polygon_radius, shape_.polygon_phase);
    const std::size_t n = poly.size();
    // Two laps, so every cyclic window of edges is contiguous.
    x_.resize(2 * n);
    y_.resize(2 * n);
    ex_.resize(2 * n);
    ey_.resize(2 * n);
    for (std::size_t k = 0; k < 2 * n; ++k) {
        x_[k] = poly[k % n].x;
        y_[k] = poly[k % n].y;
    }
    for (std::size_t k = 0; k < 2 * n; ++k) {
        const std::size_t j = (k + 1) % n;
        ex_[k] = poly[j].x - x_[k];
        ey_[k] = poly[j].y - y_[k];
    }
    inradius_ = shape_.polygon_radius * std::cos(std::numbers::pi / shape_.polygon_sides);
    polygon_area_ = 0.5 * kernels::active_kernels().shoelace(x_.data(), y_.data(), n);
}

namespace {

struct Scratch {
    std::vector<std::uint64_t> visible;
    std::vector<std::uint64_t> hidden;  // 2n bits plus a zero pad word
    std::vector<double> seq_x, seq_y;
    std::vector<double> hull_x, hull_y;
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

struct Outside {
    double angle;  // offset from the polygon phase, in [0, 2 pi)
    Point p;
};

/// Bits [offset, offset + 64) of a packed mask; the array needs a zero pad word.
std::uint64_t bits_at(const std::uint64_t* bits, std::size_t offset) {
    const std::size_t w = offset / 64;
    const unsigned sh = offset % 64;
    if (sh == 0) return bits[w];
    return (bits[w] >> sh) | (bits[w + 1] << (64 - sh));
}

/// dst bits [offset, offset + len) |= src bits [0, len).
void or_bits(std::uint64_t* dst, std::size_t offset, const std::uint64_t* src, std::size_t len) {
    const std::size_t words = (len + 63) / 64;
    const unsigned sh = offset % 64;
    for (std::size_t j = 0; j < words; ++j) {
        std::uint64_t v = src[j];
        if (j == words - 1 && len % 64 != 0) v &= (std::uint64_t{1} << (len % 64)) - 1;
        const std::size_t w = offset / 64 + j;
        dst[w] |= v << sh;
        if (sh != 0) dst[w + 1] |= v >> (64 - sh);
    }
}

}  // namespace

double Objective::hull_area_with(std::span<const Point> extras) const {
    const auto& kern = kernels::active_kernels();
    const std::size_t n = x_.size() / 2;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    Scratch& s = scratch();
    const std::size_t words = (n + 63) / 64;
    s.visible.resize(words + 1);
    s.hidden.assign((2 * n + 63) / 64 + 2, 0);

    std::array<Outside, 16> outside_buf;
    std::vector<Outside> outside_heap;
    std::size_t n_out = 0;
    const bool small = extras.size() <= outside_buf.size();
    if (!small) outside_heap.resize(extras.size());
    Outside* outside = small ? outside_buf.data() : outside_heap.data();

    for (const Point& p : extras) {
        const double rho = std::hypot(p.x, p.y);
        if (rho <= inradius_ * (1.0 - 1e-9)) continue;
        double a = std::atan2(p.y, p.x) - shape_.polygon_phase;
        a = std::fmod(a, 2.0 * std::numbers::pi);
        if (a < 0.0) a += 2.0 * std::numbers::pi;

        // Edge k (outward normal at angle (k + 1/2) step) is visible from p
        // iff |a - (k + 1/2) step| < acos(inradius / rho). Scan that window
        // plus two edges of margin on each side; everything else is hidden
        // from p.
        const double half = std::acos(std::min(1.0, inradius_ / rho));
        const auto first = static_cast<long long>(std::floor((a - half) / step - 0.5)) - 2;
        const auto last = static_cast<long long>(std::ceil((a + half) / step - 0.5)) + 2;
        const std::size_t len =
            std::min<std::size_t>(static_cast<std::size_t>(last - first + 1), n);
        const auto nn = static_cast<long long>(n);
        const auto k0 = static_cast<std::size_t>(((first % nn) + nn) % nn);

        const std::size_t cnt = kern.edge_visibility(x_.data() + k0, y_.data() + k0, ex_.data() + k0,
                                                     ey_.data() + k0, len, p.x, p.y,
                                                     s.visible.data());
        if (cnt == 0) continue;
        // A vertex both of whose edges are strictly visible from p is interior
        // to the hull of the polygon and p. The edge before the window is not
        // visible, so no carry enters the first word.
        std::uint64_t carry = 0;
        const std::size_t wwords = (len + 63) / 64;
        for (std::size_t w = 0; w < wwords; ++w) {
            const std::uint64_t v = s.visible[w];
            const std::uint64_t prev = (v << 1) | carry;
            carry = v >> 63;
            s.visible[w] = v & prev;
        }
        or_bits(s.hidden.data(), k0, s.visible.data(), len);
        outside[n_out++] = {a, p};
    }
    if (n_out == 0) return polygon_area_;

    // Fold the second lap of the hidden mask onto the first.
    for (std::size_t w = 0; w < words; ++w) s.hidden[w] |= bits_at(s.hidden.data(), n + 64 * w);

    std::sort(outside, outside + n_out,
              [](const Outside& a, const Outside& b) { return a.angle < b.angle; });

    // Star-shaped sequence around the origin: surviving polygon vertices in
    // index order with the outside points merged in by angle.
    s.seq_x.clear();
    s.seq_y.clear();
    std::size_t o = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t keep = ~s.hidden[w];
        if (w == words - 1 && n % 64 != 0) keep &= (std::uint64_t{1} << (n % 64)) - 1;
        while (keep != 0) {
            const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(keep));
            keep &= keep - 1;
            const double ak = step * static_cast<double>(k);
            while (o < n_out && outside[o].angle < ak) {
                s.seq_x.push_back(outside[o].p.x);
                s.seq_y.push_back(outside[o].p.y);
                ++o;
            }
            s.seq_x.push_back(x_[k]);
            s.seq_y.push_back(y_[k]);
        }
    }
    for (; o < n_out; ++o) {
        s.seq_x.push_back(outside[o].p.x);
        s.seq_y.push_back(outside[o].p.y);
    }

    // Graham scan from the rightmost point, which is always a hull vertex.
    const std::size_t m = s.seq_x.size();
    std::size_t start = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (s.seq_x[i] > s.seq_x[start] ||
            (s.seq_x[i] == s.seq_x[start] && s.seq_y[i] > s.seq_y[start]))
            start = i;
    }
    s.hull_x.resize(m + 1);
    s.hull_y.resize(m + 1);
    double* hx = s.hull_x.data();
    double* hy = s.hull_y.data();
    std::size_t top = 0;
    for (std::size_t t = 0; t <= m; ++t) {
        const std::size_t i = (start + t) % m;
        const double qx = s.seq_x[i];
        const double qy = s.seq_y[i];
        while (top >= 2) {
            const double c = (hx[top - 1] - hx[top - 2]) * (qy - hy[top - 2]) -
                             (hy[top - 1] - hy[top - 2]) * (qx - hx[top - 2]);
            if (c > 0.0) break;
            --top;
        }
        hx[top] = qx;
        hy[top] = qy;
        ++top;
    }
    --top;  // the start point was pushed twice
    return 0.5 * kern.shoelace(hx, hy, top);
}

double Objective::operator()(const ConfigParams& p) const {
    const auto r = rectangle_corners(p.x1, p.y1, shape_.rect_width, shape_.rect_length());
    const auto t = triangle_vertices(p.x2, p.y2, p.theta, shape_.triangle_circumradius);
    const std::array<Point, 7> extras{r[0], r[1], r[2], r[3], t[0], t[1], t[2]};
    return hull_area_with(extras);
}

double Objective::psi(double x1, double y1) const {
    const auto r = rectangle_corners(x1, y1, shape_.rect_width, shape_.rect_length());
    return hull_area_with(r);
}

ConvexPolygon Objective::hull(const ConfigParams& p) const {
    return convex_hull(config_points(p, shape_));
}

double polygon_rectangle_diameter(double x1, double y1, const ShapeSpec& s) {
    const ConvexPolygon poly = regular_polygon(s.polygon_sides, s.polygon_radius, s.polygon_phase);
    std::vector<Point> pts(poly.vertices().begin(), poly.vertices().end());
    for (const Point& q : rectangle_corners(x1, y1, s.rect_width, s.rect_length())) pts.push_back(q);
    return diameter(pts);
}

std::vector<ConstantDerivation> audit_constant_derivations(const LipschitzConstants& c,
                                                           const ShapeSpec& s,
                                                           const BoundingEnvelope& env,
                                                           double diameter_fr) {
    const double side = s.triangle_side();
    std::vector<ConstantDerivation> out;
    auto add = [&](std::string name, std::string formula, double required, double constant) {
        out.push_back({std::move(name), std::move(formula), required, constant, required < constant});
    };
    add("c1", "(height + u) / 2", (env.height + s.rect_width) / 2.0, c.c[0]);
    add("c2", "width / 2", env.width / 2.0, c.c[1]);
    add("c3", "(2 r + triangle side) / 2", (2.0 * s.polygon_radius + side) / 2.0, c.c[2]);
    add("c4", "(triangle side + rectangle length) / 2", (side + s.rect_length()) / 2.0, c.c[3]);
    add("c5", "3 * diameter_fr * triangle inradius",
        3.0 * env.diameter_fr * s.triangle_inradius(), c.c[4]);
    // c2 equals its bound exactly; the inequality there is not strict.
    out[1].pass = out[1].required <= out[1].constant;
    out.push_back({"diameter_fr", "diameter(polygon + rectangle at region corner) <= envelope",
                   diameter_fr, env.diameter_fr, diameter_fr <= env.diameter_fr});
    return out;
}

AuditResult lipschitz_audit(const Objective& obj, const LipschitzConstants& c, const Box5& region,
                            std::uint64_t samples, std::uint64_t seed, double max_step, double sublevel) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> coord(0, kDims - 1);
    AuditResult res;
    for (std::uint64_t k = 0; k < samples; ++k) {
        Vec5 z;
        for (std::size_t i = 0; i < kDims; ++i)
            z[i] = region.lo[i] + unit(rng) * (region.hi[i] - region.lo[i]);
        const std::size_t i = coord(rng);
        const double eps = std::min(max_step * (1.0 - unit(rng)), region.width(i));  // (0, max_step]
        z[i] = region.lo[i] + unit(rng) * (region.width(i) - eps);
        Vec5 z2 = z;
        z2[i] += eps;
        const double a = obj(ConfigParams::from_array(z));
        const double b = obj(ConfigParams::from_array(z2));
        const double df = std::abs(b - a);
        const double allowed = c.c[i] * eps;
        if (df > allowed + 1e-12) {
            ++res.violations;
            res.sublevel_violations += std::min(a, b) <= sublevel;
        }
        res.worst = std::max(res.worst, df / allowed);
        ++res.samples;
    }
    return res;
}

AuditResult convexity_audit(const Objective& obj, const Box5& region, std::uint64_t samples,
                            std::uint64_t seed, double max_step) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> coord(0, 3);
    AuditResult res;
    for (std::uint64_t k = 0; k < samples; ++k) {
        Vec5 z;
        for (std::size_t i = 0; i < kDims; ++i)
            z[i] = region.lo[i] + unit(rng) * (region.hi[i] - region.lo[i]);
        const std::size_t i = coord(rng);
        const double h = max_step * (1.0 - unit(rng));
        Vec5 zm = z, zp = z;
        zm[i] -= h;
        zp[i] += h;
        const double second = obj(ConfigParams::from_array(zm)) + obj(ConfigParams::from_array(zp)) -
                              2.0 * obj(ConfigParams::from_array(z));
        if (second < -1e-12) ++res.violations;
        res.worst = std::min(res.worst, second);
        ++res.samples;
    }
    return res;
}

}  // namespace moser
