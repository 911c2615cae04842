#include "moser/rectfamily.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "moser/nelder_mead.hpp"

namespace moser {

using json = nlohmann::json;

namespace {

double circumscribed_radius(const ShapeSpec& s) {
    return 1.0 / (2.0 * std::numbers::pi * std::cos(std::numbers::pi / s.polygon_sides));
}

// Reference configuration of the minimum over the search region.
constexpr ConfigParams kKnownMin{0.025097656250000, 0.002578125000000, 0.065327148437500, 0.005422070312500,
                                 0.079894832702377};
constexpr double kKnownWidth = 0.0375;

}  // namespace

ConvexPolygon circumscribed_polygon(const ShapeSpec& s) {
    return regular_polygon(s.polygon_sides, circumscribed_radius(s), s.polygon_phase);
}

ShapeSpec circumscribed_shape(double w, const ShapeSpec& base) {
    if (!(w >= 0.0 && w <= kMaxRectWidth))
        throw std::invalid_argument("rectangle width must lie in [0, 0.25]");
    ShapeSpec s = base;
    s.polygon_radius = circumscribed_radius(base);
    s.rect_width = w;
    return s;
}

UpperBound upper_bound_config(double w, const ShapeSpec& base, const ConfigParams* warm) {
    const ShapeSpec s = circumscribed_shape(w, base);
    const Objective obj(s);
    const auto f = [&](const Vec5& z) { return obj(ConfigParams::from_array(z)); };

    std::vector<Vec5> seeds;
    if (warm) seeds.push_back(warm->to_array());
    ConfigParams a = kKnownMin;
    a.y1 *= w / kKnownWidth;
    seeds.push_back(a.to_array());
    // T1 = (x2 + R, y2) placed on R2 = (x1 + L/2, y1 + w/2).
    const double x1 = 0.025, y1 = 0.0;
    seeds.push_back({x1, y1, x1 + s.rect_length() / 2.0 - s.triangle_circumradius, y1 + w / 2.0, 0.0});
    seeds.push_back({0.0, 0.0, 0.0, 0.0, 0.0});
    seeds.push_back({0.0, 0.0, 0.0, 0.0, std::numbers::pi / 3.0});

    const Vec5 step{0.01, 0.01, 0.01, 0.01, 0.1};
    NelderMeadOptions opt;
    opt.max_evaluations = 3000;
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const Vec5& z0 : seeds) {
        const NelderMeadResult r = nelder_mead(f, z0, step, opt);
        if (r.value < best.value) best = r;
    }
    // Restarts from the best point shake the simplex out of collapsed shapes.
    Vec5 polish_step = step;
    for (int k = 0; k < 4; ++k) {
        for (double& v : polish_step) v /= 10.0;
        const NelderMeadResult r = nelder_mead(f, best.x, polish_step, opt);
        if (r.value < best.value) best = r;
    }
    // Report the exact replay value so the witness reproduces it bit-for-bit.
    UpperBound ub;
    ub.witness = ConfigParams::from_array(best.x);
    ub.area = obj(ub.witness);
    return ub;
}

CoverSet build_cover(const CoverOptions& opt, const ShapeSpec& base,
                     const std::function<void(const RectFamilyPoint&)>& on_point) {
    if (!(opt.target > 0.0) || !(opt.lipschitz > 0.0))
        throw std::invalid_argument("build_cover: target and Lipschitz constant must be positive");
    CoverSet cover;
    cover.target = opt.target;
    cover.lipschitz = opt.lipschitz;
    cover.base = base;

    auto make_point = [&](double w, const ConfigParams* warm) {
        const UpperBound ub = upper_bound_config(w, base, warm);
        return RectFamilyPoint{w, ub.area, (opt.target - ub.area) / opt.lipschitz, ub.witness};
    };
    auto usable = [&](const RectFamilyPoint& p) {
        if (!(p.d > opt.eps_min)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "no certified slack at w = %.10g (area %.12g, radius %.3g)", p.w,
                          p.area_upper, p.d);
            throw CoverError(buf, p.w);
        }
    };

    // First point: its interval must reach below zero.
    RectFamilyPoint zero = make_point(0.0, nullptr);
    usable(zero);
    double w1 = zero.d / 2.0;
    RectFamilyPoint cur = make_point(w1, &zero.witness);
    for (int h = 0; !(cur.w - cur.d < 0.0); ++h) {
        if (h >= opt.max_halvings) throw CoverError("cannot place the first cover point", w1);
        w1 /= 2.0;
        cur = make_point(w1, &zero.witness);
    }
    usable(cur);
    cover.points.push_back(cur);
    if (on_point) on_point(cur);

    while (!(cur.w + cur.d > kMaxRectWidth)) {
        if (cover.points.size() >= opt.max_points) throw CoverError("cover exceeded max_points", cur.w);
        const double reach = cur.w + cur.d;
        double delta = cur.d;
        RectFamilyPoint next;
        bool placed = false;
        for (int h = 0; h <= opt.max_halvings; ++h, delta /= 2.0) {
            const double w = std::min(reach + delta, kMaxRectWidth);
            if (!(w > cur.w)) break;
            next = make_point(w, &cur.witness);
            if (next.d > opt.eps_min && next.w - next.d <= reach) {
                placed = true;
                break;
            }
        }
        if (!placed) {
            usable(next);
            throw CoverError("cannot overlap the interval ending at " + std::to_string(reach), next.w);
        }
        cover.points.push_back(next);
        if (on_point) on_point(next);
        cur = next;
    }
    return cover;
}

CoverVerification verify_cover(const CoverSet& c) {
    CoverVerification v;
    auto problem = [&](std::size_t i, const std::string& what) {
        v.problems.push_back("point " + std::to_string(i) + ": " + what);
    };
    if (c.points.empty()) {
        v.problems.push_back("cover is empty");
        return v;
    }
    std::vector<double> d(c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const RectFamilyPoint& p = c.points[i];
        if (!(p.w >= 0.0 && p.w <= kMaxRectWidth)) {
            problem(i, "width outside [0, 0.25]");
            d[i] = -1.0;
            continue;
        }
        const double area = Objective(circumscribed_shape(p.w, c.base))(p.witness);
        if (!(area <= p.area_upper + 1e-12)) problem(i, "witness replays above its recorded area");
        if (!(area < c.target)) problem(i, "area not below the target");
        d[i] = (c.target - area) / c.lipschitz;
        if (i > 0 && !(p.w > c.points[i - 1].w)) problem(i, "widths not strictly increasing");
    }
    if (!(c.points.front().w - d.front() < 0.0)) problem(0, "interval does not reach below 0");
    if (!(c.points.back().w + d.back() > kMaxRectWidth))
        problem(c.points.size() - 1, "interval does not reach above 0.25");
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
        if (!(c.points[i + 1].w - d[i + 1] <= c.points[i].w + d[i])) problem(i + 1, "gap before this interval");
    v.ok = v.problems.empty();
    return v;
}

json to_json(const CoverSet& c) {
    json pts = json::array();
    for (const RectFamilyPoint& p : c.points) {
        pts.push_back({{"w", p.w},
                       {"area_upper", p.area_upper},
                       {"d", p.d},
                       {"witness", {p.witness.x1, p.witness.y1, p.witness.x2, p.witness.y2, p.witness.theta}}});
    }
    return {{"target", c.target},
            {"lipschitz", c.lipschitz},
            {"overlap_rule", kOverlapRule},
            {"polygon", {{"n", c.base.polygon_sides}, {"phase", c.base.polygon_phase}, {"circumscribed", true}}},
            {"triangle_circumradius", c.base.triangle_circumradius},
            {"n_points", c.points.size()},
            {"points", std::move(pts)}};
}

CoverSet cover_from_json(const json& j) {
    try {
        CoverSet c;
        c.target = j.at("target").get<double>();
        c.lipschitz = j.at("lipschitz").get<double>();
        c.base.polygon_sides = j.at("polygon").at("n").get<int>();
        c.base.polygon_phase = j.at("polygon").at("phase").get<double>();
        c.base.triangle_circumradius = j.at("triangle_circumradius").get<double>();
        for (const json& e : j.at("points")) {
            const auto z = e.at("witness").get<std::vector<double>>();
            if (z.size() != kDims) throw std::invalid_argument("witness must have 5 entries");
            c.points.push_back({e.at("w").get<double>(), e.at("area_upper").get<double>(), e.at("d").get<double>(),
                                ConfigParams{z[0], z[1], z[2], z[3], z[4]}});
        }
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("cover: ") + e.what());
    }
}

void write_cover_csv(std::ostream& out, const CoverSet& c) {
    out << "w,area_upper,d\n";
    char buf[96];
    for (const RectFamilyPoint& p : c.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.w, p.area_upper, p.d);
        out << buf;
    }
}

}  // namespace moser
