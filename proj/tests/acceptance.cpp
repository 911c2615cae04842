// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "moser/geometry.hpp"
#include "moser/objective.hpp"
#include "moser/rectfamily.hpp"
#include "moser/reduction.hpp"
#include "moser/search.hpp"

using namespace moser;
namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and limits.
constexpr double kTolCenter = 5e-5;
constexpr double kTolArgmin = 1e-6;
constexpr double kTolRefined = 2e-6;
constexpr double kTolReferenceVolume = 1e-15;
constexpr double kTolVolumeLedger = 1e-9;
constexpr double kTolReplay = 1e-12;
constexpr double kTolGeometry = 1e-12;
constexpr std::uint64_t kDeskLeafCap = 100'000'000;
constexpr std::uint64_t kSubBoxLeafCap = 10'000'000;
constexpr double kDeskSeconds = 30 * 60;
constexpr double kCoverSeconds = 10 * 60;

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("[%s] %-3s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Run {
    int code = -1;
    std::string out, err;
    double seconds = 0.0;
};

Run moser_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "moser");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    const auto t0 = Clock::now();
    r.code = moser::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.seconds = seconds_since(t0);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "moser_acceptance";
    fs::create_directories(dir);
    return dir / name;
}

// Runs a check body, turning an escaped exception into a FAIL line.
void guarded(const char* id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

void criterion_1() {
    const double v = f({0.025, 0.02, 0.0, 0.0, std::numbers::pi / 3.0}, ShapeSpec{});
    const double err = std::abs(v - 0.10605);
    report("1", err <= kTolCenter, fmt("centre of Z: f = %.12f, |f - 0.10605| = %.2e (tol %.0e)", v, err, kTolCenter));
}

void criterion_2() {
    const ConfigParams p{0.025097656250000, 0.002578125000000, 0.065327148437500, 0.005422070312500,
                         0.079894832702377};
    const double v = f(p, ShapeSpec{});
    const double err = std::abs(v - 0.097626517574902);
    report("2", err <= kTolArgmin,
           fmt("reported minimum: f = %.15f, |f - 0.097626517574902| = %.2e (tol %.0e)", v, err, kTolArgmin));
}

void criterion_3() {
    ShapeSpec s;
    s.polygon_sides = 100000;
    const auto t0 = Clock::now();
    const Objective obj(s);
    const double v = obj({0.0255904, 0.0013503, 0.0653055, 0.0050124, 0.0766554});
    const double secs = seconds_since(t0);
    const double err = std::abs(v - 0.09762742);
    report("3", err <= kTolRefined && secs < 1.0,
           fmt("100000-gon: f = %.10f, |f - 0.09762742| = %.2e (tol %.0e), %.3f s (limit 1 s)", v, err,
               kTolRefined, secs));
}

void criterion_4() {
    const ShapeSpec s;
    const auto t0 = Clock::now();
    const ReductionReport rep = reduction_report(s);
    const double dia = polygon_rectangle_diameter(0.05, 0.04, s);
    const double secs = seconds_since(t0);
    const bool ok = rep.psi_x_boundary > 0.0975 && rep.psi_y_boundary > 0.0975 && rep.trapezoid_min > 0.0975 &&
                    rep.claim1_min > 0.0975 && dia > 0.46 && dia <= 0.46402 && secs < 1.0;
    report("4", ok,
           fmt("side conditions: psi(0.05,0) = %.6f, psi(0,0.04) = %.6f, trapezoid = %.6f, claim1 = %.6f "
               "(all > 0.0975); diameter = %.8f in (0.46, 0.46402]; %.3f s",
               rep.psi_x_boundary, rep.psi_y_boundary, rep.trapezoid_min, rep.claim1_min, dia, secs));
}

void criterion_5() {
    const Objective obj{ShapeSpec{}};
    const auto t0 = Clock::now();
    const AuditResult a = lipschitz_audit(obj, paper_constants(), RegionZ::box(), 10000, 5);
    const double secs = seconds_since(t0);
    report("5", a.samples == 10000 && a.violations == 0 && secs < 30.0,
           fmt("Lipschitz audit: %llu samples, %llu violations (%llu with f <= 0.0975), worst ratio %.4f, %.2f s",
               static_cast<unsigned long long>(a.samples), static_cast<unsigned long long>(a.violations),
               static_cast<unsigned long long>(a.sublevel_violations), a.worst, secs));
}

void criterion_6() {
    const Objective obj{ShapeSpec{}};
    const auto t0 = Clock::now();
    const AuditResult a = convexity_audit(obj, RegionZ::box(), 10000, 6);
    const double secs = seconds_since(t0);
    report("6", a.samples == 10000 && a.violations == 0 && secs < 30.0,
           fmt("convexity audit: %llu samples, %llu violations, smallest second difference %.3e, %.2f s",
               static_cast<unsigned long long>(a.samples), static_cast<unsigned long long>(a.violations), a.worst,
               secs));
}

void criterion_7a() {
    const Run r = moser_cli({"verify", "--bound", "0.09", "--profile", "desk"});
    if (r.code != 0) {
        report("7a", false, fmt("desk run exited %d: ", r.code) + r.err);
        return;
    }
    const Certificate c = certificate_from_json(json::parse(r.out));
    report("7a", c.completed && c.verified_fraction == 1.0 && c.iterations <= kDeskLeafCap && r.seconds <= kDeskSeconds,
           fmt("verify --bound 0.09 --profile desk: completed, %.9f%% verified, n = %llu (cap 1e8), min %.9f, %.1f s",
               100.0 * c.verified_fraction, static_cast<unsigned long long>(c.iterations), c.min_value, r.seconds));
}

const char* kSubBox = "0,0.05,0,0.04,-0.17,-0.10,-0.13,-0.06,0,0.2";

void criterion_7b() {
    const Run r = moser_cli({"verify", "--bound", "0.0975", "--box", kSubBox, "--workers", "1", "--max-iterations",
                       std::to_string(kSubBoxLeafCap)});
    if (r.code != 0) {
        report("7b", false, fmt("sub-box run exited %d: ", r.code) + r.err);
        return;
    }
    const Certificate c = certificate_from_json(json::parse(r.out));
    report("7b", c.completed && c.verified_fraction == 1.0 && c.iterations <= kSubBoxLeafCap,
           fmt("sub-box at 0.0975: completed, n = %llu (cap 1e7), min %.9f, %.1f s",
               static_cast<unsigned long long>(c.iterations), c.min_value, r.seconds));
}

// Reservoir-samples 100 certified leaves of a full-region run at 0.09, then
// evaluates the reference hull route at 1000 random points in each.
void criterion_7c() {
    SearchConfig cfg;
    cfg.bound = 0.09;
    std::mt19937_64 rng(77);
    std::vector<Box5> leaves;
    std::uint64_t seen = 0;
    SearchHooks hooks;
    hooks.certified = [&](const Box5& b, unsigned, double) {
        ++seen;
        if (leaves.size() < 100) {
            leaves.push_back(b);
        } else {
            const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(0, seen - 1)(rng);
            if (k < 100) leaves[k] = b;
        }
    };
    const SearchResult res = box_search(RegionZ::box(), cfg, hooks);
    if (!res.certificate.completed || leaves.size() < 100) {
        report("7c", false, fmt("search over Z at 0.09 gave %llu leaves, completed %d",
                                static_cast<unsigned long long>(seen), int(res.certificate.completed)));
        return;
    }
    const ShapeSpec s;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uint64_t bad = 0;
    double lowest = 1.0;
    for (const Box5& b : leaves) {
        for (int k = 0; k < 1000; ++k) {
            Vec5 z;
            for (std::size_t i = 0; i < kDims; ++i) z[i] = b.lo[i] + u(rng) * (b.hi[i] - b.lo[i]);
            const double v = f_reference(ConfigParams::from_array(z), s);
            lowest = std::min(lowest, v);
            bad += !(v > cfg.bound);
        }
    }
    report("7c", bad == 0,
           fmt("spot check: 100 of %llu certified leaves (Z at 0.09) x 1000 samples, %llu at or below the bound, "
               "lowest %.9f",
               static_cast<unsigned long long>(seen), static_cast<unsigned long long>(bad), lowest));
}

void criterion_8a() {
    const double v = RegionZ::volume();
    const double rel = std::abs(v - 3.680103453346938e-4) / 3.680103453346938e-4;
    report("8a", rel <= kTolReferenceVolume,
           fmt("RegionZ volume %.15e vs reference 3.680103453346938e-04: relative difference %.3e (tol %.0e)", v, rel,
               kTolReferenceVolume));
}

void criterion_8b() {
    SearchConfig cfg;
    cfg.bound = 0.09;
    cfg.report_interval = 500;
    const Box5 z = RegionZ::box();
    const double initial = z.volume();
    std::uint64_t records = 0;
    double worst = 0.0;
    SearchHooks hooks;
    hooks.progress = [&](const ProgressRecord& r) {
        ++records;
        const double total = r.verified_volume + r.frontier_volume.value_or(std::nan(""));
        const double rel = std::abs(total - initial) / initial;
        worst = std::isnan(rel) ? INFINITY : std::max(worst, rel);
    };
    const SearchResult res = box_search(z, cfg, hooks);
    const double final_rel = std::abs(res.stats.verified_volume - initial) / initial;
    worst = std::max(worst, final_rel);
    report("8b", res.certificate.completed && records > 10 && worst <= kTolVolumeLedger,
           fmt("verified + frontier volume over %llu progress records: worst relative drift %.3e (tol %.0e)",
               static_cast<unsigned long long>(records), worst, kTolVolumeLedger));
}

void criterion_9() {
    const fs::path out = scratch("cover.json");
    const Run r = moser_cli({"theorem2", "--out", out.string()});
    if (r.code != 0) {
        report("9", false, fmt("theorem2 exited %d", r.code));
        return;
    }
    std::ifstream in(out);
    const CoverSet c = cover_from_json(json::parse(in));
    const std::size_t n = c.points.size();
    double worst = 0.0;
    for (const RectFamilyPoint& p : c.points)
        worst = std::max(worst, std::abs(Objective(circumscribed_shape(p.w, c.base))(p.witness) - p.area_upper));
    const bool ends = n > 0 && c.points.front().w - c.points.front().d < 0.0 &&
                      c.points.back().w + c.points.back().d > kMaxRectWidth;
    report("9", n >= 100 && n <= 5000 && worst <= kTolReplay && ends && r.seconds < kCoverSeconds,
           fmt("theorem2: N = %zu in [100, 5000], worst replay difference %.2e (tol %.0e), endpoints %s, %.1f s",
               n, worst, kTolReplay, ends ? "covered" : "NOT covered", r.seconds));
}

void criterion_10() {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> un(2, 2000);  // diameter needs two points
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    int outside = 0, diameter_mismatch = 0;
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (int t = 0; t < 1000; ++t) {
        const int n = un(rng);
        std::vector<Point> pts(static_cast<std::size_t>(n));
        // Alternate between a square cloud and points on a circle, where
        // nearly every point is a hull vertex.
        for (auto& p : pts) {
            if (t % 2 == 0) {
                p = {uc(rng), uc(rng)};
            } else {
                const double a = std::numbers::pi * uc(rng);
                p = {std::cos(a), std::sin(a)};
            }
        }
        const ConvexPolygon h = convex_hull(pts);
        for (const Point& p : pts) outside += !h.contains(p, kTolGeometry);
        double best2 = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
                best2 = std::max(best2, dx * dx + dy * dy);
            }
        const double err = std::abs(diameter(pts) - std::sqrt(best2));
        worst = std::max(worst, err);
        diameter_mismatch += err > kTolGeometry;
    }
    const double secs = seconds_since(t0);
    report("10", outside == 0 && diameter_mismatch == 0 && secs < 60.0,
           fmt("geometry oracles on 1000 point sets: %d points outside their hull, %d diameter mismatches "
               "(worst %.2e, tol %.0e), %.1f s",
               outside, diameter_mismatch, worst, kTolGeometry, secs));
}

void criterion_11() {
    const std::vector<std::string> base{"verify", "--bound", "0.09", "--profile", "desk", "--workers"};
    auto with = [&](const char* w) {
        auto v = base;
        v.push_back(w);
        return moser_cli(v);
    };
    const Run a = with("1");
    const Run b = with("1");
    const Run p = with("8");
    if (a.code != 0 || b.code != 0 || p.code != 0) {
        report("11", false, fmt("runs exited %d, %d, %d", a.code, b.code, p.code));
        return;
    }
    const Certificate ca = certificate_from_json(json::parse(a.out));
    const Certificate cp = certificate_from_json(json::parse(p.out));
    const bool identical = a.out == b.out;
    const bool parallel = cp.iterations == ca.iterations && cp.verified_volume == ca.verified_volume &&
                          cp.min_value == ca.min_value;
    report("11", identical && parallel,
           fmt("single-worker certificates %s; 8 workers: n %llu vs %llu, volume %s, min %s",
               identical ? "bit-identical" : "DIFFER", static_cast<unsigned long long>(cp.iterations),
               static_cast<unsigned long long>(ca.iterations),
               cp.verified_volume == ca.verified_volume ? "equal" : "DIFFERS",
               cp.min_value == ca.min_value ? "equal" : "DIFFERS"));
}

}  // namespace

int main() {
    guarded("1", criterion_1);
    guarded("2", criterion_2);
    guarded("3", criterion_3);
    guarded("4", criterion_4);
    guarded("5", criterion_5);
    guarded("6", criterion_6);
    guarded("7a", criterion_7a);
    guarded("7b", criterion_7b);
    guarded("7c", criterion_7c);
    guarded("8a", criterion_8a);
    guarded("8b", criterion_8b);
    guarded("9", criterion_9);
    guarded("10", criterion_10);
    guarded("11", criterion_11);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
