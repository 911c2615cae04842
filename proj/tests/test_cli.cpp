#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "moser/geometry.hpp"
#include "moser/search.hpp"

using namespace moser;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

Run moser_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "moser");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = moser::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path temp_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "moser_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::stringstream ss(text);
    for (std::string l; std::getline(ss, l);) v.push_back(l);
    return v;
}

// Hull area by exhaustion: a point is a hull vertex iff it lies in no
// triangle of three other points; the vertices are then sorted by angle.
double exhaustive_hull_area(const std::vector<Point>& pts) {
    auto in_tri = [](const Point& p, const Point& a, const Point& b, const Point& c) {
        const double d1 = cross(a, b, p), d2 = cross(b, c, p), d3 = cross(c, a, p);
        const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
        return !(neg && pos);
    };
    std::vector<Point> hull;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        bool inside = false;
        for (std::size_t a = 0; a < n && !inside; ++a)
            for (std::size_t b = a + 1; b < n && !inside; ++b)
                for (std::size_t c = b + 1; c < n && !inside; ++c)
                    if (a != i && b != i && c != i && in_tri(pts[i], pts[a], pts[b], pts[c])) inside = true;
        if (!inside) hull.push_back(pts[i]);
    }
    Point g{0, 0};
    for (const Point& p : hull) {
        g.x += p.x / hull.size();
        g.y += p.y / hull.size();
    }
    std::sort(hull.begin(), hull.end(), [&](const Point& a, const Point& b) {
        return std::atan2(a.y - g.y, a.x - g.x) < std::atan2(b.y - g.y, b.x - g.x);
    });
    double s = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % hull.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return s / 2.0;
}

const char* kSubBox = "0.02,0.03,0.01,0.02,-0.01,0.01,-0.01,0.01,0.0,0.1";

}  // namespace

TEST_CASE("eval prints f and psi") {
    const Run r = moser_cli({"eval", "0.025097656250000", "0.002578125000000", "0.065327148437500", "0.005422070312500",
                       "0.079894832702377"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j.at("f").get<double>() - 0.097626517574902) <= 1e-6);
    CHECK(j.at("psi").get<double>() < j.at("f").get<double>());

    const Run c = moser_cli({"eval", "0.025", "0.02", "0", "0", "1.0471975511965976"});
    REQUIRE(c.code == 0);
    CHECK(std::abs(json::parse(c.out).at("f").get<double>() - 0.10605) <= 5e-5);
}

TEST_CASE("eval accepts negative coordinates") {
    const Run r = moser_cli({"eval", "0.01", "0.01", "-0.05", "-0.02", "-0.3"});
    CHECK(r.code == 0);
}

TEST_CASE("eval with a square matches an exhaustive hull") {
    const Run r = moser_cli({"eval", "--sides", "4", "0", "0", "0", "0", "0"});
    REQUIRE(r.code == 0);
    ShapeSpec s;
    s.polygon_sides = 4;
    const ConvexPolygon square = regular_polygon(4, s.polygon_radius);
    std::vector<Point> pts(square.vertices().begin(), square.vertices().end());
    for (const Point& p : rectangle_vertices(0, 0, s.rect_width)) pts.push_back(p);
    for (const Point& p : triangle_vertices(0, 0, 0)) pts.push_back(p);
    CHECK(json::parse(r.out).at("f").get<double>() == doctest::Approx(exhaustive_hull_area(pts)).epsilon(1e-14));
}

TEST_CASE("eval writes hull vertices") {
    const fs::path csv = temp_path("hull.csv");
    const Run r = moser_cli({"eval", "--emit-csv", csv.string(), "0.025", "0.02", "0", "0", "1.0"});
    REQUIRE(r.code == 0);
    const auto ls = lines(slurp(csv));
    REQUIRE(ls.size() > 4);
    CHECK(ls[0] == "x,y");
}

TEST_CASE("lemmas") {
    const Run r = moser_cli({"lemmas"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("all_pass").get<bool>());
    CHECK(j.at("reduction").at("all_pass").get<bool>());
    CHECK(j.at("diameter").at("value").get<double>() == doctest::Approx(0.46402).epsilon(1e-5));
    CHECK(j.at("diameter").at("r2_to_polygon").get<double>() == doctest::Approx(0.4465).epsilon(1e-4));

    const Run wide = moser_cli({"lemmas", "--rect-width", "0.2"});
    CHECK(wide.code == 1);
    CHECK_FALSE(json::parse(wide.out).at("all_pass").get<bool>());
}

TEST_CASE("verify on a small box") {
    const fs::path out = temp_path("cert.json");
    const fs::path csv = temp_path("progress.csv");
    const Run r = moser_cli({"verify", "--box", kSubBox, "--bound", "0.0975", "--out", out.string(), "--emit-csv",
                       csv.string(), "--report-interval", "20"});
    REQUIRE(r.code == 0);
    const Certificate printed = certificate_from_json(json::parse(r.out));
    const Certificate saved = certificate_from_json(json::parse(slurp(out)));
    CHECK(printed == saved);
    CHECK(saved.completed);
    CHECK(saved.verified_fraction == 1.0);

    const auto ls = lines(slurp(csv));
    REQUIRE(ls.size() >= 2);
    CHECK(ls[0] == "percent_verified,iterations");
    CHECK(ls.back() == "100," + std::to_string(saved.iterations));
    // Rows every 20 leaves plus the final one.
    CHECK(ls.size() == 1 + saved.iterations / 20 + (saved.iterations % 20 != 0));
}

TEST_CASE("verify exit codes") {
    CHECK(moser_cli({"verify", "--box", kSubBox, "--max-iterations", "5"}).code == 2);
    CHECK(moser_cli({"verify", "--box", kSubBox, "--bound", "0.2"}).code == 1);
    CHECK(moser_cli({"verify", "--box", "0,1"}).code == 64);
    CHECK(moser_cli({"verify", "--box", "0,0.1,0,0.1,0,0.1,0,0.1,0,x"}).code == 64);
    CHECK(moser_cli({"verify", "--box", "1,0,0,0.1,0,0.1,0,0.1,0,0.1"}).code == 64);
    CHECK(moser_cli({"verify", "--profile", "huge"}).code == 64);
    CHECK(moser_cli({"verify", "--bound", "-1"}).code == 64);
    CHECK(moser_cli({"verify", "--workers", "0"}).code == 64);
    CHECK(moser_cli({"verify", "--no-such-flag"}).code == 64);
    CHECK(moser_cli({}).code == 64);
    CHECK(moser_cli({"--help"}).code == 0);
}

TEST_CASE("verify checkpoint and resume") {
    const fs::path cp = temp_path("cli_cp.json");
    fs::remove(cp);
    const Run full = moser_cli({"verify", "--bound", "0.09", "--profile", "ci"});
    REQUIRE(full.code == 0);
    const Run part = moser_cli({"verify", "--bound", "0.09", "--profile", "ci", "--max-iterations", "3000",
                          "--checkpoint", cp.string()});
    CHECK(part.code == 2);
    CHECK(fs::exists(cp));
    const Run done = moser_cli({"verify", "--bound", "0.09", "--profile", "ci", "--resume", cp.string()});
    CHECK(done.code == 0);
    CHECK(done.out == full.out);
    const Run wrong = moser_cli({"verify", "--bound", "0.08", "--resume", cp.string()});
    CHECK(wrong.code == 1);
    CHECK(wrong.err.find("different search configuration") != std::string::npos);
    CHECK(moser_cli({"verify", "--resume", temp_path("missing.json").string()}).code == 1);
}

TEST_CASE("config file with flag override") {
    const fs::path cfg = temp_path("moser.toml");
    std::ofstream(cfg) << "[verify]\nbound = 0.05\nbox = \"" << kSubBox << "\"\n";
    const Run a = moser_cli({"--config", cfg.string(), "verify"});
    REQUIRE(a.code == 0);
    CHECK(json::parse(a.out).at("bound").get<double>() == 0.05);
    const Run b = moser_cli({"--config", cfg.string(), "verify", "--bound", "0.07"});
    REQUIRE(b.code == 0);
    CHECK(json::parse(b.out).at("bound").get<double>() == 0.07);
    CHECK(moser_cli({"--config", temp_path("absent.toml").string(), "verify"}).code == 64);
}

TEST_CASE("theorem2 at a tightened target fails") {
    const Run r = moser_cli({"theorem2", "--target", "0.0976"});
    CHECK(r.code == 1);
    CHECK(r.err.find("cover construction failed at w =") != std::string::npos);
}

TEST_CASE("theorem2 default run") {
    const fs::path out = temp_path("cover.json");
    const fs::path csv = temp_path("cover.csv");
    const Run r = moser_cli({"theorem2", "--out", out.string(), "--emit-csv", csv.string()});
    CHECK(r.code == 0);
    const json j = json::parse(slurp(out));
    const std::size_t n = j.at("points").size();
    CHECK(n >= 100);
    CHECK(n <= 5000);
    CHECK(lines(slurp(csv)).size() == n + 1);
    CHECK(r.err.find("theorem2: verified") != std::string::npos);
}
