#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "moser/geometry.hpp"
#include "moser/objective.hpp"
#include "moser/rectfamily.hpp"
#include "moser/reduction.hpp"
#include "moser/search.hpp"

namespace moser::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Box5 parse_box(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw UsageError("--box: cannot parse '" + item + "'");
        }
        if (used != item.size()) throw UsageError("--box: cannot parse '" + item + "'");
        v.push_back(x);
    }
    if (v.size() != 2 * kDims) throw UsageError("--box expects 10 comma-separated values (lo,hi per dimension)");
    Vec5 lo, hi;
    for (std::size_t i = 0; i < kDims; ++i) {
        lo[i] = v[2 * i];
        hi[i] = v[2 * i + 1];
    }
    try {
        return Box5::make(lo, hi);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--box: ") + e.what());
    }
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}

struct ShapeFlags {
    int sides = 500;
    double rect_width = 0.0375;

    void add(CLI::App* app) {
        app->add_option("--sides", sides, "Polygon sides standing in for the circle")->capture_default_str();
        app->add_option("--rect-width", rect_width, "Rectangle width u (length is 1/2 - u)")->capture_default_str();
    }
    ShapeSpec spec() const {
        ShapeSpec s;
        s.polygon_sides = sides;
        s.rect_width = rect_width;
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return s;
    }
};

// ---------------------------------------------------------------- verify

struct VerifyFlags {
    ShapeFlags shape;
    double bound = 0.0975;
    std::string box;
    unsigned workers = 1;
    std::uint64_t max_iterations = 0;
    std::uint64_t report_interval = 1'000'000;
    std::string checkpoint;
    double checkpoint_seconds = 600.0;
    std::string resume;
    std::string out;
    std::string emit_csv;
    std::string profile = "full";
    double slack = 1e-9;
    std::string split_rule = "widest";

    CLI::Option* workers_opt = nullptr;
    CLI::Option* max_opt = nullptr;
};

SearchConfig resolve(const VerifyFlags& fl) {
    SearchConfig cfg;
    cfg.bound = fl.bound;
    cfg.shape = fl.shape.spec();
    cfg.safety_slack = fl.slack;
    cfg.split_rule = split_rule_from_string(fl.split_rule);
    cfg.report_interval = fl.report_interval;
    cfg.checkpoint_seconds = fl.checkpoint_seconds;

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (fl.profile == "full") {
        cfg.workers = hw;
    } else if (fl.profile == "desk") {
        cfg.workers = std::min(hw, 8u);
        cfg.max_iterations = 100'000'000;
    } else if (fl.profile == "ci") {
        cfg.workers = 1;
        cfg.max_iterations = 100'000'000;
    }
    if (fl.workers_opt->count() > 0) cfg.workers = fl.workers;
    if (fl.max_opt->count() > 0) {
        if (fl.max_iterations == 0)
            cfg.max_iterations.reset();
        else
            cfg.max_iterations = fl.max_iterations;
    }
    if (!fl.checkpoint.empty())
        cfg.checkpoint_path = fl.checkpoint;
    else if (!fl.resume.empty())
        cfg.checkpoint_path = fl.resume;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

int cmd_verify(const VerifyFlags& fl, std::ostream& out, std::ostream& err) {
    const SearchConfig cfg = resolve(fl);
    const Box5 box = fl.box.empty() ? RegionZ::box() : parse_box(fl.box);

    std::ofstream csv;
    std::uint64_t last_row = 0;
    bool any_row = false;
    if (!fl.emit_csv.empty()) {
        const bool append = !fl.resume.empty() && std::filesystem::exists(fl.emit_csv);
        csv = open_out(fl.emit_csv, append ? std::ios::app : std::ios::trunc);
        if (!append) csv << "percent_verified,iterations\n";
    }
    auto row = [&](double percent, std::uint64_t n) {
        if (csv.is_open()) {
            csv << fmt("%.12g", percent) << ',' << n << '\n';
            csv.flush();
        }
        last_row = n;
        any_row = true;
    };

    SearchHooks hooks;
    hooks.progress = [&](const ProgressRecord& r) {
        row(r.percent_verified, r.iterations);
        err << "progress: " << fmt("%.6f", r.percent_verified) << "% verified, n = " << r.iterations << '\n';
    };

    SearchResult res;
    try {
        res = fl.resume.empty() ? box_search(box, cfg, hooks) : resume(fl.resume, cfg, hooks);
    } catch (const CheckpointError& e) {
        err << "verify: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    const Certificate& c = res.certificate;
    if (!any_row || last_row != c.iterations) row(100.0 * c.verified_fraction, c.iterations);

    const std::string text = to_json(c).dump(2);
    out << text << '\n';
    if (!fl.out.empty()) open_out(fl.out) << text << '\n';

    err << "verify: n = " << c.iterations << ", verified " << fmt("%.9f", 100.0 * c.verified_fraction)
        << "%, min f = " << fmt("%.15f", c.min_value) << ", " << fmt("%.2f", res.stats.wall_time.count())
        << " s\n";
    if (res.checkpoint_error) {
        err << "verify: checkpoint failed: " << *res.checkpoint_error << '\n';
        return kExitCheckFailed;
    }
    if (res.blocking_point) {
        const ConfigParams& p = *res.blocking_point;
        err << "verify: bound fails near (" << fmt("%.15g", p.x1) << ", " << fmt("%.15g", p.y1) << ", "
            << fmt("%.15g", p.x2) << ", " << fmt("%.15g", p.y2) << ", " << fmt("%.15g", p.theta) << ")\n";
        return kExitCheckFailed;
    }
    if (!c.completed) {
        err << "verify: stopped at the iteration cap with " << res.frontier_size << " boxes pending\n";
        return kExitIncomplete;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
    ShapeFlags shape;
    std::vector<double> params;
    std::string emit_csv;
};

int cmd_eval(const EvalFlags& fl, std::ostream& out, std::ostream&) {
    const ShapeSpec s = fl.shape.spec();
    const ConfigParams p{fl.params[0], fl.params[1], fl.params[2], fl.params[3], fl.params[4]};
    const Objective obj(s);
    json j;
    j["config"] = fl.params;
    j["sides"] = s.polygon_sides;
    j["rect_width"] = s.rect_width;
    j["f"] = obj(p);
    j["psi"] = obj.psi(p.x1, p.y1);
    out << j.dump(2) << '\n';
    if (!fl.emit_csv.empty()) {
        std::ofstream csv = open_out(fl.emit_csv);
        csv << "x,y\n";
        const ConvexPolygon hull = obj.hull(p);
        for (const Point& q : hull.vertices()) csv << fmt("%.17g", q.x) << ',' << fmt("%.17g", q.y) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- lemmas

struct LemmaFlags {
    ShapeFlags shape;
    double bound = 0.0975;
};

int cmd_lemmas(const LemmaFlags& fl, std::ostream& out, std::ostream& err) {
    const ShapeSpec s = fl.shape.spec();
    const BoundingEnvelope env;
    std::vector<std::string> failures;

    const ReductionReport rep = reduction_report(s, fl.bound);
    auto side = [&](const char* name, double v) {
        if (!(v > fl.bound)) failures.push_back(name);
        return json{{"value", v}, {"margin", v - fl.bound}, {"pass", v > fl.bound}};
    };
    json red;
    red["bound"] = fl.bound;
    red["psi_x_boundary"] = side("psi_x_boundary", rep.psi_x_boundary);
    red["psi_y_boundary"] = side("psi_y_boundary", rep.psi_y_boundary);
    red["trapezoid_min"] = side("trapezoid_min", rep.trapezoid_min);
    red["claim1_min"] = side("claim1_min", rep.claim1_min);
    red["all_pass"] = rep.all_pass;

    const double diam = polygon_rectangle_diameter(RegionZ::hi[0], RegionZ::hi[1], s);
    const auto corners = rectangle_vertices(RegionZ::hi[0], RegionZ::hi[1], s.rect_width);
    const ConvexPolygon poly = regular_polygon(s.polygon_sides, s.polygon_radius, s.polygon_phase);
    const double r2_far = max_distance_from(corners[1], poly.vertices());
    const bool diam_ok = diam > 0.46 && diam <= env.diameter_fr;
    if (!diam_ok) failures.push_back("diameter");

    json consts = json::array();
    for (const ConstantDerivation& d : audit_constant_derivations(paper_constants(), s, env, diam)) {
        consts.push_back({{"name", d.name},
                          {"formula", d.formula},
                          {"required", d.required},
                          {"constant", d.constant},
                          {"pass", d.pass}});
        if (!d.pass) failures.push_back(d.name);
    }

    json j;
    j["shape"] = {{"n", s.polygon_sides}, {"r", s.polygon_radius}, {"u", s.rect_width}};
    j["reduction"] = red;
    j["diameter"] = {{"rect_centre", {RegionZ::hi[0], RegionZ::hi[1]}},
                     {"value", diam},
                     {"limit", env.diameter_fr},
                     {"r2_to_polygon", r2_far},
                     {"pass", diam_ok}};
    j["constants"] = consts;
    j["failures"] = failures;
    j["all_pass"] = failures.empty();
    out << j.dump(2) << '\n';
    if (!failures.empty()) {
        err << "lemmas: failed:";
        for (const auto& f : failures) err << ' ' << f;
        err << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- theorem2

struct Theorem2Flags {
    int sides = 500;
    CoverOptions opt;
    std::string out;
    std::string emit_csv;
};

int cmd_theorem2(const Theorem2Flags& fl, std::ostream& out, std::ostream& err) {
    ShapeSpec base;
    base.polygon_sides = fl.sides;
    if (fl.sides < 3) throw UsageError("--sides must be at least 3");
    CoverSet cover;
    try {
        cover = build_cover(fl.opt, base, [&](const RectFamilyPoint& p) {
            err << "theorem2: w = " << fmt("%.8f", p.w) << "  area <= " << fmt("%.12f", p.area_upper)
                << "  d = " << fmt("%.3e", p.d) << '\n';
        });
    } catch (const CoverError& e) {
        err << "theorem2: cover construction failed at w = " << fmt("%.10g", e.width) << ": " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const CoverVerification v = verify_cover(cover);

    const std::string text = to_json(cover).dump(2);
    if (fl.out.empty())
        out << text << '\n';
    else
        open_out(fl.out) << text << '\n';
    if (!fl.emit_csv.empty()) {
        std::ofstream csv = open_out(fl.emit_csv);
        write_cover_csv(csv, cover);
    }
    if (!v.ok) {
        for (const auto& p : v.problems) err << "theorem2: " << p << '\n';
        err << "theorem2: FAILED, cover of " << cover.points.size() << " points does not verify\n";
        return kExitCheckFailed;
    }
    err << "theorem2: verified, " << cover.points.size() << " widths cover [0, 0.25] with area <= "
        << fmt("%.5f", cover.target) << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified lower bounds for convex covers of closed unit curves", "moser"};
    app.set_config("--config", "", "Read options from a TOML or INI file ([verify] sections etc.)");
    app.require_subcommand(1);

    VerifyFlags vf;
    CLI::App* verify = app.add_subcommand("verify", "Certify f > bound over a box by certify-or-bisect");
    vf.shape.add(verify);
    verify->add_option("--bound", vf.bound, "Lower bound to certify")->capture_default_str();
    verify->add_option("--box", vf.box, "x1lo,x1hi,y1lo,y1hi,x2lo,x2hi,y2lo,y2hi,thlo,thhi (default: region Z)");
    vf.workers_opt = verify->add_option("--workers", vf.workers, "Worker threads (default: from profile)");
    vf.max_opt = verify->add_option("--max-iterations", vf.max_iterations,
                                    "Stop after this many certified leaves; 0 means unlimited");
    verify->add_option("--report-interval", vf.report_interval, "Progress record every N leaves")
        ->capture_default_str();
    verify->add_option("--checkpoint", vf.checkpoint, "Checkpoint file, written periodically and at the end");
    verify->add_option("--checkpoint-seconds", vf.checkpoint_seconds, "Seconds between checkpoints")
        ->capture_default_str();
    verify->add_option("--resume", vf.resume, "Continue from this checkpoint");
    verify->add_option("--out", vf.out, "Also write the certificate JSON here");
    verify->add_option("--emit-csv", vf.emit_csv, "Progress CSV (percent_verified,iterations)");
    verify->add_option("--profile", vf.profile, "full | desk | ci")
        ->check(CLI::IsMember({"full", "desk", "ci"}))
        ->capture_default_str();
    verify->add_option("--slack", vf.slack, "Safety slack added to the bound")->capture_default_str();
    verify->add_option("--split-rule", vf.split_rule, "widest | weighted")
        ->check(CLI::IsMember({"widest", "weighted"}))
        ->capture_default_str();

    EvalFlags ef;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate f and psi at one configuration");
    ef.shape.add(eval);
    eval->add_option("params", ef.params, "x1 y1 x2 y2 theta")->expected(5)->required();
    eval->add_option("--emit-csv", ef.emit_csv, "Write the hull vertices as x,y CSV");

    LemmaFlags lf;
    CLI::App* lemmas = app.add_subcommand("lemmas", "Check the numeric side conditions of the reduction");
    lf.shape.add(lemmas);
    lemmas->add_option("--bound", lf.bound, "Bound the side conditions must exceed")->capture_default_str();

    Theorem2Flags tf;
    CLI::App* thm2 = app.add_subcommand("theorem2", "Build and verify a width cover for the rectangle family");
    thm2->add_option("--sides", tf.sides, "Sides of the circumscribed polygon")->capture_default_str();
    thm2->add_option("--target", tf.opt.target, "Area every width must stay below")->capture_default_str();
    thm2->add_option("--lipschitz", tf.opt.lipschitz, "Lipschitz constant of the family in w")
        ->capture_default_str();
    thm2->add_option("--eps-min", tf.opt.eps_min, "Smallest usable radius")->capture_default_str();
    thm2->add_option("--out", tf.out, "Write the cover JSON here instead of stdout");
    thm2->add_option("--emit-csv", tf.emit_csv, "Write w,area_upper,d CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(vf, out, err);
        if (eval->parsed()) return cmd_eval(ef, out, err);
        if (lemmas->parsed()) return cmd_lemmas(lf, out, err);
        if (thm2->parsed()) return cmd_theorem2(tf, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}

}  // namespace moser::cli
