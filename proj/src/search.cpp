#include "moser/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

namespace moser {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string to_string(SplitRule r) { return r == SplitRule::widest ? "widest" : "weighted"; }

SplitRule split_rule_from_string(const std::string& s) {
    if (s == "widest") return SplitRule::widest;
    if (s == "weighted") return SplitRule::weighted;
    throw std::invalid_argument("unknown split rule: " + s);
}

void SearchConfig::validate() const {
    if (!(bound > 0.0) || !std::isfinite(bound))
        throw std::invalid_argument("search: bound must be positive and finite");
    if (!(safety_slack >= 0.0) || !std::isfinite(safety_slack))
        throw std::invalid_argument("search: safety_slack must be non-negative");
    for (double c : constants.c)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw std::invalid_argument("search: Lipschitz constants must be non-negative");
    if (report_interval == 0) throw std::invalid_argument("search: report_interval must be positive");
    if (workers == 0) throw std::invalid_argument("search: workers must be positive");
    shape.validate();
}

namespace {

void append_hex(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a;", v);
    out += buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string SearchConfig::fingerprint(const Box5& initial) const {
    std::string key = "moser-search-v1;";
    append_hex(key, bound);
    append_hex(key, safety_slack);
    for (double c : constants.c) append_hex(key, c);
    key += std::to_string(shape.polygon_sides) + ";";
    append_hex(key, shape.polygon_radius);
    append_hex(key, shape.polygon_phase);
    append_hex(key, shape.rect_width);
    append_hex(key, shape.triangle_circumradius);
    key += to_string(split_rule) + ";";
    for (std::size_t i = 0; i < kDims; ++i) {
        append_hex(key, initial.lo[i]);
        append_hex(key, initial.hi[i]);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
    return buf;
}

CertifyResult certify_box(const Box5& b, const SearchConfig& cfg, const Objective& obj) {
    CertifyResult r;
    r.center_value = obj(ConfigParams::from_array(b.center()));
    const double lower = r.center_value - cfg.constants.weighted_sum(b.half_widths());
    r.margin = lower - (cfg.bound + cfg.safety_slack);
    r.certified = r.margin >= 0.0;
    return r;
}

CertifyResult certify_box(const Box5& b, const SearchConfig& cfg) {
    return certify_box(b, cfg, Objective(cfg.shape));
}

std::size_t split_dimension(const Box5& b, SplitRule rule, const LipschitzConstants& c) {
    std::size_t best = 0;
    double best_w = -1.0;
    for (std::size_t i = 0; i < kDims; ++i) {
        const double w = rule == SplitRule::widest ? b.width(i) : b.width(i) * c.c[i];
        if (w > best_w) {
            best_w = w;
            best = i;
        }
    }
    if (!(best_w > 0.0)) {
        // Weighted widths can vanish with a zero constant; fall back to raw.
        if (rule == SplitRule::weighted) return split_dimension(b, SplitRule::widest, c);
        throw std::invalid_argument("split_box: box has zero width in every dimension");
    }
    return best;
}

std::pair<Box5, Box5> split_box(const Box5& b, SplitRule rule, const LipschitzConstants& c) {
    const std::size_t k = split_dimension(b, rule, c);
    const double mid = b.lo[k] + (b.hi[k] - b.lo[k]) / 2.0;
    Box5 lo = b, hi = b;
    lo.hi[k] = mid;
    hi.lo[k] = mid;
    return {lo, hi};
}

double dyadic_fraction(const std::array<std::uint64_t, kMaxDepth + 1>& counts) {
    // At most 2^d disjoint leaves exist at depth d, so each term and the sum
    // fit in 128 bits.
    unsigned __int128 sum = 0;
    for (unsigned d = 0; d <= kMaxDepth; ++d)
        sum += static_cast<unsigned __int128>(counts[d]) << (kMaxDepth - d);
    return std::ldexp(static_cast<double>(sum), -static_cast<int>(kMaxDepth));
}

// ---------------------------------------------------------------- JSON

namespace {

json vec_json(const Vec5& v) { return json::array({v[0], v[1], v[2], v[3], v[4]}); }

Vec5 vec_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != kDims)
        throw std::invalid_argument(std::string("expected 5-element array for ") + what);
    Vec5 v{};
    for (std::size_t i = 0; i < kDims; ++i) {
        if (!j[i].is_number()) throw std::invalid_argument(std::string("non-numeric entry in ") + what);
        v[i] = j[i].get<double>();
    }
    return v;
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field: ") + key);
    return *it;
}

template <class T>
T get_field(const json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad field ") + key + ": " + e.what());
    }
}

}  // namespace

json to_json(const Certificate& c) {
    json j;
    j["tool"] = c.tool;
    j["version"] = c.version;
    j["bound"] = c.bound;
    j["slack"] = c.slack;
    j["constants"] = vec_json(c.constants.c);
    j["shape"] = {{"n", c.shape.polygon_sides},
                  {"r", c.shape.polygon_radius},
                  {"u", c.shape.rect_width},
                  {"phase", c.shape.polygon_phase},
                  {"triangle_circumradius", c.shape.triangle_circumradius}};
    j["split_rule"] = to_string(c.split_rule);
    j["initial_box"] = {{"lo", vec_json(c.initial_box.lo)}, {"hi", vec_json(c.initial_box.hi)}};
    j["iterations"] = c.iterations;
    j["evaluations"] = c.evaluations;
    j["verified_volume"] = c.verified_volume;
    j["verified_fraction"] = c.verified_fraction;
    // JSON has no infinity; a run that evaluated nothing has no minimum.
    j["min_value"] = std::isfinite(c.min_value) ? json(c.min_value) : json(nullptr);
    j["argmin"] = vec_json(c.argmin.to_array());
    j["completed"] = c.completed;
    return j;
}

Certificate certificate_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("certificate: expected a JSON object");
    Certificate c;
    c.tool = get_field<std::string>(j, "tool");
    c.version = get_field<std::string>(j, "version");
    c.bound = get_field<double>(j, "bound");
    c.slack = get_field<double>(j, "slack");
    c.constants.c = vec_from(field(j, "constants"), "constants");
    const json& s = field(j, "shape");
    c.shape.polygon_sides = get_field<int>(s, "n");
    c.shape.polygon_radius = get_field<double>(s, "r");
    c.shape.rect_width = get_field<double>(s, "u");
    c.shape.polygon_phase = get_field<double>(s, "phase");
    c.shape.triangle_circumradius = get_field<double>(s, "triangle_circumradius");
    c.split_rule = split_rule_from_string(get_field<std::string>(j, "split_rule"));
    const json& b = field(j, "initial_box");
    c.initial_box = Box5::make(vec_from(field(b, "lo"), "initial_box.lo"),
                               vec_from(field(b, "hi"), "initial_box.hi"));
    c.iterations = get_field<std::uint64_t>(j, "iterations");
    c.evaluations = get_field<std::uint64_t>(j, "evaluations");
    c.verified_volume = get_field<double>(j, "verified_volume");
    c.verified_fraction = get_field<double>(j, "verified_fraction");
    const json& mv = field(j, "min_value");
    c.min_value = mv.is_null() ? std::numeric_limits<double>::infinity() : get_field<double>(j, "min_value");
    c.argmin = ConfigParams::from_array(vec_from(field(j, "argmin"), "argmin"));
    c.completed = get_field<bool>(j, "completed");
    return c;
}

// ---------------------------------------------------------------- checkpoints

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
    json j;
    j["format"] = "moser-checkpoint";
    j["format_version"] = 1;
    j["fingerprint"] = cp.fingerprint;
    j["certificate"] = to_json(cp.certificate);
    json counts = json::array();
    for (unsigned d = 0; d <= kMaxDepth; ++d)
        if (cp.depth_counts[d] != 0) counts.push_back(json::array({d, cp.depth_counts[d]}));
    j["depth_counts"] = std::move(counts);
    json frontier = json::array();
    for (const FrontierBox& fb : cp.frontier)
        frontier.push_back({{"depth", fb.depth}, {"lo", vec_json(fb.box.lo)}, {"hi", vec_json(fb.box.hi)}});
    j["frontier"] = std::move(frontier);

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
        out << j.dump() << '\n';
        out.flush();
        if (!out) throw CheckpointError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CheckpointError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    Checkpoint cp;
    try {
        const json j = json::parse(in);
        if (get_field<std::string>(j, "format") != "moser-checkpoint")
            throw std::invalid_argument("not a checkpoint file");
        if (get_field<int>(j, "format_version") != 1)
            throw std::invalid_argument("unsupported checkpoint version");
        cp.fingerprint = get_field<std::string>(j, "fingerprint");
        cp.certificate = certificate_from_json(field(j, "certificate"));
        for (const json& e : field(j, "depth_counts")) {
            const auto d = e.at(0).get<unsigned>();
            if (d > kMaxDepth) throw std::invalid_argument("depth out of range");
            cp.depth_counts[d] = e.at(1).get<std::uint64_t>();
        }
        for (const json& e : field(j, "frontier")) {
            FrontierBox fb;
            fb.depth = get_field<unsigned>(e, "depth");
            if (fb.depth > kMaxDepth) throw std::invalid_argument("depth out of range");
            fb.box = Box5::make(vec_from(field(e, "lo"), "frontier.lo"), vec_from(field(e, "hi"), "frontier.hi"));
            cp.frontier.push_back(fb);
        }
    } catch (const CheckpointError&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckpointError("corrupt checkpoint " + path.string() + ": " + e.what());
    }
    // Certified plus pending volume must still add up to the whole box.
    auto pending = cp.depth_counts;
    for (const FrontierBox& fb : cp.frontier) ++pending[fb.depth];
    if (dyadic_fraction(pending) != 1.0)
        throw CheckpointError("corrupt checkpoint " + path.string() + ": volume ledger does not sum to 1");
    return cp;
}

// ---------------------------------------------------------------- search

namespace {

struct WorkQueue {
    std::mutex mu;
    std::deque<FrontierBox> boxes;

    void push(const FrontierBox& b) {
        std::lock_guard lk(mu);
        boxes.push_back(b);
    }
    bool pop_back(FrontierBox& out) {
        std::lock_guard lk(mu);
        if (boxes.empty()) return false;
        out = boxes.back();
        boxes.pop_back();
        return true;
    }
    bool pop_front(FrontierBox& out) {
        std::lock_guard lk(mu);
        if (boxes.empty()) return false;
        out = boxes.front();
        boxes.pop_front();
        return true;
    }
};

struct RunningMin {
    double value = std::numeric_limits<double>::infinity();
    ConfigParams arg{};

    // Ties go to the lexicographically smaller point so the result does not
    // depend on evaluation order.
    void offer(double v, const ConfigParams& p) {
        if (v < value || (v == value && p.to_array() < arg.to_array())) {
            value = v;
            arg = p;
        }
    }
};

struct State {
    Box5 initial;
    std::string fingerprint;
    std::array<std::uint64_t, kMaxDepth + 1> counts{};
    std::vector<FrontierBox> frontier;
    std::uint64_t iterations = 0;
    std::uint64_t evaluations = 0;
    RunningMin min;
};

class Runner {
public:
    Runner(const SearchConfig& cfg, const SearchHooks& hooks, State& st)
        : cfg_(cfg), hooks_(hooks), obj_(cfg.shape), st_(st), queues_(cfg.workers) {
        for (auto& q : queues_) q = std::make_unique<WorkQueue>();
        for (unsigned d = 0; d <= kMaxDepth; ++d) counts_[d].store(st.counts[d]);
        iterations_.store(st.iterations);
        evaluations_.store(st.evaluations);
    }

    SearchResult run() {
        const auto t0 = Clock::now();
        SearchResult res;
        while (true) {
            run_epoch();
            if (error_) std::rethrow_exception(error_);
            collect();
            const bool done = st_.frontier.empty() || stop_.load();
            if (cfg_.checkpoint_path && !checkpoint_error_) {
                try {
                    save_checkpoint(*cfg_.checkpoint_path, checkpoint());
                } catch (const std::exception& e) {
                    checkpoint_error_ = e.what();
                }
            }
            if (done || checkpoint_error_) break;
        }
        res.certificate = certificate();
        res.stats.iterations = st_.iterations;
        res.stats.evaluations = st_.evaluations;
        res.stats.verified_volume = res.certificate.verified_volume;
        res.stats.verified_fraction = res.certificate.verified_fraction;
        res.stats.min_value = st_.min.value;
        res.stats.argmin = st_.min.arg;
        res.stats.wall_time = Clock::now() - t0;
        res.frontier_size = st_.frontier.size();
        res.blocking_point = blocking_;
        res.checkpoint_error = checkpoint_error_;
        return res;
    }

private:
    Checkpoint checkpoint() const {
        Checkpoint cp;
        cp.fingerprint = st_.fingerprint;
        cp.certificate = certificate();
        cp.depth_counts = st_.counts;
        cp.frontier = st_.frontier;
        return cp;
    }

    Certificate certificate() const {
        Certificate c;
        c.bound = cfg_.bound;
        c.slack = cfg_.safety_slack;
        c.constants = cfg_.constants;
        c.shape = cfg_.shape;
        c.split_rule = cfg_.split_rule;
        c.initial_box = st_.initial;
        c.iterations = st_.iterations;
        c.evaluations = st_.evaluations;
        c.verified_fraction = dyadic_fraction(st_.counts);
        c.verified_volume = st_.initial.volume() * c.verified_fraction;
        c.min_value = st_.min.value;
        c.argmin = st_.min.arg;
        c.completed = st_.frontier.empty() && !blocking_;
        return c;
    }

    void run_epoch() {
        pause_.store(false);
        has_deadline_ = cfg_.checkpoint_path.has_value() && cfg_.checkpoint_seconds > 0.0;
        if (has_deadline_)
            deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(cfg_.checkpoint_seconds));
        // Everything starts on worker 0 in stack order; the others steal.
        for (const FrontierBox& fb : st_.frontier) queues_[0]->boxes.push_back(fb);
        outstanding_.store(static_cast<std::int64_t>(st_.frontier.size()));
        st_.frontier.clear();
        mins_.assign(cfg_.workers, RunningMin{});

        std::vector<std::thread> threads;
        for (unsigned w = 1; w < cfg_.workers; ++w) threads.emplace_back([this, w] { guarded_worker(w); });
        guarded_worker(0);
        for (auto& t : threads) t.join();
    }

    void collect() {
        for (auto& q : queues_) {
            for (const FrontierBox& fb : q->boxes) st_.frontier.push_back(fb);
            q->boxes.clear();
        }
        for (unsigned d = 0; d <= kMaxDepth; ++d) st_.counts[d] = counts_[d].load();
        st_.iterations = iterations_.load();
        st_.evaluations = evaluations_.load();
        for (const RunningMin& m : mins_) st_.min.offer(m.value, m.arg);
    }

    void guarded_worker(unsigned id) {
        try {
            worker(id);
        } catch (...) {
            std::lock_guard lk(error_mu_);
            if (!error_) error_ = std::current_exception();
            stop_.store(true);
        }
    }

    bool steal(unsigned id, FrontierBox& out) {
        for (unsigned k = 1; k < cfg_.workers; ++k)
            if (queues_[(id + k) % cfg_.workers]->pop_front(out)) return true;
        return false;
    }

    void worker(unsigned id) {
        WorkQueue& own = *queues_[id];
        RunningMin& local = mins_[id];
        const double threshold = cfg_.bound + cfg_.safety_slack;
        std::uint64_t tick = 0;
        unsigned idle = 0;
        while (!stop_.load(std::memory_order_relaxed) && !pause_.load(std::memory_order_relaxed)) {
            if (has_deadline_ && (++tick & 255u) == 0 && Clock::now() >= deadline_) {
                pause_.store(true);
                break;
            }
            FrontierBox fb;
            if (!own.pop_back(fb) && !steal(id, fb)) {
                if (outstanding_.load() == 0) break;
                if (++idle < 64)
                    std::this_thread::yield();
                else
                    std::this_thread::sleep_for(std::chrono::microseconds(100));
                continue;
            }
            idle = 0;

            const ConfigParams centre = ConfigParams::from_array(fb.box.center());
            const CertifyResult r = certify_box(fb.box, cfg_, obj_);

            if (r.certified) {
                std::uint64_t n = iterations_.load();
                do {
                    if (cfg_.max_iterations && n >= *cfg_.max_iterations) {
                        own.push(fb);
                        stop_.store(true);
                        return;
                    }
                } while (!iterations_.compare_exchange_weak(n, n + 1));
                ++n;
                evaluations_.fetch_add(1);
                local.offer(r.center_value, centre);
                counts_[fb.depth].fetch_add(1);
                outstanding_.fetch_sub(1);
                if (hooks_.certified) hooks_.certified(fb.box, fb.depth, r.center_value);
                if (n % cfg_.report_interval == 0) report(n, id);
                continue;
            }

            if (r.center_value < threshold) {
                // No box containing this centre can ever certify.
                own.push(fb);
                {
                    std::lock_guard lk(error_mu_);
                    if (!blocking_) blocking_ = centre;
                }
                local.offer(r.center_value, centre);
                stop_.store(true);
                return;
            }
            if (fb.depth == kMaxDepth) {
                own.push(fb);
                throw std::runtime_error("box_search: maximum subdivision depth reached near " +
                                         std::to_string(centre.x1) + "," + std::to_string(centre.y1) + "," +
                                         std::to_string(centre.x2) + "," + std::to_string(centre.y2) + "," +
                                         std::to_string(centre.theta));
            }
            evaluations_.fetch_add(1);
            local.offer(r.center_value, centre);
            auto [lo, hi] = split_box(fb.box, cfg_.split_rule, cfg_.constants);
            outstanding_.fetch_add(1);
            own.push({hi, fb.depth + 1});
            own.push({lo, fb.depth + 1});
        }
    }

    void report(std::uint64_t n, unsigned id) {
        if (!hooks_.progress) return;
        std::lock_guard lk(progress_mu_);
        std::array<std::uint64_t, kMaxDepth + 1> snap{};
        for (unsigned d = 0; d <= kMaxDepth; ++d) snap[d] = counts_[d].load();
        ProgressRecord rec;
        rec.iterations = n;
        const double frac = dyadic_fraction(snap);
        rec.percent_verified = 100.0 * frac;
        rec.verified_volume = st_.initial.volume() * frac;
        if (cfg_.workers == 1) {
            std::array<std::uint64_t, kMaxDepth + 1> pending{};
            {
                std::lock_guard qlk(queues_[id]->mu);
                for (const FrontierBox& fb : queues_[id]->boxes) ++pending[fb.depth];
            }
            rec.frontier_volume = st_.initial.volume() * dyadic_fraction(pending);
        }
        hooks_.progress(rec);
    }

    const SearchConfig& cfg_;
    const SearchHooks& hooks_;
    const Objective obj_;
    State& st_;
    std::vector<std::unique_ptr<WorkQueue>> queues_;
    std::vector<RunningMin> mins_;
    std::array<std::atomic<std::uint64_t>, kMaxDepth + 1> counts_{};
    std::atomic<std::uint64_t> iterations_{0};
    std::atomic<std::uint64_t> evaluations_{0};
    std::atomic<std::int64_t> outstanding_{0};
    std::atomic<bool> stop_{false};
    std::atomic<bool> pause_{false};
    bool has_deadline_ = false;
    Clock::time_point deadline_{};
    std::mutex error_mu_;
    std::mutex progress_mu_;
    std::exception_ptr error_;
    std::optional<ConfigParams> blocking_;
    std::optional<std::string> checkpoint_error_;
};

}  // namespace

SearchResult box_search(const Box5& initial, const SearchConfig& cfg, const SearchHooks& hooks) {
    cfg.validate();
    const Box5 box = Box5::make(initial.lo, initial.hi);
    State st;
    st.initial = box;
    st.fingerprint = cfg.fingerprint(box);
    st.frontier.push_back({box, 0});
    return Runner(cfg, hooks, st).run();
}

SearchResult resume(const std::filesystem::path& checkpoint, const SearchConfig& cfg, const SearchHooks& hooks) {
    cfg.validate();
    Checkpoint cp = load_checkpoint(checkpoint);
    const std::string expected = cfg.fingerprint(cp.certificate.initial_box);
    if (cp.fingerprint != expected)
        throw CheckpointError("checkpoint " + checkpoint.string() + " was written for a different search "
                              "configuration (fingerprint " + cp.fingerprint + ", expected " + expected + ")");
    if (cp.certificate.completed) {
        SearchResult res;
        res.certificate = cp.certificate;
        res.stats.iterations = cp.certificate.iterations;
        res.stats.evaluations = cp.certificate.evaluations;
        res.stats.verified_volume = cp.certificate.verified_volume;
        res.stats.verified_fraction = cp.certificate.verified_fraction;
        res.stats.min_value = cp.certificate.min_value;
        res.stats.argmin = cp.certificate.argmin;
        return res;
    }
    State st;
    st.initial = cp.certificate.initial_box;
    st.fingerprint = cp.fingerprint;
    st.counts = cp.depth_counts;
    st.frontier = std::move(cp.frontier);
    st.iterations = cp.certificate.iterations;
    st.evaluations = cp.certificate.evaluations;
    st.min.value = cp.certificate.min_value;
    st.min.arg = cp.certificate.argmin;
    return Runner(cfg, hooks, st).run();
}

}  // namespace moser
