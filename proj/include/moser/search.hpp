#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "moser/box.hpp"
#include "moser/geometry.hpp"
#include "moser/objective.hpp"

namespace moser {

inline constexpr const char* kToolName = "moser";
inline constexpr const char* kToolVersion = "1.0.0";

/// Which edge a failed box is bisected along. `widest` compares raw widths
/// (lengths against radians); `weighted` compares C_i * width_i.
enum class SplitRule { widest, weighted };

std::string to_string(SplitRule r);
SplitRule split_rule_from_string(const std::string& s);

struct SearchConfig {
    double bound = 0.0975;
    LipschitzConstants constants = paper_constants();
    ShapeSpec shape{};
    /// Subtracted from every certification margin to dominate hull-area
    /// rounding error.
    double safety_slack = 1e-9;
    SplitRule split_rule = SplitRule::widest;

    // Run controls; not part of the fingerprint.
    std::optional<std::uint64_t> max_iterations;
    std::uint64_t report_interval = 1'000'000;
    std::optional<std::filesystem::path> checkpoint_path;
    /// Periodic checkpoint interval when checkpoint_path is set; 0 writes only
    /// at the end of the run.
    double checkpoint_seconds = 600.0;
    unsigned workers = 1;

    void validate() const;

    /// Hash of everything that decides which boxes certify (bound, constants,
    /// shape, slack, split rule) and of the initial box.
    std::string fingerprint(const Box5& initial) const;
};

struct CertifyResult {
    bool certified = false;
    double center_value = 0.0;
    /// f(centre) - sum d_i C_i - (bound + slack); certified iff >= 0.
    double margin = 0.0;
};

CertifyResult certify_box(const Box5& b, const SearchConfig& cfg, const Objective& obj);
CertifyResult certify_box(const Box5& b, const SearchConfig& cfg);

/// Dimension of the largest edge; ties go to the lowest index. Throws
/// std::invalid_argument if every width is zero.
std::size_t split_dimension(const Box5& b, SplitRule rule = SplitRule::widest,
                            const LipschitzConstants& c = paper_constants());

/// Bisects along split_dimension. The halves share the midpoint face and
/// partition `b` exactly.
std::pair<Box5, Box5> split_box(const Box5& b, SplitRule rule = SplitRule::widest,
                                const LipschitzConstants& c = paper_constants());

struct SearchStats {
    std::uint64_t iterations = 0;   // certified leaves
    std::uint64_t evaluations = 0;  // box centres evaluated
    double verified_volume = 0.0;
    double verified_fraction = 0.0;
    double min_value = std::numeric_limits<double>::infinity();
    ConfigParams argmin{};
    std::chrono::duration<double> wall_time{};
};

struct Certificate {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    double bound = 0.0;
    double slack = 0.0;
    LipschitzConstants constants{};
    ShapeSpec shape{};
    SplitRule split_rule = SplitRule::widest;
    Box5 initial_box{};
    std::uint64_t iterations = 0;
    std::uint64_t evaluations = 0;
    double verified_volume = 0.0;
    double verified_fraction = 0.0;
    double min_value = std::numeric_limits<double>::infinity();
    ConfigParams argmin{};
    bool completed = false;

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

nlohmann::json to_json(const Certificate& c);
/// Throws std::invalid_argument on missing or malformed fields.
Certificate certificate_from_json(const nlohmann::json& j);

struct ProgressRecord {
    double percent_verified = 0.0;
    std::uint64_t iterations = 0;
    double verified_volume = 0.0;
    /// Sum of the volumes of boxes still waiting; only reported by
    /// single-worker runs, where the snapshot is consistent.
    std::optional<double> frontier_volume;
};

struct SearchHooks {
    /// Every report_interval certified leaves. Called under a lock.
    std::function<void(const ProgressRecord&)> progress;
    /// Every certified leaf with its depth and centre value. Called from
    /// worker threads without a lock.
    std::function<void(const Box5&, unsigned depth, double center_value)> certified;
};

struct SearchResult {
    Certificate certificate;
    SearchStats stats;
    std::size_t frontier_size = 0;
    /// A box centre where f < bound + slack: the bound cannot be certified
    /// there, so the search stops.
    std::optional<ConfigParams> blocking_point;
    std::optional<std::string> checkpoint_error;
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Depth-first certify-or-bisect over `initial` until every leaf certifies,
/// max_iterations leaves are certified, or a blocking point is found. With
/// workers > 1 each worker owns a stack and idle workers steal the shallowest
/// box of a victim; the certified leaf set does not depend on scheduling.
SearchResult box_search(const Box5& initial, const SearchConfig& cfg, const SearchHooks& hooks = {});

/// Continues a search from a checkpoint written by box_search. The
/// certification-relevant part of `cfg` must match the checkpoint's
/// fingerprint. Throws CheckpointError on unreadable, corrupt or mismatched
/// checkpoints.
SearchResult resume(const std::filesystem::path& checkpoint, const SearchConfig& cfg,
                    const SearchHooks& hooks = {});

/// Maximum bisection depth; leaf volume fractions are tracked exactly as
/// multiples of 2^-kMaxDepth.
inline constexpr unsigned kMaxDepth = 127;

struct FrontierBox {
    Box5 box;
    unsigned depth = 0;
    friend bool operator==(const FrontierBox&, const FrontierBox&) = default;
};

/// On-disk search state. Format documented in README.
struct Checkpoint {
    std::string fingerprint;
    Certificate certificate;  // config echo and stats so far
    std::array<std::uint64_t, kMaxDepth + 1> depth_counts{};
    std::vector<FrontierBox> frontier;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Exact fraction sum_d counts[d] 2^-d, rounded once to double.
double dyadic_fraction(const std::array<std::uint64_t, kMaxDepth + 1>& counts);

}  // namespace moser
