#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "moser/geometry.hpp"
#include "moser/objective.hpp"

namespace moser {

inline constexpr double kCoverTarget = 0.09763;
inline constexpr double kFamilyLipschitz = 0.318;
inline constexpr double kMaxRectWidth = 0.25;

/// The covering intervals must overlap or touch. Recorded in every emitted
/// cover because the printed inequality for this step points the other way.
inline constexpr const char* kOverlapRule = "w[i+1] - d[i+1] <= w[i] + d[i]";

/// Regular polygon whose inradius is the radius of the circle of perimeter 1,
/// so it contains that circle: circumradius sec(pi/n) / (2 pi).
ConvexPolygon circumscribed_polygon(const ShapeSpec& s = {});

/// `base` with the circumscribed polygon radius and rectangle width w (length
/// 1/2 - w). Throws std::invalid_argument unless 0 <= w <= 0.25.
ShapeSpec circumscribed_shape(double w, const ShapeSpec& base = {});

struct UpperBound {
    double area = 0.0;
    ConfigParams witness{};
};

/// Best hull area found by simplex descent for the width-w rectangle with the
/// circumscribed polygon and the triangle. Seeds: the known minimiser with
/// y1 rescaled to the width, the placement with T1 on the top-right corner,
/// two centred placements, and `warm` if given; the best run is then polished
/// by restarts. Any result is an upper bound on the minimal cover area at w;
/// optimality is not claimed.
UpperBound upper_bound_config(double w, const ShapeSpec& base = {}, const ConfigParams* warm = nullptr);

struct RectFamilyPoint {
    double w = 0.0;
    double area_upper = 0.0;
    double d = 0.0;
    ConfigParams witness{};
};

struct CoverSet {
    std::vector<RectFamilyPoint> points;
    double target = kCoverTarget;
    double lipschitz = kFamilyLipschitz;
    ShapeSpec base{};
};

struct CoverOptions {
    double target = kCoverTarget;
    double lipschitz = kFamilyLipschitz;
    /// Abort when a radius falls to this or below.
    double eps_min = 1e-7;
    int max_halvings = 40;
    std::size_t max_points = 100000;
};

class CoverError : public std::runtime_error {
public:
    CoverError(const std::string& what, double w) : std::runtime_error(what), width(w) {}
    double width;
};

/// Greedy left-to-right march over [0, 0.25]. Each next width starts one
/// radius past the current interval's right end and halves that gap until the
/// intervals overlap. Throws CoverError with the offending width when no
/// usable slack remains.
CoverSet build_cover(const CoverOptions& opt = {}, const ShapeSpec& base = {},
                     const std::function<void(const RectFamilyPoint&)>& on_point = {});

struct CoverVerification {
    bool ok = false;
    std::vector<std::string> problems;
};

/// Replays every witness, recomputes the radii from the replayed areas and
/// checks ordering, the two endpoint conditions and every adjacent overlap.
/// Independent of how the cover was built.
CoverVerification verify_cover(const CoverSet& c);

nlohmann::json to_json(const CoverSet& c);
/// Throws std::invalid_argument on malformed input.
CoverSet cover_from_json(const nlohmann::json& j);
/// Header `w,area_upper,d` then one row per point.
void write_cover_csv(std::ostream& out, const CoverSet& c);

}  // namespace moser
