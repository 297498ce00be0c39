#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "fuchs/system.hpp"

namespace fuchs {

/// Polygonal route in the punctured plane; transport integrates along the
/// straight segments between consecutive waypoints.
struct PathSpec {
    std::vector<cx> waypoints;
};

enum class Orientation { Counterclockwise, Clockwise };

/// One full circle around a singularity, reached by a straight (possibly
/// deflected) approach from the basepoint. `approach` is the entry point on
/// the circle.
struct CircleLoop {
    int around = 0;
    double radius = 0.0;
    Orientation orientation = Orientation::Counterclockwise;
    cx approach{};
};

struct PolygonLoop {
    PathSpec path; ///< closed: first waypoint == last waypoint
};

using LoopSpec = std::variant<CircleLoop, PolygonLoop>;

/// Distance from point p to the segment [a, b].
inline double segment_distance(cx a, cx b, cx p) {
    const cx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

/// Smallest distance from any segment of the polyline to any singular point.
inline double path_clearance(const FuchsianSystem& sys, const std::vector<cx>& pts) {
    double d = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s + 1 < pts.size(); ++s)
        for (const auto& sg : sys.singularities())
            d = std::min(d, segment_distance(pts[s], pts[s + 1], sg.point));
    return d;
}

/// Validate a path against a system: at least two waypoints, consecutive
/// waypoints distinct, every segment strictly clear of every singular point.
inline void validate_path(const FuchsianSystem& sys, const PathSpec& path) {
    if (path.waypoints.size() < 2)
        throw ValidationError("path needs at least two waypoints");
    const double scale = std::max(sys.scale(), 1e-300);
    for (size_t i = 0; i < path.waypoints.size(); ++i) {
        if (!is_finite(path.waypoints[i]))
            throw ValidationError("waypoint " + std::to_string(i) + " not finite");
        if (i + 1 < path.waypoints.size() &&
            std::abs(path.waypoints[i + 1] - path.waypoints[i]) <= 1e-15 * scale)
            throw ValidationError("consecutive waypoints " + std::to_string(i) + ", " +
                                  std::to_string(i + 1) + " coincide");
    }
    const double clear = path_clearance(sys, path.waypoints);
    if (!(clear > 1e-12 * scale))
        throw PathTooCloseToSingularity("path passes within " + std::to_string(clear) +
                                        " of a singular point (scale " + std::to_string(scale) + ")");
}

namespace detail {

/// Deflect the segment [a, b] away from singular points (excluding index
/// `skip`) that it passes within their per-point clearance of: the midpoint
/// is offset perpendicular to the segment, away from the worst offending
/// point, and both halves are re-checked. Bounded recursion depth. The
/// clearance is per point so that a point sitting close to a fixed endpoint
/// (for example near the basepoint) does not demand more room than its own
/// loop geometry allows.
inline void deflect_segment(const FuchsianSystem& sys, cx a, cx b,
                            const std::vector<double>& clearance, int skip, int depth,
                            std::vector<cx>& out) {
    int offender = -1;
    double violation = 0.0;
    for (int j = 0; j < sys.num_singularities(); ++j) {
        if (j == skip) continue;
        const double need = clearance[static_cast<size_t>(j)];
        const double d = segment_distance(a, b, sys.point(j));
        if (d < need && need - d > violation) {
            violation = need - d;
            offender = j;
        }
    }
    if (offender < 0) {
        out.push_back(b);
        return;
    }
    if (depth <= 0)
        throw NoClearPath("could not deflect approach segment clear of singular point " +
                          std::to_string(offender));
    const cx mid = 0.5 * (a + b);
    const cx dir = (b - a) / std::abs(b - a);
    cx perp = dir * imag_unit;
    // push away from the offending point
    if (((sys.point(offender) - mid) * std::conj(perp)).real() > 0.0) perp = -perp;
    const cx mid2 = mid + perp * (2.0 * clearance[static_cast<size_t>(offender)]);
    deflect_segment(sys, a, mid2, clearance, skip, depth - 1, out);
    deflect_segment(sys, mid2, b, clearance, skip, depth - 1, out);
}

inline std::vector<cx> circle_polygon(cx center, double radius, double start_angle,
                                      Orientation orientation, int sides) {
    std::vector<cx> pts;
    pts.reserve(static_cast<size_t>(sides) + 1);
    const double sgn = (orientation == Orientation::Counterclockwise) ? 1.0 : -1.0;
    for (int k = 0; k <= sides; ++k) {
        const double phi = start_angle + sgn * 2.0 * pi * k / sides;
        pts.push_back(center + radius * cx{std::cos(phi), std::sin(phi)});
    }
    pts.back() = pts.front(); // close bit-exactly
    return pts;
}

} // namespace detail

/// Loop radius used by standard_loop: half the distance from the singular
/// point to whichever is nearer of the other singular points and the
/// basepoint.
inline double standard_loop_radius(const FuchsianSystem& sys, int index) {
    const cx zi = sys.point(index);
    double d = std::abs(sys.basepoint() - zi);
    for (int j = 0; j < sys.num_singularities(); ++j)
        if (j != index) d = std::min(d, std::abs(sys.point(j) - zi));
    return 0.5 * d;
}

/// Canonical generator loop: straight approach from the basepoint to a
/// circle around singularity `index`, one full turn, straight return. The
/// approach is deflected whenever it passes within 10% of the loop radius of
/// another singular point.
inline CircleLoop standard_loop(const FuchsianSystem& sys, int index, Orientation orientation) {
    if (index < 0 || index >= sys.num_singularities())
        throw ValidationError("singularity index " + std::to_string(index) + " out of range");
    CircleLoop loop;
    loop.around = index;
    loop.orientation = orientation;
    loop.radius = standard_loop_radius(sys, index);
    const cx zi = sys.point(index);
    const cx e = sys.basepoint();
    loop.approach = zi + loop.radius * (e - zi) / std::abs(e - zi);
    return loop;
}

/// Concrete polyline realizing a loop: approach polyline (with deflections),
/// inscribed 16-gon for the circle, reversed approach back to the basepoint.
/// Circle loops rely on homotopy invariance: the inscribed polygon stays
/// inside the singularity-free annulus, so the monodromy is unchanged.
inline PathSpec materialize_loop(const FuchsianSystem& sys, const LoopSpec& loop) {
    if (std::holds_alternative<PolygonLoop>(loop)) {
        const auto& poly = std::get<PolygonLoop>(loop);
        if (poly.path.waypoints.size() < 3 ||
            poly.path.waypoints.front() != poly.path.waypoints.back())
            throw ValidationError("polygon loop must be closed (first waypoint == last)");
        validate_path(sys, poly.path);
        return poly.path;
    }
    const auto& c = std::get<CircleLoop>(loop);
    if (c.around < 0 || c.around >= sys.num_singularities())
        throw ValidationError("loop index out of range");
    if (!(c.radius > 0.0))
        throw ValidationError("loop radius must be positive");
    const cx center = sys.point(c.around);
    for (int j = 0; j < sys.num_singularities(); ++j)
        if (j != c.around && std::abs(sys.point(j) - center) <= c.radius)
            throw ValidationError("loop circle encloses another singular point");

    std::vector<cx> approach;
    approach.push_back(sys.basepoint());
    // 10% of the loop radius, but never more room than the offending point's
    // own loop geometry allows (it may sit close to the basepoint).
    std::vector<double> clearance;
    for (int j = 0; j < sys.num_singularities(); ++j)
        clearance.push_back(std::min(0.1 * c.radius, 0.4 * standard_loop_radius(sys, j)));
    detail::deflect_segment(sys, sys.basepoint(), c.approach, clearance, c.around, 12, approach);

    PathSpec path;
    path.waypoints = approach;
    const double start_angle = std::arg(c.approach - center);
    auto circle = detail::circle_polygon(center, c.radius, start_angle, c.orientation, 16);
    // keep the exact entry point at the seam
    circle.front() = c.approach;
    circle.back() = c.approach;
    path.waypoints.insert(path.waypoints.end(), circle.begin() + 1, circle.end());
    for (auto it = approach.rbegin() + 1; it != approach.rend(); ++it)
        path.waypoints.push_back(*it);
    validate_path(sys, path);
    return path;
}

/// Loop realizing the monodromy around z = infinity: a circle of radius
/// 2 * max(|z_i|, |basepoint|) traversed clockwise in the finite plane
/// (counterclockwise in the chart at infinity), entered along the ray from
/// the basepoint that bisects the counterclockwise arc from the first- to
/// the last-indexed singularity. When the file order lists the
/// singularities in clockwise sweep order as seen from the basepoint, that
/// arc is the empty angular gap and T_0 ... T_{k-1} T_inf = Id holds.
inline PathSpec infinity_loop(const FuchsianSystem& sys) {
    const cx e = sys.basepoint();
    double r = std::abs(e);
    for (const auto& s : sys.singularities()) r = std::max(r, std::abs(s.point));
    const double radius = 2.0 * std::max(r, 0.5); // floor keeps degenerate systems usable
    const int k = sys.num_singularities();

    double ray;
    if (k == 0) {
        ray = 0.0;
    } else {
        const double th_first = std::arg(sys.point(0) - e);
        const double th_last = std::arg(sys.point(k - 1) - e);
        double gap = th_last - th_first;
        while (gap <= 0) gap += 2.0 * pi;
        ray = th_first + 0.5 * gap;
    }

    // Entry point: intersection of {e + t e^{i ray} : t > 0} with |z| = radius.
    const cx u{std::cos(ray), std::sin(ray)};
    const double b = (e * std::conj(u)).real();
    const double t = -b + std::sqrt(std::max(0.0, b * b + radius * radius - std::norm(e)));
    const cx entry = e + t * u;

    std::vector<cx> approach;
    approach.push_back(e);
    // Clearance for the outward ray: half of each point's own standard loop
    // radius, applied via the same deflection rule as generator loops.
    std::vector<double> clearance;
    for (int j = 0; j < k; ++j) clearance.push_back(0.5 * standard_loop_radius(sys, j));
    if (k > 0)
        detail::deflect_segment(sys, e, entry, clearance, -1, 12, approach);
    else
        approach.push_back(entry);

    PathSpec path;
    path.waypoints = approach;
    auto circle = detail::circle_polygon(cx{0, 0}, radius, std::arg(entry), Orientation::Clockwise, 32);
    circle.front() = entry;
    circle.back() = entry;
    path.waypoints.insert(path.waypoints.end(), circle.begin() + 1, circle.end());
    for (auto it = approach.rbegin() + 1; it != approach.rend(); ++it)
        path.waypoints.push_back(*it);
    validate_path(sys, path);
    return path;
}

} // namespace fuchs
