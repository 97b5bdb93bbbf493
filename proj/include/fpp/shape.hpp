#pragma once

// Directional estimation of the time constant g, the induced convex shape,
// and tangent-line fits (dual vector rho and contact sector).
//
// ghat(theta) is the mean over replicate fields of T(0, p) / ||p||_1 scaled
// by ||w_theta||_1, where p is the lattice rounding of n * w_theta. Scaling
// by the achieved offset p rather than by n removes the rounding bias and
// makes the unit-weight closed forms bitwise exact (x/x == 1 in IEEE
// arithmetic). The limit is the same since g is homogeneous.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geodesic.hpp"
#include "lattice.hpp"
#include "stats.hpp"
#include "weights.hpp"

namespace fpp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double l1(Vec2 a) { return std::abs(a.x) + std::abs(a.y); }

// Replicate family: field(i) over a fixed box with seed derived from
// (seed_base, i), so families with the same base are reproducible and
// replicates are independent streams.
class FieldFamily {
  public:
    FieldFamily(IntRect box, Distribution dist, std::uint64_t seed_base)
        : box_(box), dist_(dist), seed_base_(seed_base)
    {
    }

    const IntRect& box() const { return box_; }
    const Distribution& dist() const { return dist_; }
    std::uint64_t seed_base() const { return seed_base_; }

    WeightField field(std::uint64_t replicate) const
    {
        return WeightField(box_, derive_seed(seed_base_, replicate), dist_);
    }

  private:
    IntRect box_;
    Distribution dist_;
    std::uint64_t seed_base_;
};

struct GEstimate {
    double ghat = 0.0;
    double ci = 0.0;  // 95% normal-approximation half-width
};

// Unit direction w_theta = (cos theta, sin theta). Angles that are exact
// multiples of pi/2 leave ~1e-16 of trig dust in the other component; snap
// it to zero so axis directions are the exact unit vectors.
inline Vec2 direction_vector(double theta)
{
    Vec2 w{std::cos(theta), std::sin(theta)};
    if (std::abs(w.x) < 1e-12) w.x = 0.0;
    if (std::abs(w.y) < 1e-12) w.y = 0.0;
    return w;
}

// Lattice rounding of n * w_theta.
inline Point direction_target(double theta, int n)
{
    Vec2 w = direction_vector(theta);
    return {int(std::llround(n * w.x)), int(std::llround(n * w.y))};
}

// Monte Carlo estimate of g(w_theta) from `replicates` independent fields.
inline GEstimate estimate_g(const FieldFamily& family, double theta, int n, int replicates)
{
    if (n < 1 || replicates < 2)
        throw std::invalid_argument("estimate_g: need n >= 1 and replicates >= 2");
    const Point p = direction_target(theta, n);
    if (p == Point{0, 0}) throw std::domain_error("estimate_g: rounded target is the origin");
    if (!family.box().contains(p))
        throw std::domain_error("estimate_g: target outside the family box");

    OnlineStats stats;
    for (int r = 0; r < replicates; ++r)
        stats.add(passage_time(family.field(std::uint64_t(r)), {0, 0}, p));

    const double offset = double(std::abs(p.x) + std::abs(p.y));
    const double scale = l1(direction_vector(theta));
    return {(stats.mean() / offset) * scale, (stats.ci_halfwidth(kZ95) / offset) * scale};
}

struct DirectionEstimate {
    double theta = 0.0;
    double ghat = 0.0;
    double ci = 0.0;
};

struct ShapeEstimate {
    std::vector<DirectionEstimate> directions;  // increasing theta
    int n = 0;
    int replicates = 0;
};

// 65 directions = 64 equal arcs covering [0, pi/2]; contains 0, pi/4, pi/2
// exactly. The remaining quadrants are supplied by symmetry.
inline std::vector<double> default_directions()
{
    std::vector<double> out;
    const double step = kPi / 128.0;
    for (int k = 0; k <= 64; ++k) out.push_back(double(k) * step);
    return out;
}

inline ShapeEstimate estimate_shape(const FieldFamily& family, int n, int replicates,
                                    const std::vector<double>& thetas = default_directions())
{
    if (thetas.size() < 2) throw std::invalid_argument("estimate_shape: need >= 2 directions");
    ShapeEstimate est;
    est.n = n;
    est.replicates = replicates;
    for (double th : thetas) {
        GEstimate g = estimate_g(family, th, n, replicates);
        est.directions.push_back({th, g.ghat, g.ci});
    }
    return est;
}

// Estimated boundary points v_theta = w_theta / ghat(theta), first quadrant.
inline std::vector<Vec2> shape_points(const ShapeEstimate& est)
{
    std::vector<Vec2> out;
    for (const auto& d : est.directions) {
        if (!(d.ghat > 0)) throw std::runtime_error("shape_points: nonpositive ghat");
        Vec2 w = direction_vector(d.theta);
        out.push_back({w.x / d.ghat, w.y / d.ghat});
    }
    return out;
}

struct TangentLine {
    Vec2 rho;                   // tangent line is { r : r . rho = 1 }
    SectorSpec contact_sector;  // maximal grid arc with |v . rho - 1| <= tol
    bool degenerate = false;    // corner: contact stops at theta on one side
    double tol = 0.0;
};

namespace detail {

inline double cross(Vec2 o, Vec2 a, Vec2 b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone-chain hull, counter-clockwise, collapsing near-collinear runs
// (relative tolerance eps_rel) so that flat faces survive measurement noise
// as single edges.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts, double eps_rel)
{
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw std::runtime_error("convex_hull: insufficient data");

    double scale = 0.0;
    for (Vec2 p : pts) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    const double eps = eps_rel * scale * scale;

    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {  // lower chain
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {  // upper chain
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    if (h.size() < 3) throw std::runtime_error("convex_hull: insufficient data");
    return h;
}

// Dual vector of the line through p and q: solves p.rho = q.rho = 1.
inline Vec2 line_dual(Vec2 p, Vec2 q)
{
    const double det = p.x * q.y - p.y * q.x;
    if (det == 0.0) throw std::runtime_error("line_dual: edge line passes through the origin");
    return {(q.y - p.y) / det, (p.x - q.x) / det};
}

inline double wrap_angle(double a)
{
    a = std::fmod(a, kTwoPi);
    return a < 0 ? a + kTwoPi : a;
}

// Circular distance between two angles.
inline double angle_dist(double a, double b)
{
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, kTwoPi - d);
}

}  // namespace detail

// Supporting line of the hull of the (symmetry-extended) shape points in
// direction theta, which must be one of the estimate's grid directions.
// At a corner — the contact run ends at theta itself — the tol-widest
// candidate line is returned and `degenerate` is set.
inline TangentLine fit_tangent(const ShapeEstimate& est, double theta, double tol,
                               double hull_eps_rel = 1e-9)
{
    // Locate theta in the grid.
    std::size_t ti = est.directions.size();
    for (std::size_t i = 0; i < est.directions.size(); ++i)
        if (std::abs(est.directions[i].theta - theta) <= 1e-12) ti = i;
    if (ti == est.directions.size())
        throw std::invalid_argument("fit_tangent: theta is not a grid direction");
    if (tol < 0) throw std::invalid_argument("fit_tangent: tol must be >= 0");

    // Full-circle sample: reflect the first-quadrant estimates through both
    // axes (the limit shape has all lattice symmetries).
    const std::vector<Vec2> quarter = shape_points(est);
    std::vector<std::pair<double, Vec2>> circle;  // (angle, point)
    for (std::size_t i = 0; i < quarter.size(); ++i) {
        const Vec2 v = quarter[i];
        const double a = est.directions[i].theta;
        circle.push_back({detail::wrap_angle(a), v});
        circle.push_back({detail::wrap_angle(kPi - a), {-v.x, v.y}});
        circle.push_back({detail::wrap_angle(kPi + a), {-v.x, -v.y}});
        circle.push_back({detail::wrap_angle(kTwoPi - a), {v.x, -v.y}});
    }
    std::sort(circle.begin(), circle.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    circle.erase(std::unique(circle.begin(), circle.end(),
                             [](const auto& a, const auto& b) {
                                 return detail::angle_dist(a.first, b.first) <= 1e-12;
                             }),
                 circle.end());

    std::vector<Vec2> pts;
    for (const auto& [a, v] : circle) pts.push_back(v);
    const std::vector<Vec2> hull = detail::convex_hull(pts, hull_eps_rel);

    // Find the hull contact of the ray at angle theta: either a vertex
    // (within angular tolerance) or the unique edge spanning theta.
    const std::size_t H = hull.size();
    std::vector<double> harg(H);
    for (std::size_t i = 0; i < H; ++i) harg[i] = std::atan2(hull[i].y, hull[i].x);

    constexpr double kAngEps = 1e-9;
    std::size_t vertex_hit = H;
    for (std::size_t i = 0; i < H; ++i)
        if (detail::angle_dist(harg[i], theta) <= kAngEps) vertex_hit = i;

    std::vector<Vec2> candidates;
    if (vertex_hit < H) {
        candidates.push_back(detail::line_dual(hull[(vertex_hit + H - 1) % H], hull[vertex_hit]));
        candidates.push_back(detail::line_dual(hull[vertex_hit], hull[(vertex_hit + 1) % H]));
    } else {
        for (std::size_t i = 0; i < H; ++i) {
            const double a0 = harg[i], a1 = harg[(i + 1) % H];
            const double span = detail::wrap_angle(a1 - a0);
            if (detail::wrap_angle(theta - a0) < span)
                candidates.push_back(detail::line_dual(hull[i], hull[(i + 1) % H]));
        }
        if (candidates.empty()) throw std::runtime_error("fit_tangent: no contact edge found");
        candidates.resize(1);
    }

    // Contact run: maximal circular run of grid directions, containing
    // theta, whose points sit on the candidate line within tol.
    const std::size_t C = circle.size();
    std::size_t theta_idx = C;
    for (std::size_t i = 0; i < C; ++i)
        if (detail::angle_dist(circle[i].first, theta) <= 1e-12) theta_idx = i;
    if (theta_idx == C) throw std::logic_error("fit_tangent: theta vanished from the circle grid");

    Vec2 best_rho{};
    std::size_t best_len = 0;
    double best_lo = theta, best_hi = theta;
    bool best_ends_at_theta = true;
    for (const Vec2& rho : candidates) {
        std::vector<char> on(C, 0);
        for (std::size_t i = 0; i < C; ++i)
            on[i] = std::abs(dot(circle[i].second, rho) - 1.0) <= tol;
        if (!on[theta_idx]) {
            if (best_len == 0) best_rho = rho;
            continue;
        }
        std::size_t lo = theta_idx, hi = theta_idx, len = 1;
        while (len < C && on[(lo + C - 1) % C]) lo = (lo + C - 1) % C, ++len;
        while (len < C && on[(hi + 1) % C]) hi = (hi + 1) % C, ++len;
        if (len > best_len) {
            best_len = len;
            best_rho = rho;
            // Unwrap so that lo <= theta <= hi as plain reals.
            best_lo = circle[lo].first;
            best_hi = circle[hi].first;
            if (best_lo > theta + 1e-12) best_lo -= kTwoPi;
            if (best_hi < theta - 1e-12) best_hi += kTwoPi;
            best_ends_at_theta = lo == theta_idx || hi == theta_idx;
        }
    }
    if (best_len == 0) best_lo = best_hi = theta;

    TangentLine t;
    t.rho = best_rho;
    t.contact_sector = {theta, best_lo, best_hi};
    t.degenerate = (vertex_hit < H) && best_ends_at_theta && best_len < C;
    t.tol = tol;
    return t;
}

// Default tolerance: twice the CI half-width at theta.
// Floor on the default contact tolerance: with noise-free estimates the CI
// is exactly 0, yet normalized samples can sit one ulp off their facet.
inline constexpr double kTangentTolFloor = 1e-12;

inline TangentLine fit_tangent(const ShapeEstimate& est, double theta)
{
    for (const auto& d : est.directions)
        if (std::abs(d.theta - theta) <= 1e-12)
            return fit_tangent(est, theta, std::max(2.0 * d.ci, kTangentTolFloor));
    throw std::invalid_argument("fit_tangent: theta is not a grid direction");
}

}  // namespace fpp
