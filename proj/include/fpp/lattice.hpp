#pragma once

// Geometry of the square lattice Z^2: points, nearest-neighbour edges,
// rectangular domains, horizontal lines, angular sectors and the dual
// lattice Z^2 + (1/2, 1/2).

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fpp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

// Order used by every tie-break in the library: by y first, then x.
inline bool yx_less(Point a, Point b)
{
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

struct PointHash {
    std::size_t operator()(Point p) const noexcept
    {
        // Pack both coordinates and run one 64-bit avalanche round.
        std::uint64_t k = (std::uint64_t(std::uint32_t(p.x)) << 32) | std::uint32_t(p.y);
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        k *= 0xc4ceb9fe1a85ec53ULL;
        k ^= k >> 33;
        return std::size_t(k);
    }
};

// ---------------------------------------------------------------------------
// Edges
// ---------------------------------------------------------------------------

enum class Orientation : std::uint8_t { Horizontal, Vertical };

// Canonical id of a nearest-neighbour edge: the anchor is the left (resp.
// lower) endpoint, so every edge has exactly one id.
struct EdgeId {
    Point anchor;
    Orientation dir = Orientation::Horizontal;

    Point a() const { return anchor; }
    Point b() const
    {
        return dir == Orientation::Horizontal ? Point{anchor.x + 1, anchor.y}
                                              : Point{anchor.x, anchor.y + 1};
    }

    friend bool operator==(const EdgeId&, const EdgeId&) = default;
};

struct EdgeIdHash {
    std::size_t operator()(const EdgeId& e) const noexcept
    {
        std::size_t h = PointHash{}(e.anchor);
        return h ^ (e.dir == Orientation::Vertical ? 0x9e3779b97f4a7c15ULL : 0);
    }
};

// Id of the edge joining two adjacent points, in canonical form.
inline EdgeId edge_between(Point a, Point b)
{
    Point d = b - a;
    if (d.x == 1 && d.y == 0) return {a, Orientation::Horizontal};
    if (d.x == -1 && d.y == 0) return {b, Orientation::Horizontal};
    if (d.x == 0 && d.y == 1) return {a, Orientation::Vertical};
    if (d.x == 0 && d.y == -1) return {b, Orientation::Vertical};
    throw std::invalid_argument("edge_between: points are not adjacent");
}

// ---------------------------------------------------------------------------
// Boxes and restrictions
// ---------------------------------------------------------------------------

// Closed integer rectangle [xlo,xhi] x [ylo,yhi].
struct IntRect {
    int xlo = 0, xhi = 0, ylo = 0, yhi = 0;

    static IntRect square(int n)
    {
        if (n < 1) throw std::invalid_argument("IntRect::square: need n >= 1");
        return {-n, n, -n, n};
    }

    bool contains(Point p) const
    {
        return p.x >= xlo && p.x <= xhi && p.y >= ylo && p.y <= yhi;
    }
    bool contains(const EdgeId& e) const { return contains(e.a()) && contains(e.b()); }

    int width() const { return xhi - xlo + 1; }
    int height() const { return yhi - ylo + 1; }
    std::int64_t vertex_count() const { return std::int64_t(width()) * height(); }

    friend bool operator==(const IntRect&, const IntRect&) = default;
};

// Whether computations may use the whole plane or only the upper half-plane
// {y >= 0} (always intersected with the field's box).
enum class Restriction : std::uint8_t { Full, HalfPlane };

inline bool in_domain(Point p, const IntRect& box, Restriction r)
{
    if (!box.contains(p)) return false;
    return r == Restriction::Full || p.y >= 0;
}

// All edges with both endpoints in the box, horizontal rows first, in row
// order. [-1,1]^2 yields 12 edges.
inline std::vector<EdgeId> edges_in(const IntRect& box)
{
    std::vector<EdgeId> out;
    for (int y = box.ylo; y <= box.yhi; ++y)
        for (int x = box.xlo; x < box.xhi; ++x)
            out.push_back({{x, y}, Orientation::Horizontal});
    for (int y = box.ylo; y < box.yhi; ++y)
        for (int x = box.xlo; x <= box.xhi; ++x)
            out.push_back({{x, y}, Orientation::Vertical});
    return out;
}

// ---------------------------------------------------------------------------
// Angles, lines, sectors
// ---------------------------------------------------------------------------

// Planar argument of a nonzero lattice point, in [0, 2*pi).
inline double arg_of(Point p)
{
    if (p.x == 0 && p.y == 0)
        throw std::domain_error("arg_of: argument of the origin is undefined");
    double a = std::atan2(double(p.y), double(p.x));
    if (a < 0) a += kTwoPi;
    return a;
}

// Points of the horizontal line L_n = {(x, n)} inside the box, sorted by x.
inline std::vector<Point> line_points(int n, const IntRect& box)
{
    std::vector<Point> out;
    if (n < box.ylo || n > box.yhi) return out;
    out.reserve(std::size_t(box.width()));
    for (int x = box.xlo; x <= box.xhi; ++x) out.push_back({x, n});
    return out;
}

// An angular sector [theta1, theta2] with a distinguished interior direction
// theta. Plain data: measured sectors (tangent contact arcs) may touch the
// axes, so validation beyond the ordering is left to make_sector.
struct SectorSpec {
    double theta = kPi / 2;
    double theta1 = kPi / 2;
    double theta2 = kPi / 2;
};

// Builds a sector used to direct geodesics. Directions in the band
// [pi/4, pi/2] additionally require 0 < theta1 <= theta2 < pi (the standard
// symmetry reduction); sectors outside that band only need the ordering.
inline SectorSpec make_sector(double theta, double theta1, double theta2)
{
    if (!(theta1 <= theta && theta <= theta2))
        throw std::invalid_argument("make_sector: need theta1 <= theta <= theta2");
    if (theta >= kPi / 4 && theta <= kPi / 2 && !(theta1 > 0.0 && theta2 < kPi))
        throw std::invalid_argument("make_sector: need 0 < theta1 <= theta2 < pi");
    return {theta, theta1, theta2};
}

// Membership of angle a (in [0,2*pi)) in the closed arc [lo, hi], where the
// bounds may leave [0,2*pi) and then wrap around.
inline bool angle_in_closed(double a, double lo, double hi)
{
    if (hi - lo >= kTwoPi) return true;
    auto wrap = [](double t) {
        t = std::fmod(t, kTwoPi);
        return t < 0 ? t + kTwoPi : t;
    };
    double wlo = wrap(lo), whi = wrap(hi);
    if (wlo <= whi) return a >= wlo && a <= whi;
    return a >= wlo || a <= whi;  // arc crosses 0
}

// Points of L_n inside the box whose argument lies in the widened closed
// sector [theta1 - eps, theta2 + eps]; sorted by x.
inline std::vector<Point> sector_arc(const SectorSpec& s, int n, double eps, const IntRect& box)
{
    std::vector<Point> out;
    for (Point p : line_points(n, box)) {
        if (p.x == 0 && p.y == 0) continue;  // origin has no argument
        if (angle_in_closed(arg_of(p), s.theta1 - eps, s.theta2 + eps)) out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dual lattice
// ---------------------------------------------------------------------------

// Edge of the dual lattice Z^2 + (1/2, 1/2). Coordinates are stored as the
// integer part; the half offset is implied, so the dual vertex stored as
// (x, y) sits at (x + 1/2, y + 1/2) in the plane.
struct DualEdge {
    Point anchor;
    Orientation dir = Orientation::Horizontal;

    friend bool operator==(const DualEdge&, const DualEdge&) = default;
};

struct DualEdgeHash {
    std::size_t operator()(const DualEdge& e) const noexcept
    {
        return EdgeIdHash{}(EdgeId{e.anchor, e.dir});
    }
};

// The unique dual edge crossing a primal edge. A horizontal primal edge
// anchored at (x, y) is crossed by the vertical dual edge from (x+1/2, y-1/2)
// to (x+1/2, y+1/2), and vice versa.
inline DualEdge to_dual(const EdgeId& e)
{
    if (e.dir == Orientation::Horizontal)
        return {{e.anchor.x, e.anchor.y - 1}, Orientation::Vertical};
    return {{e.anchor.x - 1, e.anchor.y}, Orientation::Horizontal};
}

inline EdgeId to_primal(const DualEdge& d)
{
    if (d.dir == Orientation::Vertical)
        return {{d.anchor.x, d.anchor.y + 1}, Orientation::Horizontal};
    return {{d.anchor.x + 1, d.anchor.y}, Orientation::Vertical};
}

}  // namespace fpp
