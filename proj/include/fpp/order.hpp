#pragma once

// Left-to-right ordering of geodesics. Two paths are compared through their
// intersections with the horizontal lines L_n of an inspected range:
// g1 precedes g2 on the left when g2's chosen intersection sits weakly left
// of g1's on every line. Three interchangeable intersection criteria are
// provided: the defining one (leftmost), the first-in-path-order variant,
// and the rightmost-based opposite order, which reverses every
// non-coalesced verdict.

#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "geodesic.hpp"
#include "lattice.hpp"
#include "weights.hpp"

namespace fpp {

enum class Relation : std::uint8_t { LeftPrecedes, RightPrecedes, Coalesced, Undetermined };

inline const char* to_string(Relation r)
{
    switch (r) {
        case Relation::LeftPrecedes: return "left-precedes";
        case Relation::RightPrecedes: return "right-precedes";
        case Relation::Coalesced: return "coalesced";
        case Relation::Undetermined: return "undetermined";
    }
    return "?";
}

struct OrderVerdict {
    Relation relation = Relation::Undetermined;
    // Coalesced: first line from which the vertex sets agree. Determinate
    // order: first line with a strict separation. Undetermined: first line
    // contradicting the earlier strict signal (n_hi + 1 if none was strict).
    int first_stable_line = 0;
};

enum class OrderCriterion : std::uint8_t {
    LeftmostIntersection,   // the definition
    FirstIntersection,      // first vertex in path order on the line
    RightmostIntersection,  // the opposite order (duality check)
};

namespace detail {

// x-coordinate of the chosen intersection of the path with L_n.
inline int line_intersection_x(const Geodesic& g, int n, OrderCriterion c)
{
    bool found = false;
    int best = 0;
    for (Point v : g.vertices) {
        if (v.y != n) continue;
        switch (c) {
            case OrderCriterion::FirstIntersection:
                return v.x;
            case OrderCriterion::LeftmostIntersection:
                if (!found || v.x < best) best = v.x;
                break;
            case OrderCriterion::RightmostIntersection:
                if (!found || v.x > best) best = v.x;
                break;
        }
        found = true;
    }
    if (!found) throw std::out_of_range("compare: a path misses a line of the range");
    return best;
}

// Largest y carried by the symmetric difference of the vertex sets, or
// nullopt when the sets are equal.
inline std::optional<int> symdiff_max_y(const Geodesic& g1, const Geodesic& g2)
{
    std::unordered_set<Point, PointHash> s1(g1.vertices.begin(), g1.vertices.end());
    std::unordered_set<Point, PointHash> s2(g2.vertices.begin(), g2.vertices.end());
    std::optional<int> top;
    for (Point v : g1.vertices)
        if (!s2.count(v) && (!top || v.y > *top)) top = v.y;
    for (Point v : g2.vertices)
        if (!s1.count(v) && (!top || v.y > *top)) top = v.y;
    return top;
}

}  // namespace detail

inline OrderVerdict compare(const Geodesic& g1, const Geodesic& g2, int n_lo, int n_hi,
                            OrderCriterion criterion = OrderCriterion::LeftmostIntersection)
{
    if (n_lo > n_hi) throw std::invalid_argument("compare: empty line range");

    // Coalescence: the vertex sets agree from some line of the range on.
    std::optional<int> top = detail::symdiff_max_y(g1, g2);
    const int agree_from = top ? *top + 1 : n_lo;
    if (agree_from <= n_hi) {
        // Make sure the paths actually live on those lines before declaring.
        detail::line_intersection_x(g1, n_hi, criterion);
        detail::line_intersection_x(g2, n_hi, criterion);
        return {Relation::Coalesced, std::max(agree_from, n_lo)};
    }

    // Per-line comparison; under the rightmost criterion the roles of the
    // arguments reverse (the opposite order).
    int first_strict = n_hi + 1;
    int sign_seen = 0;
    for (int n = n_lo; n <= n_hi; ++n) {
        const int x1 = detail::line_intersection_x(g1, n, criterion);
        const int x2 = detail::line_intersection_x(g2, n, criterion);
        int s = x2 < x1 ? -1 : x2 > x1 ? 1 : 0;
        if (criterion == OrderCriterion::RightmostIntersection) s = -s;
        if (s == 0) continue;
        if (sign_seen == 0) {
            sign_seen = s;
            first_strict = n;
        } else if (s != sign_seen) {
            return {Relation::Undetermined, n};  // order flips inside the range
        }
    }
    if (sign_seen < 0) return {Relation::LeftPrecedes, first_strict};
    if (sign_seen > 0) return {Relation::RightPrecedes, first_strict};
    return {Relation::Undetermined, n_hi + 1};  // equal everywhere yet not coalesced
}

enum class Side : std::uint8_t { L, R };

struct ExtremalProxy {
    Side side = Side::L;
    Point start;
    Geodesic path;
    int n_target = 0;
    SectorSpec sector;
    Restriction restriction = Restriction::Full;
};

// Finite stand-in for the extremal S-directed geodesic from x: the geodesic
// to the leftmost (side L) or rightmost (side R) point of the sector arc on
// L_{n_target}.
template <WeightSource F>
ExtremalProxy extremal_proxy(const F& field, Point x, Side side, const SectorSpec& sector,
                             int n_target, Restriction restriction = Restriction::Full)
{
    const std::vector<Point> arc = sector_arc(sector, n_target, 0.0, field.box());
    if (arc.empty())
        throw std::runtime_error("extremal_proxy: sector arc is empty inside the box");
    const Point target = side == Side::L ? arc.front() : arc.back();
    return {side, x, geodesic(field, x, target, restriction), n_target, sector, restriction};
}

// First vertex after which the two paths' suffixes are identical.
inline std::optional<Point> coalescence_point(const Geodesic& g1, const Geodesic& g2)
{
    std::size_t i = g1.vertices.size(), j = g2.vertices.size();
    if (i == 0 || j == 0 || !(g1.vertices[i - 1] == g2.vertices[j - 1])) return std::nullopt;
    while (i > 1 && j > 1 && g1.vertices[i - 2] == g2.vertices[j - 2]) --i, --j;
    return g1.vertices[i - 1];
}

// Finite proxy of the backward cluster of x: the members y of U whose
// extremal proxy passes through x.
template <WeightSource F>
std::vector<Point> backward_cluster(const F& field, Point x, const std::vector<Point>& U,
                                    const SectorSpec& sector, int n_target,
                                    Restriction restriction = Restriction::Full,
                                    Side side = Side::L)
{
    std::vector<Point> cluster;
    for (Point y : U)
        if (extremal_proxy(field, y, side, sector, n_target, restriction).path.contains(x))
            cluster.push_back(y);
    std::sort(cluster.begin(), cluster.end(), yx_less);
    return cluster;
}

}  // namespace fpp
