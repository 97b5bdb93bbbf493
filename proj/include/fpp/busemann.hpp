#pragma once

// Busemann-style passage-time differences. For a pair (x, y) and a sequence
// of anchors escaping along a directed path, the sample records
// T(x, a_k) - T(y, a_k) per anchor. Once the geodesics from x and from y to
// the anchors funnel through a common coalescence point the difference
// freezes; quantized weights make that freeze bitwise (equal coalescence
// points imply equal differences exactly), so convergence detection reduces
// to watching the coalescence point stabilize.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "geodesic.hpp"
#include "lattice.hpp"
#include "order.hpp"
#include "shape.hpp"
#include "weights.hpp"

namespace fpp {

enum class BusemannSide : std::uint8_t { Plain, L, R };

inline const char* to_string(BusemannSide s)
{
    switch (s) {
        case BusemannSide::Plain: return "plain";
        case BusemannSide::L: return "L";
        case BusemannSide::R: return "R";
    }
    return "?";
}

struct BusemannSample {
    Point x, y;
    std::vector<Point> anchors;
    std::vector<double> values;  // values[k] = T(x, anchors[k]) - T(y, anchors[k])
    std::optional<double> converged_value;
    std::optional<std::size_t> converged_at;  // first anchor index of the frozen tail
    Restriction restriction = Restriction::Full;
    BusemannSide side = BusemannSide::Plain;
};

template <WeightSource F>
BusemannSample busemann_along(const F& field, Point x, Point y, const std::vector<Point>& anchors,
                              Restriction restriction = Restriction::Full,
                              BusemannSide side = BusemannSide::Plain)
{
    if (anchors.empty()) throw std::invalid_argument("busemann_along: no anchors");
    const IntRect box = field.box();
    for (Point a : anchors)
        if (!in_domain(a, box, restriction))
            throw std::domain_error("busemann_along: anchor outside the domain");

    BusemannSample s;
    s.x = x;
    s.y = y;
    s.anchors = anchors;
    s.restriction = restriction;
    s.side = side;

    const ShortestPathMap mx = shortest_paths(field, x, restriction, anchors);
    const ShortestPathMap my = shortest_paths(field, y, restriction, anchors);

    std::vector<Point> coal(anchors.size());
    std::vector<bool> has_coal(anchors.size(), false);
    s.values.reserve(anchors.size());
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        const Point a = anchors[k];
        s.values.push_back(mx.dist(a) - my.dist(a));
        const Geodesic gx{mx.path_to(a), mx.dist(a), restriction};
        const Geodesic gy{my.path_to(a), my.dist(a), restriction};
        if (auto z = coalescence_point(gx, gy)) {
            coal[k] = *z;
            has_coal[k] = true;
        }
    }

    // Converged once the coalescence point stops moving. A frozen tail must
    // be witnessed by at least two anchors, except in the degenerate x == y
    // case where every difference is identically zero.
    const std::size_t m = anchors.size();
    if (x == y) {
        s.converged_at = 0;
        s.converged_value = s.values.back();
        return s;
    }
    if (m >= 2 && has_coal[m - 1]) {
        std::size_t k = m - 1;
        while (k > 0 && has_coal[k - 1] && coal[k - 1] == coal[m - 1]) --k;
        if (k <= m - 2) {
            s.converged_at = k;
            s.converged_value = s.values.back();
        }
    }
    return s;
}

struct MonotoneWitness {
    bool nonincreasing = false;
    std::vector<double> values;  // T_H(x, y_k) - T_H(y0, y_k) along the proxy
};

// In the half plane, the difference T_H(x, y_k) - T_H(y0, y_k) taken along
// the proxy path from y0 must never increase with k; with quantized weights
// the comparison is exact.
template <WeightSource F>
MonotoneWitness halfplane_monotone_check(const F& field, Point x, Point y0,
                                         const ExtremalProxy& proxy)
{
    if (!(y0 == proxy.start))
        throw std::invalid_argument("halfplane_monotone_check: y0 is not the proxy start");
    if (proxy.restriction != Restriction::HalfPlane)
        throw std::invalid_argument("halfplane_monotone_check: proxy is not half-plane restricted");
    const std::vector<Point>& chain = proxy.path.vertices;
    const ShortestPathMap mx = shortest_paths(field, x, Restriction::HalfPlane, chain);

    MonotoneWitness w;
    w.values.reserve(chain.size());
    double along = 0.0;  // T_H(y0, y_k): prefix of the proxy by the subpath property
    for (std::size_t k = 0; k < chain.size(); ++k) {
        if (k > 0) along += field.weight(edge_between(chain[k - 1], chain[k]));
        w.values.push_back(mx.dist(chain[k]) - along);
    }
    w.nonincreasing = true;
    for (std::size_t k = 0; k + 1 < w.values.size(); ++k)
        if (w.values[k + 1] > w.values[k]) {
            w.nonincreasing = false;
            break;
        }
    return w;
}

// The L/R difference is only expected to vanish when both extremal proxies
// are directed in one narrow contact sector; a wide sector aims them at
// genuinely different directions and biases the difference far below zero.
inline constexpr double kDeltaSectorHalfWidth = 0.0078125;

inline SectorSpec default_delta_sector(double half_width = kDeltaSectorHalfWidth)
{
    return make_sector(kPi / 2.0, kPi / 2.0 - half_width, kPi / 2.0 + half_width);
}

// Difference of the two one-sided Busemann samples at (x, y): the L-proxy
// value minus the R-proxy value, both anchored along proxies started at y.
// Empty when either side fails to converge within the box.
template <WeightSource F>
std::optional<double> delta_H(const F& field, Point x, Point y, const SectorSpec& sector,
                              int n_target)
{
    const IntRect box = field.box();
    if (!in_domain(x, box, Restriction::HalfPlane) || !in_domain(y, box, Restriction::HalfPlane))
        throw std::domain_error("delta_H: endpoint outside the half-plane domain");
    const ExtremalProxy pl =
        extremal_proxy(field, y, Side::L, sector, n_target, Restriction::HalfPlane);
    const ExtremalProxy pr =
        extremal_proxy(field, y, Side::R, sector, n_target, Restriction::HalfPlane);
    const BusemannSample bl = busemann_along(field, x, y, pl.path.vertices,
                                             Restriction::HalfPlane, BusemannSide::L);
    const BusemannSample br = busemann_along(field, x, y, pr.path.vertices,
                                             Restriction::HalfPlane, BusemannSide::R);
    if (!bl.converged_value || !br.converged_value) return std::nullopt;
    return *bl.converged_value - *br.converged_value;
}

template <WeightSource F>
std::optional<double> delta_H(const F& field, Point x, Point y, int n_target)
{
    return delta_H(field, x, y, default_delta_sector(), n_target);
}

struct RhoFit {
    Vec2 rho;
    double residual = 0.0;  // max_i |b_i - rho . p_i| / |p_i|_1
};

// Least-squares slope of converged Busemann values against their probe
// displacements p_i = y_i - x_i, solving the 2x2 normal equations.
inline RhoFit fit_rho(const std::vector<BusemannSample>& samples)
{
    double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
    std::vector<std::pair<Vec2, double>> rows;
    for (const BusemannSample& s : samples) {
        if (!s.converged_value)
            throw std::invalid_argument("fit_rho: sample without a converged value");
        const Vec2 p{static_cast<double>(s.y.x - s.x.x), static_cast<double>(s.y.y - s.x.y)};
        const double b = *s.converged_value;
        rows.push_back({p, b});
        a11 += p.x * p.x;
        a12 += p.x * p.y;
        a22 += p.y * p.y;
        r1 += b * p.x;
        r2 += b * p.y;
    }
    if (rows.size() < 2) throw std::invalid_argument("fit_rho: needs at least two samples");
    const double det = a11 * a22 - a12 * a12;
    const double scale = std::max(a11, a22);
    if (!(std::fabs(det) > 1e-12 * scale * scale))
        throw std::runtime_error("fit_rho: degenerate fit, probes are collinear");
    RhoFit fit;
    fit.rho = {(a22 * r1 - a12 * r2) / det, (a11 * r2 - a12 * r1) / det};
    for (const auto& [p, b] : rows) {
        const double denom = l1(p);
        if (denom <= 0.0) continue;  // x == y probe carries no direction
        fit.residual = std::max(fit.residual, std::fabs(b - dot(fit.rho, p)) / denom);
    }
    return fit;
}

}  // namespace fpp
