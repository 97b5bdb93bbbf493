#pragma once

// Passage times and geodesics. T(x,y) is the minimum over lattice paths of
// the sum of edge weights; with continuous weights the minimizing path is
// unique. Computation is label-setting (Dijkstra) over the field's box,
// optionally restricted to the upper half-plane.
//
// Exactness: weights lie on the grid 2^-26 (see weights.hpp), so every
// distance below 2^27 is an exact double and comparisons of path sums carry
// no rounding slack.
//
// Tie-break: when several paths achieve the same (bit-equal) time, each
// vertex keeps as parent its (y, then x)-smallest shortest-path predecessor,
// and a geodesic is read off the parent chain of the tree rooted at the
// (y, then x)-smaller endpoint. Reading chains from a canonical endpoint
// makes the choice symmetric — geodesic(x,y) is geodesic(y,x) reversed,
// bit for bit — and keeps pairwise geodesics consistent with trees grown
// from the same root.

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lattice.hpp"
#include "weights.hpp"

namespace fpp {

struct Geodesic {
    std::vector<Point> vertices;
    double time = 0.0;
    Restriction restriction = Restriction::Full;

    Point start() const { return vertices.front(); }
    Point end() const { return vertices.back(); }
    bool contains(Point p) const
    {
        for (Point v : vertices)
            if (v == p) return true;
        return false;
    }
};

class ShortestPathMap;

template <WeightSource F>
ShortestPathMap shortest_paths(const F& field, Point root, Restriction restriction,
                               const std::vector<Point>& stop_at = {});

// Single-source distance/parent labelling over box ∩ restriction.
class ShortestPathMap {
  public:
    template <WeightSource F>
    friend ShortestPathMap shortest_paths(const F&, Point, Restriction,
                                          const std::vector<Point>&);

    Point root() const { return root_; }
    Restriction restriction() const { return restriction_; }

    bool in_domain(Point p) const { return fpp::in_domain(p, box_, restriction_); }
    bool reached(Point p) const { return in_domain(p) && done_[index(p)]; }

    double dist(Point p) const
    {
        if (!reached(p)) throw std::out_of_range("ShortestPathMap::dist: point not labelled");
        return dist_[index(p)];
    }

    // Path root -> p along parent pointers.
    std::vector<Point> path_to(Point p) const
    {
        if (!reached(p)) throw std::out_of_range("ShortestPathMap::path_to: point not labelled");
        std::vector<Point> rev;
        int i = index(p);
        while (i >= 0) {
            rev.push_back(point(i));
            i = parent_[i];
        }
        return {rev.rbegin(), rev.rend()};
    }

  private:
    ShortestPathMap(IntRect box, Restriction r, Point root)
        : box_(box),
          restriction_(r),
          root_(root),
          dist_(std::size_t(box.vertex_count()), std::numeric_limits<double>::infinity()),
          parent_(std::size_t(box.vertex_count()), -1),
          done_(std::size_t(box.vertex_count()), 0)
    {
    }

    int index(Point p) const { return (p.x - box_.xlo) + box_.width() * (p.y - box_.ylo); }
    Point point(int i) const
    {
        return {box_.xlo + i % box_.width(), box_.ylo + i / box_.width()};
    }

    IntRect box_;
    Restriction restriction_;
    Point root_;
    std::vector<double> dist_;
    std::vector<int> parent_;
    std::vector<char> done_;
};

// Runs the labelling from `root`. If `stop_at` is nonempty the scan halts
// once all listed points are finalized; by then every parent on their chains
// has already won its tie-break (all shortest-path predecessors of a chain
// vertex carry strictly smaller distance, hence were scanned earlier), so
// early exit never changes an extracted path.
template <WeightSource F>
ShortestPathMap shortest_paths(const F& field, Point root, Restriction restriction,
                               const std::vector<Point>& stop_at)
{
    const IntRect box = field.box();
    if (!in_domain(root, box, restriction))
        throw std::domain_error("shortest_paths: root outside domain");

    ShortestPathMap m(box, restriction, root);
    std::unordered_set<Point, PointHash> pending(stop_at.begin(), stop_at.end());
    for (Point p : stop_at)
        if (!in_domain(p, box, restriction))
            throw std::domain_error("shortest_paths: stop point outside domain");

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    m.dist_[m.index(root)] = 0.0;
    queue.push({0.0, m.index(root)});

    while (!queue.empty()) {
        auto [d, ui] = queue.top();
        queue.pop();
        if (m.done_[ui]) continue;
        m.done_[ui] = 1;
        const Point u = m.point(ui);

        if (!pending.empty() && pending.erase(u) && pending.empty()) break;

        static constexpr int kDx[4] = {1, -1, 0, 0};
        static constexpr int kDy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const Point v{u.x + kDx[k], u.y + kDy[k]};
            if (!in_domain(v, box, restriction)) continue;
            const EdgeId e = k == 0   ? EdgeId{u, Orientation::Horizontal}
                             : k == 1 ? EdgeId{v, Orientation::Horizontal}
                             : k == 2 ? EdgeId{u, Orientation::Vertical}
                                      : EdgeId{v, Orientation::Vertical};
            const double nd = d + field.weight_unchecked(e);
            const int vi = m.index(v);
            if (nd < m.dist_[vi]) {
                m.dist_[vi] = nd;
                m.parent_[vi] = ui;
                queue.push({nd, vi});
            } else if (nd == m.dist_[vi] && yx_less(u, m.point(m.parent_[vi]))) {
                m.parent_[vi] = ui;  // equal-time predecessor, smaller in (y,x)
            }
        }
    }
    if (!pending.empty())
        throw std::runtime_error("shortest_paths: a stop point is unreachable");
    return m;
}

namespace detail {
inline Point canonical_root(Point x, Point y) { return yx_less(y, x) ? y : x; }
}

// T(x, y); symmetric in its arguments, exactly.
template <WeightSource F>
double passage_time(const F& field, Point x, Point y,
                    Restriction restriction = Restriction::Full)
{
    const Point root = detail::canonical_root(x, y);
    const Point other = root == x ? y : x;
    return shortest_paths(field, root, restriction, {other}).dist(other);
}

// The tie-broken minimizing path from x to y, oriented from x.
template <WeightSource F>
Geodesic geodesic(const F& field, Point x, Point y,
                  Restriction restriction = Restriction::Full)
{
    const Point root = detail::canonical_root(x, y);
    const Point other = root == x ? y : x;
    auto m = shortest_paths(field, root, restriction, {other});
    Geodesic g{m.path_to(other), m.dist(other), restriction};
    if (!(root == x)) std::reverse(g.vertices.begin(), g.vertices.end());
    return g;
}

class GeodesicTree;

template <WeightSource F>
GeodesicTree geodesic_tree(const F& field, Point root, const std::vector<Point>& targets,
                           Restriction restriction = Restriction::Full);

// Union of the geodesics from one root to many targets, stored as parent
// pointers. Grown from a single labelling pass, so all branches share
// prefixes and tie-breaks with each other and with pairwise geodesics
// rooted at the same point.
class GeodesicTree {
  public:
    template <WeightSource F>
    friend GeodesicTree geodesic_tree(const F&, Point, const std::vector<Point>&, Restriction);

    Point root() const { return root_; }
    Restriction restriction() const { return restriction_; }
    const std::vector<Point>& targets() const { return targets_; }

    bool contains(Point p) const { return p == root_ || parent_.count(p) > 0; }

    // Path root -> v for any tree vertex v.
    std::vector<Point> path_to(Point v) const
    {
        if (!contains(v)) throw std::out_of_range("GeodesicTree::path_to: not a tree vertex");
        std::vector<Point> rev{v};
        while (!(rev.back() == root_)) rev.push_back(parent_.at(rev.back()));
        return {rev.rbegin(), rev.rend()};
    }

    double time_to(Point v) const
    {
        if (!contains(v)) throw std::out_of_range("GeodesicTree::time_to: not a tree vertex");
        return time_.at(v);
    }

    std::vector<Point> vertices() const
    {
        std::vector<Point> out{root_};
        for (const auto& [v, p] : parent_) out.push_back(v);
        return out;
    }

    // Tree vertices that are nobody's parent (for target sets on one line,
    // these approximate the line's contact set).
    std::vector<Point> leaves() const
    {
        std::unordered_set<Point, PointHash> inner;
        inner.insert(root_);
        for (const auto& [v, p] : parent_) inner.insert(p);
        std::vector<Point> out;
        for (const auto& [v, p] : parent_)
            if (inner.find(v) == inner.end()) out.push_back(v);
        std::sort(out.begin(), out.end(), yx_less);
        return out;
    }

  private:
    explicit GeodesicTree(Point root, Restriction r) : root_(root), restriction_(r) {}

    Point root_;
    Restriction restriction_;
    std::vector<Point> targets_;
    std::unordered_map<Point, Point, PointHash> parent_;
    std::unordered_map<Point, double, PointHash> time_;
};

template <WeightSource F>
GeodesicTree geodesic_tree(const F& field, Point root, const std::vector<Point>& targets,
                           Restriction restriction)
{
    if (targets.empty()) throw std::invalid_argument("geodesic_tree: no targets");
    auto m = shortest_paths(field, root, restriction, targets);
    GeodesicTree t(root, restriction);
    t.targets_ = targets;
    t.time_[root] = 0.0;
    for (Point target : targets) {
        std::vector<Point> chain = m.path_to(target);
        for (std::size_t i = chain.size(); i-- > 1;) {
            if (t.parent_.count(chain[i])) break;  // joined an existing branch
            t.parent_.emplace(chain[i], chain[i - 1]);
            t.time_.emplace(chain[i], m.dist(chain[i]));
        }
    }
    return t;
}

// out_z(w) ∩ U: the members u of U whose geodesic from z passes through w.
template <WeightSource F>
std::vector<Point> out_set(const F& field, Point z, Point w, const std::vector<Point>& U,
                           Restriction restriction = Restriction::Full)
{
    if (!in_domain(w, field.box(), restriction))
        throw std::domain_error("out_set: w outside domain");
    auto m = shortest_paths(field, z, restriction);
    std::vector<Point> out;
    for (Point u : U) {
        if (!m.reached(u)) throw std::domain_error("out_set: a candidate is outside the domain");
        for (Point v : m.path_to(u)) {
            if (v == w) {
                out.push_back(u);
                break;
            }
        }
    }
    return out;
}

}  // namespace fpp
