#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <unordered_set>

#include "fpp/lattice.hpp"

using namespace fpp;

TEST_CASE("points order lexicographically by (y, x)")
{
    REQUIRE(yx_less({0, -1}, {5, 0}));   // smaller y wins regardless of x
    REQUIRE(yx_less({-3, 2}, {4, 2}));   // tie on y falls back to x
    REQUIRE_FALSE(yx_less({0, 0}, {0, 0}));
    std::vector<Point> pts{{1, 1}, {0, 0}, {-1, 1}, {2, -1}};
    std::sort(pts.begin(), pts.end(), yx_less);
    REQUIRE(pts == std::vector<Point>{{2, -1}, {0, 0}, {-1, 1}, {1, 1}});
}

TEST_CASE("edges are canonical and undirected")
{
    EdgeId h = edge_between({0, 0}, {1, 0});
    EdgeId h2 = edge_between({1, 0}, {0, 0});
    REQUIRE(h == h2);
    REQUIRE(h.dir == Orientation::Horizontal);
    REQUIRE(h.a() == Point{0, 0});
    REQUIRE(h.b() == Point{1, 0});

    EdgeId v = edge_between({3, -2}, {3, -1});
    REQUIRE(v.dir == Orientation::Vertical);
    REQUIRE(v.a() == Point{3, -2});
    REQUIRE(v.b() == Point{3, -1});

    REQUIRE_THROWS_AS(edge_between({0, 0}, {1, 1}), std::invalid_argument);
    REQUIRE_THROWS_AS(edge_between({0, 0}, {0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(edge_between({0, 0}, {2, 0}), std::invalid_argument);
}

TEST_CASE("boxes validate and count vertices")
{
    IntRect b = IntRect::square(2);
    REQUIRE(b.xlo == -2);
    REQUIRE(b.xhi == 2);
    REQUIRE(b.width() == 5);
    REQUIRE(b.vertex_count() == 25);
    REQUIRE(b.contains(Point{2, -2}));
    REQUIRE_FALSE(b.contains(Point{3, 0}));
    REQUIRE_THROWS_AS(IntRect::square(0), std::invalid_argument);
    REQUIRE_THROWS_AS(IntRect::square(-1), std::invalid_argument);
}

TEST_CASE("half-plane restriction masks negative y")
{
    IntRect b = IntRect::square(3);
    REQUIRE(in_domain({1, 0}, b, Restriction::HalfPlane));
    REQUIRE(in_domain({1, 3}, b, Restriction::HalfPlane));
    REQUIRE_FALSE(in_domain({1, -1}, b, Restriction::HalfPlane));
    REQUIRE(in_domain({1, -1}, b, Restriction::Full));
    REQUIRE_FALSE(in_domain({4, 0}, b, Restriction::HalfPlane));
}

TEST_CASE("edge enumeration over a radius-1 box yields 12 edges")
{
    auto edges = edges_in(IntRect::square(1));
    REQUIRE(edges.size() == 12);  // 2 * 3 * 2 horizontal + vertical
    std::unordered_set<EdgeId, EdgeIdHash> uniq(edges.begin(), edges.end());
    REQUIRE(uniq.size() == edges.size());
    for (const auto& e : edges) {
        REQUIRE(IntRect::square(1).contains(e.a()));
        REQUIRE(IntRect::square(1).contains(e.b()));
    }
}

TEST_CASE("direction angle of lattice points")
{
    REQUIRE(arg_of({1, 0}) == 0.0);
    REQUIRE(arg_of({0, 3}) == kPi / 2);
    REQUIRE(arg_of({1, 1}) == Catch::Approx(kPi / 4).margin(1e-15));
    REQUIRE(arg_of({-2, 0}) == Catch::Approx(kPi).margin(1e-15));
    REQUIRE(arg_of({0, -1}) == Catch::Approx(3 * kPi / 2).margin(1e-15));
    REQUIRE_THROWS_AS(arg_of({0, 0}), std::domain_error);
}

TEST_CASE("level line points clip to the box")
{
    IntRect r1 = IntRect::square(1);
    REQUIRE(line_points(0, r1) == std::vector<Point>{{-1, 0}, {0, 0}, {1, 0}});
    REQUIRE(line_points(2, r1).empty());
    IntRect r2 = IntRect::square(2);
    REQUIRE(line_points(1, r2) ==
            std::vector<Point>{{-2, 1}, {-1, 1}, {0, 1}, {1, 1}, {2, 1}});
}

TEST_CASE("sector construction validates its angles")
{
    SectorSpec s = make_sector(kPi / 2, kPi / 4, 3 * kPi / 4);
    REQUIRE(s.theta == kPi / 2);
    REQUIRE(s.theta1 == kPi / 4);
    REQUIRE(s.theta2 == 3 * kPi / 4);
    REQUIRE_NOTHROW(make_sector(kPi / 2, kPi / 2, kPi / 2));
    // centre angle must lie inside [theta1, theta2]
    REQUIRE_THROWS_AS(make_sector(kPi / 8, kPi / 4, kPi / 2), std::invalid_argument);
    // angles with theta in [pi/4, pi/2] must satisfy 0 < theta1 <= theta2 < pi
    REQUIRE_THROWS_AS(make_sector(kPi / 3, 0.0, kPi / 2), std::invalid_argument);
    REQUIRE_THROWS_AS(make_sector(kPi / 3, kPi / 4, kPi), std::invalid_argument);
    REQUIRE_THROWS_AS(make_sector(kPi / 2, 3 * kPi / 4, kPi / 4), std::invalid_argument);
}

TEST_CASE("sector arc on a level line")
{
    IntRect box{-8, 8, -8, 8};
    SectorSpec up = make_sector(kPi / 2, kPi / 2, kPi / 2);

    SECTION("degenerate sector with no widening hits the single ray point")
    {
        auto arc = sector_arc(up, 5, 0.0, box);
        REQUIRE(arc == std::vector<Point>{{0, 5}});
    }

    SECTION("widening by pi/4 covers |x| <= n on the line")
    {
        auto arc = sector_arc(up, 5, kPi / 4, box);
        REQUIRE(arc.size() == 11);
        REQUIRE(arc.front() == Point{-5, 5});
        REQUIRE(arc.back() == Point{5, 5});
        for (std::size_t i = 1; i < arc.size(); ++i) REQUIRE(arc[i - 1].x < arc[i].x);
    }

    SECTION("a diagonal-to-vertical sector catches the staircase of angles")
    {
        SectorSpec s = make_sector(kPi / 3, kPi / 4, kPi / 2);
        auto arc = sector_arc(s, 4, 0.0, box);
        REQUIRE(arc == std::vector<Point>{{0, 4}, {1, 4}, {2, 4}, {3, 4}, {4, 4}});
    }

    SECTION("arc is monotone in the widening parameter")
    {
        SectorSpec s = make_sector(kPi / 3, kPi / 4, kPi / 2);
        auto narrow = sector_arc(s, 6, 0.01, box);
        auto wide = sector_arc(s, 6, 0.25, box);
        REQUIRE(narrow.size() <= wide.size());
        for (const auto& p : narrow)
            REQUIRE(std::find(wide.begin(), wide.end(), p) != wide.end());
    }

    SECTION("arc is monotone in the sector itself")
    {
        auto inner = sector_arc(make_sector(kPi / 2, 0.4 * kPi, 0.6 * kPi), 6, 0.0, box);
        auto outer = sector_arc(make_sector(kPi / 2, 0.3 * kPi, 0.7 * kPi), 6, 0.0, box);
        REQUIRE(inner.size() <= outer.size());
        for (const auto& p : inner)
            REQUIRE(std::find(outer.begin(), outer.end(), p) != outer.end());
    }

    SECTION("arc clips to the box")
    {
        IntRect tight{-2, 2, -2, 2};
        auto arc = sector_arc(up, 5, kPi / 4, tight);
        REQUIRE(arc.empty());  // line y=5 lies outside the box
    }
}

TEST_CASE("angle containment helper is inclusive")
{
    REQUIRE(angle_in_closed(kPi / 4, kPi / 4, kPi / 2));
    REQUIRE(angle_in_closed(kPi / 2, kPi / 4, kPi / 2));
    REQUIRE_FALSE(angle_in_closed(kPi / 4 - 1e-9, kPi / 4, kPi / 2));
}

TEST_CASE("primal/dual edge map is a bijection")
{
    EdgeId h = edge_between({2, 3}, {3, 3});
    DualEdge dh = to_dual(h);
    REQUIRE(dh.anchor == Point{2, 2});
    REQUIRE(dh.dir == Orientation::Vertical);  // dual edge crosses the primal one
    REQUIRE(to_primal(dh) == h);

    EdgeId v = edge_between({-1, 0}, {-1, 1});
    DualEdge dv = to_dual(v);
    REQUIRE(dv.anchor == Point{-2, 0});
    REQUIRE(dv.dir == Orientation::Horizontal);
    REQUIRE(to_primal(dv) == v);

    auto edges = edges_in(IntRect::square(3));
    std::unordered_set<DualEdge, DualEdgeHash> duals;
    for (const auto& e : edges) {
        DualEdge d = to_dual(e);
        REQUIRE(to_primal(d) == e);
        duals.insert(d);
    }
    REQUIRE(duals.size() == edges.size());
}
