#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "invperc/lattice.hpp"

using namespace invperc;

TEST_CASE("box_sites cardinality") {
    CHECK(box_sites(0).size() == 1);
    CHECK(box_sites(0)[0] == Site{0, 0});
    CHECK(box_sites(1).size() == 9);
    CHECK(box_sites(2).size() == 25);
}

TEST_CASE("region_edges counts and canonical uniqueness") {
    auto s1 = region_edges(box_sites(1));
    CHECK(s1.size() == 12);
    auto s2 = region_edges(box_sites(2));
    CHECK(s2.size() == 40);

    std::set<EdgeId> unique1(s1.begin(), s1.end());
    CHECK(unique1.size() == s1.size());
    CHECK(std::is_sorted(s2.begin(), s2.end()));

    auto ann = annulus_sites(AnnulusSpec(1, 2));
    CHECK(ann.size() == 24);
    CHECK(region_edges(ann).size() == 36);
    CHECK(annulus_edges(AnnulusSpec(1, 2)).size() == 36);
}

TEST_CASE("annulus boundaries and validation") {
    auto ann = annulus_sites(AnnulusSpec(2, 4));
    for (const Site& s : ann) {
        CHECK(chebyshev(s) >= 2);
        CHECK(chebyshev(s) <= 4);
    }
    CHECK_THROWS_AS(AnnulusSpec(0, 2), std::domain_error);
    CHECK_THROWS_AS(AnnulusSpec(3, 3), std::domain_error);
    CHECK_THROWS_AS(AnnulusSpec(4, 2), std::domain_error);
}

TEST_CASE("dual edge bijection") {
    // horizontal {(0,0),(1,0)} crosses the dual edge (1/2,-1/2)-(1/2,1/2)
    auto d = dual_edge(horizontal_edge(0, 0));
    CHECK(d.endpoints_x2() ==
          std::pair{std::pair{1, -1}, std::pair{1, 1}});
    // vertical {(0,0),(0,1)} crosses (-1/2,1/2)-(1/2,1/2)
    auto d2 = dual_edge(vertical_edge(0, 0));
    CHECK(d2.endpoints_x2() ==
          std::pair{std::pair{-1, 1}, std::pair{1, 1}});

    for (const EdgeId& e : region_edges(box_sites(3)))
        CHECK(dual_edge(dual_edge(e)) == e);
}

TEST_CASE("graph_boundary of a single site") {
    Subgraph g;
    g.sites.insert(Site{0, 0});
    auto b = graph_boundary(g);
    REQUIRE(b.size() == 4);
    std::set<EdgeId> expect{horizontal_edge(-1, 0), horizontal_edge(0, 0),
                            vertical_edge(0, -1), vertical_edge(0, 0)};
    CHECK(std::set<EdgeId>(b.begin(), b.end()) == expect);
}

TEST_CASE("graph_boundary of a full box") {
    for (int n : {1, 2}) {
        Subgraph g;
        for (const Site& s : box_sites(n)) g.sites.insert(s);
        for (const EdgeId& e : region_edges(box_sites(n))) g.edges.insert(e);
        auto b = graph_boundary(g);
        // one outgoing edge per boundary site per exposed direction
        CHECK(b.size() == static_cast<std::size_t>(4 * (2 * n + 1)));
        for (const EdgeId& e : b) CHECK(g.edges.count(e) == 0);
    }
}

TEST_CASE("graph_boundary of a two-site cluster") {
    Subgraph g;
    g.sites.insert(Site{0, 0});
    g.sites.insert(Site{0, -1});
    g.edges.insert(vertical_edge(0, -1));
    auto b = graph_boundary(g);
    CHECK(b.size() == 6);
    for (const EdgeId& e : b) CHECK(g.edges.count(e) == 0);
}

TEST_CASE("graph_boundary keeps edges internal to the site set") {
    // 4-cycle with one edge missing: the missing edge has both endpoints in G
    // and still belongs to the boundary
    Subgraph g;
    for (Site s : {Site{0, 0}, Site{1, 0}, Site{0, 1}, Site{1, 1}}) g.sites.insert(s);
    g.edges.insert(horizontal_edge(0, 0));
    g.edges.insert(vertical_edge(1, 0));
    g.edges.insert(horizontal_edge(0, 1));
    auto b = graph_boundary(g);
    CHECK(std::count(b.begin(), b.end(), vertical_edge(0, 0)) == 1);
}

TEST_CASE("edge_between and canonical form") {
    CHECK(edge_between(Site{1, 0}, Site{0, 0}) == horizontal_edge(0, 0));
    CHECK(edge_between(Site{0, 1}, Site{0, 0}) == vertical_edge(0, 0));
    CHECK_THROWS_AS(edge_between(Site{0, 0}, Site{1, 1}), std::invalid_argument);
    CHECK(horizontal_edge(2, 3).other() == Site{3, 3});
    CHECK(vertical_edge(2, 3).other() == Site{2, 4});
}
