#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <queue>
#include <set>
#include <vector>

#include "lsalloc/errors.hpp"
#include "lsalloc/graph.hpp"

using namespace lsalloc;

namespace {

// Reference distances by plain frontier expansion over std::set, independent
// of the library's BFS.
std::vector<int> reference_distances(const Graph& g, Vertex s) {
    std::vector<int> dist(g.num_vertices(), -1);
    std::set<Vertex> frontier{s};
    dist[s] = 0;
    for (int level = 1; !frontier.empty(); ++level) {
        std::set<Vertex> next;
        for (Vertex v : frontier)
            for (Vertex w : g.neighbors(v))
                if (dist[w] < 0) {
                    dist[w] = level;
                    next.insert(w);
                }
        frontier = std::move(next);
    }
    return dist;
}

Graph complete_graph(std::uint32_t n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges);
}

bool adjacent(const Graph& g, Vertex u, Vertex v) {
    const auto nb = g.neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

} // namespace

TEST_SUITE("graphs") {

TEST_CASE("from_edges rejects malformed input") {
    CHECK_THROWS_AS(Graph::from_edges(0, {}), InvalidParameter);
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0}}), InvalidParameter);
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 1}, {1, 0}}), InvalidParameter);
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 2}}), InvalidParameter);
    CHECK_THROWS_AS(Graph::from_edges(4, {{0, 1}, {2, 3}}), InvalidParameter);

    const Graph lonely = Graph::from_edges(1, {});
    CHECK(lonely.num_vertices() == 1);
    CHECK(lonely.num_edges() == 0);
    CHECK(lonely.min_degree() == 0);
}

TEST_CASE("cycle") {
    const Graph tri = build_cycle(3);
    CHECK(tri.num_vertices() == 3);
    CHECK(tri.max_degree() == 2);
    CHECK(tri.min_degree() == 2);

    const Graph c6 = build_cycle(6);
    for (Vertex v = 0; v < 6; ++v) CHECK(c6.degree(v) == 2);

    const Graph big = build_cycle(1000);
    CHECK(big.num_edges() == 1000);

    CHECK_THROWS_AS(build_cycle(2), InvalidParameter);
}

TEST_CASE("grid") {
    const Graph g52 = build_grid(5, 2);
    CHECK(g52.num_vertices() == 25);
    CHECK(g52.max_degree() == 4);
    CHECK(g52.min_degree() == 4);
    CHECK(g52.has_grid_geometry());
    CHECK(g52.grid_side() == 5);
    CHECK(g52.grid_dim() == 2);

    // Row-major ids, last coordinate fastest: vertex 6 is (1,1) on side 5.
    const auto nb = g52.neighbors(6);
    CHECK(std::vector<Vertex>(nb.begin(), nb.end()) == std::vector<Vertex>{1, 5, 7, 11});

    // side=3, dim=1 is a triangle, structurally the same as build_cycle(3).
    const Graph g31 = build_grid(3, 1);
    const Graph tri = build_cycle(3);
    CHECK(g31.num_edges() == 3);
    for (Vertex v = 0; v < 3; ++v) {
        const auto a = g31.neighbors(v);
        const auto b = tri.neighbors(v);
        CHECK(std::vector<Vertex>(a.begin(), a.end()) ==
              std::vector<Vertex>(b.begin(), b.end()));
    }

    const Graph g43 = build_grid(4, 3);
    CHECK(g43.num_vertices() == 64);
    CHECK(g43.max_degree() == 6);
    CHECK(g43.min_degree() == 6);
    CHECK(g43.num_edges() == 192);

    CHECK_THROWS_AS(build_grid(2, 2), InvalidParameter);
    CHECK_THROWS_AS(build_grid(3, 0), InvalidParameter);
}

TEST_CASE("hypercube") {
    const Graph q1 = build_hypercube(1);
    CHECK(q1.num_vertices() == 2);
    CHECK(q1.num_edges() == 1);

    const Graph q3 = build_hypercube(3);
    CHECK(q3.num_vertices() == 8);
    CHECK(q3.max_degree() == 3);
    CHECK(q3.min_degree() == 3);

    const Graph q10 = build_hypercube(10);
    CHECK(q10.num_vertices() == 1024);
    const auto dist = distances_from(q10, 0);
    CHECK(*std::max_element(dist.begin(), dist.end()) == 10);

    CHECK_THROWS_AS(build_hypercube(0), InvalidParameter);
    CHECK_THROWS_AS(build_hypercube(31), InvalidParameter);
}

TEST_CASE("random regular") {
    // Degree 3 on 4 vertices forces K4.
    const Graph k4 = build_random_regular(4, 3, 0);
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = u + 1; v < 4; ++v) CHECK(adjacent(k4, u, v));

    const Graph g = build_random_regular(1024, 4, 7);
    CHECK(g.num_vertices() == 1024);
    CHECK(g.max_degree() == 4);
    CHECK(g.min_degree() == 4);

    CHECK(g == build_random_regular(1024, 4, 7));
    CHECK_FALSE(g == build_random_regular(1024, 4, 8));

    CHECK_THROWS_AS(build_random_regular(5, 3, 0), InvalidParameter); // n*d odd
    CHECK_THROWS_AS(build_random_regular(8, 2, 0), InvalidParameter);
    CHECK_THROWS_AS(build_random_regular(4, 4, 0), InvalidParameter);
}

TEST_CASE("erdos renyi") {
    const Graph tiny = build_erdos_renyi(2, 0.999999, 1);
    CHECK(tiny.num_edges() == 1);

    const std::uint32_t n = 256;
    const double p = 2.0 * std::log(256.0) / 256.0;
    const Graph g = build_erdos_renyi(n, p, 1);
    CHECK(g.num_vertices() == n);
    CHECK(g.min_degree() >= 1); // connected by construction
    CHECK(g == build_erdos_renyi(n, p, 1));

    // Degree extremes of a typical instance stay ordered and positive.
    const Graph h = build_erdos_renyi(1024, 1.5 * std::log(1024.0) / 1024.0, 3);
    CHECK(h.min_degree() >= 1);
    CHECK(h.max_degree() >= h.min_degree());

    CHECK_THROWS_AS(build_erdos_renyi(2, 0.0, 1), InvalidParameter);
    CHECK_THROWS_AS(build_erdos_renyi(2, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(build_erdos_renyi(1, 0.5, 1), InvalidParameter);
}

TEST_CASE("clique cycle") {
    const Graph g36 = build_clique_cycle(36, 5);
    CHECK(g36.num_vertices() == 36);
    CHECK(g36.max_degree() == 5);
    CHECK(g36.min_degree() == 5);
    CHECK(g36.num_edges() == 36 * 5 / 2);
    // First clique is {0,1,2,3}; spokes preserve the position in the clique.
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = u + 1; v < 4; ++v) CHECK(adjacent(g36, u, v));
    CHECK(adjacent(g36, 0, 4));
    CHECK_FALSE(adjacent(g36, 0, 5));

    const Graph g9 = build_clique_cycle(9, 4);
    CHECK(g9.num_vertices() == 9);
    CHECK(g9.max_degree() == 4);
    CHECK(g9.min_degree() == 4);

    const Graph g1020 = build_clique_cycle(1020, 5);
    CHECK(g1020.num_vertices() == 1020);
    CHECK(g1020.max_degree() == 5);
    CHECK(g1020.min_degree() == 5);

    CHECK_THROWS_AS(build_clique_cycle(35, 5), InvalidParameter); // 4 does not divide 35
    CHECK_THROWS_AS(build_clique_cycle(8, 4), InvalidParameter);  // only 2 cliques
    CHECK_THROWS_AS(build_clique_cycle(9, 2), InvalidParameter);
}

TEST_CASE("regular tree completion") {
    const TreeGraph t32 = build_regular_tree_graph(3, 2);
    CHECK(t32.graph.num_vertices() == 10);
    CHECK(t32.graph.max_degree() == 3);
    CHECK(t32.graph.min_degree() == 3);
    CHECK(t32.root == 0);
    const auto root_nb = t32.graph.neighbors(0);
    CHECK(std::vector<Vertex>(root_nb.begin(), root_nb.end()) == std::vector<Vertex>{1, 2, 3});
    const auto dist = distances_from(t32.graph, t32.root);
    CHECK(*std::max_element(dist.begin(), dist.end()) == 2);

    // d=4, k=1: the leaf circulant on 4 leaves (ring plus antipode) turns the
    // star into K5.
    const TreeGraph t41 = build_regular_tree_graph(4, 1);
    CHECK(t41.graph.num_vertices() == 5);
    CHECK(t41.graph.num_edges() == 10);

    const TreeGraph t163 = build_regular_tree_graph(16, 3);
    CHECK(t163.graph.num_vertices() == 3857);
    CHECK(t163.graph.max_degree() == 16);
    CHECK(t163.graph.min_degree() == 16);

    CHECK_THROWS_AS(build_regular_tree_graph(2, 2), InvalidParameter);
    CHECK_THROWS_AS(build_regular_tree_graph(3, 0), InvalidParameter);
}

TEST_CASE("balls and spheres agree with reference BFS") {
    const Graph c6 = build_cycle(6);
    CHECK(ball_of_radius(c6, 2, 1) == VertexSet{1, 2, 3});
    CHECK(ball_of_radius(c6, 2, 0) == VertexSet{2});
    CHECK(sphere(c6, 0, 3) == VertexSet{3});
    const auto n0 = c6.neighbors(0);
    CHECK(sphere(c6, 0, 1) == VertexSet(n0.begin(), n0.end()));

    const Graph q4 = build_hypercube(4);
    const auto s2 = sphere(q4, 0, 2);
    CHECK(s2.size() == 6);
    for (Vertex v : s2) CHECK(std::popcount(v) == 2);

    const Graph rr = build_random_regular(1024, 4, 7);
    CHECK(ball_of_radius(rr, 0, 2).size() <= 17); // 1 + 4 + 12

    // Cross-check both against the reference on an irregular instance.
    const Graph er = build_erdos_renyi(64, 0.08, 5);
    const auto ref = reference_distances(er, 3);
    for (std::uint32_t r = 0; r <= 4; ++r) {
        VertexSet expect_ball, expect_sphere;
        for (Vertex v = 0; v < 64; ++v) {
            if (ref[v] >= 0 && static_cast<std::uint32_t>(ref[v]) <= r) expect_ball.push_back(v);
            if (ref[v] >= 0 && static_cast<std::uint32_t>(ref[v]) == r)
                expect_sphere.push_back(v);
        }
        CHECK(ball_of_radius(er, 3, r) == expect_ball);
        CHECK(sphere(er, 3, r) == expect_sphere);
    }
}

TEST_CASE("distances_from") {
    const Graph c6 = build_cycle(6);
    CHECK(distances_from(c6, 0) == std::vector<std::uint32_t>{0, 1, 2, 3, 2, 1});

    const Graph k4 = complete_graph(4);
    CHECK(distances_from(k4, 2) == std::vector<std::uint32_t>{1, 1, 0, 1});

    const Graph er = build_erdos_renyi(128, 0.06, 9);
    const auto ref = reference_distances(er, 0);
    const auto got = distances_from(er, 0);
    for (Vertex v = 0; v < 128; ++v) CHECK(static_cast<int>(got[v]) == ref[v]);
}

TEST_CASE("coordinate balls on the torus") {
    const Graph g52 = build_grid(5, 2);
    CHECK(linf_ball(g52, 0, 0) == VertexSet{0});
    CHECK(linf_ball(g52, 0, 1).size() == 9);
    // Explicit coordinates: rows and columns {4, 0, 1} around the origin.
    CHECK(linf_ball(g52, 0, 1) == VertexSet{0, 1, 4, 5, 6, 9, 20, 21, 24});
    CHECK(linf_ball(g52, 7, 2).size() == 25);
    CHECK(linf_ball(g52, 7, 3).size() == 25); // saturated

    const Graph g73 = build_grid(7, 3);
    CHECK(linf_ball(g73, 123, 2).size() == 125);

    CHECK_THROWS_AS(linf_ball(build_cycle(8), 0, 1), WrongFamily);
}

TEST_CASE("exponential growth checker") {
    CHECK(check_exponential_growth(complete_graph(5), 1.0).ok);

    const auto cyc = check_exponential_growth(build_cycle(1024), 0.5);
    CHECK_FALSE(cyc.ok);
    CHECK(cyc.ball_size < cyc.required);
    CHECK(cyc.ball_size == 2 * cyc.radius + 1);

    const Graph rr = build_random_regular(1024, 4, 7);
    CHECK(check_exponential_growth(rr, 0.3).ok);
    CHECK(check_exponential_growth(rr, 0.5).ok);
}

TEST_CASE("edge list serialization") {
    const Graph c4 = build_cycle(4);
    CHECK(to_edge_list(c4) == "4 4 cycle\n0 1\n0 3\n1 2\n2 3\n");

    const Graph back = parse_edge_list(to_edge_list(c4));
    CHECK(back == c4);
    CHECK(back.family() == GraphFamily::Cycle);

    // Grid geometry survives the round trip.
    const Graph g42 = build_grid(4, 2);
    const Graph gback = parse_edge_list(to_edge_list(g42));
    CHECK(gback == g42);
    CHECK(gback.has_grid_geometry());
    CHECK(gback.grid_side() == 4);
    CHECK(gback.grid_dim() == 2);
    CHECK(linf_ball(gback, 0, 1).size() == 9);

    const Graph rr = build_random_regular(64, 4, 2);
    CHECK(parse_edge_list(to_edge_list(rr)) == rr);
}

TEST_CASE("edge list parse errors") {
    CHECK_THROWS_AS(parse_edge_list(""), ParseError);
    CHECK_THROWS_AS(parse_edge_list("3 3 nosuch\n0 1\n0 2\n1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("3 2 cycle\n0 1\n0 2\n1 2\n"), ParseError);  // m mismatch
    CHECK_THROWS_AS(parse_edge_list("3 3 cycle\n1 0\n0 2\n1 2\n"), ParseError);  // u >= v
    CHECK_THROWS_AS(parse_edge_list("3 3 cycle\n0 2\n0 1\n1 2\n"), ParseError);  // unsorted
    CHECK_THROWS_AS(parse_edge_list("3 3 cycle\n0 1\n0 2\n1 2 9\n"), ParseError); // trailing
    CHECK_THROWS_AS(parse_edge_list("3 3 cycle\n0 1\n0 2\n1 3\n"), ParseError);  // range
    CHECK_THROWS_AS(parse_edge_list("4 2 custom\n0 1\n2 3\n"), ParseError); // disconnected
}

TEST_CASE("edge list file round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "lsalloc_graph_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "g.edges";

    const Graph g = build_clique_cycle(36, 5);
    write_edge_list(g, path);
    CHECK(read_edge_list(path) == g);

    CHECK_THROWS_AS(read_edge_list(dir / "missing.edges"), IoError);
    std::filesystem::remove_all(dir);
}

} // TEST_SUITE
