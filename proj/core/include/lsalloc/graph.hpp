#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lsalloc/errors.hpp"
#include "lsalloc/rng.hpp"

namespace lsalloc {

using Vertex = std::uint32_t;

// Sorted vector of distinct vertex ids. Everything that returns one keeps it
// sorted; everything that takes one may rely on that.
using VertexSet = std::vector<Vertex>;

enum class GraphFamily {
    Cycle,
    Grid,
    Hypercube,
    RandomRegular,
    ErdosRenyi,
    TreeRegular,
    CliqueCycle,
    Custom,
};

std::string_view family_name(GraphFamily f);
std::optional<GraphFamily> family_from_name(std::string_view name);

// Immutable simple undirected connected graph in CSR form. Adjacency lists
// are sorted ascending. Construction verifies simplicity, symmetry and
// connectivity; a Graph that exists satisfies all three.
class Graph {
public:
    // edges may arrive in any order and either orientation, one entry per
    // undirected edge. Throws InvalidParameter on self-loops, duplicate
    // edges, out-of-range endpoints, or a disconnected result.
    static Graph from_edges(std::uint32_t n,
                            const std::vector<std::pair<Vertex, Vertex>>& edges,
                            GraphFamily family = GraphFamily::Custom);

    std::uint32_t num_vertices() const { return n_; }
    std::uint64_t num_edges() const { return adj_.size() / 2; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }
    std::uint32_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

    std::uint32_t max_degree() const { return max_degree_; }
    std::uint32_t min_degree() const { return min_degree_; }

    GraphFamily family() const { return family_; }

    // Torus geometry, present on graphs built by build_grid and recovered
    // when parsing a grid-tagged edge list. Row-major vertex ids: the last
    // coordinate varies fastest.
    bool has_grid_geometry() const { return grid_side_ != 0; }
    std::uint32_t grid_side() const { return grid_side_; }
    std::uint32_t grid_dim() const { return grid_dim_; }

    bool operator==(const Graph& other) const {
        return n_ == other.n_ && family_ == other.family_ &&
               offsets_ == other.offsets_ && adj_ == other.adj_;
    }

private:
    Graph() = default;

    std::uint32_t n_ = 0;
    std::vector<std::uint32_t> offsets_; // n+1 entries
    std::vector<Vertex> adj_;            // 2m entries, sorted per vertex
    std::uint32_t max_degree_ = 0;
    std::uint32_t min_degree_ = 0;
    GraphFamily family_ = GraphFamily::Custom;
    std::uint32_t grid_side_ = 0;
    std::uint32_t grid_dim_ = 0;

    friend Graph build_grid(std::uint32_t side, std::uint32_t dim);
    friend Graph parse_edge_list(std::string_view text);
};

// ---- constructors ----

// n >= 3 vertices in a ring.
Graph build_cycle(std::uint32_t n);

// dim-dimensional torus with side vertices per axis, n = side^dim, ids
// row-major. side >= 3 keeps it simple (side 2 would create double edges),
// dim >= 1. Every vertex has degree 2*dim.
Graph build_grid(std::uint32_t side, std::uint32_t dim);

// Binary hypercube on 2^dim vertices, ids adjacent iff they differ in one
// bit. 1 <= dim <= 30.
Graph build_hypercube(std::uint32_t dim);

// Uniform d-regular graph via the configuration model: pair up n*d stubs
// uniformly, reject the whole instance on any self-loop, multi-edge or
// disconnection, and retry with a fresh derived seed. The erased instance is
// uniform over simple connected d-regular graphs. Requires n*d even and
// 3 <= d < n; throws GenerationFailed after 10000 rejected attempts.
Graph build_random_regular(std::uint32_t n, std::uint32_t d, std::uint64_t seed);

// G(n, p): each unordered pair independently with probability p, 0 < p < 1.
// Redraws with a derived seed until connected, at most 100 attempts, then
// GenerationFailed.
Graph build_erdos_renyi(std::uint32_t n, double p, std::uint64_t seed);

// Ring of n/(d-1) cliques of size d-1; vertex j of clique c is joined to
// vertex j of cliques c-1 and c+1 (mod ring length). d-regular. Requires
// d >= 3, (d-1) | n, and at least 3 cliques.
Graph build_clique_cycle(std::uint32_t n, std::uint32_t d);

struct TreeGraph {
    Graph graph;
    Vertex root;
};

// Balanced tree of depth k whose root and internal vertices have degree d,
// made d-regular by joining the leaves with a fixed circulant: leaf l gains
// edges to l +- j (mod L) for j = 1..floor((d-1)/2), plus its antipode
// l + L/2 when d-1 is odd. n = 1 + sum_{i=0..k-1} d*(d-1)^i. Root id is 0.
TreeGraph build_regular_tree_graph(std::uint32_t d, std::uint32_t k);

// ---- queries ----

// All vertices at BFS distance <= r from v, sorted.
VertexSet ball_of_radius(const Graph& g, Vertex v, std::uint32_t r);

// Vertices at BFS distance exactly r from v, sorted. Empty once r exceeds
// the eccentricity of v.
VertexSet sphere(const Graph& g, Vertex v, std::uint32_t r);

// Coordinate ball on a torus grid: vertices whose every coordinate is within
// torus distance r of u's. Only defined for grid-family graphs carrying
// geometry; anything else throws WrongFamily. Size is (2r+1)^dim while
// 2r+1 <= side, saturating to n beyond that.
VertexSet linf_ball(const Graph& g, Vertex u, std::uint32_t r);

// BFS distances from s to every vertex (the graph is connected, so all
// entries are finite).
std::vector<std::uint32_t> distances_from(const Graph& g, Vertex s);

struct GrowthCheckResult {
    bool ok;
    // Populated when ok is false: the first (vertex, radius) whose ball was
    // too small, with the observed and required sizes.
    Vertex vertex = 0;
    std::uint32_t radius = 0;
    std::uint64_t ball_size = 0;
    double required = 0.0;
};

// Verifies |B_u(r)| >= min(e^(phi*r), n/2) for every vertex u and every
// radius from 0 until the ball first reaches n/2 vertices. Exhaustive BFS
// per vertex.
GrowthCheckResult check_exponential_growth(const Graph& g, double phi);

// ---- serialization ----

// Plain-text edge list: "n m family" header, then one "u v" line per edge
// with u < v, sorted. Emission is byte-stable for equal graphs.
std::string to_edge_list(const Graph& g);
Graph parse_edge_list(std::string_view text);

void write_edge_list(const Graph& g, const std::filesystem::path& path);
Graph read_edge_list(const std::filesystem::path& path);

} // namespace lsalloc
