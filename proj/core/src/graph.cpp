#include "lsalloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace lsalloc {

namespace {

// Packs an undirected edge into one word for duplicate detection.
std::uint64_t edge_key(Vertex a, Vertex b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool adjacency_connected(std::uint32_t n, const std::vector<std::vector<Vertex>>& adj) {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> queue{0};
    seen[0] = 1;
    std::size_t head = 0, count = 1;
    while (head < queue.size()) {
        Vertex u = queue[head++];
        for (Vertex w : adj[u]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                queue.push_back(w);
            }
        }
    }
    return count == n;
}

} // namespace

std::string_view family_name(GraphFamily f) {
    switch (f) {
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::Grid: return "grid";
    case GraphFamily::Hypercube: return "hypercube";
    case GraphFamily::RandomRegular: return "random-regular";
    case GraphFamily::ErdosRenyi: return "erdos-renyi";
    case GraphFamily::TreeRegular: return "tree-regular";
    case GraphFamily::CliqueCycle: return "clique-cycle";
    case GraphFamily::Custom: return "custom";
    }
    return "custom";
}

std::optional<GraphFamily> family_from_name(std::string_view name) {
    for (GraphFamily f : {GraphFamily::Cycle, GraphFamily::Grid, GraphFamily::Hypercube,
                          GraphFamily::RandomRegular, GraphFamily::ErdosRenyi,
                          GraphFamily::TreeRegular, GraphFamily::CliqueCycle,
                          GraphFamily::Custom}) {
        if (family_name(f) == name) return f;
    }
    return std::nullopt;
}

Graph Graph::from_edges(std::uint32_t n,
                        const std::vector<std::pair<Vertex, Vertex>>& edges,
                        GraphFamily family) {
    if (n == 0) throw InvalidParameter("graph needs at least one vertex");

    std::vector<std::vector<Vertex>> adj(n);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n)
            throw InvalidParameter("edge endpoint out of range: " + std::to_string(a) +
                                   "-" + std::to_string(b));
        if (a == b)
            throw InvalidParameter("self-loop at vertex " + std::to_string(a));
        if (!seen.insert(edge_key(a, b)).second)
            throw InvalidParameter("duplicate edge " + std::to_string(a) + "-" +
                                   std::to_string(b));
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    if (!adjacency_connected(n, adj))
        throw InvalidParameter("graph is not connected");

    Graph g;
    g.n_ = n;
    g.family_ = family;
    g.offsets_.resize(n + 1, 0);
    g.adj_.reserve(edges.size() * 2);
    g.max_degree_ = 0;
    g.min_degree_ = n == 1 ? 0 : ~std::uint32_t{0};
    for (Vertex v = 0; v < n; ++v) {
        std::sort(adj[v].begin(), adj[v].end());
        g.offsets_[v + 1] = g.offsets_[v] + static_cast<std::uint32_t>(adj[v].size());
        g.adj_.insert(g.adj_.end(), adj[v].begin(), adj[v].end());
        const auto deg = static_cast<std::uint32_t>(adj[v].size());
        g.max_degree_ = std::max(g.max_degree_, deg);
        g.min_degree_ = std::min(g.min_degree_, deg);
    }
    if (n == 1) g.min_degree_ = 0;
    return g;
}

Graph build_cycle(std::uint32_t n) {
    if (n < 3) throw InvalidParameter("cycle needs n >= 3, got " + std::to_string(n));
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(n);
    for (Vertex v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
    return Graph::from_edges(n, edges, GraphFamily::Cycle);
}

Graph build_grid(std::uint32_t side, std::uint32_t dim) {
    if (side < 3) throw InvalidParameter("grid needs side >= 3, got " + std::to_string(side));
    if (dim < 1) throw InvalidParameter("grid needs dim >= 1");
    std::uint64_t n64 = 1;
    for (std::uint32_t k = 0; k < dim; ++k) {
        n64 *= side;
        if (n64 > (std::uint64_t{1} << 31))
            throw InvalidParameter("grid side^dim too large");
    }
    const auto n = static_cast<std::uint32_t>(n64);

    // stride of axis k in the row-major id; last axis has stride 1.
    std::vector<std::uint32_t> stride(dim, 1);
    for (std::uint32_t k = dim; k-- > 1;) stride[k - 1] = stride[k] * side;

    // Only +1 edges per axis; the -1 side arrives from the neighbor's +1.
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(static_cast<std::size_t>(n) * dim);
    for (Vertex v = 0; v < n; ++v) {
        for (std::uint32_t k = 0; k < dim; ++k) {
            const std::uint32_t c = (v / stride[k]) % side;
            const Vertex up = c + 1 == side ? v - c * stride[k] : v + stride[k];
            edges.emplace_back(v, up);
        }
    }
    Graph g = Graph::from_edges(n, edges, GraphFamily::Grid);
    g.grid_side_ = side;
    g.grid_dim_ = dim;
    return g;
}

Graph build_hypercube(std::uint32_t dim) {
    if (dim < 1 || dim > 30)
        throw InvalidParameter("hypercube needs 1 <= dim <= 30, got " + std::to_string(dim));
    const std::uint32_t n = 1u << dim;
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(static_cast<std::size_t>(n) * dim / 2);
    for (Vertex v = 0; v < n; ++v)
        for (std::uint32_t b = 0; b < dim; ++b)
            if (!(v & (1u << b))) edges.emplace_back(v, v | (1u << b));
    return Graph::from_edges(n, edges, GraphFamily::Hypercube);
}

Graph build_random_regular(std::uint32_t n, std::uint32_t d, std::uint64_t seed) {
    if (d < 3 || d >= n)
        throw InvalidParameter("random-regular needs 3 <= d < n");
    if ((static_cast<std::uint64_t>(n) * d) % 2 != 0)
        throw InvalidParameter("random-regular needs n*d even");

    const RandomSource root(seed);
    const std::uint64_t stub_count = static_cast<std::uint64_t>(n) * d;
    constexpr int kMaxAttempts = 10000;

    std::vector<std::uint32_t> stubs(stub_count);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const RandomSource rs = root.derive(StreamPurpose::GraphGen, attempt);
        KeyedStream shuffle(rs, StreamPurpose::GraphGen, 0, 0);
        for (std::uint64_t i = 0; i < stub_count; ++i) stubs[i] = static_cast<std::uint32_t>(i / d);
        // Fisher-Yates, then pair consecutive stubs: a uniform configuration.
        for (std::uint64_t i = stub_count - 1; i > 0; --i) {
            const std::uint64_t j = shuffle.next_below(i + 1);
            std::swap(stubs[i], stubs[j]);
        }

        bool simple = true;
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(stub_count);
        std::vector<std::pair<Vertex, Vertex>> edges;
        edges.reserve(stub_count / 2);
        for (std::uint64_t i = 0; i < stub_count; i += 2) {
            const Vertex a = stubs[i], b = stubs[i + 1];
            if (a == b || !seen.insert(edge_key(a, b)).second) {
                simple = false;
                break;
            }
            edges.emplace_back(a, b);
        }
        if (!simple) continue;

        std::vector<std::vector<Vertex>> adj(n);
        for (const auto& [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        if (!adjacency_connected(n, adj)) continue;

        return Graph::from_edges(n, edges, GraphFamily::RandomRegular);
    }
    throw GenerationFailed("no simple connected " + std::to_string(d) +
                           "-regular instance on " + std::to_string(n) + " vertices after " +
                           std::to_string(kMaxAttempts) + " attempts");
}

Graph build_erdos_renyi(std::uint32_t n, double p, std::uint64_t seed) {
    if (n < 2) throw InvalidParameter("erdos-renyi needs n >= 2");
    if (!(p > 0.0) || !(p < 1.0))
        throw InvalidParameter("erdos-renyi needs 0 < p < 1, got " + std::to_string(p));

    const RandomSource root(seed);
    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const RandomSource rs = root.derive(StreamPurpose::GraphGen, attempt);
        KeyedStream draws(rs, StreamPurpose::GraphGen, 0, 0);
        std::vector<std::pair<Vertex, Vertex>> edges;
        std::vector<std::vector<Vertex>> adj(n);
        for (Vertex u = 0; u < n; ++u) {
            for (Vertex v = u + 1; v < n; ++v) {
                // 53-bit uniform in [0,1).
                const double x = static_cast<double>(draws.next_word() >> 11) *
                                 (1.0 / 9007199254740992.0);
                if (x < p) {
                    edges.emplace_back(u, v);
                    adj[u].push_back(v);
                    adj[v].push_back(u);
                }
            }
        }
        if (!adjacency_connected(n, adj)) continue;
        return Graph::from_edges(n, edges, GraphFamily::ErdosRenyi);
    }
    throw GenerationFailed("no connected G(" + std::to_string(n) + ", p) draw in " +
                           std::to_string(kMaxAttempts) + " attempts; p too small?");
}

Graph build_clique_cycle(std::uint32_t n, std::uint32_t d) {
    if (d < 3) throw InvalidParameter("clique-cycle needs d >= 3");
    if (n % (d - 1) != 0)
        throw InvalidParameter("clique-cycle needs (d-1) | n; got n=" + std::to_string(n) +
                               ", d=" + std::to_string(d));
    const std::uint32_t cliques = n / (d - 1);
    if (cliques < 3)
        throw InvalidParameter("clique-cycle needs at least 3 cliques, got " +
                               std::to_string(cliques));
    const std::uint32_t s = d - 1; // clique size
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(static_cast<std::size_t>(n) * d / 2);
    for (std::uint32_t c = 0; c < cliques; ++c) {
        const Vertex base = c * s;
        for (std::uint32_t i = 0; i < s; ++i)
            for (std::uint32_t j = i + 1; j < s; ++j)
                edges.emplace_back(base + i, base + j);
        // position-preserving spokes to the next clique on the ring
        const Vertex next_base = ((c + 1) % cliques) * s;
        for (std::uint32_t i = 0; i < s; ++i)
            edges.emplace_back(base + i, next_base + i);
    }
    return Graph::from_edges(n, edges, GraphFamily::CliqueCycle);
}

TreeGraph build_regular_tree_graph(std::uint32_t d, std::uint32_t k) {
    if (d < 3) throw InvalidParameter("tree-regular needs d >= 3");
    if (k < 1) throw InvalidParameter("tree-regular needs depth k >= 1");

    // Level sizes: 1, d, d(d-1), ..., d(d-1)^(k-1).
    std::vector<std::uint64_t> level_size(k + 1);
    std::vector<std::uint64_t> level_base(k + 1);
    level_size[0] = 1;
    std::uint64_t n64 = 1;
    for (std::uint32_t i = 1; i <= k; ++i) {
        level_size[i] = i == 1 ? d : level_size[i - 1] * (d - 1);
        level_base[i] = n64;
        n64 += level_size[i];
        if (n64 > (std::uint64_t{1} << 31)) throw InvalidParameter("tree too large");
    }
    const auto n = static_cast<std::uint32_t>(n64);
    const std::uint64_t leaves = level_size[k];
    const std::uint64_t leaf_base = level_base[k];

    if ((d - 1) % 2 == 1 && leaves % 2 == 1)
        throw InvalidParameter("leaf circulant needs an even leaf count when d-1 is odd");

    std::vector<std::pair<Vertex, Vertex>> edges;
    // Tree part: vertex j of level i has children at level i+1, the root d of
    // them, everyone else d-1.
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::uint64_t fanout = i == 0 ? d : d - 1;
        for (std::uint64_t j = 0; j < level_size[i]; ++j) {
            const auto parent = static_cast<Vertex>(level_base[i] + j);
            for (std::uint64_t c = 0; c < fanout; ++c) {
                const auto child = static_cast<Vertex>(level_base[i + 1] + j * fanout + c);
                edges.emplace_back(parent, child);
            }
        }
    }
    // Circulant among leaves brings leaf degrees from 1 up to d.
    std::vector<std::uint64_t> offsets;
    for (std::uint64_t j = 1; j <= (d - 1) / 2; ++j) offsets.push_back(j);
    if ((d - 1) % 2 == 1) offsets.push_back(leaves / 2);
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t l = 0; l < leaves; ++l) {
        for (std::uint64_t off : offsets) {
            const auto a = static_cast<Vertex>(leaf_base + l);
            const auto b = static_cast<Vertex>(leaf_base + (l + off) % leaves);
            if (seen.insert(edge_key(a, b)).second) edges.emplace_back(a, b);
        }
    }

    Graph g = Graph::from_edges(n, edges, GraphFamily::TreeRegular);
    if (g.min_degree() != d || g.max_degree() != d)
        throw InvalidParameter("tree completion failed to be d-regular (internal)");
    return TreeGraph{std::move(g), 0};
}

// ---- queries ----

std::vector<std::uint32_t> distances_from(const Graph& g, Vertex s) {
    if (s >= g.num_vertices()) throw InvalidParameter("source vertex out of range");
    std::vector<std::uint32_t> dist(g.num_vertices(), ~std::uint32_t{0});
    std::vector<Vertex> queue{s};
    dist[s] = 0;
    std::size_t head = 0;
    while (head < queue.size()) {
        const Vertex u = queue[head++];
        for (Vertex w : g.neighbors(u)) {
            if (dist[w] == ~std::uint32_t{0}) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

VertexSet ball_of_radius(const Graph& g, Vertex v, std::uint32_t r) {
    if (v >= g.num_vertices()) throw InvalidParameter("ball center out of range");
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<Vertex> frontier{v};
    seen[v] = 1;
    VertexSet out{v};
    for (std::uint32_t depth = 0; depth < r && !frontier.empty(); ++depth) {
        std::vector<Vertex> next;
        for (Vertex u : frontier) {
            for (Vertex w : g.neighbors(u)) {
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                    out.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

VertexSet sphere(const Graph& g, Vertex v, std::uint32_t r) {
    if (v >= g.num_vertices()) throw InvalidParameter("sphere center out of range");
    if (r == 0) return {v};
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<Vertex> frontier{v};
    seen[v] = 1;
    for (std::uint32_t depth = 0; depth < r && !frontier.empty(); ++depth) {
        std::vector<Vertex> next;
        for (Vertex u : frontier) {
            for (Vertex w : g.neighbors(u)) {
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

VertexSet linf_ball(const Graph& g, Vertex u, std::uint32_t r) {
    if (g.family() != GraphFamily::Grid || !g.has_grid_geometry())
        throw WrongFamily("coordinate balls are only defined on grid graphs");
    if (u >= g.num_vertices()) throw InvalidParameter("ball center out of range");
    const std::uint32_t side = g.grid_side();
    const std::uint32_t dim = g.grid_dim();

    // Distinct coordinate values within torus distance r, per axis.
    std::vector<std::uint32_t> stride(dim, 1);
    for (std::uint32_t k = dim; k-- > 1;) stride[k - 1] = stride[k] * side;
    const std::uint32_t span = std::min<std::uint64_t>(2ull * r + 1, side);

    std::vector<std::vector<std::uint32_t>> axis_values(dim);
    for (std::uint32_t k = 0; k < dim; ++k) {
        const std::uint32_t c = (u / stride[k]) % side;
        for (std::uint32_t t = 0; t < span; ++t) {
            // offsets 0, +1, -1, +2, -2, ... truncated to span values
            const std::uint32_t mag = (t + 1) / 2;
            axis_values[k].push_back(t % 2 == 1 ? (c + mag) % side : (c + side - mag) % side);
        }
        // The interleaved walk can land on a value twice right where the two
        // arms meet (2r+1 = side with side even); dedupe to be safe.
        std::sort(axis_values[k].begin(), axis_values[k].end());
        axis_values[k].erase(std::unique(axis_values[k].begin(), axis_values[k].end()),
                             axis_values[k].end());
    }

    VertexSet out;
    std::vector<std::size_t> idx(dim, 0);
    for (;;) {
        std::uint32_t id = 0;
        for (std::uint32_t k = 0; k < dim; ++k) id += axis_values[k][idx[k]] * stride[k];
        out.push_back(id);
        std::uint32_t k = dim;
        while (k > 0) {
            --k;
            if (++idx[k] < axis_values[k].size()) break;
            idx[k] = 0;
            if (k == 0) {
                std::sort(out.begin(), out.end());
                return out;
            }
        }
    }
}

GrowthCheckResult check_exponential_growth(const Graph& g, double phi) {
    if (!(phi > 0.0)) throw InvalidParameter("growth rate phi must be positive");
    const std::uint32_t n = g.num_vertices();
    const double half = n / 2.0;
    std::vector<char> seen(n, 0);
    std::vector<Vertex> frontier, next;
    for (Vertex u = 0; u < n; ++u) {
        std::fill(seen.begin(), seen.end(), 0);
        frontier.assign(1, u);
        seen[u] = 1;
        std::uint64_t size = 1;
        for (std::uint32_t r = 0;; ++r) {
            const double required = std::min(std::exp(phi * r), half);
            if (static_cast<double>(size) + 1e-9 < required)
                return {false, u, r, size, required};
            if (static_cast<double>(size) >= half) break;
            next.clear();
            for (Vertex v : frontier)
                for (Vertex w : g.neighbors(v))
                    if (!seen[w]) {
                        seen[w] = 1;
                        next.push_back(w);
                    }
            if (next.empty()) {
                // Ball stopped growing below n/2: connected graphs cannot do
                // this, but guard against r looping forever.
                return {false, u, r + 1, size, std::min(std::exp(phi * (r + 1)), half)};
            }
            size += next.size();
            std::swap(frontier, next);
        }
    }
    return {true};
}

// ---- serialization ----

std::string to_edge_list(const Graph& g) {
    std::string out;
    out += std::to_string(g.num_vertices());
    out += ' ';
    out += std::to_string(g.num_edges());
    out += ' ';
    out += family_name(g.family());
    out += '\n';
    // CSR order with w > v is already lexicographic over (v, w).
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        for (Vertex w : g.neighbors(v)) {
            if (w > v) {
                out += std::to_string(v);
                out += ' ';
                out += std::to_string(w);
                out += '\n';
            }
        }
    }
    return out;
}

Graph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty edge list");
    std::istringstream hs(header);
    std::uint64_t n = 0, m = 0;
    std::string fam;
    if (!(hs >> n >> m >> fam))
        throw ParseError("bad header line, expected 'n m family': " + header);
    std::string extra;
    if (hs >> extra) throw ParseError("trailing tokens in header: " + header);
    const auto family = family_from_name(fam);
    if (!family) throw ParseError("unknown family tag '" + fam + "'");
    if (n == 0 || n > (std::uint64_t{1} << 31)) throw ParseError("vertex count out of range");

    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(m);
    std::string line;
    std::uint64_t lineno = 1;
    std::pair<Vertex, Vertex> prev{0, 0};
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && edges.size() == m) break; // tolerate one trailing newline
        std::istringstream ls(line);
        std::uint64_t a = 0, b = 0;
        if (!(ls >> a >> b) || (ls >> extra))
            throw ParseError("line " + std::to_string(lineno) + ": expected 'u v', got '" +
                             line + "'");
        if (a >= b)
            throw ParseError("line " + std::to_string(lineno) + ": edges must satisfy u < v");
        if (a >= n || b >= n)
            throw ParseError("line " + std::to_string(lineno) + ": endpoint out of range");
        const std::pair<Vertex, Vertex> e{static_cast<Vertex>(a), static_cast<Vertex>(b)};
        if (!edges.empty() && !(prev < e))
            throw ParseError("line " + std::to_string(lineno) + ": edges not sorted");
        edges.push_back(e);
        prev = e;
    }
    if (edges.size() != m)
        throw ParseError("edge count mismatch: header says " + std::to_string(m) + ", found " +
                         std::to_string(edges.size()));

    Graph g;
    try {
        g = Graph::from_edges(static_cast<std::uint32_t>(n), edges, *family);
    } catch (const InvalidParameter& e) {
        throw ParseError(std::string("invalid graph: ") + e.what());
    }

    // Grid files carry no explicit geometry; recover it from regularity.
    // A torus grid is 2*dim-regular with n = side^dim.
    if (*family == GraphFamily::Grid) {
        if (g.min_degree() != g.max_degree() || g.max_degree() % 2 != 0)
            throw ParseError("grid-tagged graph is not 2k-regular");
        const std::uint32_t dim = g.max_degree() / 2;
        const double side_f = std::pow(static_cast<double>(n), 1.0 / dim);
        const auto side = static_cast<std::uint32_t>(std::llround(side_f));
        std::uint64_t check = 1;
        for (std::uint32_t k = 0; k < dim; ++k) check *= side;
        if (side < 3 || check != n) throw ParseError("grid-tagged graph has no side^dim shape");
        g.grid_side_ = side;
        g.grid_dim_ = dim;
    }
    return g;
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const std::string text = to_edge_list(g);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + path.string());
}

Graph read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_edge_list(ss.str());
}

} // namespace lsalloc
