#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lsalloc/graph.hpp"
#include "lsalloc/report.hpp"
#include "lsalloc/rng.hpp"

namespace lsalloc {

// Bin loads plus a running total so the "total == sum of entries" invariant
// is cheap to maintain and assert.
struct LoadVector {
    std::vector<std::uint32_t> loads;
    std::uint64_t total = 0;

    explicit LoadVector(std::uint32_t n = 0) : loads(n, 0) {}

    std::uint32_t size() const { return static_cast<std::uint32_t>(loads.size()); }
    std::uint32_t operator[](Vertex v) const { return loads[v]; }

    void add_ball(Vertex v) {
        ++loads[v];
        ++total;
    }

    std::uint32_t max_load() const;

    bool operator==(const LoadVector&) const = default;
};

// One allocated ball: where it was born, the strictly-descending walk it
// took, where it ended up, and how many bin loads it inspected on the way.
// Ball indices are 1-based throughout; path[0] is the birthplace and
// path.back() == final_vertex. probes <= max_degree * (path length + 1).
struct BallTrace {
    std::uint64_t index = 0;
    Vertex birthplace = 0;
    std::vector<Vertex> path;
    Vertex final_vertex = 0;
    std::uint64_t probes = 0;
};

enum class TieRuleKind {
    UniformRandom,     // fresh uniform choice among tied neighbors per (ball, vertex)
    FixedPermutation,  // per-vertex preference order fixed before the run
    TowardTarget,      // tied neighbor closest to a target vertex wins
};

// Decides which of several equally-loaded best neighbors a ball moves to.
// UniformRandom is realized by giving every neighbor slot a keyed 64-bit
// priority and taking the minimum over the tied set. That is exactly "first
// element of the tied set in a uniform random permutation of N_u", so two
// coupled runs that share the key stream make consistent choices even when
// their tied sets differ, which the coupling checks in coupling.hpp rely on.
class TieRule {
public:
    static TieRule uniform_random();

    // perms[v] must be a permutation of the neighbor list of v.
    static TieRule fixed_permutation(const Graph& g, std::vector<std::vector<Vertex>> perms);

    // Convenience fixed permutation: lowest neighbor id first.
    static TieRule lowest_id_first(const Graph& g);

    // Tied neighbor nearest the target (BFS distance, precomputed here) wins;
    // remaining ties go to the smallest id.
    static TieRule toward_target(const Graph& g, Vertex target);

    TieRuleKind kind() const { return kind_; }
    Vertex target() const { return target_; }

    // Picks from the tied candidates of u. candidate_slots are positions in
    // u's CSR neighbor list (ascending), nonempty.
    Vertex pick(const Graph& g, Vertex u, std::span<const std::uint32_t> candidate_slots,
                std::uint64_t ball, const RandomSource& rs) const;

private:
    explicit TieRule(TieRuleKind kind) : kind_(kind) {}

    TieRuleKind kind_;
    Vertex target_ = 0;
    // FixedPermutation: rank_by_slot_[offset of u + slot] = preference rank.
    std::vector<std::uint32_t> rank_by_slot_;
    std::vector<std::uint32_t> slot_offsets_;
    // TowardTarget: BFS distances to the target.
    std::vector<std::uint32_t> target_dist_;
};

// Uniform birthplace of the given ball. Lookup by key, so every process
// variant sharing a seed sees the same birth sequence.
Vertex draw_birthplace(const RandomSource& rs, std::uint64_t ball, std::uint32_t n);

// True iff no neighbor of v carries a strictly smaller load.
bool is_local_minimum(const Graph& g, const LoadVector& lv, Vertex v);

// One step of local search from u: the minimum-load neighbor if that load is
// strictly below u's, nullopt when u is a local minimum.
std::optional<Vertex> local_search_step(const Graph& g, const LoadVector& lv, Vertex u,
                                        const TieRule& tie, const RandomSource& rs,
                                        std::uint64_t ball);

// Walks ball `ball` from `birth` to a local minimum and drops it there,
// updating lv. Probe accounting: every visited vertex whose load is positive
// charges its full degree (its neighborhood must be inspected); a vertex
// with load zero is a local minimum by definition and charges nothing.
// record_path controls whether the trace carries the full walk.
BallTrace allocate_ball(const Graph& g, LoadVector& lv, std::uint64_t ball, Vertex birth,
                        const TieRule& tie, const RandomSource& rs, bool record_path = true);

struct RunOptions {
    bool record_traces = false;
    // Re-verify the one-step smoothness bound on every edge incident to each
    // newly placed ball (exact, since only those edges change). Violations
    // are reported via RunResult rather than thrown.
    bool check_smoothness_each_ball = false;
    // Compute the exponential neighborhood potential into report.potential.
    bool compute_potential = false;
};

struct RunResult {
    LoadVector loads;
    RunReport report;
    std::optional<std::vector<BallTrace>> traces;
    bool smoothness_ok_each_ball = true; // meaningful when the check was enabled
    std::uint64_t first_smoothness_violation_ball = 0;
};

// The local search allocation process: m balls, each born uniformly at
// random, walking to strictly smaller loads until a local minimum.
RunResult run_local_search(const Graph& g, std::uint64_t m, const TieRule& tie,
                           const RandomSource& rs, const RunOptions& opts = {});

// Baseline: every ball stays where it is born. Shares the birthplace stream
// with run_local_search, so the two processes are coupled under equal seeds.
RunResult run_one_choice(const Graph& g, std::uint64_t m, const RandomSource& rs);

// Baseline: each ball draws d uniform candidate bins and joins the least
// loaded, ties to the lowest id. Only the vertex count of g matters. The
// first candidate uses the shared birthplace stream, so d = 1 reproduces
// run_one_choice exactly.
RunResult run_d_choice(const Graph& g, std::uint64_t m, std::uint32_t d,
                       const RandomSource& rs);

} // namespace lsalloc
