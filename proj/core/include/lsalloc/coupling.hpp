#pragma once

#include <cstdint>
#include <vector>

#include "lsalloc/graph.hpp"
#include "lsalloc/process.hpp"
#include "lsalloc/rng.hpp"

namespace lsalloc {

// Outcome of a two-process coupling. per_step_ok[j-1] records whether the
// invariant the coupling promises held right after ball j was placed in
// both processes; diff_support lists the vertices whose final loads differ.
struct CoupledOutcome {
    std::uint64_t l1_distance = 0;
    std::vector<bool> per_step_ok;
    bool all_steps_ok = true;
    VertexSet diff_support;
    LoadVector loads_a;
    LoadVector loads_b;
};

// Runs the process twice on the same decision stream, once with the given
// birthplaces and once with ball i (1-based) born at u_prime instead. Both
// runs break ties through keys of (ball, vertex), so they agree wherever
// their tied sets allow it; the resulting load vectors stay within L1
// distance 2 after every step (and by parity the final distance is 0 or 2).
// Tie rules that depend on a target are not covered by this coupling and
// throw UnsupportedTieRule.
CoupledOutcome coupled_lipschitz(const Graph& g, const std::vector<Vertex>& births,
                                 std::uint64_t i, Vertex u_prime, const TieRule& tie,
                                 const RandomSource& rs);

// Same decision-sharing, but the second process skips ball i entirely while
// later balls keep their original indices (hence their original decisions).
// The lighter process then trails the full one by exactly one ball: L1
// distance 1 after every step from i on, and never ahead anywhere.
CoupledOutcome coupled_removal(const Graph& g, const std::vector<Vertex>& births,
                               std::uint64_t i, const TieRule& tie, const RandomSource& rs);

struct MajorizationOutcome {
    std::vector<bool> per_step_ok;
    bool all_ok = true;
    LoadVector local_search;
    LoadVector one_choice;
};

// Rank coupling between local search and the one-choice baseline: each step
// draws one uniform rank and gives both processes a ball born at their own
// rank-th most loaded vertex (rank ties to the smaller id). After every step
// the one-choice loads majorize the local-search loads; per_step_ok records
// the prefix-sum comparison.
MajorizationOutcome coupled_majorization(const Graph& g, std::uint64_t m,
                                         const RandomSource& rs);

struct SubadditivityResult {
    double p_full;       // P[max load of an n-ball run >= pieces * x]
    double p_batch;      // P[max load of a z-ball run >= x]
    double se_full;
    double se_batch;
    std::uint64_t pieces; // ceil(n / z)
    double bound;         // pieces * p_batch
    double combined_se;   // se of (p_full - bound)
    bool flagged;         // p_full exceeds the bound by more than 3 SE
};

// Monte Carlo check of the batching inequality
//   P[max of n balls >= ceil(n/z) * x] <= ceil(n/z) * P[max of z balls >= x].
// Each trial runs the full process and an independent z-ball prefix from
// derived seeds. Statistical: flagged only beyond three combined standard
// errors. Requires 1 <= z <= n and trials >= 1; x = 0 makes both
// probabilities 1 and the bound trivially true.
SubadditivityResult subadditivity_experiment(const Graph& g, std::uint64_t z, std::uint32_t x,
                                             std::uint64_t trials, const RandomSource& rs);

} // namespace lsalloc
