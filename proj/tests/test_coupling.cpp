#include <doctest.h>

#include <vector>

#include "lsalloc/analysis.hpp"
#include "lsalloc/coupling.hpp"
#include "lsalloc/errors.hpp"
#include "lsalloc/graph.hpp"

using namespace lsalloc;

namespace {

Graph path_graph(std::uint32_t n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
    return Graph::from_edges(n, edges);
}

std::vector<Vertex> births_of(const Graph& g, std::uint64_t m, const RandomSource& rs) {
    std::vector<Vertex> out;
    out.reserve(m);
    for (std::uint64_t i = 1; i <= m; ++i)
        out.push_back(draw_birthplace(rs, i, g.num_vertices()));
    return out;
}

} // namespace

TEST_SUITE("coupling") {

TEST_CASE("perturbing a birthplace moves at most one ball's worth of load") {
    const Graph c3 = build_cycle(3);
    const RandomSource rs(1);

    // Single ball, birthplace swapped: one bin up, one bin down.
    const auto single = coupled_lipschitz(c3, {0}, 1, 1, TieRule::uniform_random(), rs);
    CHECK(single.l1_distance == 2);
    CHECK(single.all_steps_ok);
    CHECK(single.loads_a.total == 1);
    CHECK(single.loads_b.total == 1);

    // Same birthplace: the processes never separate.
    const auto same = coupled_lipschitz(c3, {0}, 1, 0, TieRule::uniform_random(), rs);
    CHECK(same.l1_distance == 0);
    CHECK(same.diff_support.empty());
    CHECK(same.all_steps_ok);
}

TEST_CASE("perturbation sweep stays within distance two") {
    const Graph rr = build_random_regular(256, 4, 6);
    const RandomSource rs(6);
    const TieRule tie = TieRule::uniform_random();
    const auto births = births_of(rr, 256, rs);

    // The unperturbed side of the coupling replays the plain run exactly.
    CHECK(coupled_lipschitz(rr, births, 1, births[0], tie, rs).loads_a ==
          run_local_search(rr, 256, tie, rs).loads);

    KeyedStream pick(rs, StreamPurpose::Trial, 0, 0);
    std::uint64_t max_l1 = 0;
    for (int t = 0; t < 500; ++t) {
        const std::uint64_t i = 1 + pick.next_below(256);
        const auto u_prime = static_cast<Vertex>(pick.next_below(256));
        const auto out = coupled_lipschitz(rr, births, i, u_prime, tie, rs);
        CHECK(out.all_steps_ok);
        CHECK((out.l1_distance == 0 || out.l1_distance == 2));
        max_l1 = std::max(max_l1, out.l1_distance);
    }
    CHECK(max_l1 == 2);
}

TEST_CASE("perturbation coupling bounds and errors") {
    const Graph c3 = build_cycle(3);
    const RandomSource rs(1);
    CHECK_THROWS_AS(coupled_lipschitz(c3, {0}, 2, 0, TieRule::uniform_random(), rs),
                    InvalidParameter);
    CHECK_THROWS_AS(coupled_lipschitz(c3, {0}, 1, 3, TieRule::uniform_random(), rs),
                    InvalidParameter);
    CHECK_THROWS_AS(coupled_lipschitz(c3, {0}, 1, 1, TieRule::toward_target(c3, 0), rs),
                    UnsupportedTieRule);
    CHECK_THROWS_AS(coupled_removal(c3, {0}, 1, TieRule::toward_target(c3, 0), rs),
                    UnsupportedTieRule);
}

TEST_CASE("removing a ball leaves the runs one apart") {
    const Graph c3 = build_cycle(3);
    const RandomSource rs(2);
    const auto only = coupled_removal(c3, {1}, 1, TieRule::uniform_random(), rs);
    CHECK(only.l1_distance == 1);
    CHECK(only.loads_b.total == 0);
    CHECK(only.all_steps_ok);

    // Figure-style prefix on the six-path.
    const Graph p6 = path_graph(6);
    const RandomSource rs6(17);
    const auto births6 = births_of(p6, 12, rs6);
    const auto mid = coupled_removal(p6, births6, 6, TieRule::lowest_id_first(p6), rs6);
    CHECK(mid.l1_distance == 1);
    CHECK(mid.all_steps_ok);
    CHECK(mid.loads_b.total == 11);

    // Exhaustive removal on a regular instance.
    const Graph rr = build_random_regular(256, 4, 6);
    const RandomSource rsr(8);
    const auto births = births_of(rr, 256, rsr);
    const TieRule tie = TieRule::uniform_random();
    for (std::uint64_t i = 1; i <= 256; ++i) {
        const auto out = coupled_removal(rr, births, i, tie, rsr);
        CHECK(out.l1_distance == 1);
        CHECK(out.all_steps_ok);
    }
}

TEST_CASE("one-choice majorizes local search along the rank coupling") {
    const Graph c8 = build_cycle(8);
    const auto empty = coupled_majorization(c8, 0, RandomSource(3));
    CHECK(empty.all_ok);
    CHECK(empty.per_step_ok.empty());
    CHECK(empty.local_search.total == 0);

    const auto one = coupled_majorization(c8, 1, RandomSource(3));
    CHECK(one.all_ok);
    CHECK(one.local_search.total == 1);
    CHECK(one.one_choice.total == 1);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto out = coupled_majorization(build_random_regular(512, 4, seed), 512,
                                              RandomSource(seed));
        CHECK(out.all_ok);
        CHECK(out.per_step_ok.size() == 512);
        CHECK(out.local_search.total == 512);
        CHECK(out.one_choice.total == 512);
        CHECK(check_majorizes(out.one_choice, out.local_search));
    }
}

TEST_CASE("batching inequality holds in distribution") {
    const Graph rr = build_random_regular(1024, 4, 9);
    const RandomSource rs(9);

    const auto out = subadditivity_experiment(rr, 256, 3, 200, rs);
    CHECK(out.pieces == 4);
    CHECK_FALSE(out.flagged);
    CHECK(out.bound == doctest::Approx(4.0 * out.p_batch));

    // z = n compares the process against itself; x = 0 is hit always.
    const auto self = subadditivity_experiment(rr, 1024, 0, 20, rs);
    CHECK(self.pieces == 1);
    CHECK(self.p_full == 1.0);
    CHECK(self.p_batch == 1.0);
    CHECK_FALSE(self.flagged);

    CHECK_THROWS_AS(subadditivity_experiment(rr, 0, 1, 1, rs), InvalidParameter);
    CHECK_THROWS_AS(subadditivity_experiment(rr, 2048, 1, 1, rs), InvalidParameter);
    CHECK_THROWS_AS(subadditivity_experiment(rr, 16, 1, 0, rs), InvalidParameter);
}

} // TEST_SUITE
