#include "lsalloc/process.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>

#include "lsalloc/analysis.hpp"

namespace lsalloc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

std::uint32_t LoadVector::max_load() const {
    std::uint32_t m = 0;
    for (std::uint32_t x : loads) m = std::max(m, x);
    return m;
}

TieRule TieRule::uniform_random() { return TieRule(TieRuleKind::UniformRandom); }

TieRule TieRule::fixed_permutation(const Graph& g, std::vector<std::vector<Vertex>> perms) {
    if (perms.size() != g.num_vertices())
        throw InvalidParameter("fixed_permutation needs one permutation per vertex");
    TieRule rule(TieRuleKind::FixedPermutation);
    rule.slot_offsets_.resize(g.num_vertices() + 1, 0);
    for (Vertex v = 0; v < g.num_vertices(); ++v)
        rule.slot_offsets_[v + 1] = rule.slot_offsets_[v] + g.degree(v);
    rule.rank_by_slot_.assign(rule.slot_offsets_.back(), 0);
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        const auto nbrs = g.neighbors(v);
        const auto& perm = perms[v];
        if (perm.size() != nbrs.size())
            throw InvalidParameter("permutation length mismatch at vertex " + std::to_string(v));
        std::vector<char> covered(nbrs.size(), 0);
        for (std::uint32_t rank = 0; rank < perm.size(); ++rank) {
            const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), perm[rank]);
            if (it == nbrs.end() || *it != perm[rank])
                throw InvalidParameter("permutation entry " + std::to_string(perm[rank]) +
                                       " is not a neighbor of " + std::to_string(v));
            const auto slot = static_cast<std::uint32_t>(it - nbrs.begin());
            if (covered[slot])
                throw InvalidParameter("permutation repeats neighbor " +
                                       std::to_string(perm[rank]));
            covered[slot] = 1;
            rule.rank_by_slot_[rule.slot_offsets_[v] + slot] = rank;
        }
    }
    return rule;
}

TieRule TieRule::lowest_id_first(const Graph& g) {
    std::vector<std::vector<Vertex>> perms(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        const auto nbrs = g.neighbors(v);
        perms[v].assign(nbrs.begin(), nbrs.end()); // CSR order is ascending already
    }
    return fixed_permutation(g, std::move(perms));
}

TieRule TieRule::toward_target(const Graph& g, Vertex target) {
    if (target >= g.num_vertices()) throw InvalidParameter("tie-rule target out of range");
    TieRule rule(TieRuleKind::TowardTarget);
    rule.target_ = target;
    rule.target_dist_ = distances_from(g, target);
    return rule;
}

Vertex TieRule::pick(const Graph& g, Vertex u, std::span<const std::uint32_t> candidate_slots,
                     std::uint64_t ball, const RandomSource& rs) const {
    const auto nbrs = g.neighbors(u);
    assert(!candidate_slots.empty());
    switch (kind_) {
    case TieRuleKind::UniformRandom: {
        // Keyed priority per neighbor slot; the minimum over any subset is a
        // uniform pick from that subset.
        std::uint64_t best_pri = 0;
        Vertex best = 0;
        bool first = true;
        for (std::uint32_t slot : candidate_slots) {
            const std::uint64_t pri = rs.word(StreamPurpose::TieBreak, ball, u, slot);
            if (first || pri < best_pri) {
                first = false;
                best_pri = pri;
                best = nbrs[slot];
            }
        }
        return best;
    }
    case TieRuleKind::FixedPermutation: {
        const std::uint32_t base = slot_offsets_[u];
        std::uint32_t best_rank = 0;
        Vertex best = 0;
        bool first = true;
        for (std::uint32_t slot : candidate_slots) {
            const std::uint32_t rank = rank_by_slot_[base + slot];
            if (first || rank < best_rank) {
                first = false;
                best_rank = rank;
                best = nbrs[slot];
            }
        }
        return best;
    }
    case TieRuleKind::TowardTarget: {
        Vertex best = nbrs[candidate_slots[0]];
        std::uint32_t best_dist = target_dist_[best];
        for (std::uint32_t slot : candidate_slots.subspan(1)) {
            const Vertex w = nbrs[slot];
            const std::uint32_t dw = target_dist_[w];
            // nearer to the target wins; equal distance goes to smaller id,
            // and CSR slots ascend by id so strict < keeps the first one.
            if (dw < best_dist) {
                best_dist = dw;
                best = w;
            }
        }
        return best;
    }
    }
    return nbrs[candidate_slots[0]]; // unreachable
}

Vertex draw_birthplace(const RandomSource& rs, std::uint64_t ball, std::uint32_t n) {
    return static_cast<Vertex>(rs.uniform_below(StreamPurpose::Birthplace, ball, 0, n));
}

bool is_local_minimum(const Graph& g, const LoadVector& lv, Vertex v) {
    const std::uint32_t mine = lv[v];
    for (Vertex w : g.neighbors(v))
        if (lv[w] < mine) return false;
    return true;
}

std::optional<Vertex> local_search_step(const Graph& g, const LoadVector& lv, Vertex u,
                                        const TieRule& tie, const RandomSource& rs,
                                        std::uint64_t ball) {
    const auto nbrs = g.neighbors(u);
    if (nbrs.empty()) return std::nullopt;
    std::uint32_t min_load = ~std::uint32_t{0};
    for (Vertex w : nbrs) min_load = std::min(min_load, lv[w]);
    if (min_load >= lv[u]) return std::nullopt;

    // Collect the tied slots only when there is more than one.
    std::uint32_t first_slot = 0, ties = 0;
    for (std::uint32_t slot = 0; slot < nbrs.size(); ++slot) {
        if (lv[nbrs[slot]] == min_load) {
            if (ties == 0) first_slot = slot;
            ++ties;
        }
    }
    if (ties == 1) return nbrs[first_slot];
    std::vector<std::uint32_t> slots;
    slots.reserve(ties);
    for (std::uint32_t slot = 0; slot < nbrs.size(); ++slot)
        if (lv[nbrs[slot]] == min_load) slots.push_back(slot);
    return tie.pick(g, u, slots, ball, rs);
}

BallTrace allocate_ball(const Graph& g, LoadVector& lv, std::uint64_t ball, Vertex birth,
                        const TieRule& tie, const RandomSource& rs, bool record_path) {
    BallTrace t;
    t.index = ball;
    t.birthplace = birth;
    Vertex cur = birth;
    if (record_path) t.path.push_back(cur);
    // Loads along the walk strictly decrease, so it terminates and never
    // revisits a vertex.
    while (lv[cur] > 0) {
        t.probes += g.degree(cur);
        const auto next = local_search_step(g, lv, cur, tie, rs, ball);
        if (!next) break;
        cur = *next;
        if (record_path) t.path.push_back(cur);
    }
    t.final_vertex = cur;
    lv.add_ball(cur);
    return t;
}

namespace {

// Only edges at the just-incremented vertex can newly violate smoothness.
bool smooth_around(const Graph& g, const LoadVector& lv, Vertex v) {
    const std::uint32_t mine = lv[v];
    for (Vertex w : g.neighbors(v)) {
        const std::uint32_t other = lv[w];
        if ((mine > other ? mine - other : other - mine) > 1) return false;
    }
    return true;
}

void finish_report(const Graph& g, const RunResult& res, RunReport& report,
                   bool compute_potential) {
    report.max_load = res.loads.max_load();
    report.histogram = load_histogram(res.loads);
    report.smoothness_max = smoothness_max_over_edges(g, res.loads);
    if (compute_potential) report.potential = exponential_potential(g, res.loads);
}

} // namespace

RunResult run_local_search(const Graph& g, std::uint64_t m, const TieRule& tie,
                           const RandomSource& rs, const RunOptions& opts) {
    const auto start = Clock::now();
    const std::uint32_t n = g.num_vertices();
    RunResult res{LoadVector(n)};
    res.report.balls = m;
    res.report.birth_counts.assign(n, 0);
    if (opts.record_traces) {
        res.traces.emplace();
        res.traces->reserve(m);
    }
#ifdef NDEBUG
    const bool per_ball_check = opts.check_smoothness_each_ball;
#else
    const bool per_ball_check = true;
#endif

    std::uint64_t probes_sum = 0;
    for (std::uint64_t i = 1; i <= m; ++i) {
        const Vertex birth = draw_birthplace(rs, i, n);
        ++res.report.birth_counts[birth];
        BallTrace t = allocate_ball(g, res.loads, i, birth, tie, rs, opts.record_traces);
        probes_sum += t.probes;
        res.report.max_probes = std::max(res.report.max_probes, t.probes);
        if (per_ball_check && !smooth_around(g, res.loads, t.final_vertex)) {
            assert(false && "local search broke the one-step smoothness bound");
            if (res.smoothness_ok_each_ball) {
                res.smoothness_ok_each_ball = false;
                res.first_smoothness_violation_ball = i;
            }
        }
        if (opts.record_traces) res.traces->push_back(std::move(t));
    }
    res.report.mean_probes = m == 0 ? 0.0 : static_cast<double>(probes_sum) / static_cast<double>(m);
    finish_report(g, res, res.report, opts.compute_potential);
    res.report.runtime_ms = ms_since(start);
    return res;
}

RunResult run_one_choice(const Graph& g, std::uint64_t m, const RandomSource& rs) {
    const auto start = Clock::now();
    const std::uint32_t n = g.num_vertices();
    RunResult res{LoadVector(n)};
    res.report.balls = m;
    res.report.birth_counts.assign(n, 0);
    for (std::uint64_t i = 1; i <= m; ++i) {
        const Vertex birth = draw_birthplace(rs, i, n);
        ++res.report.birth_counts[birth];
        res.loads.add_ball(birth);
    }
    finish_report(g, res, res.report, false);
    res.report.runtime_ms = ms_since(start);
    return res;
}

RunResult run_d_choice(const Graph& g, std::uint64_t m, std::uint32_t d,
                       const RandomSource& rs) {
    if (d < 1) throw InvalidParameter("d-choice needs d >= 1");
    const auto start = Clock::now();
    const std::uint32_t n = g.num_vertices();
    RunResult res{LoadVector(n)};
    res.report.balls = m;
    res.report.birth_counts.assign(n, 0);
    for (std::uint64_t i = 1; i <= m; ++i) {
        // Candidate j of ball i reuses the birthplace stream at sub-key j, so
        // d = 1 replays the one-choice process bit for bit.
        Vertex best = static_cast<Vertex>(rs.uniform_below(StreamPurpose::Birthplace, i, 0, n));
        ++res.report.birth_counts[best];
        for (std::uint32_t j = 1; j < d; ++j) {
            const auto c = static_cast<Vertex>(
                rs.uniform_below(StreamPurpose::Birthplace, i, j, n));
            if (res.loads[c] < res.loads[best] || (res.loads[c] == res.loads[best] && c < best))
                best = c;
        }
        res.loads.add_ball(best);
        if (d > 1) res.report.max_probes = std::max<std::uint64_t>(res.report.max_probes, d);
    }
    res.report.mean_probes = d > 1 ? static_cast<double>(d) : 0.0;
    finish_report(g, res, res.report, false);
    res.report.runtime_ms = ms_since(start);
    return res;
}

} // namespace lsalloc
