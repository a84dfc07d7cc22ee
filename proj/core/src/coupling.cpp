#include "lsalloc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lsalloc {

namespace {

void validate_births(const Graph& g, const std::vector<Vertex>& births) {
    for (Vertex b : births)
        if (b >= g.num_vertices()) throw InvalidParameter("birthplace out of range");
}

// Signed per-vertex difference with an incrementally maintained L1 norm and
// count of negative entries. O(1) per load increment.
class DiffTracker {
public:
    explicit DiffTracker(std::uint32_t n) : diff_(n, 0) {}

    void first_gains(Vertex v) { // a[v] += 1
        l1_ += diff_[v] >= 0 ? 1 : -1;
        if (diff_[v] == -1) --negatives_;
        ++diff_[v];
    }
    void second_gains(Vertex v) { // b[v] += 1
        l1_ += diff_[v] <= 0 ? 1 : -1;
        if (diff_[v] == 0) ++negatives_;
        --diff_[v];
    }

    std::uint64_t l1() const { return static_cast<std::uint64_t>(l1_); }
    bool second_never_ahead() const { return negatives_ == 0; }

    VertexSet support() const {
        VertexSet s;
        for (Vertex v = 0; v < diff_.size(); ++v)
            if (diff_[v] != 0) s.push_back(v);
        return s;
    }

private:
    std::vector<std::int64_t> diff_;
    std::int64_t l1_ = 0;
    std::int64_t negatives_ = 0;
};

} // namespace

CoupledOutcome coupled_lipschitz(const Graph& g, const std::vector<Vertex>& births,
                                 std::uint64_t i, Vertex u_prime, const TieRule& tie,
                                 const RandomSource& rs) {
    if (tie.kind() == TieRuleKind::TowardTarget)
        throw UnsupportedTieRule("the perturbation coupling is not defined for target-seeking "
                                 "tie rules");
    if (i < 1 || i > births.size())
        throw InvalidParameter("perturbed ball index out of range");
    if (u_prime >= g.num_vertices()) throw InvalidParameter("replacement birthplace out of range");
    validate_births(g, births);

    const std::uint32_t n = g.num_vertices();
    CoupledOutcome out;
    out.loads_a = LoadVector(n);
    out.loads_b = LoadVector(n);
    out.per_step_ok.reserve(births.size());
    DiffTracker diff(n);

    for (std::uint64_t j = 1; j <= births.size(); ++j) {
        const Vertex ba = births[j - 1];
        const Vertex bb = j == i ? u_prime : ba;
        const BallTrace ta = allocate_ball(g, out.loads_a, j, ba, tie, rs, false);
        const BallTrace tb = allocate_ball(g, out.loads_b, j, bb, tie, rs, false);
        diff.first_gains(ta.final_vertex);
        diff.second_gains(tb.final_vertex);
        const bool ok = j < i ? diff.l1() == 0 : diff.l1() <= 2;
        out.per_step_ok.push_back(ok);
        out.all_steps_ok = out.all_steps_ok && ok;
    }
    out.l1_distance = diff.l1();
    out.diff_support = diff.support();
    return out;
}

CoupledOutcome coupled_removal(const Graph& g, const std::vector<Vertex>& births,
                               std::uint64_t i, const TieRule& tie, const RandomSource& rs) {
    if (tie.kind() == TieRuleKind::TowardTarget)
        throw UnsupportedTieRule("the removal coupling is not defined for target-seeking "
                                 "tie rules");
    if (i < 1 || i > births.size())
        throw InvalidParameter("removed ball index out of range");
    validate_births(g, births);

    const std::uint32_t n = g.num_vertices();
    CoupledOutcome out;
    out.loads_a = LoadVector(n);
    out.loads_b = LoadVector(n);
    out.per_step_ok.reserve(births.size());
    DiffTracker diff(n);

    for (std::uint64_t j = 1; j <= births.size(); ++j) {
        const BallTrace ta = allocate_ball(g, out.loads_a, j, births[j - 1], tie, rs, false);
        diff.first_gains(ta.final_vertex);
        if (j != i) {
            // Skipped ball; the survivors keep their original indices so
            // both processes read the same tie decisions.
            const BallTrace tb = allocate_ball(g, out.loads_b, j, births[j - 1], tie, rs, false);
            diff.second_gains(tb.final_vertex);
        }
        const bool ok = (j < i ? diff.l1() == 0 : diff.l1() == 1) && diff.second_never_ahead();
        out.per_step_ok.push_back(ok);
        out.all_steps_ok = out.all_steps_ok && ok;
    }
    out.l1_distance = diff.l1();
    out.diff_support = diff.support();
    return out;
}

MajorizationOutcome coupled_majorization(const Graph& g, std::uint64_t m,
                                         const RandomSource& rs) {
    const std::uint32_t n = g.num_vertices();
    const TieRule tie = TieRule::uniform_random();
    MajorizationOutcome out{{}, true, LoadVector(n), LoadVector(n)};
    out.per_step_ok.reserve(m);

    auto by_load_desc = [](const LoadVector& lv) {
        return [&lv](Vertex a, Vertex b) { return lv[a] != lv[b] ? lv[a] > lv[b] : a < b; };
    };
    // (load desc, id asc) orders; with all loads zero these start as the
    // identity, and each step's post-allocation sort doubles as the next
    // step's rank order.
    std::vector<Vertex> order_ls(n), order_oc(n);
    std::iota(order_ls.begin(), order_ls.end(), 0);
    std::iota(order_oc.begin(), order_oc.end(), 0);

    for (std::uint64_t k = 1; k <= m; ++k) {
        // One shared rank: both processes give the ball to their own rank-th
        // most loaded vertex. Local search walks from there, the baseline
        // stays put.
        const auto rank = static_cast<std::uint32_t>(
            rs.uniform_below(StreamPurpose::Rank, k, 0, n));
        allocate_ball(g, out.local_search, k, order_ls[rank], tie, rs, false);
        out.one_choice.add_ball(order_oc[rank]);

        // Descending prefix sums of the baseline must dominate local search.
        std::sort(order_ls.begin(), order_ls.end(), by_load_desc(out.local_search));
        std::sort(order_oc.begin(), order_oc.end(), by_load_desc(out.one_choice));
        std::uint64_t pls = 0, poc = 0;
        bool ok = true;
        for (std::uint32_t t = 0; t < n; ++t) {
            pls += out.local_search[order_ls[t]];
            poc += out.one_choice[order_oc[t]];
            if (poc < pls) {
                ok = false;
                break;
            }
        }
        out.per_step_ok.push_back(ok);
        out.all_ok = out.all_ok && ok;
    }
    return out;
}

SubadditivityResult subadditivity_experiment(const Graph& g, std::uint64_t z, std::uint32_t x,
                                             std::uint64_t trials, const RandomSource& rs) {
    const std::uint32_t n = g.num_vertices();
    if (z < 1 || z > n) throw InvalidParameter("batch size must lie in [1, n]");
    if (trials < 1) throw InvalidParameter("need at least one trial");

    const std::uint64_t pieces = (n + z - 1) / z;
    const std::uint64_t full_threshold = pieces * x;
    const TieRule tie = TieRule::uniform_random();

    std::uint64_t hits_full = 0, hits_batch = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const RandomSource rs_full = rs.derive(StreamPurpose::Trial, 2 * t);
        const RandomSource rs_batch = rs.derive(StreamPurpose::Trial, 2 * t + 1);
        if (run_local_search(g, n, tie, rs_full).loads.max_load() >= full_threshold) ++hits_full;
        if (run_local_search(g, z, tie, rs_batch).loads.max_load() >= x) ++hits_batch;
    }

    const double tf = static_cast<double>(trials);
    const double p_full = static_cast<double>(hits_full) / tf;
    const double p_batch = static_cast<double>(hits_batch) / tf;
    const double se_full = std::sqrt(p_full * (1.0 - p_full) / tf);
    const double se_batch = std::sqrt(p_batch * (1.0 - p_batch) / tf);
    const double bound = static_cast<double>(pieces) * p_batch;
    const double combined =
        std::sqrt(se_full * se_full +
                  static_cast<double>(pieces) * static_cast<double>(pieces) * se_batch * se_batch);
    const bool flagged = p_full > bound + 3.0 * combined;
    return SubadditivityResult{p_full, p_batch, se_full, se_batch,
                               pieces, bound,   combined, flagged};
}

} // namespace lsalloc
