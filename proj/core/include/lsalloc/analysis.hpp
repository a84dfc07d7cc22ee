#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lsalloc/graph.hpp"
#include "lsalloc/process.hpp"
#include "lsalloc/report.hpp"

namespace lsalloc {

// ---- run summaries ----

std::map<std::uint32_t, std::uint32_t> load_histogram(const LoadVector& lv);

// max |x_u - x_v| over the edges of g.
std::uint32_t smoothness_max_over_edges(const Graph& g, const LoadVector& lv);

// Assembles a RunReport from a finished load vector. Probe statistics and
// birth counts come from the traces when present (the run functions fill
// them directly and cheaper).
RunReport summarize(const Graph& g, const LoadVector& lv,
                    const std::optional<std::vector<BallTrace>>& traces = std::nullopt);

// True iff a majorizes b: equal totals and every descending prefix sum of a
// is at least b's. Throws InvalidInput when the totals differ.
bool check_majorizes(const LoadVector& a, const LoadVector& b);

// ---- certificates ----

enum class CertificateKind { LowerBound, UpperBound };

struct Certificate {
    CertificateKind kind;
    VertexSet subject;   // the set S (lower bound) or {v} (upper bound)
    std::uint32_t radius; // beta used for the lower bound, r for the upper
    double bound_value;   // implied lower bound on the max load / upper bound on x_v
    bool holds;
};

// Conservation certificate: balls born in S end within distance beta of S
// when beta is the maximum load (walks strictly descend, so their length is
// at most the final maximum). Hence beta * |B(S, beta)| >= (balls born in S)
// must hold; bound_value is the smallest beta' that satisfies the same
// inequality, a lower bound on the achievable maximum load.
Certificate lower_bound_certificate(const Graph& g,
                                    const std::vector<std::uint32_t>& birth_counts,
                                    const LoadVector& lv, const VertexSet& s);

// Averaging certificate for one vertex: x_v cannot exceed the mean load of
// its radius-r ball plus the mean distance-to-center taken over that ball,
// because loads drop by at least one per step away from a local arrangement.
// Requires r >= 1.
Certificate local_upper_bound(const Graph& g, const LoadVector& lv, Vertex v,
                              std::uint32_t r);

// ---- diagnostics ----

// sum_u exp(sigma * sum_{w in N(u)} x_w), computed via log-sum-exp. The
// default sigma is max(4 ln n / min_degree, 1); a graph with an isolated
// vertex (only the one-vertex graph qualifies) uses min_degree 1 in that
// formula. Nondecreasing as balls are added.
double exponential_potential(const Graph& g, const LoadVector& lv,
                             std::optional<double> sigma = std::nullopt);

// |{u in B(v, r) : x_u >= ell}|.
std::uint64_t tail_census(const Graph& g, const LoadVector& lv, Vertex v, std::uint32_t r,
                          std::uint32_t ell);

// Load level below which the tail bound is not evaluated; kept as a named
// constant because the regime boundary 8 e Delta^2 shows up in derived
// analyses even though the bound itself applies from 8 e Delta on.
double tail_threshold_ell0(std::uint32_t max_degree);

struct TailRow {
    std::uint32_t z;
    double fraction;             // |{v : x_v >= z}| / n
    std::optional<double> bound; // 2 (4 e Delta / z)^z, present once z >= 8 e Delta
    bool violates;
};

struct TailCheckResult {
    std::vector<TailRow> rows;
    bool any_violation;
    double threshold_z; // 8 e Delta: first z where the bound applies
};

// Compares the empirical tail of the load distribution to the exponential
// tail bound 2 (4 e Delta / z)^z, which holds for z >= 8 e Delta. A row is
// flagged only when the empirical fraction exceeds the bound by more than
// three binomial standard errors.
TailCheckResult empirical_tail_check(const Graph& g, const LoadVector& lv);

struct BirthCountViolation {
    Vertex center;
    std::uint32_t radius;
    std::uint64_t observed;
    double allowed;
};

struct BirthCountCheckResult {
    bool ok;
    std::vector<BirthCountViolation> violations;
    std::uint32_t r_min; // first radius checked
    std::uint32_t r_max; // last radius checked (side/2)
};

// Grid-only concentration event: for every vertex u and every radius r in
// [r_min, side/2], the balls born in the coordinate ball B~(u, r) number at
// most rho(r) = 4 e (dim+1) (ln n / ln ln n)^(1/(dim+1)) (3r)^dim. The
// default r_min is (4 dim)^dim (ln n / ln ln n)^(1/(dim+1)) rounded up;
// r_min_override widens the sweep downward for diagnostics. Requires a
// grid-family graph (WrongFamily otherwise) and n >= 16 so ln ln n > 0.
BirthCountCheckResult birth_count_event_check(const Graph& g,
                                              const std::vector<std::uint32_t>& birth_counts,
                                              std::optional<std::uint32_t> r_min_override =
                                                  std::nullopt);

// ---- scaling fits ----

struct ScalingModel {
    enum class Kind { Constant, LogLog, GridPower, OneChoice } kind;
    std::uint32_t dim = 0; // GridPower only

    static ScalingModel constant() { return {Kind::Constant, 0}; }
    static ScalingModel loglog() { return {Kind::LogLog, 0}; }
    static ScalingModel grid_power(std::uint32_t d) { return {Kind::GridPower, d}; }
    static ScalingModel one_choice() { return {Kind::OneChoice, 0}; }
};

struct ScalingPoint {
    std::uint64_t n;
    double value;
};

struct FitResult {
    double a;
    double b;
    double residual_rms;
};

// Least squares fit of value ~ a + b * f(n) where f depends on the model:
// Constant -> 0 (b pinned to 0), LogLog -> ln ln n,
// GridPower(d) -> (ln n / ln ln n)^(1/(d+1)), OneChoice -> ln n / ln ln n.
// Natural logarithms. Requires at least 3 points, every n >= 16; a
// degenerate design (all f(n) equal for a two-parameter model) throws
// FitFailed.
FitResult fit_scaling(const std::vector<ScalingPoint>& points, const ScalingModel& model);

} // namespace lsalloc
