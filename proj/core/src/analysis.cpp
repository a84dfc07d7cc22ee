#include "lsalloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lsalloc {

std::map<std::uint32_t, std::uint32_t> load_histogram(const LoadVector& lv) {
    std::map<std::uint32_t, std::uint32_t> h;
    for (std::uint32_t x : lv.loads) ++h[x];
    return h;
}

std::uint32_t smoothness_max_over_edges(const Graph& g, const LoadVector& lv) {
    std::uint32_t worst = 0;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        const std::uint32_t mine = lv[v];
        for (Vertex w : g.neighbors(v)) {
            if (w < v) continue; // each edge once
            const std::uint32_t other = lv[w];
            worst = std::max(worst, mine > other ? mine - other : other - mine);
        }
    }
    return worst;
}

RunReport summarize(const Graph& g, const LoadVector& lv,
                    const std::optional<std::vector<BallTrace>>& traces) {
    RunReport report;
    report.balls = lv.total;
    report.max_load = lv.max_load();
    report.histogram = load_histogram(lv);
    report.smoothness_max = smoothness_max_over_edges(g, lv);
    if (traces) {
        std::uint64_t sum = 0;
        report.birth_counts.assign(g.num_vertices(), 0);
        for (const BallTrace& t : *traces) {
            sum += t.probes;
            report.max_probes = std::max(report.max_probes, t.probes);
            ++report.birth_counts[t.birthplace];
        }
        report.mean_probes =
            traces->empty() ? 0.0 : static_cast<double>(sum) / static_cast<double>(traces->size());
    }
    return report;
}

bool check_majorizes(const LoadVector& a, const LoadVector& b) {
    if (a.total != b.total)
        throw InvalidInput("majorization is only defined between equal totals: " +
                           std::to_string(a.total) + " vs " + std::to_string(b.total));
    std::vector<std::uint32_t> sa = a.loads, sb = b.loads;
    std::sort(sa.begin(), sa.end(), std::greater<>());
    std::sort(sb.begin(), sb.end(), std::greater<>());
    // Vectors may have different lengths; missing entries are zeros, which
    // never break dominance once totals match.
    std::uint64_t pa = 0, pb = 0;
    const std::size_t k = std::max(sa.size(), sb.size());
    for (std::size_t i = 0; i < k; ++i) {
        if (i < sa.size()) pa += sa[i];
        if (i < sb.size()) pb += sb[i];
        if (pa < pb) return false;
    }
    return true;
}

Certificate lower_bound_certificate(const Graph& g,
                                    const std::vector<std::uint32_t>& birth_counts,
                                    const LoadVector& lv, const VertexSet& s) {
    if (birth_counts.size() != g.num_vertices() || lv.size() != g.num_vertices())
        throw InvalidInput("birth counts / loads sized unlike the graph");
    if (s.empty()) throw InvalidInput("certificate set must be nonempty");
    for (Vertex v : s)
        if (v >= g.num_vertices()) throw InvalidInput("certificate set vertex out of range");

    std::uint64_t phi_s = 0;
    for (Vertex v : s) phi_s += birth_counts[v];
    const std::uint32_t beta = lv.max_load();

    // Grow B(S, r) one BFS level at a time; sizes[r] = |B(S, r)|.
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<Vertex> frontier;
    for (Vertex v : s)
        if (!seen[v]) {
            seen[v] = 1;
            frontier.push_back(v);
        }
    std::vector<std::uint64_t> sizes{frontier.size()};
    auto grow = [&](std::uint32_t upto) {
        while (sizes.size() <= upto && !frontier.empty()) {
            std::vector<Vertex> next;
            for (Vertex u : frontier)
                for (Vertex w : g.neighbors(u))
                    if (!seen[w]) {
                        seen[w] = 1;
                        next.push_back(w);
                    }
            sizes.push_back(sizes.back() + next.size());
            frontier = std::move(next);
        }
        // Saturated: every further radius holds the whole graph.
        while (sizes.size() <= upto) sizes.push_back(sizes.back());
    };

    grow(beta);
    const bool holds = static_cast<std::uint64_t>(beta) * sizes[beta] >= phi_s;

    std::uint32_t implied = 0;
    if (phi_s > 0) {
        for (std::uint32_t b = 1;; ++b) {
            grow(b);
            if (static_cast<std::uint64_t>(b) * sizes[std::min<std::size_t>(b, sizes.size() - 1)] >=
                phi_s) {
                implied = b;
                break;
            }
        }
    }
    return Certificate{CertificateKind::LowerBound, s, beta, static_cast<double>(implied), holds};
}

Certificate local_upper_bound(const Graph& g, const LoadVector& lv, Vertex v, std::uint32_t r) {
    if (r < 1) throw InvalidParameter("local upper bound needs r >= 1");
    if (v >= g.num_vertices()) throw InvalidParameter("vertex out of range");
    if (lv.size() != g.num_vertices()) throw InvalidInput("loads sized unlike the graph");

    // One BFS collecting per-level sizes and the total load in the ball.
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<Vertex> frontier{v};
    seen[v] = 1;
    std::uint64_t ball_size = 1, load_sum = lv[v];
    double weighted_levels = 0.0; // sum over i of i * |sphere(v, i)|
    for (std::uint32_t depth = 1; depth <= r && !frontier.empty(); ++depth) {
        std::vector<Vertex> next;
        for (Vertex u : frontier)
            for (Vertex w : g.neighbors(u))
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                    load_sum += lv[w];
                }
        ball_size += next.size();
        weighted_levels += static_cast<double>(depth) * static_cast<double>(next.size());
        frontier = std::move(next);
    }

    const double psi = static_cast<double>(load_sum) / static_cast<double>(ball_size);
    const double bound = psi + weighted_levels / static_cast<double>(ball_size);
    const bool holds = static_cast<double>(lv[v]) <= bound + 1e-9;
    return Certificate{CertificateKind::UpperBound, {v}, r, bound, holds};
}

double exponential_potential(const Graph& g, const LoadVector& lv,
                             std::optional<double> sigma) {
    if (lv.size() != g.num_vertices()) throw InvalidInput("loads sized unlike the graph");
    const std::uint32_t n = g.num_vertices();
    const double delta = std::max<std::uint32_t>(g.min_degree(), 1);
    const double s = sigma.value_or(std::max(4.0 * std::log(static_cast<double>(n)) / delta, 1.0));

    double max_e = 0.0; // exponents are >= 0 since loads are
    std::vector<double> exps(n);
    for (Vertex u = 0; u < n; ++u) {
        std::uint64_t around = 0;
        for (Vertex w : g.neighbors(u)) around += lv[w];
        exps[u] = s * static_cast<double>(around);
        max_e = std::max(max_e, exps[u]);
    }
    double acc = 0.0;
    for (double e : exps) acc += std::exp(e - max_e);
    return std::exp(max_e + std::log(acc));
}

std::uint64_t tail_census(const Graph& g, const LoadVector& lv, Vertex v, std::uint32_t r,
                          std::uint32_t ell) {
    if (lv.size() != g.num_vertices()) throw InvalidInput("loads sized unlike the graph");
    std::uint64_t count = 0;
    for (Vertex u : ball_of_radius(g, v, r))
        if (lv[u] >= ell) ++count;
    return count;
}

double tail_threshold_ell0(std::uint32_t max_degree) {
    // Start of the deep-tail regime, 8 e Delta^2. Recorded for reference;
    // empirical_tail_check applies its bound from 8 e Delta on.
    return 8.0 * std::exp(1.0) * static_cast<double>(max_degree) *
           static_cast<double>(max_degree);
}

TailCheckResult empirical_tail_check(const Graph& g, const LoadVector& lv) {
    if (lv.size() != g.num_vertices()) throw InvalidInput("loads sized unlike the graph");
    const double n = g.num_vertices();
    const double delta_max = g.max_degree();
    const double z_start = 8.0 * std::exp(1.0) * delta_max;

    TailCheckResult result{{}, false, z_start};
    const std::uint32_t top = lv.max_load();
    // Tail counts by one descending sweep over the histogram.
    std::vector<std::uint64_t> at_least(top + 2, 0);
    for (std::uint32_t x : lv.loads)
        if (x > 0) ++at_least[x];
    for (std::uint32_t z = top; z >= 1; --z) at_least[z] += at_least[z + 1];

    for (std::uint32_t z = 1; z <= top; ++z) {
        TailRow row{z, static_cast<double>(at_least[z]) / n, std::nullopt, false};
        if (static_cast<double>(z) >= z_start) {
            const double bound = 2.0 * std::pow(4.0 * std::exp(1.0) * delta_max / z, z);
            const double se = std::sqrt(std::max(bound * (1.0 - bound), 0.0) / n);
            row.bound = bound;
            row.violates = row.fraction > bound + 3.0 * se;
        }
        if (row.violates) result.any_violation = true;
        result.rows.push_back(row);
    }
    return result;
}

BirthCountCheckResult birth_count_event_check(const Graph& g,
                                              const std::vector<std::uint32_t>& birth_counts,
                                              std::optional<std::uint32_t> r_min_override) {
    if (g.family() != GraphFamily::Grid || !g.has_grid_geometry())
        throw WrongFamily("birth-count event is defined on grid graphs");
    if (birth_counts.size() != g.num_vertices())
        throw InvalidInput("birth counts sized unlike the graph");
    const std::uint32_t n = g.num_vertices();
    if (n < 16) throw InvalidParameter("birth-count event needs n >= 16");

    const std::uint32_t dim = g.grid_dim();
    const double lratio =
        std::log(static_cast<double>(n)) / std::log(std::log(static_cast<double>(n)));
    const double scale = std::pow(lratio, 1.0 / (dim + 1));

    std::uint32_t r_min;
    if (r_min_override) {
        r_min = std::max<std::uint32_t>(*r_min_override, 1);
    } else {
        r_min = static_cast<std::uint32_t>(
            std::ceil(std::pow(4.0 * dim, static_cast<double>(dim)) * scale));
        r_min = std::max<std::uint32_t>(r_min, 1);
    }
    const std::uint32_t r_max = g.grid_side() / 2;

    BirthCountCheckResult result{true, {}, r_min, r_max};
    for (std::uint32_t r = r_min; r <= r_max; ++r) {
        const double rho = 4.0 * std::exp(1.0) * (dim + 1) * scale *
                           std::pow(3.0 * static_cast<double>(r), static_cast<double>(dim));
        for (Vertex u = 0; u < n; ++u) {
            std::uint64_t born = 0;
            for (Vertex w : linf_ball(g, u, r)) born += birth_counts[w];
            if (static_cast<double>(born) > rho) {
                result.ok = false;
                result.violations.push_back({u, r, born, rho});
            }
        }
    }
    return result;
}

FitResult fit_scaling(const std::vector<ScalingPoint>& points, const ScalingModel& model) {
    if (points.size() < 3)
        throw InvalidParameter("scaling fit needs at least 3 points");
    for (const auto& p : points)
        if (p.n < 16) throw InvalidParameter("scaling fit needs every n >= 16");

    auto f = [&](std::uint64_t n) -> double {
        const double ln = std::log(static_cast<double>(n));
        const double lln = std::log(ln);
        switch (model.kind) {
        case ScalingModel::Kind::Constant: return 0.0;
        case ScalingModel::Kind::LogLog: return lln;
        case ScalingModel::Kind::GridPower: return std::pow(ln / lln, 1.0 / (model.dim + 1));
        case ScalingModel::Kind::OneChoice: return ln / lln;
        }
        return 0.0;
    };

    const auto k = static_cast<double>(points.size());
    double a = 0.0, b = 0.0;
    if (model.kind == ScalingModel::Kind::Constant) {
        for (const auto& p : points) a += p.value;
        a /= k;
    } else {
        // Normal equations for value = a + b * f(n).
        double sf = 0.0, sff = 0.0, sy = 0.0, sfy = 0.0;
        for (const auto& p : points) {
            const double x = f(p.n);
            sf += x;
            sff += x * x;
            sy += p.value;
            sfy += x * p.value;
        }
        const double det = k * sff - sf * sf;
        const double scale = std::max(k * sff, 1.0);
        if (std::abs(det) < 1e-12 * scale)
            throw FitFailed("design matrix is degenerate (all f(n) equal?)");
        b = (k * sfy - sf * sy) / det;
        a = (sy - b * sf) / k;
    }

    double ss = 0.0;
    for (const auto& p : points) {
        const double r = p.value - (a + b * f(p.n));
        ss += r * r;
    }
    return FitResult{a, b, std::sqrt(ss / k)};
}

} // namespace lsalloc
