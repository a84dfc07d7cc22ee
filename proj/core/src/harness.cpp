#include "lsalloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lsalloc/coupling.hpp"

namespace lsalloc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view process_name(ProcessKind p) {
    switch (p) {
    case ProcessKind::LocalSearch: return "local-search";
    case ProcessKind::OneChoice: return "one-choice";
    case ProcessKind::DChoice: return "d-choice";
    }
    return "local-search";
}

std::optional<ProcessKind> process_from_name(std::string_view name) {
    if (name == "local-search") return ProcessKind::LocalSearch;
    if (name == "one-choice") return ProcessKind::OneChoice;
    if (name == "d-choice") return ProcessKind::DChoice;
    return std::nullopt;
}

std::string_view tie_rule_name(TieRuleKind k) {
    switch (k) {
    case TieRuleKind::UniformRandom: return "uniform";
    case TieRuleKind::FixedPermutation: return "fixed-permutation";
    case TieRuleKind::TowardTarget: return "toward-target";
    }
    return "uniform";
}

std::optional<TieRuleKind> tie_rule_from_name(std::string_view name) {
    if (name == "uniform") return TieRuleKind::UniformRandom;
    if (name == "fixed-permutation") return TieRuleKind::FixedPermutation;
    if (name == "toward-target") return TieRuleKind::TowardTarget;
    return std::nullopt;
}

// ---- spec parsing ----

namespace {

const std::set<std::string> kKnownChecks = {"smoothness",    "lipschitz", "removal",
                                            "majorization",  "certificates", "tail",
                                            "potential"};
const std::set<std::string> kKnownFormats = {"csv", "json", "svg"};

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw ValidationError("unknown key '" + item.key() + "' in " + where);
    }
}

std::uint64_t get_uint(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw ValidationError(where + "." + key + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::uint64_t tree_size(std::uint64_t d, std::uint64_t k) {
    std::uint64_t n = 1, level = d;
    for (std::uint64_t i = 1; i <= k; ++i) {
        n += level;
        if (n > (std::uint64_t{1} << 31)) throw ValidationError("tree size overflows");
        if (i < k) level *= d - 1;
    }
    return n;
}

bool has_check(const ExperimentSpec& spec, std::string_view name) {
    return std::find(spec.checks.begin(), spec.checks.end(), name) != spec.checks.end();
}

} // namespace

ExperimentSpec parse_spec_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
        throw ParseError("spec JSON, line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("spec root must be a JSON object");
    check_keys(j,
               {"graph", "process", "choices", "tie_rule", "tie_target", "balls", "n_values",
                "seeds", "checks", "output"},
               "spec");

    ExperimentSpec s;
    if (!j.contains("graph") || !j.at("graph").is_object())
        throw ValidationError("spec.graph must be an object");
    const json& g = j.at("graph");
    check_keys(g, {"family", "d", "dim", "k", "p"}, "spec.graph");
    if (!g.contains("family")) throw ValidationError("spec.graph.family is required");
    const std::string fam = get_string(g, "family", "spec.graph");
    const auto family = family_from_name(fam);
    if (!family || *family == GraphFamily::Custom)
        throw ValidationError("spec.graph.family '" + fam + "' is not a buildable family");
    s.family = *family;
    if (g.contains("d")) s.degree = static_cast<std::uint32_t>(get_uint(g, "d", "spec.graph"));
    if (g.contains("dim")) s.dim = static_cast<std::uint32_t>(get_uint(g, "dim", "spec.graph"));
    if (g.contains("k")) s.depth = static_cast<std::uint32_t>(get_uint(g, "k", "spec.graph"));
    if (g.contains("p")) {
        if (!g.at("p").is_number()) throw ValidationError("spec.graph.p must be a number");
        s.edge_probability = g.at("p").get<double>();
    }

    if (j.contains("process")) {
        const auto p = process_from_name(get_string(j, "process", "spec"));
        if (!p) throw ValidationError("spec.process must be local-search, one-choice or d-choice");
        s.process = *p;
    }
    if (j.contains("choices"))
        s.choices = static_cast<std::uint32_t>(get_uint(j, "choices", "spec"));
    if (j.contains("tie_rule")) {
        const auto t = tie_rule_from_name(get_string(j, "tie_rule", "spec"));
        if (!t)
            throw ValidationError(
                "spec.tie_rule must be uniform, fixed-permutation or toward-target");
        s.tie_rule = *t;
    }
    if (j.contains("tie_target"))
        s.tie_target = static_cast<Vertex>(get_uint(j, "tie_target", "spec"));
    if (j.contains("balls")) {
        const auto& b = j.at("balls");
        if (b.is_string()) {
            if (b.get<std::string>() != "n")
                throw ValidationError("spec.balls must be a count or the string \"n\"");
        } else if (b.is_number_unsigned()) {
            s.balls = b.get<std::uint64_t>();
        } else {
            throw ValidationError("spec.balls must be a count or the string \"n\"");
        }
    }
    if (j.contains("n_values")) {
        const auto& nv = j.at("n_values");
        if (!nv.is_array()) throw ValidationError("spec.n_values must be an array");
        for (const auto& v : nv) {
            if (!v.is_number_unsigned())
                throw ValidationError("spec.n_values entries must be non-negative integers");
            s.n_values.push_back(v.get<std::uint64_t>());
        }
    }
    if (j.contains("seeds")) {
        const auto& sd = j.at("seeds");
        if (!sd.is_object()) throw ValidationError("spec.seeds must be an object");
        check_keys(sd, {"count", "base"}, "spec.seeds");
        if (sd.contains("count"))
            s.seeds.count = static_cast<std::uint32_t>(get_uint(sd, "count", "spec.seeds"));
        if (sd.contains("base")) s.seeds.base = get_uint(sd, "base", "spec.seeds");
    }
    if (j.contains("checks")) {
        const auto& c = j.at("checks");
        if (!c.is_array()) throw ValidationError("spec.checks must be an array");
        for (const auto& v : c) {
            if (!v.is_string()) throw ValidationError("spec.checks entries must be strings");
            s.checks.push_back(v.get<std::string>());
        }
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        if (!o.is_object()) throw ValidationError("spec.output must be an object");
        check_keys(o, {"dir", "formats"}, "spec.output");
        if (o.contains("dir")) s.output.dir = get_string(o, "dir", "spec.output");
        if (o.contains("formats")) {
            const auto& f = o.at("formats");
            if (!f.is_array()) throw ValidationError("spec.output.formats must be an array");
            s.output.formats.clear();
            for (const auto& v : f) {
                if (!v.is_string())
                    throw ValidationError("spec.output.formats entries must be strings");
                s.output.formats.push_back(v.get<std::string>());
            }
        }
    }
    return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open spec file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    ExperimentSpec s = parse_spec_json(ss.str());
    validate_spec(s);
    return s;
}

std::vector<std::uint64_t> effective_n_values(const ExperimentSpec& spec) {
    if (spec.family == GraphFamily::TreeRegular && spec.n_values.empty() && spec.degree >= 3 &&
        spec.depth >= 1)
        return {tree_size(spec.degree, spec.depth)};
    return spec.n_values;
}

void validate_spec(const ExperimentSpec& spec) {
    const auto ns = effective_n_values(spec);
    if (ns.empty()) throw ValidationError("n_values must not be empty");

    for (const std::uint64_t n : ns) {
        if (n < 1 || n > (std::uint64_t{1} << 31))
            throw ValidationError("n_values entry out of range: " + std::to_string(n));
        switch (spec.family) {
        case GraphFamily::Cycle:
            if (n < 3) throw ValidationError("cycle needs n >= 3, n_values has " +
                                             std::to_string(n));
            break;
        case GraphFamily::Grid: {
            if (spec.dim < 1) throw ValidationError("graph.dim is required for grid");
            const auto side = static_cast<std::uint64_t>(
                std::llround(std::pow(static_cast<double>(n), 1.0 / spec.dim)));
            std::uint64_t check = 1;
            for (std::uint32_t i = 0; i < spec.dim; ++i) check *= side;
            if (side < 3 || check != n)
                throw ValidationError("grid needs n = side^dim with side >= 3; n=" +
                                      std::to_string(n) + " dim=" + std::to_string(spec.dim));
            break;
        }
        case GraphFamily::Hypercube: {
            if (!std::has_single_bit(n) || n < 2 || n > (std::uint64_t{1} << 30))
                throw ValidationError("hypercube needs n a power of two in [2, 2^30]; got " +
                                      std::to_string(n));
            break;
        }
        case GraphFamily::RandomRegular:
            if (spec.degree < 3 || spec.degree >= n)
                throw ValidationError("random-regular needs 3 <= graph.d < n");
            if ((n * spec.degree) % 2 != 0)
                throw ValidationError("random-regular needs n*d even; n=" + std::to_string(n));
            break;
        case GraphFamily::ErdosRenyi:
            if (!spec.edge_probability)
                throw ValidationError("graph.p is required for erdos-renyi");
            if (!(*spec.edge_probability > 0.0) || !(*spec.edge_probability < 1.0))
                throw ValidationError("graph.p must satisfy 0 < p < 1");
            if (n < 2) throw ValidationError("erdos-renyi needs n >= 2");
            break;
        case GraphFamily::CliqueCycle:
            if (spec.degree < 3) throw ValidationError("clique-cycle needs graph.d >= 3");
            if (n % (spec.degree - 1) != 0 || n / (spec.degree - 1) < 3)
                throw ValidationError("clique-cycle needs (d-1) | n with at least 3 cliques; n=" +
                                      std::to_string(n));
            break;
        case GraphFamily::TreeRegular: {
            if (spec.degree < 3 || spec.depth < 1)
                throw ValidationError("tree-regular needs graph.d >= 3 and graph.k >= 1");
            const std::uint64_t derived = tree_size(spec.degree, spec.depth);
            if (n != derived)
                throw ValidationError("tree-regular with d=" + std::to_string(spec.degree) +
                                      ", k=" + std::to_string(spec.depth) + " has n=" +
                                      std::to_string(derived) + ", not " + std::to_string(n));
            break;
        }
        case GraphFamily::Custom:
            throw ValidationError("spec cannot request the custom family");
        }
    }

    if (spec.process == ProcessKind::DChoice && spec.choices < 1)
        throw ValidationError("d-choice needs choices >= 1");
    if (spec.tie_rule == TieRuleKind::TowardTarget) {
        const Vertex target = spec.tie_target.value_or(0);
        for (const std::uint64_t n : ns)
            if (target >= n)
                throw ValidationError("tie_target " + std::to_string(target) +
                                      " out of range for n=" + std::to_string(n));
    }
    if (spec.seeds.count < 1) throw ValidationError("seeds.count must be >= 1");
    for (const auto& c : spec.checks)
        if (!kKnownChecks.count(c)) throw ValidationError("unknown check '" + c + "'");
    for (const auto& f : spec.output.formats)
        if (!kKnownFormats.count(f)) throw ValidationError("unknown output format '" + f + "'");
}

Graph build_spec_graph(const ExperimentSpec& spec, std::uint64_t n, std::uint64_t seed) {
    const auto n32 = static_cast<std::uint32_t>(n);
    switch (spec.family) {
    case GraphFamily::Cycle: return build_cycle(n32);
    case GraphFamily::Grid: {
        const auto side = static_cast<std::uint32_t>(
            std::llround(std::pow(static_cast<double>(n), 1.0 / spec.dim)));
        return build_grid(side, spec.dim);
    }
    case GraphFamily::Hypercube:
        return build_hypercube(static_cast<std::uint32_t>(std::bit_width(n) - 1));
    case GraphFamily::RandomRegular: return build_random_regular(n32, spec.degree, seed);
    case GraphFamily::ErdosRenyi: return build_erdos_renyi(n32, *spec.edge_probability, seed);
    case GraphFamily::CliqueCycle: return build_clique_cycle(n32, spec.degree);
    case GraphFamily::TreeRegular:
        return build_regular_tree_graph(spec.degree, spec.depth).graph;
    case GraphFamily::Custom: break;
    }
    throw ValidationError("unbuildable family");
}

std::uint32_t nominal_degree(const ExperimentSpec& spec, std::uint64_t n) {
    switch (spec.family) {
    case GraphFamily::Cycle: return 2;
    case GraphFamily::Grid: return 2 * spec.dim;
    case GraphFamily::Hypercube: return static_cast<std::uint32_t>(std::bit_width(n) - 1);
    case GraphFamily::RandomRegular:
    case GraphFamily::CliqueCycle:
    case GraphFamily::TreeRegular: return spec.degree;
    case GraphFamily::ErdosRenyi:
    case GraphFamily::Custom: return 0;
    }
    return 0;
}

// ---- sweep ----

namespace {

TieRule make_tie_rule(const ExperimentSpec& spec, const Graph& g) {
    switch (spec.tie_rule) {
    case TieRuleKind::UniformRandom: return TieRule::uniform_random();
    case TieRuleKind::FixedPermutation: return TieRule::lowest_id_first(g);
    case TieRuleKind::TowardTarget:
        return TieRule::toward_target(g, spec.tie_target.value_or(0));
    }
    return TieRule::uniform_random();
}

// The heaviest-born clique of a clique-cycle graph, by construction the
// vertex blocks [c*(d-1), (c+1)*(d-1)).
VertexSet heaviest_clique(const ExperimentSpec& spec, std::uint64_t n,
                          const std::vector<std::uint32_t>& birth_counts) {
    const std::uint32_t s = spec.degree - 1;
    const auto cliques = static_cast<std::uint32_t>(n / s);
    std::uint64_t best_sum = 0;
    std::uint32_t best_c = 0;
    for (std::uint32_t c = 0; c < cliques; ++c) {
        std::uint64_t sum = 0;
        for (std::uint32_t j = 0; j < s; ++j) sum += birth_counts[c * s + j];
        if (sum > best_sum) {
            best_sum = sum;
            best_c = c;
        }
    }
    VertexSet out(s);
    for (std::uint32_t j = 0; j < s; ++j) out[j] = best_c * s + j;
    return out;
}

} // namespace

CellResult run_cell(const ExperimentSpec& spec, std::uint64_t n, std::uint64_t seed) {
    const Graph g = build_spec_graph(spec, n, seed);
    const RandomSource rs(seed);
    const std::uint64_t m = spec.balls.value_or(n);
    const bool want_potential = has_check(spec, "potential");
    const bool want_certs = has_check(spec, "certificates");

    RunResult run;
    switch (spec.process) {
    case ProcessKind::LocalSearch: {
        const TieRule tie = make_tie_rule(spec, g);
        RunOptions opts;
        opts.compute_potential = want_potential;
        run = run_local_search(g, m, tie, rs, opts);
        break;
    }
    case ProcessKind::OneChoice: run = run_one_choice(g, m, rs); break;
    case ProcessKind::DChoice: run = run_d_choice(g, m, spec.choices, rs); break;
    }
    if (want_potential && !run.report.potential)
        run.report.potential = exponential_potential(g, run.loads);

    SweepRow row;
    row.family = std::string(family_name(spec.family));
    row.n = n;
    row.d = nominal_degree(spec, n);
    row.process = std::string(process_name(spec.process));
    row.tie_rule = std::string(tie_rule_name(spec.tie_rule));
    row.seed = seed;
    row.balls = m;
    row.max_load = run.report.max_load;
    row.mean_probes = run.report.mean_probes;
    row.max_probes = run.report.max_probes;
    row.smoothness_max = run.report.smoothness_max;
    row.phi = run.report.potential;

    // Certificates describe the walk-bounded process; the baselines place
    // balls with no locality, so rows for them leave the columns empty.
    if (want_certs && spec.process == ProcessKind::LocalSearch) {
        VertexSet s;
        if (spec.family == GraphFamily::CliqueCycle) {
            s = heaviest_clique(spec, n, run.report.birth_counts);
        } else {
            const auto it = std::max_element(run.report.birth_counts.begin(),
                                             run.report.birth_counts.end());
            s = {static_cast<Vertex>(it - run.report.birth_counts.begin())};
        }
        row.cert_lower_ok =
            lower_bound_certificate(g, run.report.birth_counts, run.loads, s).holds;

        KeyedStream probes(rs, StreamPurpose::Trial, 0x63657274, 0);
        bool all_hold = true;
        for (int t = 0; t < 100; ++t) {
            const auto v = static_cast<Vertex>(probes.next_below(g.num_vertices()));
            const auto r = static_cast<std::uint32_t>(1 + probes.next_below(8));
            all_hold = all_hold && local_upper_bound(g, run.loads, v, r).holds;
        }
        row.cert_upper_ok = all_hold;
    }
    return CellResult{std::move(row), std::move(run.report)};
}

SweepResult run_sweep(const ExperimentSpec& spec, unsigned threads) {
    validate_spec(spec);
    const auto ns = effective_n_values(spec);
    const std::uint64_t cells = ns.size() * spec.seeds.count;

    SweepResult result;
    result.rows.resize(cells);

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= cells || failed.load()) return;
            try {
                const std::uint64_t n = ns[i / spec.seeds.count];
                const std::uint64_t seed = spec.seeds.base + i;
                result.rows[i] = run_cell(spec, n, seed).row;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error_message = e.what();
            }
        }
    };

    unsigned count = threads == 0 ? std::thread::hardware_concurrency() : threads;
    count = std::max(1u, std::min<unsigned>(count, static_cast<unsigned>(cells)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw Error("sweep cell failed: " + error_message);
    return result;
}

// ---- verify ----

namespace {

struct CellSuiteStats {
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts; // checks, failures

    void tally(const std::string& suite, bool ok) {
        auto& c = counts[suite];
        ++c.first;
        if (!ok) ++c.second;
    }
};

void verify_cell(const ExperimentSpec& spec, const std::vector<std::string>& suites,
                 std::uint64_t n, std::uint64_t seed, CellSuiteStats& stats) {
    const Graph g = build_spec_graph(spec, n, seed);
    const RandomSource rs(seed);
    const std::uint64_t m = spec.balls.value_or(n);
    const TieRule tie = make_tie_rule(spec, g);
    const auto enabled = [&](std::string_view s) {
        return std::find(suites.begin(), suites.end(), s) != suites.end();
    };

    RunOptions opts;
    opts.check_smoothness_each_ball = enabled("smoothness");
    const RunResult run = run_local_search(g, m, tie, rs, opts);

    if (enabled("smoothness")) {
        stats.tally("smoothness", run.smoothness_ok_each_ball);
        stats.tally("smoothness", run.report.smoothness_max <= 1);
    }

    std::vector<Vertex> births;
    if (enabled("lipschitz") || enabled("removal")) {
        births.reserve(m);
        for (std::uint64_t i = 1; i <= m; ++i)
            births.push_back(draw_birthplace(rs, i, g.num_vertices()));
    }

    if (enabled("lipschitz")) {
        KeyedStream pick(rs, StreamPurpose::Trial, 0x6c697073, 0);
        for (int t = 0; t < 10; ++t) {
            const std::uint64_t i = 1 + pick.next_below(m);
            const auto u = static_cast<Vertex>(pick.next_below(g.num_vertices()));
            const auto out = coupled_lipschitz(g, births, i, u, tie, rs);
            stats.tally("lipschitz",
                        out.all_steps_ok && (out.l1_distance == 0 || out.l1_distance == 2));
        }
    }
    if (enabled("removal")) {
        KeyedStream pick(rs, StreamPurpose::Trial, 0x72656d6f, 0);
        for (int t = 0; t < 10; ++t) {
            const std::uint64_t i = 1 + pick.next_below(m);
            const auto out = coupled_removal(g, births, i, tie, rs);
            stats.tally("removal", out.all_steps_ok && out.l1_distance == 1);
        }
    }
    if (enabled("majorization"))
        stats.tally("majorization", coupled_majorization(g, m, rs).all_ok);

    if (enabled("certificates")) {
        const auto it = std::max_element(run.report.birth_counts.begin(),
                                         run.report.birth_counts.end());
        const VertexSet s{static_cast<Vertex>(it - run.report.birth_counts.begin())};
        stats.tally("certificates",
                    lower_bound_certificate(g, run.report.birth_counts, run.loads, s).holds);
        KeyedStream probes(rs, StreamPurpose::Trial, 0x63657274, 0);
        for (int t = 0; t < 20; ++t) {
            const auto v = static_cast<Vertex>(probes.next_below(g.num_vertices()));
            const auto r = static_cast<std::uint32_t>(1 + probes.next_below(8));
            stats.tally("certificates", local_upper_bound(g, run.loads, v, r).holds);
        }
    }
    if (enabled("tail"))
        stats.tally("tail", !empirical_tail_check(g, run.loads).any_violation);
}

} // namespace

VerifyReport verify(const ExperimentSpec& spec, unsigned threads) {
    validate_spec(spec);

    std::vector<std::string> suites;
    if (spec.checks.empty()) {
        suites = {"smoothness", "majorization", "certificates", "tail"};
        if (spec.tie_rule != TieRuleKind::TowardTarget) {
            suites.push_back("lipschitz");
            suites.push_back("removal");
        }
    } else {
        for (const auto& c : spec.checks)
            if (c != "potential") suites.push_back(c);
        if (spec.tie_rule == TieRuleKind::TowardTarget &&
            (std::find(suites.begin(), suites.end(), "lipschitz") != suites.end() ||
             std::find(suites.begin(), suites.end(), "removal") != suites.end()))
            throw UnsupportedTieRule(
                "perturbation couplings are not defined under toward-target tie-breaking");
    }
    if (suites.empty()) throw ValidationError("no verification suites selected");

    const auto ns = effective_n_values(spec);
    const std::uint64_t cells = ns.size() * spec.seeds.count;
    std::vector<CellSuiteStats> per_cell(cells);

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= cells || failed.load()) return;
            try {
                verify_cell(spec, suites, ns[i / spec.seeds.count], spec.seeds.base + i,
                            per_cell[i]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error_message = e.what();
            }
        }
    };
    unsigned count = threads == 0 ? std::thread::hardware_concurrency() : threads;
    count = std::max(1u, std::min<unsigned>(count, static_cast<unsigned>(cells)));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw Error("verify cell failed: " + error_message);

    VerifyReport report;
    for (const auto& suite : suites) {
        SuiteOutcome outcome;
        outcome.name = suite;
        for (const auto& cell : per_cell) {
            const auto it = cell.counts.find(suite);
            if (it != cell.counts.end()) {
                outcome.checks += it->second.first;
                outcome.failures += it->second.second;
            }
        }
        report.ok = report.ok && outcome.failures == 0;
        report.suites.push_back(std::move(outcome));
    }
    return report;
}

// ---- output ----

namespace {

constexpr std::string_view kCsvHeader =
    "family,n,d,process,tie_rule,seed,balls,max_load,mean_probes,max_probes,"
    "smoothness_max,phi,cert_lower_ok,cert_upper_ok,runtime_ms";

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(std::string("bad ") + what + " value '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view s, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError(std::string("bad ") + what + " value '" + std::string(s) + "'");
    return v;
}

} // namespace

std::string to_csv(const SweepResult& result) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const SweepRow& r : result.rows) {
        out += r.family;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.d);
        out += ',';
        out += r.process;
        out += ',';
        out += r.tie_rule;
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += std::to_string(r.balls);
        out += ',';
        out += std::to_string(r.max_load);
        out += ',';
        out += format_double(r.mean_probes);
        out += ',';
        out += std::to_string(r.max_probes);
        out += ',';
        out += std::to_string(r.smoothness_max);
        out += ',';
        if (r.phi) out += format_double(*r.phi);
        out += ',';
        if (r.cert_lower_ok) out += *r.cert_lower_ok ? '1' : '0';
        out += ',';
        if (r.cert_upper_ok) out += *r.cert_upper_ok ? '1' : '0';
        out += ',';
        out += "0"; // runtime_ms: deterministic outputs carry no wall time
        out += '\n';
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ParseError("unexpected CSV header: '" + line + "'");
    std::vector<SweepRow> rows;
    std::uint64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                f.push_back(line.substr(start));
                break;
            }
            f.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (f.size() != 15)
            throw ParseError("line " + std::to_string(lineno) + ": expected 15 fields, got " +
                             std::to_string(f.size()));
        SweepRow r;
        r.family = f[0];
        r.n = parse_uint(f[1], "n");
        r.d = static_cast<std::uint32_t>(parse_uint(f[2], "d"));
        r.process = f[3];
        r.tie_rule = f[4];
        r.seed = parse_uint(f[5], "seed");
        r.balls = parse_uint(f[6], "balls");
        r.max_load = static_cast<std::uint32_t>(parse_uint(f[7], "max_load"));
        r.mean_probes = parse_double(f[8], "mean_probes");
        r.max_probes = parse_uint(f[9], "max_probes");
        r.smoothness_max = static_cast<std::uint32_t>(parse_uint(f[10], "smoothness_max"));
        if (!f[11].empty()) r.phi = parse_double(f[11], "phi");
        if (!f[12].empty()) r.cert_lower_ok = parse_uint(f[12], "cert_lower_ok") != 0;
        if (!f[13].empty()) r.cert_upper_ok = parse_uint(f[13], "cert_upper_ok") != 0;
        r.runtime_ms = parse_double(f[14], "runtime_ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string to_json(const SweepResult& result) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["rows"] = ordered_json::array();
    for (const SweepRow& r : result.rows) {
        ordered_json row;
        row["family"] = r.family;
        row["n"] = r.n;
        row["d"] = r.d;
        row["process"] = r.process;
        row["tie_rule"] = r.tie_rule;
        row["seed"] = r.seed;
        row["balls"] = r.balls;
        row["max_load"] = r.max_load;
        row["mean_probes"] = r.mean_probes;
        row["max_probes"] = r.max_probes;
        row["smoothness_max"] = r.smoothness_max;
        row["phi"] = r.phi ? ordered_json(*r.phi) : ordered_json(nullptr);
        row["cert_lower_ok"] = r.cert_lower_ok ? ordered_json(*r.cert_lower_ok)
                                               : ordered_json(nullptr);
        row["cert_upper_ok"] = r.cert_upper_ok ? ordered_json(*r.cert_upper_ok)
                                               : ordered_json(nullptr);
        row["runtime_ms"] = 0;
        doc["rows"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

std::string report_to_json(const SweepRow& row, const RunReport& report) {
    ordered_json doc;
    doc["family"] = row.family;
    doc["n"] = row.n;
    doc["d"] = row.d;
    doc["process"] = row.process;
    doc["tie_rule"] = row.tie_rule;
    doc["seed"] = row.seed;
    doc["balls"] = row.balls;
    doc["max_load"] = report.max_load;
    ordered_json hist;
    for (const auto& [load, count] : report.histogram) hist[std::to_string(load)] = count;
    doc["histogram"] = std::move(hist);
    doc["smoothness_max"] = report.smoothness_max;
    doc["mean_probes"] = report.mean_probes;
    doc["max_probes"] = report.max_probes;
    if (report.potential) doc["phi"] = *report.potential;
    if (row.cert_lower_ok) doc["cert_lower_ok"] = *row.cert_lower_ok;
    if (row.cert_upper_ok) doc["cert_upper_ok"] = *row.cert_upper_ok;
    doc["runtime_ms"] = report.runtime_ms;
    return doc.dump(2) + "\n";
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string to_svg(const std::vector<SweepRow>& rows) {
    constexpr double kW = 860, kH = 520;
    constexpr double kLeft = 70, kRight = 620, kTop = 40, kBottom = 460;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"520\" "
                      "viewBox=\"0 0 860 520\" font-family=\"monospace\" font-size=\"12\">\n";
    svg += "<rect width=\"" + fmt2(kW) + "\" height=\"" + fmt2(kH) + "\" fill=\"white\"/>\n";

    if (rows.empty()) {
        svg += "<text x=\"430\" y=\"260\" text-anchor=\"middle\">no data</text>\n</svg>\n";
        return svg;
    }

    // (process, tie_rule) -> n -> max loads
    std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, std::vector<double>>>
        series;
    for (const SweepRow& r : rows)
        series[{r.process, r.tie_rule}][r.n].push_back(static_cast<double>(r.max_load));

    std::vector<std::uint64_t> all_n;
    double y_max = 1.0;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<std::uint64_t, double>>>
        medians;
    for (const auto& [key, by_n] : series) {
        for (const auto& [n, vals] : by_n) {
            const double med = median_of(vals);
            medians[key].emplace_back(n, med);
            y_max = std::max(y_max, med);
            all_n.push_back(n);
        }
    }
    std::sort(all_n.begin(), all_n.end());
    all_n.erase(std::unique(all_n.begin(), all_n.end()), all_n.end());
    y_max = std::ceil(y_max) + 1.0;

    const double ln_min = std::log(static_cast<double>(all_n.front()));
    const double ln_max = std::log(static_cast<double>(all_n.back()));
    auto x_of = [&](std::uint64_t n) {
        if (ln_max <= ln_min) return (kLeft + kRight) / 2.0;
        return kLeft + (std::log(static_cast<double>(n)) - ln_min) / (ln_max - ln_min) *
                           (kRight - kLeft);
    };
    auto y_of = [&](double v) { return kBottom - v / y_max * (kBottom - kTop); };

    // axes
    svg += "<line x1=\"" + fmt2(kLeft) + "\" y1=\"" + fmt2(kBottom) + "\" x2=\"" + fmt2(kRight) +
           "\" y2=\"" + fmt2(kBottom) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt2(kLeft) + "\" y1=\"" + fmt2(kTop) + "\" x2=\"" + fmt2(kLeft) +
           "\" y2=\"" + fmt2(kBottom) + "\" stroke=\"black\"/>\n";
    for (std::uint64_t n : all_n) {
        const double x = x_of(n);
        svg += "<line x1=\"" + fmt2(x) + "\" y1=\"" + fmt2(kBottom) + "\" x2=\"" + fmt2(x) +
               "\" y2=\"" + fmt2(kBottom + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(kBottom + 20) +
               "\" text-anchor=\"middle\">" + std::to_string(n) + "</text>\n";
    }
    const auto y_step = std::max(1.0, std::ceil(y_max / 8.0));
    for (double v = 0.0; v <= y_max + 1e-9; v += y_step) {
        const double y = y_of(v);
        svg += "<line x1=\"" + fmt2(kLeft - 5) + "\" y1=\"" + fmt2(y) + "\" x2=\"" + fmt2(kLeft) +
               "\" y2=\"" + fmt2(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt2(kLeft - 10) + "\" y=\"" + fmt2(y + 4) +
               "\" text-anchor=\"end\">" + fmt2(v) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2((kLeft + kRight) / 2) + "\" y=\"" + fmt2(kBottom + 45) +
           "\" text-anchor=\"middle\">n (log scale)</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt2((kTop + kBottom) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           fmt2((kTop + kBottom) / 2) + ")\">median max load</text>\n";

    // one polyline per series, plus legend
    std::size_t idx = 0;
    for (const auto& [key, pts] : medians) {
        const char* color = kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        for (const auto& [n, med] : pts) {
            points += fmt2(x_of(n)) + "," + fmt2(y_of(med)) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        for (const auto& [n, med] : pts)
            svg += "<circle cx=\"" + fmt2(x_of(n)) + "\" cy=\"" + fmt2(y_of(med)) +
                   "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
        const double ly = kTop + 10 + 20 * static_cast<double>(idx);
        svg += "<rect x=\"640\" y=\"" + fmt2(ly - 9) + "\" width=\"12\" height=\"12\" fill=\"" +
               std::string(color) + "\"/>\n";
        svg += "<text x=\"658\" y=\"" + fmt2(ly + 2) + "\">" + key.first + " / " + key.second +
               "</text>\n";
        ++idx;
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> emit(const SweepResult& result,
                                        const std::filesystem::path& out_dir,
                                        const std::vector<std::string>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    auto write = [&](const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot open " + p.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + p.string());
    };

    std::vector<std::filesystem::path> written;
    for (const auto& f : formats) {
        if (f == "csv") {
            const auto p = out_dir / "sweep.csv";
            write(p, to_csv(result));
            written.push_back(p);
        } else if (f == "json") {
            const auto p = out_dir / "sweep.json";
            write(p, to_json(result));
            written.push_back(p);
        } else if (f == "svg") {
            const auto p = out_dir / "sweep.svg";
            write(p, to_svg(result.rows));
            written.push_back(p);
        } else {
            throw ValidationError("unknown output format '" + f + "'");
        }
    }
    return written;
}

} // namespace lsalloc
