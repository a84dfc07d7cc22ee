#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsalloc/analysis.hpp"
#include "lsalloc/graph.hpp"
#include "lsalloc/process.hpp"

namespace lsalloc {

enum class ProcessKind { LocalSearch, OneChoice, DChoice };

std::string_view process_name(ProcessKind p);
std::optional<ProcessKind> process_from_name(std::string_view name);
std::string_view tie_rule_name(TieRuleKind k);
std::optional<TieRuleKind> tie_rule_from_name(std::string_view name);

struct SeedPlan {
    std::uint32_t count = 1;
    std::uint64_t base = 0;
};

struct OutputPlan {
    std::string dir = "out";
    std::vector<std::string> formats = {"csv"};
};

// One experiment description, loaded from JSON. Unknown keys anywhere in the
// document are rejected; every field is validated before anything runs.
//
//   {
//     "graph":    {"family": "random-regular", "d": 4},
//     "process":  "local-search",
//     "tie_rule": "uniform",
//     "balls":    "n",
//     "n_values": [1024, 4096],
//     "seeds":    {"count": 20, "base": 1},
//     "checks":   ["certificates", "potential"],
//     "output":   {"dir": "out", "formats": ["csv", "json", "svg"]}
//   }
//
// graph.d serves random-regular, clique-cycle and tree-regular; graph.dim is
// the grid dimension; graph.k the tree depth; graph.p the edge probability.
// For tree-regular the vertex count is determined by (d, k); n_values may be
// omitted and is filled with the derived size.
struct ExperimentSpec {
    GraphFamily family = GraphFamily::RandomRegular;
    std::uint32_t degree = 0;
    std::uint32_t dim = 0;
    std::uint32_t depth = 0;
    std::optional<double> edge_probability;
    std::vector<std::uint64_t> n_values;

    ProcessKind process = ProcessKind::LocalSearch;
    std::uint32_t choices = 2; // d-choice only
    TieRuleKind tie_rule = TieRuleKind::UniformRandom;
    std::optional<Vertex> tie_target; // toward-target; defaults to vertex 0 (the tree root)

    std::optional<std::uint64_t> balls; // nullopt: m = n
    SeedPlan seeds;
    std::vector<std::string> checks;
    OutputPlan output;
};

ExperimentSpec parse_spec_json(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

// Cross-field and per-n validation (family preconditions for every n, known
// check names, coherent process fields). Throws ValidationError; called by
// load_spec and run_sweep, public for tests.
void validate_spec(const ExperimentSpec& spec);

// n_values with the tree-regular derived size filled in.
std::vector<std::uint64_t> effective_n_values(const ExperimentSpec& spec);

// The graph for one sweep cell. Randomized families consume the cell seed;
// deterministic families ignore it.
Graph build_spec_graph(const ExperimentSpec& spec, std::uint64_t n, std::uint64_t seed);

// The family's nominal degree parameter as reported in output rows (0 where
// the family has none).
std::uint32_t nominal_degree(const ExperimentSpec& spec, std::uint64_t n);

// One output row per (n, seed) cell. runtime_ms is kept in the schema but
// always written as 0: emitted files are byte-deterministic functions of the
// spec, and wall time is not. Single runs report real timings instead.
struct SweepRow {
    std::string family;
    std::uint64_t n = 0;
    std::uint32_t d = 0;
    std::string process;
    std::string tie_rule;
    std::uint64_t seed = 0;
    std::uint64_t balls = 0;
    std::uint32_t max_load = 0;
    double mean_probes = 0.0;
    std::uint64_t max_probes = 0;
    std::uint32_t smoothness_max = 0;
    std::optional<double> phi;
    std::optional<bool> cert_lower_ok;
    std::optional<bool> cert_upper_ok;
    double runtime_ms = 0.0;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<SweepRow> rows; // cell-index order: n-major, then seed
};

// Cell index i covers n_values[i / seeds.count] with seed seeds.base + i.
// Appending n values therefore never changes existing cells. Cells run in
// parallel; results are identical at every thread count (0 = hardware).
SweepResult run_sweep(const ExperimentSpec& spec, unsigned threads = 0);

// Runs one cell and returns the full report (with real runtime) plus the
// sweep row derived from it.
struct CellResult {
    SweepRow row;
    RunReport report;
};
CellResult run_cell(const ExperimentSpec& spec, std::uint64_t n, std::uint64_t seed);

struct SuiteOutcome {
    std::string name;
    std::uint64_t checks = 0;
    std::uint64_t failures = 0;
};

struct VerifyReport {
    std::vector<SuiteOutcome> suites;
    bool ok = true;
};

// Re-derives the process invariants on the spec's graphs: per-ball
// smoothness, perturbation and removal couplings, majorization against the
// one-choice baseline, certificates, and the load tail. Runs the local
// search process regardless of spec.process (the suites are its invariants).
// Suite selection comes from spec.checks (empty = all applicable). Coupling
// suites under a toward-target tie rule throw UnsupportedTieRule.
VerifyReport verify(const ExperimentSpec& spec, unsigned threads = 0);

// ---- output formats ----

// Fixed column order:
// family,n,d,process,tie_rule,seed,balls,max_load,mean_probes,max_probes,
// smoothness_max,phi,cert_lower_ok,cert_upper_ok,runtime_ms
// Numbers are shortest-round-trip; optional fields empty; bools 1/0.
std::string to_csv(const SweepResult& result);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

std::string to_json(const SweepResult& result); // {"schema_version":1,"rows":[...]}

// Hand-emitted SVG: median max load vs n, log-scaled n axis, one polyline
// per (process, tie_rule) series.
std::string to_svg(const std::vector<SweepRow>& rows);

// Single-run report as pretty JSON (used by the CLI's run subcommand).
std::string report_to_json(const SweepRow& row, const RunReport& report);

// Writes the requested formats (csv, json, svg) into out_dir, creating it if
// needed. Returns the written paths.
std::vector<std::filesystem::path> emit(const SweepResult& result,
                                        const std::filesystem::path& out_dir,
                                        const std::vector<std::string>& formats);

} // namespace lsalloc
