// Command line front end: graph generation, single runs, parameter sweeps,
// invariant verification and CSV-to-SVG plotting.
//
// Exit codes: 0 success, 1 failed checks or runtime failure, 2 bad
// configuration or input, 3 I/O failure.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lsalloc/harness.hpp"

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw lsalloc::IoError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw lsalloc::IoError("cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw lsalloc::IoError("short write to " + path);
}

std::string read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lsalloc::IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const lsalloc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const lsalloc::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const lsalloc::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const lsalloc::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const lsalloc::UnsupportedTieRule& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const lsalloc::WrongFamily& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"local search allocation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lsalloc 1.0.0");

    // generate-graph
    auto* gen = app.add_subcommand("generate-graph", "build a graph and write its edge list");
    std::string gg_family;
    std::optional<std::uint64_t> gg_n;
    std::uint32_t gg_d = 0, gg_dim = 0, gg_k = 0;
    std::optional<double> gg_p;
    std::uint64_t gg_seed = 0;
    std::string gg_out = "-";
    gen->add_option("--family", gg_family,
                    "cycle, grid, hypercube, random-regular, erdos-renyi, clique-cycle, "
                    "tree-regular")
        ->required();
    gen->add_option("--n", gg_n, "vertex count (derived for tree-regular)");
    gen->add_option("--d", gg_d, "degree parameter");
    gen->add_option("--dim", gg_dim, "grid dimension");
    gen->add_option("--k", gg_k, "tree depth");
    gen->add_option("--p", gg_p, "edge probability");
    gen->add_option("--seed", gg_seed, "seed for randomized families");
    gen->add_option("--out", gg_out, "output file, - for stdout");

    // run
    auto* run = app.add_subcommand("run", "run one cell and print its report as JSON");
    std::string run_spec;
    std::optional<std::uint64_t> run_n;
    std::optional<std::uint64_t> run_seed;
    std::string run_out = "-";
    run->add_option("--spec", run_spec, "experiment spec (JSON)")->required();
    run->add_option("--n", run_n, "which n to run (required if the spec lists several)");
    run->add_option("--seed", run_seed, "cell seed (default: seeds.base)");
    run->add_option("--out", run_out, "output file, - for stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run the full (n, seed) grid and emit files");
    std::string sweep_spec;
    unsigned sweep_threads = 0;
    std::optional<std::string> sweep_out;
    std::vector<std::string> sweep_formats;
    sweep->add_option("--spec", sweep_spec, "experiment spec (JSON)")->required();
    sweep->add_option("--threads", sweep_threads, "worker threads (0 = hardware)");
    sweep->add_option("--out", sweep_out, "output directory (overrides spec)");
    sweep->add_option("--format", sweep_formats, "output formats (override spec): csv, json, svg");

    // verify
    auto* ver = app.add_subcommand("verify", "re-check process invariants on the spec's graphs");
    std::string ver_spec;
    unsigned ver_threads = 0;
    ver->add_option("--spec", ver_spec, "experiment spec (JSON)")->required();
    ver->add_option("--threads", ver_threads, "worker threads (0 = hardware)");

    // plot
    auto* plot = app.add_subcommand("plot", "render a sweep CSV as an SVG chart");
    std::string plot_csv;
    std::string plot_out = "-";
    plot->add_option("--csv", plot_csv, "sweep CSV file")->required();
    plot->add_option("--out", plot_out, "output file, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (gen->parsed()) {
        return guarded([&] {
            lsalloc::ExperimentSpec spec;
            const auto family = lsalloc::family_from_name(gg_family);
            if (!family || *family == lsalloc::GraphFamily::Custom)
                throw lsalloc::ValidationError("unknown family '" + gg_family + "'");
            spec.family = *family;
            spec.degree = gg_d;
            spec.dim = gg_dim;
            spec.depth = gg_k;
            spec.edge_probability = gg_p;
            if (gg_n) spec.n_values = {*gg_n};
            const auto ns = lsalloc::effective_n_values(spec);
            if (ns.empty()) throw lsalloc::ValidationError("--n is required for this family");
            spec.n_values = ns;
            lsalloc::validate_spec(spec);
            const auto g = lsalloc::build_spec_graph(spec, ns.front(), gg_seed);
            write_output(gg_out, lsalloc::to_edge_list(g));
            return 0;
        });
    }

    if (run->parsed()) {
        return guarded([&] {
            const auto spec = lsalloc::load_spec(run_spec);
            const auto ns = lsalloc::effective_n_values(spec);
            std::uint64_t n = ns.front();
            if (run_n) {
                if (std::find(ns.begin(), ns.end(), *run_n) == ns.end())
                    throw lsalloc::ValidationError("--n " + std::to_string(*run_n) +
                                                   " is not in the spec's n_values");
                n = *run_n;
            } else if (ns.size() > 1) {
                throw lsalloc::ValidationError("spec lists several n values; pass --n");
            }
            const auto cell = lsalloc::run_cell(spec, n, run_seed.value_or(spec.seeds.base));
            write_output(run_out, lsalloc::report_to_json(cell.row, cell.report));
            return 0;
        });
    }

    if (sweep->parsed()) {
        return guarded([&] {
            auto spec = lsalloc::load_spec(sweep_spec);
            if (sweep_out) spec.output.dir = *sweep_out;
            if (!sweep_formats.empty()) spec.output.formats = sweep_formats;
            const auto result = lsalloc::run_sweep(spec, sweep_threads);
            const auto written = lsalloc::emit(result, spec.output.dir, spec.output.formats);
            for (const auto& p : written) std::cout << p.string() << '\n';
            return 0;
        });
    }

    if (ver->parsed()) {
        return guarded([&] {
            const auto spec = lsalloc::load_spec(ver_spec);
            const auto report = lsalloc::verify(spec, ver_threads);
            for (const auto& s : report.suites)
                std::cout << s.name << ": checks=" << s.checks << " failures=" << s.failures
                          << (s.failures == 0 ? " ok" : " FAIL") << '\n';
            std::cout << (report.ok ? "verify: OK" : "verify: FAILED") << '\n';
            return report.ok ? 0 : 1;
        });
    }

    if (plot->parsed()) {
        return guarded([&] {
            const auto rows = lsalloc::parse_sweep_csv(read_input(plot_csv));
            write_output(plot_out, lsalloc::to_svg(rows));
            return 0;
        });
    }

    return 2;
}
