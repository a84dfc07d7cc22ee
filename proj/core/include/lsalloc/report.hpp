#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace lsalloc {

// Per-run summary statistics. For a completed run of m balls on n bins the
// histogram counts sum to n and sum(load * count) = m.
struct RunReport {
    std::uint64_t balls = 0;
    std::uint32_t max_load = 0;
    std::map<std::uint32_t, std::uint32_t> histogram; // load value -> #vertices
    std::uint32_t smoothness_max = 0;                 // max |x_u - x_v| over edges
    double mean_probes = 0.0;                         // load inspections per ball
    std::uint64_t max_probes = 0;
    std::vector<std::uint32_t> birth_counts;          // balls born at each vertex
    std::optional<double> potential;                  // exponential neighborhood potential
    double runtime_ms = 0.0;
};

} // namespace lsalloc
