#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cvrp/qubo.hpp"

namespace cvrp {

struct SamplerConfig {
    int num_reads = 200;
    int sweeps_per_read = 2000;
    // When unset, the schedule is derived from the model:
    // beta_min = 1/dE_max, beta_max = 1/dE_min (single-flip magnitude bounds).
    std::optional<double> beta_min;
    std::optional<double> beta_max;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Sample {
    std::vector<std::uint8_t> bits;
    double energy = 0.0;
    int occurrences = 1;
};

// Samples ordered best-first; energies are always recomputed through
// QuboModel::energy before being reported.
struct SampleSet {
    std::vector<Sample> samples;

    const Sample& best() const;
    bool empty() const { return samples.empty(); }
};

// Simulated annealing: num_reads independent restarts of single-bit-flip
// Metropolis sweeps over a geometric beta schedule. Deterministic for a
// fixed (model, config) pair. Each read reports its best-seen state.
SampleSet anneal(const QuboModel& model, const SamplerConfig& config);

// Ground-truth oracle: evaluates all 2^num_vars states. Hard cap at 26 vars.
// Keeps at most max_kept states (always including the global minimum first).
SampleSet exhaustive(const QuboModel& model, size_t max_kept = 1024);

}  // namespace cvrp
