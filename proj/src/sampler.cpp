#include "cvrp/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>

namespace cvrp {

namespace {

// Compressed adjacency of the quadratic terms, for O(1) flip evaluation with
// cached local fields.
struct Csr {
    std::vector<double> h;
    std::vector<int> offsets;    // size n+1
    std::vector<int> neighbor;
    std::vector<double> coeff;

    static Csr build(const QuboModel& model) {
        const int n = model.num_vars();
        Csr csr;
        csr.h.assign(static_cast<size_t>(n), 0.0);
        for (const auto& [i, v] : model.linear_terms())
            csr.h[static_cast<size_t>(i)] = v;
        std::vector<int> degree(static_cast<size_t>(n), 0);
        for (const auto& [k, q] : model.quadratic_terms()) {
            (void)q;
            ++degree[static_cast<size_t>(k >> 32)];
            ++degree[static_cast<size_t>(k & 0xffffffffULL)];
        }
        csr.offsets.assign(static_cast<size_t>(n) + 1, 0);
        for (int i = 0; i < n; ++i)
            csr.offsets[static_cast<size_t>(i) + 1] =
                csr.offsets[static_cast<size_t>(i)] + degree[static_cast<size_t>(i)];
        csr.neighbor.resize(static_cast<size_t>(csr.offsets.back()));
        csr.coeff.resize(csr.neighbor.size());
        std::vector<int> fill(csr.offsets.begin(), csr.offsets.end() - 1);
        for (const auto& [k, q] : model.quadratic_terms()) {
            int i = static_cast<int>(k >> 32);
            int j = static_cast<int>(k & 0xffffffffULL);
            csr.neighbor[static_cast<size_t>(fill[static_cast<size_t>(i)])] = j;
            csr.coeff[static_cast<size_t>(fill[static_cast<size_t>(i)]++)] = q;
            csr.neighbor[static_cast<size_t>(fill[static_cast<size_t>(j)])] = i;
            csr.coeff[static_cast<size_t>(fill[static_cast<size_t>(j)]++)] = q;
        }
        return csr;
    }
};

std::pair<double, double> derive_beta_bounds(const Csr& csr, int n) {
    double de_max = 0.0;
    double de_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double reach = std::abs(csr.h[static_cast<size_t>(i)]);
        if (csr.h[static_cast<size_t>(i)] != 0.0)
            de_min = std::min(de_min, std::abs(csr.h[static_cast<size_t>(i)]));
        for (int k = csr.offsets[static_cast<size_t>(i)];
             k < csr.offsets[static_cast<size_t>(i) + 1]; ++k) {
            reach += std::abs(csr.coeff[static_cast<size_t>(k)]);
            de_min = std::min(de_min, std::abs(csr.coeff[static_cast<size_t>(k)]));
        }
        de_max = std::max(de_max, reach);
    }
    if (!(de_max > 0.0) || !std::isfinite(de_min)) return {0.1, 1.0};
    double beta_min = 1.0 / de_max;
    double beta_max = 1.0 / de_min;
    if (beta_max <= beta_min) beta_max = beta_min * 2.0;
    return {beta_min, beta_max};
}

void sort_samples(std::vector<Sample>& samples) {
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.bits < b.bits;
    });
}

}  // namespace

void SamplerConfig::validate() const {
    if (num_reads < 1 || sweeps_per_read < 1)
        throw ArgumentError("sampler read/sweep counts must be >= 1");
    if (beta_min && beta_max && !(*beta_min < *beta_max))
        throw ArgumentError("beta_min must be < beta_max");
}

const Sample& SampleSet::best() const {
    if (samples.empty()) throw ArgumentError("empty sample set");
    return samples.front();
}

SampleSet anneal(const QuboModel& model, const SamplerConfig& config) {
    config.validate();
    const int n = model.num_vars();
    const Csr csr = Csr::build(model);

    auto [beta_min, beta_max] = derive_beta_bounds(csr, n);
    if (config.beta_min) beta_min = *config.beta_min;
    if (config.beta_max) beta_max = *config.beta_max;

    const int sweeps = config.sweeps_per_read;
    std::vector<double> betas(static_cast<size_t>(sweeps));
    for (int t = 0; t < sweeps; ++t) {
        double frac = sweeps > 1 ? static_cast<double>(t) / (sweeps - 1) : 1.0;
        betas[static_cast<size_t>(t)] = beta_min * std::pow(beta_max / beta_min, frac);
    }

    std::vector<Sample> reads;
    reads.reserve(static_cast<size_t>(config.num_reads));
    std::vector<std::uint8_t> bits(static_cast<size_t>(n));
    std::vector<double> field(static_cast<size_t>(n));

    for (int read = 0; read < config.num_reads; ++read) {
        Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(read)));
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next() & 1);

        // local field f_i = h_i + sum_j q_ij b_j; flip delta is (1-2b_i)*f_i
        for (int i = 0; i < n; ++i) {
            double f = csr.h[static_cast<size_t>(i)];
            for (int k = csr.offsets[static_cast<size_t>(i)];
                 k < csr.offsets[static_cast<size_t>(i) + 1]; ++k) {
                if (bits[static_cast<size_t>(csr.neighbor[static_cast<size_t>(k)])])
                    f += csr.coeff[static_cast<size_t>(k)];
            }
            field[static_cast<size_t>(i)] = f;
        }
        double energy = model.energy(bits);
        double best_energy = energy;
        std::vector<std::uint8_t> best_bits = bits;

        for (int t = 0; t < sweeps; ++t) {
            const double beta = betas[static_cast<size_t>(t)];
            for (int i = 0; i < n; ++i) {
                const double de =
                    (bits[static_cast<size_t>(i)] ? -1.0 : 1.0) * field[static_cast<size_t>(i)];
                if (de > 0.0) {
                    const double bde = beta * de;
                    if (bde > 36.0) continue;  // acceptance below 1 ulp
                    if (rng.uniform() >= std::exp(-bde)) continue;
                }
                const double delta = bits[static_cast<size_t>(i)] ? -1.0 : 1.0;
                bits[static_cast<size_t>(i)] ^= 1u;
                energy += de;
                for (int k = csr.offsets[static_cast<size_t>(i)];
                     k < csr.offsets[static_cast<size_t>(i) + 1]; ++k) {
                    field[static_cast<size_t>(csr.neighbor[static_cast<size_t>(k)])] +=
                        delta * csr.coeff[static_cast<size_t>(k)];
                }
                if (energy < best_energy) {
                    best_energy = energy;
                    best_bits = bits;
                }
            }
        }
        // re-evaluate through the model so reported energies never drift
        const double reported = model.energy(best_bits);
        reads.push_back({std::move(best_bits), reported, 1});
    }

    sort_samples(reads);
    SampleSet out;
    for (auto& s : reads) {
        if (!out.samples.empty() && out.samples.back().bits == s.bits) {
            ++out.samples.back().occurrences;
        } else {
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

SampleSet exhaustive(const QuboModel& model, size_t max_kept) {
    const int n = model.num_vars();
    if (n > 26)
        throw SizeError("exhaustive sampler capped at 26 variables, model has " +
                        std::to_string(n));
    const Csr csr = Csr::build(model);

    std::vector<std::uint8_t> bits(static_cast<size_t>(n), 0);
    std::vector<double> field(csr.h);
    double energy = model.offset();

    // max-heap of the kept states, worst on top
    using Entry = std::pair<double, std::vector<std::uint8_t>>;
    std::priority_queue<Entry> kept;
    kept.push({energy, bits});

    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const int i = std::countr_zero(g);  // Gray-code walk
        const double de =
            (bits[static_cast<size_t>(i)] ? -1.0 : 1.0) * field[static_cast<size_t>(i)];
        const double delta = bits[static_cast<size_t>(i)] ? -1.0 : 1.0;
        bits[static_cast<size_t>(i)] ^= 1u;
        energy += de;
        for (int k = csr.offsets[static_cast<size_t>(i)];
             k < csr.offsets[static_cast<size_t>(i) + 1]; ++k) {
            field[static_cast<size_t>(csr.neighbor[static_cast<size_t>(k)])] +=
                delta * csr.coeff[static_cast<size_t>(k)];
        }
        if (kept.size() < max_kept) {
            kept.push({energy, bits});
        } else if (energy < kept.top().first) {
            kept.pop();
            kept.push({energy, bits});
        }
    }

    std::vector<Sample> samples;
    samples.reserve(kept.size());
    while (!kept.empty()) {
        auto [e, b] = kept.top();
        kept.pop();
        (void)e;
        samples.push_back({b, model.energy(b), 1});
    }
    sort_samples(samples);
    SampleSet out;
    out.samples = std::move(samples);
    return out;
}

}  // namespace cvrp
