#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stochexp {

// Identifies one replication's random stream. The mapping
// (master_seed, replicate_id) -> stream is injective and deterministic.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate_id = 0;
};

// xoshiro256** engine seeded from a SeedSpec through splitmix64.
// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(SeedSpec seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    double uniform();  // in [0, 1)
    double normal();   // standard Gaussian

private:
    std::uint64_t state_[4];
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

RngStream rng_stream(SeedSpec seed);

// Exactly-rounded floating point sum (Shewchuk non-overlapping partials).
// The rounded value depends only on the multiset of added values, never on
// their order, so partial sums merge without any rounding drift.
class ExactSum {
public:
    void add(double x);
    void merge(const ExactSum& other);
    double value() const;

private:
    std::vector<double> partials_;
};

struct EstimateReport {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    std::pair<double, double> ci95{0.0, 0.0};
    double max_sample = 0.0;
    std::size_t nonfinite_count = 0;

    bool unstable() const { return nonfinite_count > 0; }
};

// Largest single sample contributes more than `share` of the total.
// Meant for nonnegative payoffs (exponential functionals).
bool heavy_tailed(const EstimateReport& report, double share = 0.1);

// Every sample of an estimate was non-finite.
class NoFiniteSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Running sums for one estimated quantity. Non-finite samples are counted and
// excluded. Merge is exact and associative.
class Accumulator {
public:
    void add(double x);
    void merge(const Accumulator& other);

    std::size_t count() const { return n_; }
    std::size_t nonfinite() const { return nonfinite_; }

    // Throws NoFiniteSamples when there is no finite sample.
    EstimateReport report() const;

private:
    ExactSum sum_;
    ExactSum sum_sq_;
    std::size_t n_ = 0;
    std::size_t nonfinite_ = 0;
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
};

struct McConfig {
    std::size_t n_paths = 10000;
    std::uint64_t master_seed = 20240607;
    unsigned workers = 1;
};

// Fills `out` with one sample per output for a single replication.
using ReplicationFn =
    std::function<void(std::uint64_t replicate, RngStream& rng, std::span<double> out)>;

// Runs replications 0..n_paths-1, each on its own stream, split into
// contiguous blocks over `workers` threads. Results do not depend on the
// worker count.
std::vector<Accumulator> accumulate(std::size_t n_outputs, const ReplicationFn& fn,
                                    const McConfig& mc);

std::vector<EstimateReport> estimate_many(std::size_t n_outputs, const ReplicationFn& fn,
                                          const McConfig& mc);

using PayoffFn = std::function<double(std::uint64_t replicate, RngStream& rng)>;

// Requires n_paths >= 2.
EstimateReport estimate(const PayoffFn& payoff, std::size_t n_paths, std::uint64_t master_seed,
                        unsigned workers = 1);

}  // namespace stochexp
