#include "stochexp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace stochexp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(SeedSpec seed) {
    // splitmix64 is a bijection, so the first two words alone already make
    // the (master, replicate) -> state map injective.
    state_[0] = splitmix64(seed.master_seed);
    state_[1] = splitmix64(seed.replicate_id ^ 0x6a09e667f3bcc909ULL);
    state_[2] = splitmix64(state_[0] ^ rotl(state_[1], 17));
    state_[3] = splitmix64(state_[1] + rotl(state_[0], 41));
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
        state_[0] = 1;
    }
    // warm up past the seeding correlation
    for (int i = 0; i < 8; ++i) {
        (*this)();
    }
}

RngStream::result_type RngStream::operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RngStream::normal() { return gauss_(*this); }

RngStream rng_stream(SeedSpec seed) { return RngStream(seed); }

// ---------------------------------------------------------------------------

void ExactSum::add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
        if (std::fabs(x) < std::fabs(y)) {
            std::swap(x, y);
        }
        const double hi = x + y;
        const double lo = y - (hi - x);
        if (lo != 0.0) {
            partials_[i++] = lo;
        }
        x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
}

void ExactSum::merge(const ExactSum& other) {
    for (double p : other.partials_) {
        add(p);
    }
}

double ExactSum::value() const {
    // Correctly rounded sum of the partials (same final step as Python's fsum).
    std::size_t n = partials_.size();
    if (n == 0) {
        return 0.0;
    }
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials_[--n];
        hi = x + y;
        const double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0) {
            break;
        }
    }
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        const double yr = x - hi;
        if (y == yr) {
            hi = x;
        }
    }
    return hi;
}

// ---------------------------------------------------------------------------

bool heavy_tailed(const EstimateReport& report, double share) {
    const double total = report.mean * static_cast<double>(report.n);
    if (!(total > 0.0)) {
        return false;
    }
    return report.max_sample > share * total;
}

void Accumulator::add(double x) {
    if (!std::isfinite(x)) {
        ++nonfinite_;
        return;
    }
    sum_.add(x);
    sum_sq_.add(x * x);
    ++n_;
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
}

void Accumulator::merge(const Accumulator& other) {
    sum_.merge(other.sum_);
    sum_sq_.merge(other.sum_sq_);
    n_ += other.n_;
    nonfinite_ += other.nonfinite_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
}

EstimateReport Accumulator::report() const {
    if (n_ == 0) {
        throw NoFiniteSamples("estimate: no finite samples (" + std::to_string(nonfinite_) +
                                 " non-finite)");
    }
    EstimateReport r;
    r.n = n_;
    r.nonfinite_count = nonfinite_;
    r.max_sample = max_;
    if (min_ == max_) {
        r.mean = min_;
        r.std_error = 0.0;
    } else {
        const double n = static_cast<double>(n_);
        const double s1 = sum_.value();
        r.mean = s1 / n;
        if (n_ > 1) {
            const long double ss = static_cast<long double>(sum_sq_.value()) -
                                   static_cast<long double>(s1) * s1 / n;
            const double var = std::max(0.0L, ss / (n - 1.0L));
            r.std_error = std::sqrt(var / n);
        }
    }
    r.ci95 = {r.mean - 1.96 * r.std_error, r.mean + 1.96 * r.std_error};
    return r;
}

// ---------------------------------------------------------------------------

std::vector<Accumulator> accumulate(std::size_t n_outputs, const ReplicationFn& fn,
                                    const McConfig& mc) {
    const std::size_t n = mc.n_paths;
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(mc.workers == 0 ? 1 : mc.workers, n));

    std::vector<std::vector<Accumulator>> partial(workers, std::vector<Accumulator>(n_outputs));
    std::vector<std::exception_ptr> errors(workers);

    auto run_block = [&](std::size_t w) {
        try {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            std::vector<double> out(n_outputs);
            for (std::size_t rep = begin; rep < end; ++rep) {
                RngStream rng({mc.master_seed, rep});
                std::fill(out.begin(), out.end(), 0.0);
                fn(rep, rng, out);
                for (std::size_t k = 0; k < n_outputs; ++k) {
                    partial[w][k].add(out[k]);
                }
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        run_block(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(run_block, w);
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    std::vector<Accumulator> merged(n_outputs);
    for (const auto& block : partial) {
        for (std::size_t k = 0; k < n_outputs; ++k) {
            merged[k].merge(block[k]);
        }
    }
    return merged;
}

std::vector<EstimateReport> estimate_many(std::size_t n_outputs, const ReplicationFn& fn,
                                          const McConfig& mc) {
    const auto acc = accumulate(n_outputs, fn, mc);
    std::vector<EstimateReport> out;
    out.reserve(acc.size());
    for (const auto& a : acc) {
        out.push_back(a.report());
    }
    return out;
}

EstimateReport estimate(const PayoffFn& payoff, std::size_t n_paths, std::uint64_t master_seed,
                        unsigned workers) {
    if (n_paths < 2) {
        throw std::invalid_argument("estimate: n_paths must be >= 2");
    }
    McConfig mc{n_paths, master_seed, workers};
    return estimate_many(
               1,
               [&](std::uint64_t rep, RngStream& rng, std::span<double> out) {
                   out[0] = payoff(rep, rng);
               },
               mc)
        .front();
}

}  // namespace stochexp
