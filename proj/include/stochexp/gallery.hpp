#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stochexp/paths.hpp"
#include "stochexp/stopping.hpp"

namespace stochexp {

// Canonical processes with known behaviour.
//   bm            M = B, <M>_t = t exactly
//   scaled_bm     M = sigma B, <M>_t = sigma^2 t
//   controlled    M = int a dB, <M> = int a^2 dt
//   bes3_inverse  V_t = r0 / |(r0 + W1_t, W2_t, W3_t)|, the inverse Bessel(3)
//                 strict local martingale, sampled exactly at the grid points
//   stopped_bm    B frozen after the stopping rule fires
struct ProcessSpec {
    enum class Kind { bm, scaled_bm, controlled, bes3_inverse, stopped_bm };

    Kind kind = Kind::bm;
    GridPtr grid;
    double sigma = 1.0;
    double r0 = 1.0;
    std::optional<PredictableControl> control;
    std::optional<StoppingRule> stop;

    static ProcessSpec bm(GridPtr grid);
    static ProcessSpec scaled_bm(GridPtr grid, double sigma);
    static ProcessSpec controlled(GridPtr grid, PredictableControl control);
    // Throws std::invalid_argument when r0 <= 0.
    static ProcessSpec bes3_inverse(GridPtr grid, double r0);
    static ProcessSpec stopped_bm(GridPtr grid, StoppingRule rule);

    std::string name() const;
    std::string describe() const;  // name plus parameters
};

struct ProcessSample {
    MartingalePath path;
    // The exponential E_t(M) at every grid point. For bes3_inverse this is the
    // exactly sampled value process; otherwise exp(M - <M>/2).
    std::vector<double> exponential;
    // True when <M> is the empirical log-increment QV (bes3_inverse) and
    // therefore carries discretization error.
    bool qv_approximate = false;

    double terminal_exponential() const { return exponential.back(); }
};

ProcessSample sample_process(const ProcessSpec& spec, RngStream& rng);

enum class Quantity { exponential_mean, novikov_value, kazamaki_value };

// Closed-form reference values where known:
//   exponential_mean  E[E_t(M)]
//   novikov_value     E[exp(<M>_t / 2)]
//   kazamaki_value    E[exp(M_t / 2)]
std::optional<double> analytic_reference(const ProcessSpec& spec, Quantity quantity, double t);

}  // namespace stochexp
