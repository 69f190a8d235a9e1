#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stochexp/functions.hpp"
#include "stochexp/montecarlo.hpp"
#include "stochexp/paths.hpp"

namespace stochexp {

struct ProcessSpec;
struct StoppingRule;
struct CriterionReport;

// E_t = exp(M_t - <M>_t / 2) at every grid point. Overflow shows up as inf
// and is counted by the estimators, never clipped.
std::vector<double> stochastic_exponential(const MartingalePath& path);

std::size_t count_nonfinite(std::span<const double> values);

// N~_t = N_t - sum_{j<i} a_j (1 - a_j) (<M>_{j+1} - <M>_j), with <N~> = <N>.
// n_path must be int (1 - a) dM over the same grid as the driver.
MartingalePath girsanov_drift_adjust(const MartingalePath& n_path,
                                     const PredictableControl& control,
                                     const MartingalePath& driver);

// Per-path Radon-Nikodym density samples, e.g. E_T(int a dM) or E_T(M).
struct MeasureWeight {
    std::vector<double> terminal_weights;
    std::string source;

    // Throws std::invalid_argument on a negative or non-finite weight.
    MeasureWeight(std::vector<double> weights, std::string source);
};

// Estimate of E[weight * payoff], the expectation under the reweighted measure.
EstimateReport reweighted_expectation(std::span<const double> payoff, const MeasureWeight& weight);

// Per-stop E[E_tau(M)]. Advisories list every stop whose estimate exceeds
// 1 by more than 3 standard errors.
CriterionReport supermartingale_check(const ProcessSpec& process,
                                      const std::vector<StoppingRule>& stops, const McConfig& mc);

// E^Q[g(<M>_T)] = E[E_T(M) g(<M>_T)] with dQ = E_T(M) dP.
EstimateReport q_expectation(const FunctionSpec& g, const ProcessSpec& process,
                             const McConfig& mc);

}  // namespace stochexp
