#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stochexp/constructions.hpp"
#include "stochexp/functions.hpp"
#include "stochexp/gallery.hpp"
#include "stochexp/montecarlo.hpp"
#include "stochexp/paths.hpp"
#include "stochexp/report.hpp"
#include "stochexp/stopping.hpp"

namespace stochexp {

// Logarithms of the criterion payoffs at every grid point of a path. The
// functionals below exponentiate these at each stop, so two criteria agree
// pathwise exactly when these series agree.
namespace log_payoff {

std::vector<double> exponential(const MartingalePath& path);  // M - <M>/2
std::vector<double> novikov(const MartingalePath& path);      // <M>/2
std::vector<double> kazamaki(const MartingalePath& path);     // M/2
std::vector<double> mixed(const MartingalePath& path, double a);  // a M + (1/2 - a) <M>

// int a dM + int (1/2 - a) d<M>
std::vector<double> theorem1(const MartingalePath& path, const PredictableControl& control);

// theorem1 - eps phi(int 1{|1-a| >= eps} d<M>) + f(int 1{|1-a| < eps} d<M>)
std::vector<double> theorem2(const MartingalePath& path, const PredictableControl& control,
                             double epsilon, const LowerFunctionSpec& phi, const FunctionSpec& f);

// M - <M>/2 + h(<M>)
std::vector<double> ruf(const MartingalePath& path, const FunctionSpec& h);

}  // namespace log_payoff

// E exp(<M>_tau / 2)
CriterionReport novikov_functional(const ProcessSpec& process,
                                   const std::vector<StoppingRule>& stops, const McConfig& mc);

// E exp(M_tau / 2)
CriterionReport kazamaki_functional(const ProcessSpec& process,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc);

// E exp(a M_tau + (1/2 - a) <M>_tau). a = 1 is accepted with an advisory.
CriterionReport mixed_nk_functional(const ProcessSpec& process, double a,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc);

// E exp(int_0^tau a dM + int_0^tau (1/2 - a) d<M>)
CriterionReport theorem1_functional(const ProcessSpec& process, const PredictableControl& control,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc);

// Requires epsilon > 0 and f positive and non-decreasing (sampled on [0, 100]).
CriterionReport theorem2_functional(const ProcessSpec& process, const PredictableControl& control,
                                    double epsilon, const LowerFunctionSpec& phi,
                                    const FunctionSpec& f, const std::vector<StoppingRule>& stops,
                                    const McConfig& mc);

// E[E_tau(M) exp(h(<M>_tau))]
CriterionReport ruf_functional(const ProcessSpec& process, const FunctionSpec& h,
                               const std::vector<StoppingRule>& stops, const McConfig& mc);

// a = 1 + sqrt(f(<M>)/2). Throws std::invalid_argument if f < 0 is detected.
PredictableControl necessity_control(const FunctionSpec& f);

struct ConditionIIViolation {
    std::uint64_t replicate = 0;
    std::size_t step = 0;
    double qv = 0.0;
    double f_value = 0.0;
    double gap_squared = 0.0;  // (a - 1)^2
};

struct ConditionIIResult {
    bool holds = true;
    std::optional<ConditionIIViolation> first_violation;
    std::size_t paths_checked = 0;
    // Numerical surrogate for int_0^inf f = inf on [0, x_max]: the integral
    // over [x_max/2, x_max] is positive and at least 0.75 of the one over
    // [x_max/4, x_max/2].
    bool integral_diverges = false;
    double integral_to_xmax = 0.0;
};

// Checks f(<M>_{t_i}) <= (a_i - 1)^2 at every step of mc.n_paths sampled paths
// (relative slack 1e-12), stopping at the first violation.
// Throws std::invalid_argument if f is negative on [0, x_max].
ConditionIIResult check_condition_ii(const PredictableControl& control,
                                     const ProcessSpec& process, const FunctionSpec& f,
                                     const McConfig& mc, double x_max = 1e4);

}  // namespace stochexp
