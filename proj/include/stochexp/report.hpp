#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stochexp/gallery.hpp"
#include "stochexp/montecarlo.hpp"
#include "stochexp/stopping.hpp"

namespace stochexp {

struct StopEstimate {
    StoppingRule rule;
    EstimateReport estimate;
    bool heavy_tail = false;
};

// Per-stop estimates of one expectation functional.
// sup_estimate is the largest per-stop mean: a lower bound for the supremum
// over all stopping times, never the supremum itself.
struct CriterionReport {
    std::string criterion;
    std::vector<StopEstimate> per_stop;
    double sup_estimate = 0.0;
    bool stability_flag = false;
    std::vector<std::string> advisories;
};

// Log of the payoff at every grid point of one sampled path. The engine
// exponentiates the entry at each resolved stop.
using LogPayoffFn = std::function<std::vector<double>(const ProcessSample&)>;

CriterionReport evaluate_over_stops(std::string criterion, const ProcessSpec& process,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc,
                                    const LogPayoffFn& log_payoff);

// Builds the report from finished per-stop estimates (sets sup and flags).
CriterionReport make_report(std::string criterion, std::vector<StopEstimate> per_stop);

// Largest per-stop mean. Throws std::invalid_argument on an empty report.
double sup_over_stops(const CriterionReport& report);

}  // namespace stochexp
