#include "stochexp/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stochexp {

CriterionReport make_report(std::string criterion, std::vector<StopEstimate> per_stop) {
    CriterionReport r;
    r.criterion = std::move(criterion);
    r.per_stop = std::move(per_stop);
    if (!r.per_stop.empty()) {
        r.sup_estimate = sup_over_stops(r);
    }
    for (const auto& s : r.per_stop) {
        if (s.heavy_tail || s.estimate.unstable()) {
            r.stability_flag = true;
        }
    }
    return r;
}

CriterionReport evaluate_over_stops(std::string criterion, const ProcessSpec& process,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc,
                                    const LogPayoffFn& log_payoff) {
    if (stops.empty()) {
        throw std::invalid_argument(criterion + ": empty stopping family");
    }
    const auto accumulators = accumulate(
        stops.size(),
        [&](std::uint64_t, RngStream& rng, std::span<double> out) {
            const ProcessSample sample = sample_process(process, rng);
            const std::vector<double> series = log_payoff(sample);
            for (std::size_t k = 0; k < stops.size(); ++k) {
                out[k] = std::exp(series[stops[k].resolve(sample.path)]);
            }
        },
        mc);
    std::vector<StopEstimate> per_stop;
    per_stop.reserve(stops.size());
    for (std::size_t k = 0; k < stops.size(); ++k) {
        const auto& acc = accumulators[k];
        if (acc.count() == 0) {
            // every sample overflowed: keep the row, flagged unstable
            const double nan = std::numeric_limits<double>::quiet_NaN();
            EstimateReport e{nan, nan, 0, {nan, nan}, nan, acc.nonfinite()};
            per_stop.push_back({stops[k], e, false});
            continue;
        }
        const auto e = acc.report();
        per_stop.push_back({stops[k], e, heavy_tailed(e)});
    }
    return make_report(std::move(criterion), std::move(per_stop));
}

double sup_over_stops(const CriterionReport& report) {
    if (report.per_stop.empty()) {
        throw std::invalid_argument("sup_over_stops: empty report");
    }
    // stops without a finite sample are skipped; NaN when none is left
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : report.per_stop) {
        if (!std::isnan(s.estimate.mean) && !(s.estimate.mean <= best)) {
            best = s.estimate.mean;
        }
    }
    return best;
}

}  // namespace stochexp
