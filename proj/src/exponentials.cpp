#include "stochexp/exponentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochexp/gallery.hpp"
#include "stochexp/report.hpp"
#include "stochexp/text.hpp"

namespace stochexp {

std::vector<double> stochastic_exponential(const MartingalePath& path) {
    const auto m = path.m();
    const auto qv = path.qv();
    std::vector<double> e(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        e[i] = std::exp(m[i] - 0.5 * qv[i]);
    }
    return e;
}

std::size_t count_nonfinite(std::span<const double> values) {
    std::size_t n = 0;
    for (double v : values) {
        if (!std::isfinite(v)) ++n;
    }
    return n;
}

MartingalePath girsanov_drift_adjust(const MartingalePath& n_path,
                                     const PredictableControl& control,
                                     const MartingalePath& driver) {
    if (n_path.grid_ptr() != driver.grid_ptr() &&
        !std::equal(n_path.grid().times().begin(), n_path.grid().times().end(),
                    driver.grid().times().begin(), driver.grid().times().end())) {
        throw std::invalid_argument("girsanov_drift_adjust: grid mismatch");
    }
    const auto a = control.evaluate(driver);
    std::vector<double> w(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        w[j] = a[j] * (1.0 - a[j]);
    }
    const auto drift = integrate_qv(w, driver);
    std::vector<double> m(n_path.m().begin(), n_path.m().end());
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] -= drift[i];
    }
    return MartingalePath(n_path.grid_ptr(), std::move(m),
                          std::vector<double>(n_path.qv().begin(), n_path.qv().end()));
}

MeasureWeight::MeasureWeight(std::vector<double> weights, std::string src)
    : terminal_weights(std::move(weights)), source(std::move(src)) {
    for (double w : terminal_weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("MeasureWeight: weights must be finite and >= 0");
        }
    }
}

EstimateReport reweighted_expectation(std::span<const double> payoff, const MeasureWeight& weight) {
    if (payoff.size() != weight.terminal_weights.size()) {
        throw std::invalid_argument("reweighted_expectation: payoff and weight sizes differ");
    }
    Accumulator acc;
    for (std::size_t i = 0; i < payoff.size(); ++i) {
        acc.add(weight.terminal_weights[i] * payoff[i]);
    }
    return acc.report();
}

CriterionReport supermartingale_check(const ProcessSpec& process,
                                      const std::vector<StoppingRule>& stops, const McConfig& mc) {
    auto report = evaluate_over_stops(
        "supermartingale", process, stops, mc, [](const ProcessSample& s) {
            std::vector<double> out(s.exponential.size());
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = std::log(s.exponential[i]);
            }
            return out;
        });
    for (const auto& ps : report.per_stop) {
        if (ps.estimate.mean > 1.0 + 3.0 * ps.estimate.std_error) {
            report.advisories.push_back("E[E_tau(M)] exceeds 1 by more than 3 stderr at " +
                                        ps.rule.describe() + ": " +
                                        format_real(ps.estimate.mean));
        }
    }
    return report;
}

EstimateReport q_expectation(const FunctionSpec& g, const ProcessSpec& process,
                             const McConfig& mc) {
    return estimate_many(
               1,
               [&](std::uint64_t, RngStream& rng, std::span<double> out) {
                   const ProcessSample s = sample_process(process, rng);
                   out[0] = s.terminal_exponential() * g(s.path.qv().back());
               },
               mc)
        .front();
}

}  // namespace stochexp
