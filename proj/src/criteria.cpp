#include "stochexp/criteria.hpp"

#include <cmath>
#include <stdexcept>

#include "stochexp/text.hpp"

namespace stochexp {

namespace log_payoff {

std::vector<double> exponential(const MartingalePath& path) {
    const auto m = path.m();
    const auto qv = path.qv();
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = m[i] - 0.5 * qv[i];
    }
    return out;
}

std::vector<double> novikov(const MartingalePath& path) {
    return mixed(path, 0.0);
}

std::vector<double> kazamaki(const MartingalePath& path) {
    return mixed(path, 0.5);
}

std::vector<double> mixed(const MartingalePath& path, double a) {
    const auto m = path.m();
    const auto qv = path.qv();
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = a * m[i] + (0.5 - a) * qv[i];
    }
    return out;
}

namespace {

// int a dM + int (1/2 - a) d<M> given the per-step control values.
std::vector<double> controlled_exponent(const MartingalePath& path, const PredictableControl& control,
                                        const std::vector<double>& a) {
    const auto qv = path.qv();
    std::vector<double> out(qv.size());
    if (auto c = control.constant_value()) {
        const auto integral = ito_integral(control, path);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = integral.m()[i] + 0.5 * qv[i] - *c * qv[i];
        }
        return out;
    }
    const auto integral = ito_integral(std::span<const double>(a), path);
    const auto a_qv = integrate_qv(a, path);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = integral.m()[i] + 0.5 * qv[i] - a_qv[i];
    }
    return out;
}

}  // namespace

std::vector<double> theorem1(const MartingalePath& path, const PredictableControl& control) {
    const auto a = control.evaluate(path);
    return controlled_exponent(path, control, a);
}

std::vector<double> theorem2(const MartingalePath& path, const PredictableControl& control,
                             double epsilon, const LowerFunctionSpec& phi, const FunctionSpec& f) {
    const auto a = control.evaluate(path);
    auto out = controlled_exponent(path, control, a);
    const auto far = indicator_qv(std::span<const double>(a), path, epsilon, BandMode::far);
    const auto near = indicator_qv(std::span<const double>(a), path, epsilon, BandMode::near);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += f(near[i]) - epsilon * phi(far[i]);
    }
    return out;
}

std::vector<double> ruf(const MartingalePath& path, const FunctionSpec& h) {
    auto out = exponential(path);
    const auto qv = path.qv();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += h(qv[i]);
    }
    return out;
}

}  // namespace log_payoff

namespace {

const char* kUnitControlAdvisory =
    "a = 1: the functional reduces to E[E_tau(M)] <= 1 and is finite for every M; "
    "it carries no uniform-integrability information on its own";

}  // namespace

CriterionReport novikov_functional(const ProcessSpec& process,
                                   const std::vector<StoppingRule>& stops, const McConfig& mc) {
    return evaluate_over_stops("novikov", process, stops, mc,
                               [](const ProcessSample& s) { return log_payoff::novikov(s.path); });
}

CriterionReport kazamaki_functional(const ProcessSpec& process,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc) {
    return evaluate_over_stops("kazamaki", process, stops, mc,
                               [](const ProcessSample& s) { return log_payoff::kazamaki(s.path); });
}

CriterionReport mixed_nk_functional(const ProcessSpec& process, double a,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc) {
    auto report = evaluate_over_stops(
        "mixed", process, stops, mc,
        [a](const ProcessSample& s) { return log_payoff::mixed(s.path, a); });
    if (a == 1.0) {
        report.advisories.emplace_back(kUnitControlAdvisory);
    }
    return report;
}

CriterionReport theorem1_functional(const ProcessSpec& process, const PredictableControl& control,
                                    const std::vector<StoppingRule>& stops, const McConfig& mc) {
    auto report = evaluate_over_stops(
        "theorem1", process, stops, mc,
        [&control](const ProcessSample& s) { return log_payoff::theorem1(s.path, control); });
    if (control.constant_value() == 1.0) {
        report.advisories.emplace_back(kUnitControlAdvisory);
    }
    return report;
}

CriterionReport theorem2_functional(const ProcessSpec& process, const PredictableControl& control,
                                    double epsilon, const LowerFunctionSpec& phi,
                                    const FunctionSpec& f, const std::vector<StoppingRule>& stops,
                                    const McConfig& mc) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("theorem2: epsilon must be > 0");
    }
    if (!(f(0.0) > 0.0) || !non_decreasing_on(f, 0.0, 100.0)) {
        throw std::invalid_argument("theorem2: f must be positive and non-decreasing");
    }
    auto report = evaluate_over_stops(
        "theorem2", process, stops, mc, [&](const ProcessSample& s) {
            return log_payoff::theorem2(s.path, control, epsilon, phi, f);
        });
    if (control.constant_value() == 1.0) {
        report.advisories.emplace_back(
            "a = 1: every step lies in the near band, so the criterion is the Ruf functional "
            "with h = f");
    }
    return report;
}

CriterionReport ruf_functional(const ProcessSpec& process, const FunctionSpec& h,
                               const std::vector<StoppingRule>& stops, const McConfig& mc) {
    return evaluate_over_stops("ruf", process, stops, mc,
                               [&h](const ProcessSample& s) { return log_payoff::ruf(s.path, h); });
}

PredictableControl necessity_control(const FunctionSpec& f) {
    return PredictableControl::necessity(f);
}

namespace {

double trapezoid(const FunctionSpec& f, double lo, double hi, std::size_t n) {
    const double h = (hi - lo) / static_cast<double>(n);
    double sum = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i < n; ++i) {
        sum += f(lo + h * static_cast<double>(i));
    }
    return sum * h;
}

}  // namespace

ConditionIIResult check_condition_ii(const PredictableControl& control,
                                     const ProcessSpec& process, const FunctionSpec& f,
                                     const McConfig& mc, double x_max) {
    if (!(x_max > 0.0)) {
        throw std::invalid_argument("check_condition_ii: x_max must be > 0");
    }
    if (sampled_min(f, 0.0, x_max, 10000) < 0.0) {
        throw std::invalid_argument("check_condition_ii: f must be >= 0");
    }
    ConditionIIResult result;

    constexpr std::size_t cells = 4096;
    const double quarter = trapezoid(f, 0.0, x_max / 4.0, cells);
    const double third = trapezoid(f, x_max / 4.0, x_max / 2.0, cells);
    const double last = trapezoid(f, x_max / 2.0, x_max, cells);
    result.integral_to_xmax = quarter + third + last;
    result.integral_diverges = last > 0.0 && last >= 0.75 * third;

    for (std::uint64_t rep = 0; rep < mc.n_paths && result.holds; ++rep) {
        RngStream rng({mc.master_seed, rep});
        const ProcessSample s = sample_process(process, rng);
        const auto a = control.evaluate(s.path);
        const auto qv = s.path.qv();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double fv = f(qv[i]);
            const double gap = (a[i] - 1.0) * (a[i] - 1.0);
            if (fv > gap * (1.0 + 1e-12)) {
                result.holds = false;
                result.first_violation = ConditionIIViolation{rep, i, qv[i], fv, gap};
                break;
            }
        }
        ++result.paths_checked;
    }
    return result;
}

}  // namespace stochexp
