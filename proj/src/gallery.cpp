#include "stochexp/gallery.hpp"

#include <cmath>
#include <stdexcept>

#include "stochexp/exponentials.hpp"
#include "stochexp/text.hpp"

namespace stochexp {

ProcessSpec ProcessSpec::bm(GridPtr grid) {
    ProcessSpec s;
    s.kind = Kind::bm;
    s.grid = std::move(grid);
    return s;
}

ProcessSpec ProcessSpec::scaled_bm(GridPtr grid, double sigma) {
    ProcessSpec s;
    s.kind = Kind::scaled_bm;
    s.grid = std::move(grid);
    s.sigma = sigma;
    return s;
}

ProcessSpec ProcessSpec::controlled(GridPtr grid, PredictableControl control) {
    ProcessSpec s;
    s.kind = Kind::controlled;
    s.grid = std::move(grid);
    s.control = std::move(control);
    return s;
}

ProcessSpec ProcessSpec::bes3_inverse(GridPtr grid, double r0) {
    if (!(r0 > 0.0)) {
        throw std::invalid_argument("bes3_inverse: r0 must be > 0");
    }
    ProcessSpec s;
    s.kind = Kind::bes3_inverse;
    s.grid = std::move(grid);
    s.r0 = r0;
    return s;
}

ProcessSpec ProcessSpec::stopped_bm(GridPtr grid, StoppingRule rule) {
    ProcessSpec s;
    s.kind = Kind::stopped_bm;
    s.grid = std::move(grid);
    s.stop = rule;
    return s;
}

std::string ProcessSpec::name() const {
    switch (kind) {
    case Kind::bm:
        return "bm";
    case Kind::scaled_bm:
        return "scaled_bm";
    case Kind::controlled:
        return "controlled";
    case Kind::bes3_inverse:
        return "bes3_inverse";
    case Kind::stopped_bm:
        return "stopped_bm";
    }
    return {};
}

std::string ProcessSpec::describe() const {
    switch (kind) {
    case Kind::bm:
        return "bm";
    case Kind::scaled_bm:
        return "scaled_bm(sigma=" + format_real(sigma) + ")";
    case Kind::controlled:
        return "controlled(control=" + control->describe() + ")";
    case Kind::bes3_inverse:
        return "bes3_inverse(r0=" + format_real(r0) + ")";
    case Kind::stopped_bm:
        return "stopped_bm(stop=" + stop->describe() + ")";
    }
    return {};
}

namespace {

ProcessSample with_exponential(MartingalePath path) {
    auto e = stochastic_exponential(path);
    return ProcessSample{std::move(path), std::move(e), false};
}

ProcessSample sample_bes3_inverse(const ProcessSpec& spec, RngStream& rng) {
    const double start[3] = {spec.r0, 0.0, 0.0};
    const BrownianPath w = sample_brownian(spec.grid, 3, rng, start);
    const std::size_t n = spec.grid->size();
    std::vector<double> value(n);
    std::vector<double> log_value(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::hypot(w.at(i, 0), w.at(i, 1), w.at(i, 2));
        value[i] = spec.r0 / r;
        log_value[i] = std::log(value[i]);
    }
    value[0] = 1.0;
    log_value[0] = 0.0;
    // M_t = log V_t + <M>_t / 2 with <M> the realized QV of log V
    auto qv = quadratic_variation_empirical(log_value);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = log_value[i] + 0.5 * qv[i];
    }
    m[0] = 0.0;
    return ProcessSample{MartingalePath(spec.grid, std::move(m), std::move(qv)), std::move(value),
                         true};
}

}  // namespace

ProcessSample sample_process(const ProcessSpec& spec, RngStream& rng) {
    if (!spec.grid) {
        throw std::invalid_argument("sample_process: process has no grid");
    }
    switch (spec.kind) {
    case ProcessSpec::Kind::bm:
        return with_exponential(MartingalePath::from_brownian(sample_brownian(spec.grid, 1, rng)));
    case ProcessSpec::Kind::scaled_bm: {
        const auto b = MartingalePath::from_brownian(sample_brownian(spec.grid, 1, rng));
        return with_exponential(ito_integral(PredictableControl::constant(spec.sigma), b));
    }
    case ProcessSpec::Kind::controlled: {
        if (!spec.control) {
            throw std::invalid_argument("controlled process: missing control");
        }
        const auto b = MartingalePath::from_brownian(sample_brownian(spec.grid, 1, rng));
        return with_exponential(ito_integral(*spec.control, b));
    }
    case ProcessSpec::Kind::bes3_inverse:
        if (!(spec.r0 > 0.0)) {
            throw std::invalid_argument("bes3_inverse: r0 must be > 0");
        }
        return sample_bes3_inverse(spec, rng);
    case ProcessSpec::Kind::stopped_bm: {
        if (!spec.stop) {
            throw std::invalid_argument("stopped_bm: missing stopping rule");
        }
        const auto b = MartingalePath::from_brownian(sample_brownian(spec.grid, 1, rng));
        const std::size_t k = spec.stop->resolve(b);
        std::vector<double> m(b.m().begin(), b.m().end());
        std::vector<double> qv(b.qv().begin(), b.qv().end());
        for (std::size_t i = k + 1; i < m.size(); ++i) {
            m[i] = m[k];
            qv[i] = qv[k];
        }
        return with_exponential(MartingalePath(spec.grid, std::move(m), std::move(qv)));
    }
    }
    throw std::invalid_argument("sample_process: unknown process");
}

std::optional<double> analytic_reference(const ProcessSpec& spec, Quantity quantity, double t) {
    std::optional<double> sigma;
    switch (spec.kind) {
    case ProcessSpec::Kind::bm:
        sigma = 1.0;
        break;
    case ProcessSpec::Kind::scaled_bm:
        sigma = spec.sigma;
        break;
    case ProcessSpec::Kind::controlled:
        if (spec.control) sigma = spec.control->constant_value();
        break;
    case ProcessSpec::Kind::bes3_inverse:
        // E[r0 / R_t] for BES(3) from r0: erf(r0 / sqrt(2t))
        if (quantity == Quantity::exponential_mean) {
            return t > 0.0 ? std::erf(spec.r0 / std::sqrt(2.0 * t)) : 1.0;
        }
        return std::nullopt;
    case ProcessSpec::Kind::stopped_bm:
        // bounded stopping keeps the exponential a true martingale
        if (quantity == Quantity::exponential_mean) return 1.0;
        return std::nullopt;
    }
    if (!sigma) {
        return std::nullopt;
    }
    const double v = *sigma * *sigma * t;
    switch (quantity) {
    case Quantity::exponential_mean:
        return 1.0;
    case Quantity::novikov_value:
        return std::exp(v / 2.0);
    case Quantity::kazamaki_value:
        return std::exp(v / 8.0);
    }
    return std::nullopt;
}

}  // namespace stochexp
