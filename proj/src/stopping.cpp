#include "stochexp/stopping.hpp"

#include <cmath>
#include <stdexcept>

#include "stochexp/text.hpp"

namespace stochexp {

std::size_t StoppingRule::resolve(const MartingalePath& path) const {
    const auto times = path.grid().times();
    const auto m = path.m();
    const auto qv = path.qv();
    const std::size_t last = path.size() - 1;
    // grid times are computed as t_end * i / n; absorb that rounding
    const double slack = 1e-12 * path.grid().t_end();
    for (std::size_t i = 0; i <= last; ++i) {
        switch (kind) {
        case Kind::deterministic:
            if (times[i] >= param - slack) return i;
            break;
        case Kind::qv_level:
            if (qv[i] >= param) return i;
            break;
        case Kind::abs_m_level:
            if (std::fabs(m[i]) >= param) return i;
            break;
        }
    }
    return last;
}

std::string StoppingRule::kind_name() const {
    switch (kind) {
    case Kind::deterministic:
        return "deterministic";
    case Kind::qv_level:
        return "qv_level";
    case Kind::abs_m_level:
        return "abs_m_level";
    }
    return {};
}

std::string StoppingRule::describe() const { return kind_name() + "(" + format_real(param) + ")"; }

StoppingRule::Kind parse_stop_kind(std::string_view name) {
    if (name == "deterministic") return StoppingRule::Kind::deterministic;
    if (name == "qv_level") return StoppingRule::Kind::qv_level;
    if (name == "abs_m_level") return StoppingRule::Kind::abs_m_level;
    throw std::invalid_argument("unknown stopping kind '" + std::string(name) + "'");
}

std::vector<StoppingRule> build_stop_family(StoppingRule::Kind kind,
                                            const std::vector<double>& params,
                                            const TimeGrid& grid) {
    if (params.empty()) {
        throw std::invalid_argument("build_stop_family: empty family");
    }
    std::vector<StoppingRule> out;
    out.reserve(params.size());
    for (double p : params) {
        if (!std::isfinite(p) || p < 0.0) {
            throw std::invalid_argument("build_stop_family: parameter must be finite and >= 0");
        }
        if (kind == StoppingRule::Kind::deterministic && p > grid.t_end() * (1.0 + 1e-12)) {
            throw std::invalid_argument("build_stop_family: time " + format_real(p) +
                                        " is beyond t_end");
        }
        out.push_back({kind, p});
    }
    return out;
}

}  // namespace stochexp
