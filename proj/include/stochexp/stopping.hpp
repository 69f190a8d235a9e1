#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "stochexp/paths.hpp"

namespace stochexp {

// A member of the finite family standing in for "all stopping times <= T".
// Resolution: the first grid point where the condition holds, else t_end.
// The decision at step i only looks at the path up to step i.
struct StoppingRule {
    enum class Kind { deterministic, qv_level, abs_m_level };

    Kind kind = Kind::deterministic;
    double param = 0.0;

    static StoppingRule at_time(double t) { return {Kind::deterministic, t}; }
    static StoppingRule qv_level(double level) { return {Kind::qv_level, level}; }
    static StoppingRule abs_m_level(double level) { return {Kind::abs_m_level, level}; }

    // Grid index of the stop on this path.
    std::size_t resolve(const MartingalePath& path) const;

    std::string kind_name() const;
    std::string describe() const;
};

StoppingRule::Kind parse_stop_kind(std::string_view name);

// One rule per parameter. Deterministic times must lie in [0, t_end] of the
// grid; levels must be >= 0. Throws std::invalid_argument on an empty family.
std::vector<StoppingRule> build_stop_family(StoppingRule::Kind kind,
                                            const std::vector<double>& params,
                                            const TimeGrid& grid);

}  // namespace stochexp
