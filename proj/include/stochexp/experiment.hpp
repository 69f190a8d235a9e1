#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochexp/constructions.hpp"
#include "stochexp/functions.hpp"
#include "stochexp/gallery.hpp"
#include "stochexp/paths.hpp"
#include "stochexp/report.hpp"
#include "stochexp/stopping.hpp"

namespace stochexp {

// Invalid or missing configuration entry; field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline constexpr const char* kCsvHeader =
    "experiment,process,criterion,stop_kind,stop_param,mean,stderr,ci_lo,ci_hi,n_paths,n_steps,"
    "t_end,seed,nonfinite_count,max_sample";

// One experiment: a gallery process, a criterion and a stopping family.
// Text form is one key=value per line with dotted keys; '#' starts a comment.
//
//   experiment=novikov_bm
//   process=bm                      # bm | scaled_bm | controlled | bes3_inverse | stopped_bm
//   process.sigma=2                 # scaled_bm
//   process.r0=1                    # bes3_inverse
//   process.control=constant:0.5    # controlled
//   process.stop=qv_level:0.5       # stopped_bm
//   criterion=theorem2              # see list_catalog()
//   criterion.a=0.5                 # mixed
//   criterion.control=constant:0.5  # theorem1, theorem2
//   criterion.epsilon=0.5           # theorem2
//   criterion.phi=c_sqrt:1          # theorem2
//   criterion.f=constant:1          # theorem2
//   criterion.h=power:1:0.5         # ruf
//   stops.deterministic=0.5,1       # any of the three stops.* keys, at least one
//   stops.qv_level=0.5
//   stops.abs_m_level=1,2
//   n_paths=10000
//   n_steps=100
//   t_end=1
//   seed=42
//   workers=4                       # optional, default 1
//   output=results.csv              # optional, default <experiment>.csv
struct ExperimentConfig {
    std::string experiment = "experiment";
    std::string process;
    double sigma = 1.0;
    double r0 = 1.0;
    std::optional<PredictableControl> process_control;
    std::optional<StoppingRule> process_stop;

    std::string criterion;
    double a = 0.0;
    std::optional<PredictableControl> control;
    double epsilon = 0.0;
    std::optional<LowerFunctionSpec> phi;
    std::optional<FunctionSpec> f;
    std::optional<FunctionSpec> h;

    std::vector<double> stops_deterministic;
    std::vector<double> stops_qv_level;
    std::vector<double> stops_abs_m_level;

    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double t_end = 0.0;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string output;

    // Throws ConfigError naming the field.
    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    ProcessSpec process_spec() const;
    std::vector<StoppingRule> stops(const TimeGrid& grid) const;
    std::string criterion_description() const;
};

PredictableControl parse_control(std::string_view text);
StoppingRule parse_stop(std::string_view text);  // KIND:PARAM

struct ExperimentOutcome {
    CriterionReport report;
    std::string csv;
    int exit_code = 0;  // 0 ok, 3 unstable (non-finite samples)
};

// Evaluates the configured criterion; no files are touched.
ExperimentOutcome execute_experiment(const ExperimentConfig& config);

// Evaluates, writes the CSV to config.output and a summary to `summary`.
// Returns 0 on success, 3 when any estimate had non-finite samples.
int run_experiment(const ExperimentConfig& config, std::ostream& summary);

std::string list_catalog();

}  // namespace stochexp
