#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace stochexp {

// A real function on [0, inf) used for f, g, h and F in the criteria and the
// constructions. Arguments below 0 are clamped to 0 for the power and
// logarithmic kinds; tables extrapolate flat.
//
// Every kind carries an outer affine map x -> factor * base(x) + offset so
// that f/2 or x + 1 stay in the named-kind family (and keep a textual form).
class FunctionSpec {
public:
    enum class Kind { constant, power, exponential, logarithmic, linear_table, step_table, custom };

    static FunctionSpec constant(double c);
    static FunctionSpec power(double p, double scale = 1.0);  // scale * x^p
    static FunctionSpec exponential(double rate);             // e^{rate x}
    static FunctionSpec logarithmic();                        // log(1 + x)
    // Piecewise-linear interpolation through (xs[i], ys[i]); xs strictly increasing.
    static FunctionSpec linear_table(std::vector<double> xs, std::vector<double> ys);
    // Right-continuous step function: ys[i] on [xs[i], xs[i+1]).
    static FunctionSpec step_table(std::vector<double> xs, std::vector<double> ys);
    static FunctionSpec custom(std::function<double(double)> fn, std::string name);

    // Parses the textual form produced by describe() for named kinds:
    //   constant:C | power:P[:SCALE[:OFFSET]] | exp:RATE | log
    //   linear:X/Y;X/Y;... | step:X/Y;X/Y;...
    // Throws std::invalid_argument on malformed input.
    static FunctionSpec parse(std::string_view text);

    FunctionSpec scaled(double factor) const;
    FunctionSpec shifted(double offset) const;

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    std::string describe() const;

private:
    FunctionSpec() = default;
    double base(double x) const;

    Kind kind_ = Kind::constant;
    double p0_ = 0.0;
    double p1_ = 0.0;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::shared_ptr<const std::function<double(double)>> fn_;
    std::string name_;
    double factor_ = 1.0;
    double offset_ = 0.0;
};

// True when f sampled on n+1 evenly spaced points of [lo, hi] never decreases.
bool non_decreasing_on(const FunctionSpec& f, double lo, double hi, std::size_t n = 1000);

// Minimum of f sampled on n+1 evenly spaced points of [lo, hi].
double sampled_min(const FunctionSpec& f, double lo, double hi, std::size_t n = 1000);

}  // namespace stochexp
