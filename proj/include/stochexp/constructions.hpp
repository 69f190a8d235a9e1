#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochexp/functions.hpp"
#include "stochexp/paths.hpp"

namespace stochexp {

// Continuous piecewise-linear function through knots (x_k, g_k), x strictly
// increasing from 0 and g non-decreasing. Beyond the last knot it continues
// with the slope of the last segment.
class PiecewiseLinear {
public:
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots);

    double operator()(double x) const;
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    // "x,g" per line, no header.
    void write_csv(std::ostream& out) const;

    FunctionSpec as_function() const;

private:
    std::vector<std::pair<double, double>> knots_;
};

// Non-decreasing lower functions on [0, inf).
//   zero           0
//   c_sqrt(C)      C sqrt(t)
//   lil            sqrt(2 t log log t) for t > e, 0 on [0, e]
//   scaled(phi, e) e * phi(t / e^2)
class LowerFunctionSpec {
public:
    enum class Kind { zero, c_sqrt, lil, scaled };

    static LowerFunctionSpec zero();
    static LowerFunctionSpec c_sqrt(double c);
    static LowerFunctionSpec lil();
    static LowerFunctionSpec scaled(const LowerFunctionSpec& inner, double epsilon);

    // zero | c_sqrt:C | lil | scaled:EPS:<inner>
    static LowerFunctionSpec parse(std::string_view text);

    Kind kind() const { return kind_; }
    double operator()(double t) const;
    std::string describe() const;

private:
    LowerFunctionSpec() = default;

    Kind kind_ = Kind::zero;
    double param_ = 0.0;
    std::shared_ptr<const LowerFunctionSpec> inner_;
};

double lower_function_eval(const LowerFunctionSpec& spec, double t);

// Lemma 1 surgery. Knots (k, g_k) for k = 0..k_max with
//   g_0 = 0, g_1 = min(1, f(0)), g_k = g_{k-1} + min(1, f(k-1) - f(k-2)),
// i.e. each unit step adds the jump of F(x) = f(floor x) at k-1, clipped at 1.
// Then g_k <= f(k-1), so g <= f, g has slope <= 1 and g(x+y) <= g(x) + y + 2.
// Throws std::invalid_argument if a sample f(k) is negative, non-finite or
// smaller than its predecessor. Whether f -> infinity is the caller's claim;
// it cannot be checked from finitely many values.
PiecewiseLinear lemma1_g(const FunctionSpec& f, std::size_t k_max);

// Lemma 2: f(x) = 1 / sqrt(1 - F(x-)) for a distribution function F.
// Where F(x-) reaches 1 the value is infinite.
FunctionSpec lemma2_f(const FunctionSpec& cdf);

// Empirical version with the left-continuous empirical CDF
// F(x-) = (total weight of samples < x) / (total weight). Equal weights when
// `weights` is empty. f is capped at its value at the largest sample, beyond
// which F = 1. Throws std::invalid_argument on empty input, negative samples
// or weights, or zero total weight.
FunctionSpec lemma2_f(std::span<const double> samples, std::span<const double> weights = {});

// Lemma 3: the lower function x -> epsilon * phi(x / epsilon^2).
// Throws std::invalid_argument when epsilon <= 0.
LowerFunctionSpec lemma3_scale(const LowerFunctionSpec& phi, double epsilon);

// W_t = epsilon * B_{t / epsilon^2}: the path on the grid t_i = epsilon^2 s_i.
BrownianPath rescale_brownian(const BrownianPath& b, double epsilon);

struct DeltaResult {
    double epsilon = 0.0;
    double delta = 0.0;
    std::string verified_on;
};

// (1 - 2 delta) x^2 - 2x + 1 - 2 delta epsilon, which is >= 0 exactly when
// delta x^2 + delta epsilon <= (x - 1)^2 / 2.
double lemma4_quadratic(double x, double delta, double epsilon);

// True when the quadratic is >= -1e-12 on `n_points` evenly spaced points of
// [lo, hi] outside the open band (1 - epsilon, 1 + epsilon).
bool lemma4_verify(double delta, double epsilon, double lo = -10.0, double hi = 10.0,
                   std::size_t n_points = 10000);

// Largest delta in (0, 1/2) (to 1e-6) whose quadratic roots
// (1 +- sqrt(2 delta (1 + eps - 2 delta eps))) / (1 - 2 delta) lie in
// [1 - eps, 1 + eps], found by bisection and verified on a 10^4-point grid.
// Throws std::invalid_argument when epsilon <= 0.
DeltaResult lemma4_delta(double epsilon);

struct LinearBound {
    double delta = 0.0;
    double c_delta = 0.0;
    double domain_max = 0.0;
};

// C_delta = max over [0, domain_max] of phi(x) - delta x, floored at 0, so
// that phi(x) <= delta x + C_delta there. Grid search refined by golden
// section around the best cell.
LinearBound linear_bound_constants(const LowerFunctionSpec& phi, double delta,
                                   double domain_max = 1e4);

}  // namespace stochexp
