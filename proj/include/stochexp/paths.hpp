#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochexp/functions.hpp"
#include "stochexp/montecarlo.hpp"

namespace stochexp {

// Strictly increasing times starting at 0. Non-uniform grids are accepted
// everywhere; operations read spacing from the grid.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    std::span<const double> times() const { return times_; }
    double time(std::size_t i) const { return times_[i]; }
    double t_end() const { return times_.back(); }
    std::size_t n_steps() const { return times_.size() - 1; }
    std::size_t size() const { return times_.size(); }
    double dt(std::size_t i) const { return times_[i + 1] - times_[i]; }

private:
    std::vector<double> times_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

// Uniform grid with spacing t_end / n_steps.
GridPtr make_time_grid(double t_end, long long n_steps);

class BrownianPath {
public:
    BrownianPath(GridPtr grid, std::size_t dim, std::vector<double> values);

    const TimeGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t dim() const { return dim_; }
    // row-major: one row of `dim` values per grid point
    double at(std::size_t i, std::size_t d) const { return values_[i * dim_ + d]; }
    std::span<const double> values() const { return values_; }

private:
    GridPtr grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

// A discretized continuous local martingale M with its quadratic variation.
class MartingalePath {
public:
    // Requires m[0] = 0, qv[0] = 0, qv non-decreasing, sizes matching the grid.
    MartingalePath(GridPtr grid, std::vector<double> m, std::vector<double> qv);

    // Standard Brownian motion component `d` of `b` with the deterministic
    // quadratic variation qv_i = t_i. The path must start at 0.
    static MartingalePath from_brownian(const BrownianPath& b, std::size_t d = 0);

    const TimeGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const double> m() const { return m_; }
    std::span<const double> qv() const { return qv_; }
    std::size_t size() const { return m_.size(); }

private:
    GridPtr grid_;
    std::vector<double> m_;
    std::vector<double> qv_;
};

// The integrand a_s. On (t_i, t_{i+1}] its value is computed from
// t_i, M_{t_i} and <M>_{t_i} only, which keeps discrete integrals predictable.
class PredictableControl {
public:
    enum class Kind { constant, of_time, of_qv, of_state, necessity };

    static PredictableControl constant(double a);
    // Right-continuous step function of time: values[k] on [breaks[k], breaks[k+1]).
    // breaks[0] must be 0.
    static PredictableControl of_time(std::vector<double> breaks, std::vector<double> values);
    static PredictableControl of_qv(FunctionSpec f);     // a = f(<M>_t)
    static PredictableControl of_state(FunctionSpec f);  // a = f(|M_t|)
    // a = 1 + sqrt(f(<M>_t) / 2), the root above 1 of 2 (a - 1)^2 = f(<M>_t).
    static PredictableControl necessity(FunctionSpec f);

    Kind kind() const { return kind_; }
    std::optional<double> constant_value() const;

    // Throws std::invalid_argument if a necessity control meets f < 0.
    double value_at(double t, double m, double qv) const;

    // One value per step: result[i] is the value on (t_i, t_{i+1}].
    std::vector<double> evaluate(const MartingalePath& driver) const;

    std::string describe() const;

private:
    PredictableControl() = default;

    Kind kind_ = Kind::constant;
    double a_ = 0.0;
    std::vector<double> breaks_;
    std::vector<double> values_;
    std::optional<FunctionSpec> f_;
};

// Independent N(0, dt) increments per dimension, started at `start`
// (defaults to the origin when empty).
BrownianPath sample_brownian(const GridPtr& grid, std::size_t dim, RngStream& rng,
                             std::span<const double> start = {});
BrownianPath sample_brownian(const GridPtr& grid, std::size_t dim, SeedSpec seed,
                             std::span<const double> start = {});

// Left-endpoint sums: m_i = sum_{j<i} a_j (M_{j+1} - M_j),
// qv_i = sum_{j<i} a_j^2 (<M>_{j+1} - <M>_j).
// A constant control a scales the driver directly (a = 1 reproduces it bitwise).
MartingalePath ito_integral(const PredictableControl& control, const MartingalePath& driver);
MartingalePath ito_integral(std::span<const double> a, const MartingalePath& driver);

// Running integral of a against d<M>: sum_{j<i} a_j (<M>_{j+1} - <M>_j).
std::vector<double> integrate_qv(std::span<const double> a, const MartingalePath& driver);

// Running sum of squared increments of m.
std::vector<double> quadratic_variation_empirical(const MartingalePath& path);
std::vector<double> quadratic_variation_empirical(std::span<const double> values);

enum class BandMode { near, far };

// Running integral of 1{|1 - a| >= eps} d<M> (far) or 1{|1 - a| < eps} d<M>
// (near). near + far equals <M> at every grid point.
std::vector<double> indicator_qv(const PredictableControl& control, const MartingalePath& driver,
                                 double epsilon, BandMode mode);
std::vector<double> indicator_qv(std::span<const double> a, const MartingalePath& driver,
                                 double epsilon, BandMode mode);

}  // namespace stochexp
