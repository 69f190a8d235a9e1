#include "stochexp/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochexp/text.hpp"

namespace stochexp {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) {
        throw std::invalid_argument("time grid: need at least two points");
    }
    if (times_.front() != 0.0) {
        throw std::invalid_argument("time grid: must start at 0");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]) || !std::isfinite(times_[i])) {
            throw std::invalid_argument("time grid: times must be finite and strictly increasing");
        }
    }
}

GridPtr make_time_grid(double t_end, long long n_steps) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("make_time_grid: t_end must be positive");
    }
    if (n_steps < 1) {
        throw std::invalid_argument("make_time_grid: n_steps must be >= 1");
    }
    std::vector<double> times(static_cast<std::size_t>(n_steps) + 1);
    const double n = static_cast<double>(n_steps);
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = t_end * (static_cast<double>(i) / n);
    }
    times.back() = t_end;
    return std::make_shared<const TimeGrid>(std::move(times));
}

// ---------------------------------------------------------------------------

BrownianPath::BrownianPath(GridPtr grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
    if (!grid_ || dim_ == 0 || values_.size() != grid_->size() * dim_) {
        throw std::invalid_argument("BrownianPath: shape does not match grid and dimension");
    }
}

MartingalePath::MartingalePath(GridPtr grid, std::vector<double> m, std::vector<double> qv)
    : grid_(std::move(grid)), m_(std::move(m)), qv_(std::move(qv)) {
    if (!grid_ || m_.size() != grid_->size() || qv_.size() != grid_->size()) {
        throw std::invalid_argument("MartingalePath: values do not match the grid");
    }
    if (m_.front() != 0.0 || qv_.front() != 0.0) {
        throw std::invalid_argument("MartingalePath: must start at M_0 = 0, <M>_0 = 0");
    }
    for (std::size_t i = 1; i < qv_.size(); ++i) {
        if (qv_[i] < qv_[i - 1]) {
            throw std::invalid_argument("MartingalePath: quadratic variation decreases");
        }
    }
}

MartingalePath MartingalePath::from_brownian(const BrownianPath& b, std::size_t d) {
    if (d >= b.dim()) {
        throw std::invalid_argument("from_brownian: dimension out of range");
    }
    const std::size_t n = b.grid().size();
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = b.at(i, d);
    }
    const auto times = b.grid().times();
    return MartingalePath(b.grid_ptr(), std::move(m), std::vector<double>(times.begin(), times.end()));
}

// ---------------------------------------------------------------------------

PredictableControl PredictableControl::constant(double a) {
    PredictableControl c;
    c.kind_ = Kind::constant;
    c.a_ = a;
    return c;
}

PredictableControl PredictableControl::of_time(std::vector<double> breaks,
                                               std::vector<double> values) {
    if (breaks.empty() || breaks.size() != values.size() || breaks.front() != 0.0) {
        throw std::invalid_argument("of_time control: breaks must start at 0 and match values");
    }
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        if (!(breaks[i] > breaks[i - 1])) {
            throw std::invalid_argument("of_time control: breaks must be strictly increasing");
        }
    }
    PredictableControl c;
    c.kind_ = Kind::of_time;
    c.breaks_ = std::move(breaks);
    c.values_ = std::move(values);
    return c;
}

PredictableControl PredictableControl::of_qv(FunctionSpec f) {
    PredictableControl c;
    c.kind_ = Kind::of_qv;
    c.f_ = std::move(f);
    return c;
}

PredictableControl PredictableControl::of_state(FunctionSpec f) {
    PredictableControl c;
    c.kind_ = Kind::of_state;
    c.f_ = std::move(f);
    return c;
}

PredictableControl PredictableControl::necessity(FunctionSpec f) {
    if (f.is_constant() && f(0.0) < 0.0) {
        throw std::invalid_argument("necessity control: f must be >= 0");
    }
    if (sampled_min(f, 0.0, 100.0) < 0.0) {
        throw std::invalid_argument("necessity control: f takes negative values on [0, 100]");
    }
    PredictableControl c;
    c.kind_ = Kind::necessity;
    c.f_ = std::move(f);
    return c;
}

std::optional<double> PredictableControl::constant_value() const {
    if (kind_ == Kind::constant) {
        return a_;
    }
    return std::nullopt;
}

double PredictableControl::value_at(double t, double m, double qv) const {
    switch (kind_) {
    case Kind::constant:
        return a_;
    case Kind::of_time: {
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
    }
    case Kind::of_qv:
        return (*f_)(qv);
    case Kind::of_state:
        return (*f_)(std::fabs(m));
    case Kind::necessity: {
        const double v = (*f_)(qv);
        if (v < 0.0) {
            throw std::invalid_argument("necessity control: f(" + format_real(qv) +
                                        ") is negative");
        }
        return 1.0 + std::sqrt(v / 2.0);
    }
    }
    return 0.0;
}

std::vector<double> PredictableControl::evaluate(const MartingalePath& driver) const {
    const std::size_t n = driver.size() - 1;
    std::vector<double> a(n);
    const auto t = driver.grid().times();
    const auto m = driver.m();
    const auto qv = driver.qv();
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = value_at(t[i], m[i], qv[i]);
    }
    return a;
}

std::string PredictableControl::describe() const {
    switch (kind_) {
    case Kind::constant:
        return "constant:" + format_real(a_);
    case Kind::of_time: {
        std::string out = "time:";
        for (std::size_t i = 0; i < breaks_.size(); ++i) {
            if (i) out += ';';
            out += format_real(breaks_[i]) + "/" + format_real(values_[i]);
        }
        return out;
    }
    case Kind::of_qv:
        return "qv:" + f_->describe();
    case Kind::of_state:
        return "state:" + f_->describe();
    case Kind::necessity:
        return "necessity:" + f_->describe();
    }
    return {};
}

// ---------------------------------------------------------------------------

BrownianPath sample_brownian(const GridPtr& grid, std::size_t dim, RngStream& rng,
                             std::span<const double> start) {
    if (dim == 0) {
        throw std::invalid_argument("sample_brownian: dim must be >= 1");
    }
    if (!start.empty() && start.size() != dim) {
        throw std::invalid_argument("sample_brownian: start point has the wrong dimension");
    }
    const std::size_t n = grid->size();
    std::vector<double> values(n * dim);
    for (std::size_t d = 0; d < dim; ++d) {
        values[d] = start.empty() ? 0.0 : start[d];
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double sd = std::sqrt(grid->dt(i - 1));
        for (std::size_t d = 0; d < dim; ++d) {
            values[i * dim + d] = values[(i - 1) * dim + d] + sd * rng.normal();
        }
    }
    return BrownianPath(grid, dim, std::move(values));
}

BrownianPath sample_brownian(const GridPtr& grid, std::size_t dim, SeedSpec seed,
                             std::span<const double> start) {
    RngStream rng(seed);
    return sample_brownian(grid, dim, rng, start);
}

MartingalePath ito_integral(const PredictableControl& control, const MartingalePath& driver) {
    if (auto c = control.constant_value()) {
        const double a = *c;
        if (a == 1.0) {
            return driver;
        }
        std::vector<double> m(driver.m().begin(), driver.m().end());
        std::vector<double> qv(driver.qv().begin(), driver.qv().end());
        for (auto& v : m) v *= a;
        for (auto& v : qv) v *= a * a;
        return MartingalePath(driver.grid_ptr(), std::move(m), std::move(qv));
    }
    const auto a = control.evaluate(driver);
    return ito_integral(std::span<const double>(a), driver);
}

MartingalePath ito_integral(std::span<const double> a, const MartingalePath& driver) {
    const std::size_t n = driver.size();
    if (a.size() + 1 != n) {
        throw std::invalid_argument("ito_integral: control length does not match the grid");
    }
    const auto dm = driver.m();
    const auto dq = driver.qv();
    std::vector<double> m(n, 0.0);
    std::vector<double> qv(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        m[j + 1] = m[j] + a[j] * (dm[j + 1] - dm[j]);
        qv[j + 1] = qv[j] + a[j] * a[j] * (dq[j + 1] - dq[j]);
    }
    return MartingalePath(driver.grid_ptr(), std::move(m), std::move(qv));
}

std::vector<double> integrate_qv(std::span<const double> a, const MartingalePath& driver) {
    const std::size_t n = driver.size();
    if (a.size() + 1 != n) {
        throw std::invalid_argument("integrate_qv: control length does not match the grid");
    }
    const auto dq = driver.qv();
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        out[j + 1] = out[j] + a[j] * (dq[j + 1] - dq[j]);
    }
    return out;
}

std::vector<double> quadratic_variation_empirical(std::span<const double> values) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        out[i] = out[i - 1] + d * d;
    }
    return out;
}

std::vector<double> quadratic_variation_empirical(const MartingalePath& path) {
    return quadratic_variation_empirical(path.m());
}

std::vector<double> indicator_qv(std::span<const double> a, const MartingalePath& driver,
                                 double epsilon, BandMode mode) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("indicator_qv: epsilon must be > 0");
    }
    const std::size_t n = driver.size();
    if (a.size() + 1 != n) {
        throw std::invalid_argument("indicator_qv: control length does not match the grid");
    }
    const auto qv = driver.qv();
    // far is accumulated; while every step so far is far it is <M> itself,
    // and near is always the complement, so near + far = <M>.
    std::vector<double> far(n, 0.0);
    bool all_far = true;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const bool is_far = std::fabs(1.0 - a[j]) >= epsilon;
        all_far = all_far && is_far;
        if (all_far) {
            far[j + 1] = qv[j + 1];
        } else {
            far[j + 1] = far[j] + (is_far ? qv[j + 1] - qv[j] : 0.0);
        }
    }
    if (mode == BandMode::far) {
        return far;
    }
    std::vector<double> near(n);
    for (std::size_t i = 0; i < n; ++i) {
        near[i] = std::max(0.0, qv[i] - far[i]);
    }
    return near;
}

std::vector<double> indicator_qv(const PredictableControl& control, const MartingalePath& driver,
                                 double epsilon, BandMode mode) {
    const auto a = control.evaluate(driver);
    return indicator_qv(std::span<const double>(a), driver, epsilon, mode);
}

}  // namespace stochexp
