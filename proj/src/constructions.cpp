#include "stochexp/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stochexp/text.hpp"

namespace stochexp {

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
    if (knots_.empty() || knots_.front().first != 0.0) {
        throw std::invalid_argument("PiecewiseLinear: knots must start at x = 0");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i].first > knots_[i - 1].first)) {
            throw std::invalid_argument("PiecewiseLinear: x must be strictly increasing");
        }
        if (knots_[i].second < knots_[i - 1].second) {
            throw std::invalid_argument("PiecewiseLinear: g must be non-decreasing");
        }
    }
}

double PiecewiseLinear::operator()(double x) const {
    if (x <= 0.0 || knots_.size() == 1) {
        return knots_.front().second;
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                     [](double v, const auto& k) { return v < k.first; });
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    if (i == knots_.size()) {
        i = knots_.size() - 1;  // extrapolate along the last segment
    }
    const auto& [x0, g0] = knots_[i - 1];
    const auto& [x1, g1] = knots_[i];
    const double v = g0 + (g1 - g0) * ((x - x0) / (x1 - x0));
    return x <= x1 ? std::min(v, g1) : v;
}

void PiecewiseLinear::write_csv(std::ostream& out) const {
    for (const auto& [x, g] : knots_) {
        out << format_real(x) << ',' << format_real(g) << '\n';
    }
}

FunctionSpec PiecewiseLinear::as_function() const {
    return FunctionSpec::custom([pl = *this](double x) { return pl(x); },
                                "piecewise_linear(" + std::to_string(knots_.size()) + " knots)");
}

// ---------------------------------------------------------------------------

LowerFunctionSpec LowerFunctionSpec::zero() { return LowerFunctionSpec(); }

LowerFunctionSpec LowerFunctionSpec::c_sqrt(double c) {
    if (!(c >= 0.0)) {
        throw std::invalid_argument("c_sqrt lower function: C must be >= 0");
    }
    LowerFunctionSpec s;
    s.kind_ = Kind::c_sqrt;
    s.param_ = c;
    return s;
}

LowerFunctionSpec LowerFunctionSpec::lil() {
    LowerFunctionSpec s;
    s.kind_ = Kind::lil;
    return s;
}

LowerFunctionSpec LowerFunctionSpec::scaled(const LowerFunctionSpec& inner, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("scaled lower function: epsilon must be > 0");
    }
    LowerFunctionSpec s;
    s.kind_ = Kind::scaled;
    s.param_ = epsilon;
    s.inner_ = std::make_shared<const LowerFunctionSpec>(inner);
    return s;
}

LowerFunctionSpec LowerFunctionSpec::parse(std::string_view text) {
    text = trim(text);
    if (text == "zero") return zero();
    if (text == "lil") return lil();
    if (text.starts_with("c_sqrt:")) {
        return c_sqrt(parse_real(text.substr(7), "c_sqrt constant"));
    }
    if (text.starts_with("scaled:")) {
        const auto rest = text.substr(7);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("scaled lower function: expected scaled:EPS:<inner>");
        }
        return scaled(parse(rest.substr(colon + 1)),
                      parse_real(rest.substr(0, colon), "scaled epsilon"));
    }
    throw std::invalid_argument("unknown lower function '" + std::string(text) + "'");
}

double LowerFunctionSpec::operator()(double t) const {
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::c_sqrt:
        return param_ * std::sqrt(std::max(t, 0.0));
    case Kind::lil: {
        constexpr double e = 2.718281828459045;
        if (t <= e) return 0.0;
        return std::sqrt(2.0 * t * std::log(std::log(t)));
    }
    case Kind::scaled:
        return param_ * (*inner_)(t / (param_ * param_));
    }
    return 0.0;
}

std::string LowerFunctionSpec::describe() const {
    switch (kind_) {
    case Kind::zero:
        return "zero";
    case Kind::c_sqrt:
        return "c_sqrt:" + format_real(param_);
    case Kind::lil:
        return "lil";
    case Kind::scaled:
        return "scaled:" + format_real(param_) + ":" + inner_->describe();
    }
    return {};
}

double lower_function_eval(const LowerFunctionSpec& spec, double t) { return spec(t); }

// ---------------------------------------------------------------------------

PiecewiseLinear lemma1_g(const FunctionSpec& f, std::size_t k_max) {
    if (k_max < 1) {
        throw std::invalid_argument("lemma1_g: k_max must be >= 1");
    }
    std::vector<double> fk(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) {
        fk[k] = f(static_cast<double>(k));
        if (!std::isfinite(fk[k]) || fk[k] < 0.0) {
            throw std::invalid_argument("lemma1_g: f(" + std::to_string(k) +
                                        ") is negative or not finite");
        }
        if (k > 0 && fk[k] < fk[k - 1]) {
            throw std::invalid_argument("lemma1_g: f decreases between " + std::to_string(k - 1) +
                                        " and " + std::to_string(k));
        }
    }
    std::vector<std::pair<double, double>> knots;
    knots.reserve(k_max + 1);
    knots.emplace_back(0.0, 0.0);
    double g = std::min(1.0, fk[0]);
    knots.emplace_back(1.0, g);
    for (std::size_t k = 2; k <= k_max; ++k) {
        // g_k <= f(k-1) holds exactly in real arithmetic; the min keeps it
        // true after rounding
        g = std::min(g + std::min(1.0, fk[k - 1] - fk[k - 2]), fk[k - 1]);
        knots.emplace_back(static_cast<double>(k), g);
    }
    return PiecewiseLinear(std::move(knots));
}

FunctionSpec lemma2_f(const FunctionSpec& cdf) {
    constexpr std::size_t probes = 10000;
    double prev = cdf(std::nextafter(0.0, -1.0));
    if (prev < 0.0 || prev > 1.0) {
        throw std::invalid_argument("lemma2_f: cdf out of [0, 1]");
    }
    for (std::size_t i = 0; i <= probes; ++i) {
        const double x = 1e3 * static_cast<double>(i) / probes;
        const double v = cdf(x);
        if (!(v >= prev) || v > 1.0) {
            throw std::invalid_argument("lemma2_f: cdf must be non-decreasing with values in [0, 1]");
        }
        prev = v;
    }
    return FunctionSpec::custom(
        [cdf](double x) {
            const double left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
            const double tail = 1.0 - left;
            if (tail <= 0.0) return std::numeric_limits<double>::infinity();
            return 1.0 / std::sqrt(tail);
        },
        "lemma2(" + cdf.describe() + ")");
}

FunctionSpec lemma2_f(std::span<const double> samples, std::span<const double> weights) {
    if (samples.empty()) {
        throw std::invalid_argument("lemma2_f: empty sample");
    }
    if (!weights.empty() && weights.size() != samples.size()) {
        throw std::invalid_argument("lemma2_f: weights and samples differ in size");
    }
    std::vector<std::pair<double, double>> pts(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(samples[i] >= 0.0) || !std::isfinite(samples[i]) || !(w >= 0.0) ||
            !std::isfinite(w)) {
            throw std::invalid_argument("lemma2_f: samples and weights must be finite and >= 0");
        }
        pts[i] = {samples[i], w};
    }
    std::sort(pts.begin(), pts.end());
    const std::size_t n = pts.size();
    std::vector<double> xs(n);
    // tail[i] = weight of samples at index >= i, summed from the top so the
    // complement 1 - F(x-) never suffers cancellation
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        xs[i] = pts[i].first;
        tail[i] = tail[i + 1] + pts[i].second;
    }
    const double total = tail[0];
    if (!(total > 0.0)) {
        throw std::invalid_argument("lemma2_f: total weight must be > 0");
    }
    return FunctionSpec::custom(
        [xs = std::move(xs), tail = std::move(tail), total](double x) {
            auto idx = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) -
                                                xs.begin());
            if (idx == xs.size()) {
                // beyond the largest sample F = 1; cap at the value there
                idx = static_cast<std::size_t>(
                    std::lower_bound(xs.begin(), xs.end(), xs.back()) - xs.begin());
            }
            return 1.0 / std::sqrt(tail[idx] / total);
        },
        "lemma2_empirical(n=" + std::to_string(n) + ")");
}

LowerFunctionSpec lemma3_scale(const LowerFunctionSpec& phi, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("lemma3_scale: epsilon must be > 0");
    }
    return LowerFunctionSpec::scaled(phi, epsilon);
}

BrownianPath rescale_brownian(const BrownianPath& b, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("rescale_brownian: epsilon must be > 0");
    }
    const double e2 = epsilon * epsilon;
    std::vector<double> times(b.grid().times().begin(), b.grid().times().end());
    for (auto& t : times) t *= e2;
    std::vector<double> values(b.values().begin(), b.values().end());
    for (auto& v : values) v *= epsilon;
    return BrownianPath(std::make_shared<const TimeGrid>(std::move(times)), b.dim(),
                        std::move(values));
}

// ---------------------------------------------------------------------------

double lemma4_quadratic(double x, double delta, double epsilon) {
    return (1.0 - 2.0 * delta) * x * x - 2.0 * x + 1.0 - 2.0 * delta * epsilon;
}

bool lemma4_verify(double delta, double epsilon, double lo, double hi, std::size_t n_points) {
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = n_points < 2 ? lo
                                      : lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(n_points - 1);
        if (x > 1.0 - epsilon && x < 1.0 + epsilon) {
            continue;
        }
        if (lemma4_quadratic(x, delta, epsilon) < -1e-12) {
            return false;
        }
    }
    return true;
}

namespace {

bool roots_inside_band(double delta, double epsilon) {
    const double s = std::sqrt(2.0 * delta * (1.0 + epsilon - 2.0 * delta * epsilon));
    const double lower = (1.0 - s) / (1.0 - 2.0 * delta);
    const double upper = (1.0 + s) / (1.0 - 2.0 * delta);
    return lower >= 1.0 - epsilon && upper <= 1.0 + epsilon;
}

}  // namespace

DeltaResult lemma4_delta(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("lemma4_delta: epsilon must be > 0");
    }
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (roots_inside_band(mid, epsilon)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    constexpr std::size_t n_points = 10000;
    double delta = lo;
    while (delta > 0.0 && !lemma4_verify(delta, epsilon, -10.0, 10.0, n_points)) {
        delta *= 0.5;
    }
    if (!(delta > 0.0)) {
        throw std::runtime_error("lemma4_delta: no positive delta passed verification");
    }
    return {epsilon, delta,
            std::to_string(n_points) + " points on [-10, 10] outside (" +
                format_real(1.0 - epsilon) + ", " + format_real(1.0 + epsilon) + ")"};
}

// ---------------------------------------------------------------------------

LinearBound linear_bound_constants(const LowerFunctionSpec& phi, double delta, double domain_max) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("linear_bound_constants: delta must be > 0");
    }
    if (!(domain_max > 0.0)) {
        throw std::invalid_argument("linear_bound_constants: domain_max must be > 0");
    }
    constexpr std::size_t n = 20000;
    const double h = domain_max / n;
    auto gap = [&](double x) { return phi(x) - delta * x; };
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        v[i] = gap(h * static_cast<double>(i));
    }
    double best = *std::max_element(v.begin(), v.end());
    // refine every local grid maximum with golden-section search on its two cells
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const bool left_ok = i == 0 || v[i] >= v[i - 1];
        const bool right_ok = i == n || v[i] >= v[i + 1];
        if (!left_ok || !right_ok) continue;
        double a = h * static_cast<double>(i == 0 ? 0 : i - 1);
        double b = h * static_cast<double>(i == n ? n : i + 1);
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        for (int it = 0; it < 100 && b - a > 1e-14 * (1.0 + b); ++it) {
            if (gap(c) > gap(d)) {
                b = d;
            } else {
                a = c;
            }
            c = b - inv_phi * (b - a);
            d = a + inv_phi * (b - a);
        }
        best = std::max({best, gap(a), gap(b), gap(0.5 * (a + b))});
    }
    return {delta, std::max(0.0, best), domain_max};
}

}  // namespace stochexp
