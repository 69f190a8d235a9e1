#include "stochexp/functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochexp/text.hpp"

namespace stochexp {

namespace {

void check_table(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw std::invalid_argument("function table: need matching non-empty x and y lists");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw std::invalid_argument("function table: knots must be strictly increasing");
        }
    }
    for (double v : ys) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("function table: non-finite value");
        }
    }
}

std::string table_text(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ';';
        out += format_real(xs[i]) + "/" + format_real(ys[i]);
    }
    return out;
}

}  // namespace

FunctionSpec FunctionSpec::constant(double c) {
    FunctionSpec f;
    f.kind_ = Kind::constant;
    f.p0_ = c;
    return f;
}

FunctionSpec FunctionSpec::power(double p, double scale) {
    FunctionSpec f;
    f.kind_ = Kind::power;
    f.p0_ = p;
    f.p1_ = scale;
    return f;
}

FunctionSpec FunctionSpec::exponential(double rate) {
    FunctionSpec f;
    f.kind_ = Kind::exponential;
    f.p0_ = rate;
    return f;
}

FunctionSpec FunctionSpec::logarithmic() {
    FunctionSpec f;
    f.kind_ = Kind::logarithmic;
    return f;
}

FunctionSpec FunctionSpec::linear_table(std::vector<double> xs, std::vector<double> ys) {
    check_table(xs, ys);
    FunctionSpec f;
    f.kind_ = Kind::linear_table;
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    return f;
}

FunctionSpec FunctionSpec::step_table(std::vector<double> xs, std::vector<double> ys) {
    check_table(xs, ys);
    FunctionSpec f;
    f.kind_ = Kind::step_table;
    f.xs_ = std::move(xs);
    f.ys_ = std::move(ys);
    return f;
}

FunctionSpec FunctionSpec::custom(std::function<double(double)> fn, std::string name) {
    if (!fn) {
        throw std::invalid_argument("custom function: empty callable");
    }
    FunctionSpec f;
    f.kind_ = Kind::custom;
    f.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
    f.name_ = std::move(name);
    return f;
}

FunctionSpec FunctionSpec::scaled(double factor) const {
    FunctionSpec f = *this;
    f.factor_ *= factor;
    f.offset_ *= factor;
    return f;
}

FunctionSpec FunctionSpec::shifted(double offset) const {
    FunctionSpec f = *this;
    f.offset_ += offset;
    return f;
}

double FunctionSpec::base(double x) const {
    switch (kind_) {
    case Kind::constant:
        return p0_;
    case Kind::power:
        return p1_ * std::pow(std::max(x, 0.0), p0_);
    case Kind::exponential:
        return std::exp(p0_ * x);
    case Kind::logarithmic:
        return std::log1p(std::max(x, 0.0));
    case Kind::linear_table: {
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
    }
    case Kind::step_table: {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        if (it == xs_.begin()) return ys_.front();
        return ys_[static_cast<std::size_t>(it - xs_.begin()) - 1];
    }
    case Kind::custom:
        return (*fn_)(x);
    }
    return 0.0;
}

double FunctionSpec::operator()(double x) const {
    const double b = base(x);
    if (factor_ == 1.0 && offset_ == 0.0) {
        return b;
    }
    return factor_ * b + offset_;
}

std::string FunctionSpec::describe() const {
    std::string core;
    switch (kind_) {
    case Kind::constant:
        // fold the affine map into the constant
        return "constant:" + format_real(factor_ * p0_ + offset_);
    case Kind::power: {
        const double scale = factor_ * p1_;
        std::string out = "power:" + format_real(p0_);
        if (scale != 1.0 || offset_ != 0.0) out += ":" + format_real(scale);
        if (offset_ != 0.0) out += ":" + format_real(offset_);
        return out;
    }
    case Kind::exponential:
        core = "exp:" + format_real(p0_);
        break;
    case Kind::logarithmic:
        core = "log";
        break;
    case Kind::linear_table:
        core = "linear:" + table_text(xs_, ys_);
        break;
    case Kind::step_table:
        core = "step:" + table_text(xs_, ys_);
        break;
    case Kind::custom:
        core = name_;
        break;
    }
    if (factor_ != 1.0) {
        core = format_real(factor_) + "*" + core;
    }
    if (offset_ != 0.0) {
        core += (offset_ > 0 ? "+" : "") + format_real(offset_);
    }
    return core;
}

FunctionSpec FunctionSpec::parse(std::string_view text) {
    text = trim(text);
    const auto parts = split(text, ':');
    const std::string& kind = parts.front();
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (parts.size() < lo || parts.size() > hi) {
            throw std::invalid_argument("function '" + std::string(text) +
                                        "': wrong number of parameters");
        }
    };
    if (kind == "constant") {
        need(2, 2);
        return constant(parse_real(parts[1], "constant"));
    }
    if (kind == "power") {
        need(2, 4);
        const double p = parse_real(parts[1], "power exponent");
        const double scale = parts.size() > 2 ? parse_real(parts[2], "power scale") : 1.0;
        FunctionSpec f = power(p, scale);
        if (parts.size() > 3) {
            f = f.shifted(parse_real(parts[3], "power offset"));
        }
        return f;
    }
    if (kind == "exp") {
        need(2, 2);
        return exponential(parse_real(parts[1], "exp rate"));
    }
    if (kind == "log") {
        need(1, 1);
        return logarithmic();
    }
    if (kind == "linear" || kind == "step") {
        need(2, 2);
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& knot : split(parts[1], ';')) {
            const auto xy = split(knot, '/');
            if (xy.size() != 2) {
                throw std::invalid_argument("function table knot '" + knot + "': expected X/Y");
            }
            xs.push_back(parse_real(xy[0], "table x"));
            ys.push_back(parse_real(xy[1], "table y"));
        }
        return kind == "linear" ? linear_table(std::move(xs), std::move(ys))
                                : step_table(std::move(xs), std::move(ys));
    }
    throw std::invalid_argument("unknown function kind '" + kind + "'");
}

bool non_decreasing_on(const FunctionSpec& f, double lo, double hi, std::size_t n) {
    double prev = f(lo);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double v = f(x);
        if (v < prev) {
            return false;
        }
        prev = v;
    }
    return true;
}

double sampled_min(const FunctionSpec& f, double lo, double hi, std::size_t n) {
    double best = f(lo);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        best = std::min(best, f(x));
    }
    return best;
}

}  // namespace stochexp
