#include "stochexp/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>

#include "stochexp/constructions.hpp"
#include "stochexp/criteria.hpp"
#include "stochexp/exponentials.hpp"
#include "stochexp/experiment.hpp"
#include "stochexp/gallery.hpp"
#include "stochexp/text.hpp"

namespace stochexp {

namespace oracle {

double bes3_inverse_mean(double r0, double t) {
    // r0 / r times the noncentral chi(3) density of R_t
    const double s = std::sqrt(t);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
    auto integrand = [&](double r) {
        return norm * (std::exp(-(r - r0) * (r - r0) / (2.0 * t)) -
                       std::exp(-(r + r0) * (r + r0) / (2.0 * t)));
    };
    const double hi = r0 + 12.0 * s;
    constexpr int n = 20000;
    const double h = hi / n;
    double sum = integrand(0.0) + integrand(hi);
    for (int i = 1; i < n; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(h * i);
    }
    return sum * h / 3.0;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace oracle

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

struct Check {
    bool passed = true;
    std::string detail;
};

Check exponential_mass(unsigned workers) {
    const auto grid = make_time_grid(1.0, 1000);
    const auto spec = ProcessSpec::bm(grid);
    const auto r = estimate(
        [&](std::uint64_t, RngStream& rng) { return sample_process(spec, rng).terminal_exponential(); },
        100000, 101, workers);
    Check c;
    c.passed = std::abs(r.mean - 1.0) <= 3.0 * r.std_error && r.std_error < 0.02;
    c.detail = "mean=" + fmt(r.mean) + " stderr=" + fmt(r.std_error);
    return c;
}

Check strict_local_martingale(unsigned workers) {
    const auto grid = make_time_grid(1.0, 1);
    const auto spec = ProcessSpec::bes3_inverse(grid, 1.0);
    const double reference = oracle::bes3_inverse_mean(1.0, 1.0);
    const auto r = estimate(
        [&](std::uint64_t, RngStream& rng) { return sample_process(spec, rng).terminal_exponential(); },
        100000, 202, workers);
    Check c;
    c.passed = std::abs(r.mean - reference) <= 3.0 * r.std_error &&
               1.0 - r.mean > 10.0 * r.std_error;
    c.detail = "mean=" + fmt(r.mean) + " oracle=" + fmt(reference) + " stderr=" + fmt(r.std_error);
    return c;
}

Check novikov_exactness(unsigned workers) {
    const auto grid = make_time_grid(2.0, 1000);
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const auto stops = build_stop_family(StoppingRule::Kind::deterministic, ts, *grid);
    const auto report = novikov_functional(ProcessSpec::bm(grid), stops, {1000, 303, workers});
    Check c;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& e = report.per_stop[i].estimate;
        const double expected = std::exp(ts[i] / 2.0);
        const double rel = std::abs(e.mean - expected) / expected;
        if (!(rel <= 1e-12) || e.std_error != 0.0) c.passed = false;
        c.detail += "t=" + fmt(ts[i]) + " rel=" + fmt(rel) + " stderr=" + fmt(e.std_error) + " ";
    }
    return c;
}

Check kazamaki_estimate(unsigned workers) {
    const auto grid = make_time_grid(1.0, 100);
    const auto stops = build_stop_family(StoppingRule::Kind::deterministic, {1.0}, *grid);
    const auto report = kazamaki_functional(ProcessSpec::bm(grid), stops, {100000, 404, workers});
    const auto& e = report.per_stop.front().estimate;
    const double expected = std::exp(0.125);
    Check c;
    c.passed = std::abs(e.mean - expected) <= 3.0 * e.std_error;
    c.detail = "mean=" + fmt(e.mean) + " expected=" + fmt(expected) + " stderr=" + fmt(e.std_error);
    return c;
}

double max_exp_deviation(const std::vector<double>& x, const std::vector<double>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(std::exp(x[i]) - std::exp(y[i]));
        worst = std::max(worst, std::isnan(d) ? INFINITY : d);
    }
    return worst;
}

Check reduction_identities() {
    const auto grid = make_time_grid(1.0, 200);
    const std::vector<ProcessSpec> processes{
        ProcessSpec::bm(grid),
        ProcessSpec::controlled(grid, PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/1.5")))};
    const auto f = FunctionSpec::parse("power:1:0.5").shifted(0.1);
    const auto phi = LowerFunctionSpec::zero();
    const auto unit = PredictableControl::constant(1.0);

    double d_novikov = 0.0;
    double d_kazamaki = 0.0;
    double d_theorem1 = 0.0;
    double d_theorem2 = 0.0;
    for (const auto& process : processes) {
        for (std::uint64_t rep = 0; rep < 1000; ++rep) {
            RngStream rng({505, rep});
            const auto s = sample_process(process, rng);
            const auto& p = s.path;
            d_novikov = std::max(d_novikov, max_exp_deviation(log_payoff::mixed(p, 0.0),
                                                              log_payoff::novikov(p)));
            d_kazamaki = std::max(d_kazamaki, max_exp_deviation(log_payoff::mixed(p, 0.5),
                                                                log_payoff::kazamaki(p)));
            for (double a : {-0.5, 0.25, 0.5, 0.75, 1.5}) {
                const auto mixed = log_payoff::mixed(p, a);
                d_theorem1 = std::max(
                    d_theorem1,
                    max_exp_deviation(log_payoff::theorem1(p, PredictableControl::constant(a)), mixed));
                d_theorem1 = std::max(
                    d_theorem1,
                    max_exp_deviation(
                        log_payoff::theorem1(p, PredictableControl::of_time({0.0, 0.5}, {a, a})), mixed));
            }
            d_theorem2 = std::max(d_theorem2,
                                  max_exp_deviation(log_payoff::theorem2(p, unit, 0.5, phi, f),
                                                    log_payoff::ruf(p, f)));
        }
    }
    Check c;
    const double worst = std::max({d_novikov, d_kazamaki, d_theorem1, d_theorem2});
    c.passed = worst < 1e-12;
    c.detail = "novikov=" + fmt(d_novikov) + " kazamaki=" + fmt(d_kazamaki) +
               " theorem1=" + fmt(d_theorem1) + " theorem2/ruf=" + fmt(d_theorem2);
    return c;
}

Check girsanov_identity() {
    const auto grid = make_time_grid(1.0, 200);
    const auto spec = ProcessSpec::bm(grid);
    double worst = 0.0;
    for (double a : {0.0, 0.5, 2.0}) {
        const auto control = PredictableControl::constant(a);
        const auto complement = PredictableControl::constant(1.0 - a);
        for (std::uint64_t rep = 0; rep < 1000; ++rep) {
            RngStream rng({606, rep});
            const auto s = sample_process(spec, rng);
            const auto density = stochastic_exponential(ito_integral(control, s.path)).back();
            const auto n_tilde = girsanov_drift_adjust(ito_integral(complement, s.path), control, s.path);
            const auto tilde_exp = stochastic_exponential(n_tilde).back();
            const double target = s.terminal_exponential();
            const double rel = std::abs(density * tilde_exp - target) / target;
            worst = std::max(worst, std::isnan(rel) ? INFINITY : rel);
        }
    }
    return {worst < 1e-10, "max relative deviation=" + fmt(worst)};
}

FunctionSpec random_monotone(RngStream& rng, std::size_t k_max) {
    std::vector<double> xs{0.0};
    std::vector<double> ys{2.0 * rng.uniform()};
    while (xs.back() < static_cast<double>(k_max) + 1.0) {
        xs.push_back(xs.back() + 0.1 + 3.0 * rng.uniform());
        const double jump = rng.uniform() < 0.3 ? 5.0 * rng.uniform() : 0.5 * rng.uniform();
        ys.push_back(ys.back() + jump);
    }
    if (rng.uniform() < 0.5) {
        return FunctionSpec::step_table(std::move(xs), std::move(ys));
    }
    return FunctionSpec::linear_table(std::move(xs), std::move(ys));
}

Check lemma1_suite() {
    constexpr std::size_t k_max = 40;
    std::size_t violations_a = 0;
    std::size_t violations_c = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        RngStream rng({707, trial});
        const auto f = random_monotone(rng, k_max);
        const auto g = lemma1_g(f, k_max);
        std::vector<double> points;
        for (std::size_t k = 0; k <= k_max; ++k) {
            points.push_back(static_cast<double>(k));
            if (k < k_max) points.push_back(k + 0.5);
        }
        for (int i = 0; i < 100; ++i) points.push_back(k_max * rng.uniform());
        for (double x : points) {
            if (g(x) > f(x)) ++violations_a;
        }
        for (int i = 0; i < 100; ++i) {
            const double x = 0.5 * k_max * i / 99.0;
            for (int j = 0; j < 100; ++j) {
                const double y = 0.5 * k_max * j / 99.0;
                if (g(x + y) > g(x) + y + 2.0) ++violations_c;
            }
        }
    }

    double hand = 0.0;
    const auto linear = lemma1_g(FunctionSpec::power(1.0).shifted(1.0), 50);
    const auto exponential = lemma1_g(FunctionSpec::exponential(1.0), 50);
    const auto logarithmic = lemma1_g(FunctionSpec::logarithmic(), 50);
    for (std::size_t k = 0; k <= 50; ++k) {
        const double x = static_cast<double>(k);
        hand = std::max(hand, std::abs(linear(x) - x));
        hand = std::max(hand, std::abs(exponential(x) - x));
        hand = std::max(hand, std::abs(logarithmic(x) - (k == 0 ? 0.0 : std::log(x))));
    }
    Check c;
    c.passed = violations_a == 0 && violations_c == 0 && hand <= 1e-12;
    c.detail = "violations(a)=" + std::to_string(violations_a) +
               " violations(c)=" + std::to_string(violations_c) + " hand examples dev=" + fmt(hand);
    return c;
}

Check lemma2_suite() {
    const auto uniform_cdf = FunctionSpec::linear_table({0.0, 1.0}, {0.0, 1.0});
    const auto f = lemma2_f(uniform_cdf);
    const double mean = oracle::uniform_expectation_sqrt_singular([&](double x) { return f(x); });
    const double rel = std::abs(mean - 2.0) / 2.0;

    std::size_t violations = 0;
    double worst_margin = -INFINITY;
    for (std::uint64_t trial = 0; trial < 500; ++trial) {
        RngStream rng({808, trial});
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 300);
        const double atom = trial % 3 == 0 ? 0.5 * rng.uniform() : 0.0;
        const bool weighted = trial % 2 == 1;
        std::vector<double> xs(n);
        std::vector<double> ws;
        for (auto& x : xs) {
            // coarse values so that ties occur
            x = rng.uniform() < atom ? 0.0 : 0.1 + std::floor(100.0 * rng.uniform() * rng.uniform()) / 10.0;
            if (weighted) ws.push_back(0.01 + rng.uniform());
        }
        const auto fe = lemma2_f(xs, ws);
        double total = 0.0;
        double at_zero = 0.0;
        double mean_positive = 0.0;
        double mean_all = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = weighted ? ws[i] : 1.0;
            total += w;
            if (xs[i] == 0.0) at_zero += w;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double w = (weighted ? ws[i] : 1.0) / total;
            mean_all += w * fe(xs[i]);
            if (xs[i] > 0.0) mean_positive += w * fe(xs[i]);
        }
        // F(0) = weight at zero; F(0-) = 0
        const double bound_positive = 2.0 * std::sqrt(std::max(0.0, 1.0 - at_zero / total));
        worst_margin = std::max({worst_margin, mean_positive - bound_positive, mean_all - 2.0});
        if (mean_positive > bound_positive + 1e-9 || mean_all > 2.0 + 1e-9) ++violations;
    }
    Check c;
    c.passed = rel <= 1e-6 && violations == 0;
    c.detail = "uniform E f=" + fmt(mean) + " rel=" + fmt(rel) +
               " empirical violations=" + std::to_string(violations) +
               " worst margin=" + fmt(worst_margin);
    return c;
}

Check lemma4_suite() {
    Check c;
    for (double eps : {1.0, 0.5, 0.25}) {
        const auto r = lemma4_delta(eps);
        const bool ok = r.delta > 0.0 && lemma4_verify(r.delta, eps);
        c.passed = c.passed && ok;
        c.detail += "eps=" + fmt(eps) + " delta=" + fmt(r.delta) + (ok ? " ok; " : " FAILED; ");
    }
    const bool hand = lemma4_verify(0.1, 1.0) && std::abs(lemma4_quadratic(0.5, 0.1, 1.0)) < 1e-12 &&
                      std::abs(lemma4_quadratic(2.0, 0.1, 1.0)) < 1e-12;
    c.passed = c.passed && hand;
    c.detail += std::string("delta=0.1 at eps=1 ") + (hand ? "ok" : "FAILED");
    return c;
}

Check supermartingale_bound(unsigned workers) {
    const auto grid = make_time_grid(1.0, 200);
    std::vector<StoppingRule> stops{StoppingRule::at_time(0.25),    StoppingRule::at_time(0.5),
                                    StoppingRule::at_time(1.0),     StoppingRule::qv_level(0.5),
                                    StoppingRule::abs_m_level(0.5), StoppingRule::abs_m_level(1.0)};
    const std::vector<ProcessSpec> processes{ProcessSpec::bm(grid), ProcessSpec::scaled_bm(grid, 2.0),
                                             ProcessSpec::bes3_inverse(grid, 1.0)};
    const auto unit = PredictableControl::constant(1.0);
    Check c;
    std::size_t failures = 0;
    double worst = -INFINITY;
    for (const auto& process : processes) {
        const auto report = theorem1_functional(process, unit, stops, {20000, 1010, workers});
        for (const auto& s : report.per_stop) {
            const double z = (s.estimate.mean - 1.0) / std::max(s.estimate.std_error, 1e-300);
            worst = std::max(worst, z);
            if (s.estimate.mean > 1.0 + 3.0 * s.estimate.std_error) ++failures;
        }
    }
    c.passed = failures == 0;
    c.detail = "18 estimates, exceedances=" + std::to_string(failures) +
               " max (mean-1)/stderr=" + fmt(worst);
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Check reproducibility(const std::string& scratch) {
    auto config = ExperimentConfig::parse_text(
        "experiment=reproducibility\n"
        "process=controlled\n"
        "process.control=state:linear:0/0.5;2/1.5\n"
        "criterion=theorem2\n"
        "criterion.control=time:0/0.5;0.5/1.2\n"
        "criterion.epsilon=0.5\n"
        "criterion.phi=c_sqrt:1\n"
        "criterion.f=constant:0.5\n"
        "stops.deterministic=0.25,0.5,1\n"
        "stops.qv_level=0.3\n"
        "stops.abs_m_level=0.5,1\n"
        "n_paths=5000\n"
        "n_steps=100\n"
        "t_end=1\n"
        "seed=1111\n");
    const std::filesystem::path dir(scratch);
    std::filesystem::create_directories(dir);
    std::ostringstream sink;
    config.workers = 1;
    config.output = (dir / "reproducibility_w1.csv").string();
    run_experiment(config, sink);
    config.workers = 8;
    config.output = (dir / "reproducibility_w8.csv").string();
    run_experiment(config, sink);
    const auto one = slurp(dir / "reproducibility_w1.csv");
    const auto eight = slurp(dir / "reproducibility_w8.csv");
    Check c;
    c.passed = !one.empty() && one == eight;
    c.detail = std::to_string(one.size()) + " bytes, " + (one == eight ? "identical" : "DIFFERENT");
    return c;
}

}  // namespace

std::vector<CriterionOutcome> run_acceptance(std::ostream& log, const AcceptanceOptions& options) {
    const unsigned w = std::max(1u, options.workers);
    struct Entry {
        int id;
        const char* name;
        double time_limit;  // seconds, 0 = none
        std::function<Check()> run;
    };
    const std::vector<Entry> entries{
        {1, "exponential martingale mass", 10.0, [w] { return exponential_mass(w); }},
        {2, "strict local martingale detection", 10.0, [w] { return strict_local_martingale(w); }},
        {3, "novikov exactness", 0.0, [w] { return novikov_exactness(w); }},
        {4, "kazamaki estimate", 0.0, [w] { return kazamaki_estimate(w); }},
        {5, "reduction identities", 0.0, [] { return reduction_identities(); }},
        {6, "girsanov product identity", 0.0, [] { return girsanov_identity(); }},
        {7, "lemma1 properties", 0.0, [] { return lemma1_suite(); }},
        {8, "lemma2 bound", 0.0, [] { return lemma2_suite(); }},
        {9, "lemma4 delta", 0.0, [] { return lemma4_suite(); }},
        {10, "supermartingale bound", 0.0, [w] { return supermartingale_bound(w); }},
        {11, "worker reproducibility", 0.0, [&options] { return reproducibility(options.scratch_dir); }},
    };

    std::vector<CriterionOutcome> outcomes;
    for (const auto& e : entries) {
        CriterionOutcome out{e.id, e.name, false, {}, 0.0};
        const auto start = std::chrono::steady_clock::now();
        try {
            const Check c = e.run();
            out.passed = c.passed;
            out.detail = c.detail;
        } catch (const std::exception& ex) {
            out.detail = std::string("exception: ") + ex.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (e.time_limit > 0.0 && out.seconds >= e.time_limit) {
            out.passed = false;
            out.detail += " runtime over " + fmt(e.time_limit) + " s";
        }
        log << (out.passed ? "[PASS] " : "[FAIL] ") << out.id << ' ' << out.name << ": " << out.detail
            << " (" << fmt(out.seconds) << " s)\n";
        log.flush();
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

}  // namespace stochexp
