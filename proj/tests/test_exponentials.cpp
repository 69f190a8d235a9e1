#include <cmath>
#include <vector>

#include "doctest.h"
#include "stochexp/acceptance.hpp"
#include "stochexp/constructions.hpp"
#include "stochexp/exponentials.hpp"
#include "stochexp/gallery.hpp"
#include "stochexp/report.hpp"

using namespace stochexp;

namespace {

MartingalePath brownian(const GridPtr& grid, std::uint64_t seed, std::uint64_t rep = 0) {
    return MartingalePath::from_brownian(sample_brownian(grid, 1, SeedSpec{seed, rep}));
}

}  // namespace

TEST_CASE("zero path has unit exponential") {
    const auto g = make_time_grid(1.0, 10);
    const MartingalePath zero(g, std::vector<double>(11, 0.0), std::vector<double>(11, 0.0));
    for (double e : stochastic_exponential(zero)) CHECK(e == 1.0);
}

TEST_CASE("log of the exponential is M - QV/2") {
    const auto g = make_time_grid(2.0, 100);
    const auto m = ito_integral(PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/2")),
                                brownian(g, 1));
    const auto e = stochastic_exponential(m);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(std::abs(std::log(e[i]) + 0.5 * m.qv()[i] - m.m()[i]) <= 1e-12);
    }
}

TEST_CASE("overflow is counted, not clipped") {
    const auto g = make_time_grid(1.0, 2);
    const MartingalePath big(g, {0.0, 800.0, 1000.0}, {0.0, 0.0, 0.0});
    const auto e = stochastic_exponential(big);
    CHECK(std::isinf(e[2]));
    CHECK(count_nonfinite(e) == 2);
}

TEST_CASE("girsanov adjustment edge controls") {
    const auto g = make_time_grid(1.0, 50);
    const auto m = brownian(g, 2);

    const auto n1 = ito_integral(PredictableControl::constant(0.0), m);  // int (1 - 1) dM
    const auto adj1 = girsanov_drift_adjust(n1, PredictableControl::constant(1.0), m);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(adj1.m()[i] == 0.0);
        CHECK(adj1.qv()[i] == 0.0);
    }

    const auto n0 = ito_integral(PredictableControl::constant(1.0), m);
    const auto adj0 = girsanov_drift_adjust(n0, PredictableControl::constant(0.0), m);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(adj0.m()[i] == m.m()[i]);
        CHECK(adj0.qv()[i] == m.qv()[i]);
    }
}

TEST_CASE("girsanov adjustment with constant control matches the direct formula") {
    const auto g = make_time_grid(1.0, 50);
    const auto m = brownian(g, 3);
    for (double c : {-1.0, 0.3, 2.0}) {
        const auto n = ito_integral(PredictableControl::constant(1.0 - c), m);
        const auto adj = girsanov_drift_adjust(n, PredictableControl::constant(c), m);
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double direct = (1.0 - c) * m.m()[i] - c * (1.0 - c) * g->time(i);
            CHECK(adj.m()[i] == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
            CHECK(adj.qv()[i] == n.qv()[i]);
        }
    }
}

TEST_CASE("product identity holds for state dependent controls") {
    const auto g = make_time_grid(1.0, 100);
    const auto control = PredictableControl::of_state(FunctionSpec::parse("linear:0/-0.5;1.5/2.5"));
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const auto m = brownian(g, 4, rep);
        const auto a = control.evaluate(m);
        std::vector<double> one_minus(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) one_minus[i] = 1.0 - a[i];
        const auto density = stochastic_exponential(ito_integral(a, m)).back();
        const auto tilde = girsanov_drift_adjust(ito_integral(one_minus, m), control, m);
        const double lhs = density * stochastic_exponential(tilde).back();
        const double rhs = stochastic_exponential(m).back();
        REQUIRE(std::abs(lhs - rhs) <= 1e-10 * rhs);
    }
}

TEST_CASE("girsanov rejects mismatched grids") {
    const auto m = brownian(make_time_grid(1.0, 10), 5);
    const auto other = brownian(make_time_grid(1.0, 20), 5);
    CHECK_THROWS_AS(girsanov_drift_adjust(other, PredictableControl::constant(0.5), m),
                    std::invalid_argument);
}

TEST_CASE("reweighted expectations") {
    const auto g = make_time_grid(1.0, 20);
    constexpr std::size_t n = 100000;
    std::vector<double> b(n), density(n), qv(n), ones(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = brownian(g, 6, i);
        b[i] = m.m().back();
        density[i] = stochastic_exponential(m).back();
        qv[i] = m.qv().back();
    }
    const MeasureWeight unit(ones, "identity");
    const auto plain = reweighted_expectation(b, unit);
    CHECK(std::abs(plain.mean) <= 3.0 * plain.std_error);

    const MeasureWeight w(density, "E_T(B)");
    const auto shifted = reweighted_expectation(b, w);
    CHECK(std::abs(shifted.mean - 1.0) <= 3.0 * shifted.std_error);

    const auto mass = reweighted_expectation(ones, w);
    CHECK(std::abs(mass.mean - 1.0) <= 3.0 * mass.std_error);

    const auto qv_mean = reweighted_expectation(qv, w);
    CHECK(qv_mean.mean == doctest::Approx(1.0 * mass.mean).epsilon(1e-12));

    CHECK_THROWS_AS(MeasureWeight({1.0, -0.1}, "bad"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureWeight({1.0, NAN}, "bad"), std::invalid_argument);
    CHECK_THROWS_AS(reweighted_expectation(std::vector<double>{1.0}, w), std::invalid_argument);
}

TEST_CASE("supermartingale check") {
    const auto g = make_time_grid(1.0, 50);
    const auto stops = std::vector<StoppingRule>{StoppingRule::at_time(1.0)};
    const McConfig mc{20000, 7, 2};

    const auto bm = supermartingale_check(ProcessSpec::bm(g), stops, mc);
    const auto& e = bm.per_stop.front().estimate;
    CHECK(std::abs(e.mean - 1.0) <= 3.0 * e.std_error);
    CHECK(bm.advisories.empty());

    const auto bes = supermartingale_check(ProcessSpec::bes3_inverse(g, 1.0), stops, mc);
    const auto& v = bes.per_stop.front().estimate;
    CHECK(std::abs(v.mean - oracle::bes3_inverse_mean(1.0, 1.0)) <= 3.0 * v.std_error);
    CHECK(v.mean + 3.0 * v.std_error < 1.0);

    const auto zero = supermartingale_check(
        ProcessSpec::controlled(g, PredictableControl::constant(0.0)), stops, mc);
    CHECK(zero.per_stop.front().estimate.mean == 1.0);
    CHECK(zero.per_stop.front().estimate.std_error == 0.0);
}

TEST_CASE("inverse bessel loses mass monotonically") {
    const std::vector<double> ts{0.25, 1.0, 4.0};
    const auto g = make_time_grid(4.0, 16);
    const auto stops = build_stop_family(StoppingRule::Kind::deterministic, ts, *g);
    const auto r = supermartingale_check(ProcessSpec::bes3_inverse(g, 1.0), stops, {50000, 8, 2});
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const auto& a = r.per_stop[i].estimate;
        const auto& b = r.per_stop[i + 1].estimate;
        CHECK(a.mean > b.mean);
    }
}

TEST_CASE("q expectation") {
    const auto g = make_time_grid(1.0, 50);
    const McConfig mc{20000, 9, 2};
    const auto mass = q_expectation(FunctionSpec::constant(1.0), ProcessSpec::bm(g), mc);
    CHECK(std::abs(mass.mean - 1.0) <= 3.0 * mass.std_error);

    const auto linear = q_expectation(FunctionSpec::power(1.0), ProcessSpec::bm(g), mc);
    CHECK(linear.mean == doctest::Approx(mass.mean).epsilon(1e-12));
    CHECK(std::abs(linear.mean - 1.0) <= 3.0 * linear.std_error);

    // lemma2 function of the Q-law of the terminal QV, then its Q-expectation
    const auto process = ProcessSpec::controlled(
        g, PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/1.5")));
    std::vector<double> qv;
    std::vector<double> w;
    for (std::uint64_t rep = 0; rep < 5000; ++rep) {
        RngStream rng({10, rep});
        const auto s = sample_process(process, rng);
        qv.push_back(s.path.qv().back());
        w.push_back(s.terminal_exponential());
    }
    const auto f = lemma2_f(qv, w);
    const auto q = q_expectation(f, process, mc);
    CHECK(std::isfinite(q.mean));
    CHECK(q.nonfinite_count == 0);
    CHECK(q.mean >= 1.0 - 3.0 * q.std_error);
}
