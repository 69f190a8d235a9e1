#include <cmath>

#include "doctest.h"
#include "stochexp/acceptance.hpp"
#include "stochexp/criteria.hpp"
#include "stochexp/gallery.hpp"

using namespace stochexp;

TEST_CASE("bm has deterministic quadratic variation") {
    const auto g = make_time_grid(1.5, 30);
    RngStream rng({1, 0});
    const auto s = sample_process(ProcessSpec::bm(g), rng);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(s.path.qv()[i] == g->time(i));
        CHECK(s.exponential[i] == std::exp(s.path.m()[i] - 0.5 * g->time(i)));
    }
    CHECK_FALSE(s.qv_approximate);
}

TEST_CASE("scaled and controlled processes") {
    const auto g = make_time_grid(1.0, 10);
    RngStream a({2, 0});
    RngStream b({2, 0});
    RngStream c({2, 0});
    const auto plain = sample_process(ProcessSpec::bm(g), a);
    const auto scaled = sample_process(ProcessSpec::scaled_bm(g, 3.0), b);
    const auto controlled =
        sample_process(ProcessSpec::controlled(g, PredictableControl::constant(3.0)), c);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(scaled.path.m()[i] == doctest::Approx(3.0 * plain.path.m()[i]));
        CHECK(scaled.path.qv()[i] == doctest::Approx(9.0 * g->time(i)));
        CHECK(controlled.path.m()[i] == doctest::Approx(scaled.path.m()[i]));
    }
}

TEST_CASE("scaled bm novikov value is exact") {
    const auto g = make_time_grid(1.0, 100);
    const auto stops = build_stop_family(StoppingRule::Kind::deterministic, {0.5, 1.0}, *g);
    for (double sigma : {0.5, 2.0}) {
        const auto spec = ProcessSpec::scaled_bm(g, sigma);
        const auto r = novikov_functional(spec, stops, {100, 3, 1});
        for (std::size_t k = 0; k < stops.size(); ++k) {
            const double t = stops[k].param;
            CHECK(r.per_stop[k].estimate.mean == doctest::Approx(std::exp(sigma * sigma * t / 2)).epsilon(1e-12));
            CHECK(r.per_stop[k].estimate.std_error == 0.0);
            CHECK(*analytic_reference(spec, Quantity::novikov_value, t) ==
                  doctest::Approx(r.per_stop[k].estimate.mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("inverse bessel process") {
    const auto g = make_time_grid(1.0, 20);
    RngStream rng({4, 0});
    const auto s = sample_process(ProcessSpec::bes3_inverse(g, 1.0), rng);
    CHECK(s.exponential.front() == 1.0);
    CHECK(s.qv_approximate);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(s.exponential[i] > 0.0);
        CHECK(std::exp(s.path.m()[i] - 0.5 * s.path.qv()[i]) == doctest::Approx(s.exponential[i]));
    }
    CHECK_THROWS_AS(ProcessSpec::bes3_inverse(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ProcessSpec::bes3_inverse(g, -1.0), std::invalid_argument);
}

TEST_CASE("inverse bessel terminal mean matches the marginal law") {
    const auto g = make_time_grid(1.0, 1);
    const auto spec = ProcessSpec::bes3_inverse(g, 1.0);
    const auto r = estimate(
        [&](std::uint64_t, RngStream& rng) { return sample_process(spec, rng).terminal_exponential(); },
        100000, 5, 2);
    const double oracle_value = oracle::bes3_inverse_mean(1.0, 1.0);
    CHECK(std::abs(r.mean - oracle_value) <= 3.0 * r.std_error);
    CHECK(r.mean < 1.0 - 10.0 * r.std_error);
}

TEST_CASE("bessel marginal quadrature against the closed form") {
    CHECK(oracle::bes3_inverse_mean(1.0, 1.0) == doctest::Approx(0.682689492137086).epsilon(1e-10));
    for (double r0 : {0.5, 1.0, 2.0}) {
        for (double t : {0.25, 1.0, 4.0}) {
            const double ref = *analytic_reference(ProcessSpec::bes3_inverse(make_time_grid(t, 1), r0),
                                                   Quantity::exponential_mean, t);
            CHECK(oracle::bes3_inverse_mean(r0, t) == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("inverse bessel means decrease in time") {
    const std::vector<double> ts{0.25, 1.0, 4.0};
    std::vector<EstimateReport> r;
    for (double t : ts) {
        const auto spec = ProcessSpec::bes3_inverse(make_time_grid(t, 1), 1.0);
        r.push_back(estimate(
            [&](std::uint64_t, RngStream& rng) { return sample_process(spec, rng).terminal_exponential(); },
            100000, 6, 2));
    }
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double combined = std::hypot(r[i].std_error, r[i + 1].std_error);
        CHECK(r[i].mean - r[i + 1].mean > 3.0 * combined);
    }
}

TEST_CASE("stopped bm freezes at the stopping rule") {
    const auto g = make_time_grid(2.0, 200);
    const double dt = 0.01;
    const auto qv_stop = ProcessSpec::stopped_bm(g, StoppingRule::qv_level(0.7));
    const auto m_stop = ProcessSpec::stopped_bm(g, StoppingRule::abs_m_level(0.5));
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        RngStream rng({7, rep});
        const auto s = sample_process(qv_stop, rng);
        REQUIRE(s.path.qv().back() <= 0.7 + dt + 1e-12);
        RngStream rng2({7, rep});
        const auto t = sample_process(m_stop, rng2);
        const std::size_t k = StoppingRule::abs_m_level(0.5).resolve(t.path);
        for (std::size_t i = k; i < g->size(); ++i) {
            REQUIRE(t.path.m()[i] == t.path.m()[k]);
            REQUIRE(t.path.qv()[i] == t.path.qv()[k]);
        }
    }
}

TEST_CASE("analytic references") {
    const auto g = make_time_grid(1.0, 10);
    CHECK(*analytic_reference(ProcessSpec::bm(g), Quantity::novikov_value, 2.0) == std::exp(1.0));
    CHECK(*analytic_reference(ProcessSpec::bm(g), Quantity::exponential_mean, 1.0) == 1.0);
    CHECK(*analytic_reference(ProcessSpec::bm(g), Quantity::kazamaki_value, 1.0) == std::exp(0.125));
    CHECK(*analytic_reference(ProcessSpec::scaled_bm(g, 2.0), Quantity::kazamaki_value, 1.0) ==
          doctest::Approx(std::exp(0.5)));
    CHECK(*analytic_reference(ProcessSpec::bes3_inverse(g, 1.0), Quantity::exponential_mean, 1.0) ==
          doctest::Approx(oracle::bes3_inverse_mean(1.0, 1.0)).epsilon(1e-10));
    CHECK_FALSE(analytic_reference(ProcessSpec::bes3_inverse(g, 1.0), Quantity::novikov_value, 1.0));
    CHECK_FALSE(analytic_reference(
        ProcessSpec::controlled(g, PredictableControl::of_qv(FunctionSpec::power(1.0))),
        Quantity::exponential_mean, 1.0));
}

TEST_CASE("process names") {
    const auto g = make_time_grid(1.0, 10);
    CHECK(ProcessSpec::bm(g).name() == "bm");
    CHECK(ProcessSpec::scaled_bm(g, 2.0).describe() == "scaled_bm(sigma=2)");
    CHECK(ProcessSpec::bes3_inverse(g, 1.0).name() == "bes3_inverse");
    CHECK(ProcessSpec::stopped_bm(g, StoppingRule::qv_level(1)).name() == "stopped_bm");
}
