#include <cmath>
#include <vector>

#include "doctest.h"
#include "stochexp/criteria.hpp"
#include "stochexp/exponentials.hpp"

using namespace stochexp;

namespace {

GridPtr unit_grid(long long n = 100) { return make_time_grid(1.0, n); }

std::vector<StoppingRule> at(std::initializer_list<double> ts, const TimeGrid& g) {
    return build_stop_family(StoppingRule::Kind::deterministic, ts, g);
}

}  // namespace

TEST_CASE("stop families") {
    const auto g = unit_grid(10);
    const auto two = at({0.5, 1.0}, *g);
    REQUIRE(two.size() == 2);
    CHECK(two[0].kind == StoppingRule::Kind::deterministic);
    CHECK(build_stop_family(StoppingRule::Kind::qv_level, {0.1, 0.2, 0.3}, *g).size() == 3);
    CHECK_THROWS_AS(build_stop_family(StoppingRule::Kind::qv_level, {}, *g), std::invalid_argument);
    CHECK_THROWS_AS(build_stop_family(StoppingRule::Kind::deterministic, {2.0}, *g), std::invalid_argument);
    CHECK_THROWS_AS(build_stop_family(StoppingRule::Kind::abs_m_level, {-1.0}, *g), std::invalid_argument);
    CHECK(parse_stop_kind("abs_m_level") == StoppingRule::Kind::abs_m_level);
    CHECK_THROWS_AS(parse_stop_kind("hitting"), std::invalid_argument);
    CHECK(StoppingRule::qv_level(0.5).describe() == "qv_level(0.5)");
}

TEST_CASE("stop resolution") {
    const auto g = make_time_grid(1.0, 4);
    const MartingalePath p(g, {0.0, 0.4, -0.9, 0.2, 1.5}, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(StoppingRule::at_time(0.5).resolve(p) == 2);
    CHECK(StoppingRule::at_time(0.6).resolve(p) == 3);
    CHECK(StoppingRule::at_time(1.0).resolve(p) == 4);
    CHECK(StoppingRule::qv_level(0.0).resolve(p) == 0);
    CHECK(StoppingRule::qv_level(0.3).resolve(p) == 2);
    CHECK(StoppingRule::abs_m_level(0.8).resolve(p) == 2);
    CHECK(StoppingRule::abs_m_level(10.0).resolve(p) == 4);

    // the stop decision at step i ignores everything after i
    const MartingalePath q(g, {0.0, 0.4, -0.9, 5.0, -7.0}, {0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(StoppingRule::abs_m_level(0.8).resolve(q) == 2);
}

TEST_CASE("qv level zero stops at time zero on every path") {
    const auto g = unit_grid();
    const auto stop = StoppingRule::qv_level(0.0);
    const auto process = ProcessSpec::controlled(g, PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/1.5")));
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RngStream rng({1, rep});
        REQUIRE(stop.resolve(sample_process(process, rng).path) == 0);
    }
}

TEST_CASE("a distant level is almost never hit") {
    // P(max |B| >= 10 on [0, 1]) <= 4 P(B_1 >= 10) ~ 3e-23
    const auto g = unit_grid();
    const auto stop = StoppingRule::abs_m_level(10.0);
    int at_end = 0;
    constexpr int n = 10000;
    for (int rep = 0; rep < n; ++rep) {
        RngStream rng({2, static_cast<std::uint64_t>(rep)});
        at_end += stop.resolve(sample_process(ProcessSpec::bm(g), rng).path) == g->n_steps();
    }
    CHECK(at_end >= 0.999 * n);
}

TEST_CASE("novikov functional") {
    const auto g = unit_grid();
    const McConfig mc{500, 3, 2};
    const auto zero = novikov_functional(ProcessSpec::controlled(g, PredictableControl::constant(0.0)),
                                         at({1.0}, *g), mc);
    CHECK(zero.per_stop[0].estimate.mean == 1.0);

    const auto twice = novikov_functional(ProcessSpec::controlled(g, PredictableControl::constant(2.0)),
                                          at({1.0}, *g), mc);
    CHECK(twice.per_stop[0].estimate.mean == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(twice.per_stop[0].estimate.std_error == 0.0);

    const auto bm = novikov_functional(ProcessSpec::bm(g), at({0.5, 1.0}, *g), mc);
    CHECK(sup_over_stops(bm) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    CHECK(bm.sup_estimate == sup_over_stops(bm));
    CHECK_FALSE(bm.stability_flag);
}

TEST_CASE("kazamaki functional") {
    const auto g = unit_grid();
    const auto r = kazamaki_functional(ProcessSpec::bm(g), at({0.5, 1.0}, *g), {100000, 4, 2});
    for (const auto& s : r.per_stop) {
        const double expected = std::exp(s.rule.param / 8.0);
        CHECK(std::abs(s.estimate.mean - expected) <= 3.0 * s.estimate.std_error);
    }
    const auto zero = kazamaki_functional(ProcessSpec::controlled(g, PredictableControl::constant(0.0)),
                                          at({1.0}, *g), {100, 4, 1});
    CHECK(zero.per_stop[0].estimate.mean == 1.0);
    const auto immediate = kazamaki_functional(ProcessSpec::bm(g), {StoppingRule::qv_level(0.0)}, {100, 4, 1});
    CHECK(immediate.per_stop[0].estimate.mean == 1.0);
    CHECK(immediate.per_stop[0].estimate.std_error == 0.0);
}

TEST_CASE("mixed functional reductions are pathwise") {
    const auto g = unit_grid();
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RngStream rng({5, rep});
        const auto p = sample_process(ProcessSpec::bm(g), rng).path;
        const auto m0 = log_payoff::mixed(p, 0.0);
        const auto nov = log_payoff::novikov(p);
        const auto mh = log_payoff::mixed(p, 0.5);
        const auto kaz = log_payoff::kazamaki(p);
        const auto m1 = log_payoff::mixed(p, 1.0);
        const auto e = log_payoff::exponential(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            REQUIRE(std::abs(std::exp(m0[i]) - std::exp(nov[i])) < 1e-12);
            REQUIRE(std::abs(std::exp(mh[i]) - std::exp(kaz[i])) < 1e-12);
            REQUIRE(std::abs(std::exp(m1[i]) - std::exp(e[i])) < 1e-12);
        }
    }
}

TEST_CASE("mixed functional with a = 1 is a supermartingale and warns") {
    const auto g = unit_grid();
    const auto r = mixed_nk_functional(ProcessSpec::bm(g), 1.0, at({0.5, 1.0}, *g), {20000, 6, 2});
    for (const auto& s : r.per_stop) {
        CHECK(s.estimate.mean <= 1.0 + 3.0 * s.estimate.std_error);
    }
    CHECK_FALSE(r.advisories.empty());
    const auto quiet = mixed_nk_functional(ProcessSpec::bm(g), 0.3, at({1.0}, *g), {100, 6, 1});
    CHECK(quiet.advisories.empty());
}

TEST_CASE("theorem1 with constant control is the mixed payoff") {
    const auto g = unit_grid();
    const auto process = ProcessSpec::controlled(g, PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/1.5")));
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RngStream rng({7, rep});
        const auto p = sample_process(process, rng).path;
        for (double a : {-1.0, 0.0, 0.4, 2.0}) {
            const auto t1 = log_payoff::theorem1(p, PredictableControl::constant(a));
            const auto mx = log_payoff::mixed(p, a);
            for (std::size_t i = 0; i < p.size(); ++i) {
                REQUIRE(std::abs(std::exp(t1[i]) - std::exp(mx[i])) < 1e-12);
            }
        }
    }
}

TEST_CASE("necessity control with f = 2 gives the mixed payoff with a = 2") {
    const auto g = unit_grid();
    const auto control = necessity_control(FunctionSpec::constant(2.0));
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RngStream rng({8, rep});
        const auto p = sample_process(ProcessSpec::bm(g), rng).path;
        const auto t1 = log_payoff::theorem1(p, control);
        const auto mx = log_payoff::mixed(p, 2.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            REQUIRE(std::abs(std::exp(t1[i]) - std::exp(mx[i])) < 1e-12);
        }
    }
}

TEST_CASE("necessity controls") {
    const auto g = make_time_grid(1.0, 4);
    RngStream rng({9, 0});
    const auto p = sample_process(ProcessSpec::bm(g), rng).path;
    for (double a : necessity_control(FunctionSpec::constant(0.0)).evaluate(p)) CHECK(a == 1.0);
    for (double a : necessity_control(FunctionSpec::constant(2.0)).evaluate(p)) CHECK(a == 2.0);
    const auto by_qv = necessity_control(FunctionSpec::power(1.0)).evaluate(p);
    for (std::size_t i = 0; i < by_qv.size(); ++i) {
        CHECK(by_qv[i] == doctest::Approx(1.0 + std::sqrt(g->time(i) / 2.0)));
    }
    CHECK_THROWS_AS(necessity_control(FunctionSpec::power(1.0).shifted(-1.0)), std::invalid_argument);
}

TEST_CASE("theorem1 with unit control stays below one") {
    const auto g = unit_grid();
    const auto stops = std::vector<StoppingRule>{StoppingRule::at_time(0.5), StoppingRule::at_time(1.0),
                                                 StoppingRule::abs_m_level(0.7)};
    const auto r = theorem1_functional(ProcessSpec::scaled_bm(g, 1.5), PredictableControl::constant(1.0),
                                       stops, {20000, 10, 2});
    for (const auto& s : r.per_stop) {
        CHECK(s.estimate.mean <= 1.0 + 3.0 * s.estimate.std_error);
    }
    CHECK_FALSE(r.advisories.empty());
}

TEST_CASE("theorem2 reductions") {
    const auto g = unit_grid();
    const auto phi_zero = LowerFunctionSpec::zero();
    const auto phi = LowerFunctionSpec::c_sqrt(1.3);
    const auto f = FunctionSpec::logarithmic().shifted(0.2);
    const auto c = FunctionSpec::constant(0.7);
    const auto process = ProcessSpec::controlled(g, PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/1.5")));
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RngStream rng({11, rep});
        const auto p = sample_process(process, rng).path;

        // a = 1, phi = 0: E_tau(M) e^{f(<M>_tau)}
        const auto t_unit = log_payoff::theorem2(p, PredictableControl::constant(1.0), 0.5, phi_zero, f);
        // constant a != 1 with eps = |1 - a|: every step is far
        const double a = 0.25;
        const auto t_const = log_payoff::theorem2(p, PredictableControl::constant(a), 0.75, phi, c);
        // a = 0, eps = 1, phi = 0, f = c: e^c times the novikov payoff
        const auto t_nov = log_payoff::theorem2(p, PredictableControl::constant(0.0), 1.0, phi_zero, c);
        const auto nov = log_payoff::novikov(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double m = p.m()[i];
            const double q = p.qv()[i];
            REQUIRE(std::exp(t_unit[i]) ==
                    doctest::Approx(std::exp(m - 0.5 * q) * std::exp(f(q))).epsilon(1e-12));
            REQUIRE(std::exp(t_const[i]) ==
                    doctest::Approx(std::exp(0.7) * std::exp(a * m + (0.5 - a) * q - 0.75 * phi(q)))
                        .epsilon(1e-12));
            REQUIRE(std::exp(t_nov[i]) == doctest::Approx(std::exp(0.7) * std::exp(nov[i])).epsilon(1e-12));
        }
    }
}

TEST_CASE("theorem2 argument checks") {
    const auto g = unit_grid(10);
    const auto process = ProcessSpec::bm(g);
    const auto stops = at({1.0}, *g);
    const McConfig mc{10, 1, 1};
    const auto phi = LowerFunctionSpec::zero();
    const auto control = PredictableControl::constant(0.5);
    CHECK_THROWS_AS(theorem2_functional(process, control, 0.0, phi, FunctionSpec::constant(1.0), stops, mc),
                    std::invalid_argument);
    CHECK_THROWS_AS(theorem2_functional(process, control, 0.5, phi, FunctionSpec::constant(0.0), stops, mc),
                    std::invalid_argument);
    CHECK_THROWS_AS(theorem2_functional(process, control, 0.5, phi, FunctionSpec::exponential(-1.0), stops, mc),
                    std::invalid_argument);
    const auto ok = theorem2_functional(process, PredictableControl::constant(1.0), 0.5, phi,
                                        FunctionSpec::constant(1.0), stops, mc);
    CHECK_FALSE(ok.advisories.empty());
}

TEST_CASE("ruf functional") {
    const auto g = unit_grid();
    const auto stops = at({0.5, 1.0}, *g);
    const McConfig mc{40000, 12, 2};
    const auto zero_h = ruf_functional(ProcessSpec::bm(g), FunctionSpec::constant(0.0), stops, mc);
    const auto sm = supermartingale_check(ProcessSpec::bm(g), stops, mc);
    for (std::size_t k = 0; k < stops.size(); ++k) {
        CHECK(zero_h.per_stop[k].estimate.mean == doctest::Approx(sm.per_stop[k].estimate.mean).epsilon(1e-12));
    }

    const auto half = ruf_functional(ProcessSpec::bm(g), FunctionSpec::power(1.0, 0.5), stops, mc);
    for (const auto& s : half.per_stop) {
        CHECK(std::abs(s.estimate.mean - std::exp(s.rule.param / 2.0)) <= 3.0 * s.estimate.std_error);
    }

    const auto bes = ruf_functional(ProcessSpec::bes3_inverse(make_time_grid(1.0, 1), 1.0),
                                    FunctionSpec::constant(0.0),
                                    {StoppingRule::at_time(1.0)}, mc);
    const auto& e = bes.per_stop[0].estimate;
    CHECK(std::abs(e.mean - 0.682689492137086) <= 3.0 * e.std_error);
    CHECK(e.mean < 1.0);
}

TEST_CASE("sup over stops") {
    const auto g = unit_grid();
    const McConfig mc{2000, 13, 1};
    const auto single = kazamaki_functional(ProcessSpec::bm(g), at({1.0}, *g), mc);
    CHECK(sup_over_stops(single) == single.per_stop[0].estimate.mean);

    const auto coarse = kazamaki_functional(ProcessSpec::bm(g), at({0.5}, *g), mc);
    const auto fine = kazamaki_functional(
        ProcessSpec::bm(g),
        {StoppingRule::at_time(0.5), StoppingRule::at_time(1.0), StoppingRule::abs_m_level(0.3),
         StoppingRule::qv_level(0.2)},
        mc);
    CHECK(sup_over_stops(fine) >= sup_over_stops(coarse));
    for (const auto& s : fine.per_stop) CHECK(fine.sup_estimate >= s.estimate.mean);

    CHECK_THROWS_AS(sup_over_stops(CriterionReport{}), std::invalid_argument);
    CHECK_THROWS_AS(kazamaki_functional(ProcessSpec::bm(g), {}, mc), std::invalid_argument);
}

TEST_CASE("heavy tails raise the stability flag") {
    const auto g = unit_grid(10);
    const auto r = novikov_functional(ProcessSpec::controlled(g, PredictableControl::of_state(FunctionSpec::exponential(3.0))),
                                      at({1.0}, *g), {200, 14, 1});
    CHECK(r.stability_flag);
}

TEST_CASE("condition ii") {
    const auto g = unit_grid(50);
    const McConfig mc{200, 15, 1};
    const auto bm = ProcessSpec::bm(g);

    for (const auto& process : {bm, ProcessSpec::scaled_bm(g, 2.0), ProcessSpec::bes3_inverse(g, 1.0)}) {
        const auto r = check_condition_ii(PredictableControl::constant(0.0), process, FunctionSpec::constant(1.0), mc);
        CHECK(r.holds);
        CHECK(r.paths_checked == mc.n_paths);
        CHECK(r.integral_diverges);
    }

    const auto half = check_condition_ii(PredictableControl::constant(0.5), bm, FunctionSpec::constant(0.5), mc);
    CHECK_FALSE(half.holds);
    REQUIRE(half.first_violation);
    CHECK(half.first_violation->step == 0);
    CHECK(half.first_violation->gap_squared == 0.25);
    CHECK(check_condition_ii(PredictableControl::constant(0.5), bm, FunctionSpec::constant(0.25), mc).holds);

    // necessity control: 2 (a - 1)^2 = f, so f itself fails and f/2 holds with equality
    const auto f = FunctionSpec::power(1.0).shifted(0.5);
    const auto control = necessity_control(f);
    CHECK_FALSE(check_condition_ii(control, bm, f, mc).holds);
    CHECK(check_condition_ii(control, bm, f.scaled(0.5), mc).holds);

    CHECK_FALSE(check_condition_ii(PredictableControl::constant(0.0), bm,
                                   FunctionSpec::custom([](double x) { return 1.0 / ((1 + x) * (1 + x)); }, "inv_sq"),
                                   mc)
                    .integral_diverges);
    CHECK_THROWS_AS(check_condition_ii(PredictableControl::constant(0.0), bm, FunctionSpec::constant(-1.0), mc),
                    std::invalid_argument);
}

TEST_CASE("condition ii is monotone in f") {
    const auto g = unit_grid(50);
    const McConfig mc{50, 16, 1};
    const auto process = ProcessSpec::controlled(g, PredictableControl::of_state(FunctionSpec::parse("linear:0/0.5;2/1.5")));
    const auto control = PredictableControl::of_state(FunctionSpec::parse("linear:0/0;1/3"));
    const std::vector<double> levels{0.0, 0.01, 0.05, 0.1, 0.3, 1.0};
    bool seen_false = false;
    for (double c : levels) {
        const bool holds = check_condition_ii(control, process, FunctionSpec::constant(c), mc).holds;
        // once a smaller f fails, every larger f fails too
        if (seen_false) CHECK_FALSE(holds);
        seen_false = seen_false || !holds;
    }
    CHECK(check_condition_ii(control, process, FunctionSpec::constant(0.0), mc).holds);
}
