#include <doctest.h>

#include <cmath>

#include "triqkd/sweep.hpp"

using namespace triqkd;

TEST_CASE("axis parsing and point placement") {
    SweepAxis axis = SweepAxis::parse("depolarizing_p:0:0.3:7");
    CHECK(axis.parameter == "depolarizing_p");
    CHECK(axis.steps == 7);
    auto vals = axis.values();
    REQUIRE(vals.size() == 7);
    CHECK(vals.front() == doctest::Approx(0.0));
    CHECK(vals[1] == doctest::Approx(0.05));
    CHECK(vals.back() == doctest::Approx(0.3));

    CHECK(SweepAxis::parse("q_slack:0.1:0.1:1").values() ==
          std::vector<double>{0.1});

    CHECK_THROWS(SweepAxis::parse("depolarizing_p:0:0.3"));
    CHECK_THROWS(SweepAxis::parse("depolarizing_p:0:0.3:zero"));
    CHECK_THROWS(SweepAxis::parse("depolarizing_p:0:0.3:0"));
}

TEST_CASE("axis application") {
    SessionConfig base;
    SessionConfig cfg = apply_axis(base, "depolarizing_p", 0.1);
    CHECK(channel_to_string(cfg.channel_bob) == "depolarizing:p=0.1");
    CHECK(channel_to_string(cfg.channel_charlie) == "depolarizing:p=0.1");

    cfg = apply_axis(base, "depolarizing_p_bob", 0.2);
    CHECK(channel_to_string(cfg.channel_bob) == "depolarizing:p=0.2");
    CHECK(channel_to_string(cfg.channel_charlie) == "ideal");

    cfg = apply_axis(base, "num_pulses", 500.0);
    CHECK(cfg.num_pulses == 500);
    CHECK(apply_axis(base, "target_failure", 0.2).target_failure == doctest::Approx(0.2));

    CHECK_THROWS_AS(apply_axis(base, "bogus", 0.0), std::invalid_argument);
    CHECK_THROWS(apply_axis(base, "depolarizing_p", 1.5));
}

TEST_CASE("single ideal point reports unit rates") {
    SessionConfig base;
    base.num_pulses = 1024;
    base.seeds = Seeds::derive(5);
    SweepAxis axis = SweepAxis::parse("depolarizing_p:0:0:1");
    auto points = run_sweep(base, axis, 3, 5);
    REQUIRE(points.size() == 1);
    CHECK(points[0].mean_q1 == 0.0);
    CHECK(points[0].mean_q2 == 0.0);
    CHECK(points[0].formula_rate == doctest::Approx(1.0));
    CHECK(points[0].measured_rate == doctest::Approx(1.0));
    CHECK(points[0].abort_fraction == 0.0);
}

TEST_CASE("abort fraction saturates as the formula rate crosses zero") {
    SessionConfig base;
    base.num_pulses = 1024;
    base.seeds = Seeds::derive(6);
    SweepAxis axis = SweepAxis::parse("depolarizing_p:0:0.5:3");
    auto points = run_sweep(base, axis, 4, 6);
    REQUIRE(points.size() == 3);

    CHECK(points[0].abort_fraction == 0.0);
    CHECK(points[2].abort_fraction == doctest::Approx(1.0));
    CHECK(points[0].formula_rate > points[1].formula_rate);
    CHECK(points[1].formula_rate > points[2].formula_rate);
    CHECK(points[2].formula_rate <= 0.0);

    // mean q1 tracks p/2 coarsely (order statistic bias is within the slack)
    for (std::size_t i = 0; i < 3; ++i) {
        double p = axis.values()[i];
        CHECK(std::abs(points[i].mean_q1 - p / 2) < 0.05);
        CHECK(std::abs(points[i].mean_q2 - 2 * (p / 2) * (1 - p / 2)) < 0.06);
    }

    // deterministic reduction: serial and threaded paths agree byte for byte
    auto serial = run_sweep(base, axis, 4, 6, false);
    CHECK(sweep_csv(serial) == sweep_csv(points));
}

TEST_CASE("csv formatting is fixed-point with a stable header") {
    SweepPoint p;
    p.param = 0.125;
    p.trials = 7;
    p.mean_q1 = 0.0625;
    p.formula_rate = -0.25;
    std::string csv = sweep_csv({p});
    CHECK(csv ==
          "param,trials,mean_q1,mean_q2,formula_rate,measured_rate,abort_fraction\n"
          "0.125000,7,0.062500,0.000000,-0.250000,0.000000,0.000000\n");
}
