#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "reserveopt/scenario.hpp"
#include "reserveopt/thermal.hpp"

using namespace reserveopt;
using Catch::Approx;

namespace {

const ThermalParams kPlant{120.0, 35.0, 10.0, 100.0};

Scenario table1_scenario(double x_hat = 18.0) {
    Scenario s;
    s.X_hat = x_hat;
    return s;
}

// Classical fixed-step fourth-order integrator of the relaxation dynamics,
// kept independent of propagate/simulate so it can serve as an oracle.
std::vector<double> rk4_breakpoint_states(const StepFunction& profile, double x0,
                                          const ThermalParams& p, double h) {
    const auto rhs = [&](double x, double u) {
        return -(x - p.X_off + (p.X_off - p.X_on) * u) / p.tau;
    };
    std::vector<double> out{x0};
    double x = x0;
    for (std::size_t k = 0; k < profile.piece_count(); ++k) {
        const double u = profile.values()[k];
        double remaining = profile.breakpoints()[k + 1] - profile.breakpoints()[k];
        while (remaining > 0.0) {
            const double step = std::min(h, remaining);
            const double k1 = rhs(x, u);
            const double k2 = rhs(x + 0.5 * step * k1, u);
            const double k3 = rhs(x + 0.5 * step * k2, u);
            const double k4 = rhs(x + step * k3, u);
            x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            remaining -= step;
        }
        out.push_back(x);
    }
    return out;
}

StepFunction random_profile(std::mt19937& rng, double T) {
    std::uniform_int_distribution<int> pieces(3, 8);
    std::uniform_real_distribution<double> interior(0.02 * T, 0.98 * T);
    std::uniform_real_distribution<double> level(0.0, 1.0);
    const int n = pieces(rng);
    std::vector<double> bp{0.0, T};
    for (int i = 1; i < n; ++i) bp.push_back(interior(rng));
    std::sort(bp.begin(), bp.end());
    std::vector<double> clean{bp.front()};
    for (double t : bp) {
        if (t - clean.back() > 1.0) clean.push_back(t);
    }
    clean.back() = T;
    std::vector<double> vals(clean.size() - 1);
    for (double& v : vals) v = level(rng);
    return StepFunction(clean, vals);
}

}  // namespace

TEST_CASE("steady-state control fixed points") {
    CHECK(steady_state_control(35.0, kPlant) == 0.0);
    CHECK(steady_state_control(10.0, kPlant) == 1.0);
    CHECK(steady_state_control(27.0, kPlant) == Approx(0.32).margin(1e-15));
    CHECK_THROWS_AS(steady_state_control(9.9, kPlant), std::domain_error);
    CHECK_THROWS_AS(steady_state_control(35.1, kPlant), std::domain_error);
}

TEST_CASE("propagate closed form") {
    CHECK(propagate(27.0, 0.5, 0.0, kPlant) == 27.0);
    CHECK(propagate(27.0, 1.0, 120.0, kPlant) ==
          Approx(10.0 + 17.0 * std::exp(-1.0)).epsilon(1e-12));
    for (double dt : {1.0, 57.0, 360.0}) {
        CHECK(propagate(22.5, 0.5, dt, kPlant) == Approx(22.5).margin(1e-12));
    }
    CHECK_THROWS_AS(propagate(27.0, 1.5, 10.0, kPlant), std::domain_error);
    CHECK_THROWS_AS(propagate(27.0, 0.5, -1.0, kPlant), std::domain_error);
}

TEST_CASE("propagation semigroup and contraction") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> temp(10.0, 35.0);
    std::uniform_real_distribution<double> ctrl(0.0, 1.0);
    std::uniform_real_distribution<double> dur(0.0, 240.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x0 = temp(rng);
        const double u = ctrl(rng);
        const double a = dur(rng);
        const double b = dur(rng);
        const double two_step = propagate(propagate(x0, u, a, kPlant), u, b, kPlant);
        const double one_step = propagate(x0, u, a + b, kPlant);
        CHECK(two_step == Approx(one_step).epsilon(1e-12).margin(1e-12));

        const double y0 = temp(rng);
        const double gap = std::abs(propagate(x0, u, a, kPlant) - propagate(y0, u, a, kPlant));
        CHECK(gap == Approx(std::exp(-a / kPlant.tau) * std::abs(x0 - y0))
                         .epsilon(1e-11)
                         .margin(1e-11));
    }
}

TEST_CASE("steady-state control is the unique holding control") {
    const double x = 23.7;
    const double u_ss = steady_state_control(x, kPlant);
    for (double dt : {1.0, 10.0, 100.0}) {
        CHECK(propagate(x, u_ss, dt, kPlant) == Approx(x).margin(1e-12));
        for (double other : {0.0, u_ss - 0.05, u_ss + 0.05, 1.0}) {
            if (std::abs(other - u_ss) < 1e-12) continue;
            CHECK(std::abs(propagate(x, other, dt, kPlant) - x) > 1e-6);
        }
    }
}

TEST_CASE("simulate matches closed forms") {
    SECTION("free relaxation toward X_off") {
        const auto traj = simulate(StepFunction::constant(0.0, 0.0, 360.0), 27.0, kPlant, 10);
        CHECK(traj.times.front() == 0.0);
        CHECK(traj.times.back() == 360.0);
        CHECK(traj.terminal() == Approx(35.0 - 8.0 * std::exp(-3.0)).epsilon(1e-12));
    }
    SECTION("steady profile stays put") {
        const double u = steady_state_control(27.0, kPlant);
        const auto traj = simulate(StepFunction::constant(u, 0.0, 360.0), 27.0, kPlant, 10);
        for (double x : traj.temperatures) {
            CHECK(x == Approx(27.0).margin(1e-9));
        }
    }
    SECTION("two-piece chaining is exact at breakpoints") {
        const StepFunction prof({0.0, 120.0, 360.0}, {1.0, 0.0});
        const auto traj = simulate(prof, 27.0, kPlant, 10);
        const double x120 = 10.0 + 17.0 * std::exp(-1.0);
        CHECK(traj.temperatures[10] == Approx(x120).epsilon(1e-12));
        CHECK(traj.terminal() == Approx(35.0 + (x120 - 35.0) * std::exp(-2.0)).epsilon(1e-12));
    }
    SECTION("trajectory times strictly increase over the full horizon") {
        const StepFunction prof({0.0, 90.0, 180.0, 360.0}, {0.3, 0.9, 0.1});
        const auto traj = simulate(prof, 25.0, kPlant, 7);
        REQUIRE(traj.times.size() == traj.temperatures.size());
        CHECK(traj.times.front() == 0.0);
        CHECK(traj.times.back() == 360.0);
        for (std::size_t i = 1; i < traj.times.size(); ++i) {
            CHECK(traj.times[i] > traj.times[i - 1]);
        }
    }
    SECTION("x0 outside the model band is rejected") {
        CHECK_THROWS_AS(simulate(StepFunction::constant(0.0, 0.0, 60.0), 36.0, kPlant, 5),
                        std::domain_error);
    }
}

TEST_CASE("simulate agrees with a fourth-order integrator") {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> temp(18.0, 27.0);
    for (int trial = 0; trial < 10; ++trial) {
        const StepFunction prof = random_profile(rng, 360.0);
        const double x0 = temp(rng);
        const auto oracle = rk4_breakpoint_states(prof, x0, kPlant, 0.01);
        const auto traj = simulate(prof, x0, kPlant, 1);
        REQUIRE(traj.times.size() == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(traj.temperatures[i] == Approx(oracle[i]).margin(1e-6));
        }
    }
}

TEST_CASE("landmark full-power onset") {
    const Scenario s18 = table1_scenario(18.0);
    const Scenario s20 = table1_scenario(20.0);
    CHECK(landmark_t2(s18) == Approx(360.0 - 120.0 * std::log(17.0 / 8.0)).epsilon(1e-12));
    CHECK(landmark_t2(s18) == Approx(269.55).margin(0.01));
    CHECK(landmark_t2(s20) == Approx(296.32).margin(0.01));
    Scenario s_top = table1_scenario(27.0);
    CHECK(landmark_t2(s_top) == Approx(360.0).margin(1e-12));
    CHECK_THROWS_AS(landmark_full_power_onset(360.0, 120.0, 27.0, 10.0, 10.0),
                    std::domain_error);
}

TEST_CASE("landmark capacity window start") {
    const Scenario s = table1_scenario(18.0);
    const double t2 = landmark_t2(s);
    CHECK(landmark_t_hat(s, t2) == Approx(t2 - 120.0 * std::log(17.0 / 8.0)).epsilon(1e-12));
    CHECK(landmark_t_hat(s, 269.55) == Approx(179.1).margin(0.01));
    // With maximum pre-cooling the capacity window mirrors the reference's
    // final full-power period.
    CHECK(t2 - landmark_t_hat(s, t2) == Approx(360.0 - t2).epsilon(1e-12));
    Scenario pinched = table1_scenario(27.0);
    pinched.X_min = 27.0 - 1e-9;
    CHECK(landmark_t_hat(pinched, 200.0) == Approx(200.0).margin(1e-6));
    CHECK_THROWS_AS(landmark_t_hat(s, 0.0), std::domain_error);
    CHECK_THROWS_AS(landmark_capacity_window_start(200.0, 120.0, 27.0, 10.0, 10.0),
                    std::domain_error);
}

TEST_CASE("landmark time to reach the lower limit") {
    const Scenario s = table1_scenario(18.0);
    CHECK(landmark_t_check(s) == Approx(90.45).margin(0.01));
    CHECK(landmark_t_check(s) == Approx(360.0 - landmark_t2(s)).epsilon(1e-12));
    Scenario pinched = table1_scenario(27.0);
    pinched.X_min = 27.0 - 1e-12;
    CHECK(landmark_t_check(pinched) == Approx(0.0).margin(1e-9));
    CHECK_THROWS_AS(landmark_min_reach_time(120.0, 27.0, 10.0, 10.0), std::domain_error);
}

TEST_CASE("sustained capacity levels") {
    const Scenario s = table1_scenario(18.0);
    CHECK(sustained_capacity_level(CapacityCase::Case1, s) == Approx(0.68).margin(1e-15));
    CHECK(sustained_capacity_level(CapacityCase::Case3, s) == Approx(0.36).margin(1e-15));
    Scenario pinched = s;
    pinched.X_min = s.X_max - 1e-12;
    CHECK(sustained_capacity_level(CapacityCase::Case3, pinched) == Approx(0.0).margin(1e-12));
}

TEST_CASE("thermal parameter validation") {
    CHECK_THROWS_AS((ThermalParams{-1.0, 35.0, 10.0, 100.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ThermalParams{120.0, 10.0, 35.0, 100.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ThermalParams{120.0, 35.0, 10.0, 0.0}).validate(), std::invalid_argument);
}
