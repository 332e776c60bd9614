#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "mtd/csv.hpp"
#include "mtd/error.hpp"
#include "mtd/simulator.hpp"

using namespace mtd;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Step policies: the sigmoid at K = 50 still probes or reimages with
// probability 1/2 at its threshold, so "never" needs the exact step.
ThresholdPolicy never_reimage() { return ThresholdPolicy::defender(1.0, kInf); }
ThresholdPolicy always_reimage() { return ThresholdPolicy::defender(0.0, kInf); }
ThresholdPolicy never_probe() { return ThresholdPolicy::attacker(0.0, kInf); }
ThresholdPolicy always_probe() { return ThresholdPolicy::attacker(1.0, kInf); }

double geometric_sum(double gamma, int h) { return (1.0 - std::pow(gamma, h)) / (1.0 - gamma); }
}  // namespace

TEST_CASE("truncation horizon") {
    // 0.95^193 / 0.05 = 1.0039e-3 is not below 1e-3; 0.95^194 / 0.05 = 9.54e-4 is.
    CHECK(std::pow(0.95, 193) / 0.05 >= 1e-3);
    CHECK(std::pow(0.95, 194) / 0.05 < 1e-3);
    CHECK(truncation_horizon(0.95, 1e-3, 1.0) == 194);
    CHECK(truncation_horizon(0.5, 1.0, 1.0) == 2);
    CHECK(truncation_horizon(1e-9, 0.5, 1.0) <= 2);
    CHECK(default_horizon(ModelParams{}) == truncation_horizon(0.95, 1e-3, 1.5));
    CHECK_THROWS_AS(truncation_horizon(1.0, 1e-3, 1.0), ValidationError);
}

TEST_CASE("static system without threats") {
    const ModelParams p;
    const int h = truncation_horizon(0.95, 1e-3, 1.0);
    const auto traj = rollout(p, never_reimage(), never_probe(), h, 17);
    REQUIRE(traj.steps.size() == static_cast<std::size_t>(h));
    for (const auto& st : traj.steps) {
        CHECK(st.state == SystemState::DefenderControls);
        CHECK(st.belief_before.p_attacker == 0.0);
    }
    const auto r = discounted_returns(traj, p.gamma);
    // (1 - 0.95^194) / 0.05.
    CHECK(r.defender == doctest::Approx(19.999046).epsilon(1e-7));
    CHECK(r.defender == doctest::Approx(geometric_sum(0.95, h)).epsilon(1e-13));
    CHECK(r.attacker == 0.0);

    const auto est = estimate_values(p, never_reimage(), never_probe(), 8, h, 3);
    CHECK(est.mean_defender == doctest::Approx(geometric_sum(0.95, h)).epsilon(1e-13));
    CHECK(est.stderr_defender == 0.0);
    CHECK(est.stderr_attacker == 0.0);
}

TEST_CASE("always reimaging resets every step") {
    ModelParams p;
    p.cost_defender = 0.3;
    const auto traj = rollout(p, always_reimage(), always_probe(), 50, 5);
    for (const auto& st : traj.steps) {
        CHECK(st.state == SystemState::DefenderControls);
        CHECK(st.defender_action == DefenderAction::Reimage);
        CHECK(st.reward_defender == doctest::Approx(0.7));
    }
}

TEST_CASE("single-step return") {
    ModelParams p;
    p.cost_defender = 0.25;
    const auto traj = rollout(p, always_reimage(), never_probe(), 1, 1);
    const auto r = discounted_returns(traj, p.gamma);
    CHECK(r.defender == doctest::Approx(0.75));
}

TEST_CASE("first compromise time is geometric") {
    const ModelParams p;
    const int n = 10000;
    double sum = 0.0, sq = 0.0;
    for (int e = 0; e < n; ++e) {
        const auto traj = rollout(p, never_reimage(), always_probe(), 300, child_seed(77, e));
        int t = 0;
        while (traj.steps[t].state == SystemState::DefenderControls) ++t;
        sum += t;
        sq += static_cast<double>(t) * t;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    // 1 / (1 - exp(-0.2)).
    CHECK(std::abs(mean - 5.516655566126993) < 4.0 * se);
}

TEST_CASE("absorption without reimaging") {
    const ModelParams p;
    for (int e = 0; e < 200; ++e) {
        const auto traj = rollout(p, never_reimage(), ThresholdPolicy::attacker(0.6, 50.0), 100, child_seed(8, e));
        bool compromised = false;
        for (const auto& st : traj.steps) {
            if (compromised) CHECK(st.state == SystemState::AttackerControls);
            compromised = compromised || st.state == SystemState::AttackerControls;
        }
    }
}

TEST_CASE("determinism and belief replay") {
    const ModelParams p;
    const auto d = ThresholdPolicy::defender(0.4, 50.0);
    const auto a = ThresholdPolicy::attacker(0.6, 50.0);
    for (std::uint64_t seed : {1ULL, 2ULL, 12345ULL}) {
        const auto t1 = rollout(p, d, a, 194, seed);
        const auto t2 = rollout(p, d, a, 194, seed);
        CHECK(t1 == t2);
        std::ostringstream o1, o2;
        write_trajectory_csv(o1, t1);
        write_trajectory_csv(o2, t2);
        CHECK(o1.str() == o2.str());

        Belief b;
        for (const auto& st : t1.steps) {
            CHECK(std::abs(st.belief_before.p_attacker - b.p_attacker) <= 1e-12);
            b = posterior(b, st.defender_action, st.observation, probe_profile(a, b), p).belief;
        }
    }
}

TEST_CASE("reward and return bounds") {
    ModelParams p;
    p.cost_defender = 0.8;
    p.cost_attacker = 0.3;
    const double step_bound = 1.8;
    for (int e = 0; e < 100; ++e) {
        const auto traj = rollout(p, ThresholdPolicy::defender(0.3, 20.0), ThresholdPolicy::attacker(0.7, 20.0), 194,
                                  child_seed(4, e));
        for (const auto& st : traj.steps) {
            CHECK(std::abs(st.reward_defender) <= step_bound);
            CHECK(std::abs(st.reward_attacker) <= step_bound);
        }
        const auto r = discounted_returns(traj, p.gamma);
        CHECK(std::abs(r.defender) <= step_bound / (1.0 - p.gamma));
        CHECK(std::abs(r.attacker) <= step_bound / (1.0 - p.gamma));
    }
}

TEST_CASE("value estimates do not depend on the worker count") {
    const ModelParams p;
    const auto d = ThresholdPolicy::defender(0.3, 50.0);
    const auto a = ThresholdPolicy::attacker(0.3, 50.0);
    const auto e1 = estimate_values(p, d, a, 64, 194, 9, 1);
    CHECK(e1 == estimate_values(p, d, a, 64, 194, 9, 2));
    CHECK(e1 == estimate_values(p, d, a, 64, 194, 9, 8));
    CHECK(e1 == estimate_values(p, d, a, 64, 194, 9, 1));
    CHECK_THROWS_AS(estimate_values(p, d, a, 1, 194, 9), ValidationError);
}

TEST_CASE("trajectory csv layout") {
    const ModelParams p;
    const auto traj = rollout(p, ThresholdPolicy::defender(0.3, 50.0), ThresholdPolicy::attacker(0.3, 50.0), 5, 1);
    std::ostringstream out;
    write_trajectory_csv(out, traj);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,s,b,d,a,o,r_D,r_A");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto fields = split(line, ',');
        CHECK(fields.size() == 8);
        double b = -1.0;
        CHECK(parse_double(fields[2], b));
        CHECK(b == traj.steps[static_cast<std::size_t>(rows)].belief_before.p_attacker);
        ++rows;
    }
    CHECK(rows == 5);
}
