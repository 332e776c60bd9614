#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "mtd/error.hpp"
#include "mtd/learner.hpp"
#include "mtd/oracle.hpp"
#include "mtd/simulator.hpp"

using namespace mtd;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams params_with(double cd, double ca) {
    ModelParams p;
    p.cost_defender = cd;
    p.cost_attacker = ca;
    return p;
}

LearnConfig small_config() {
    LearnConfig cfg;
    cfg.batch_episodes = 32;
    cfg.inner_iterations = 5;
    cfg.outer_rounds_max = 3;
    cfg.seed = 11;
    return cfg;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& x) {
    double s = 0.0, sq = 0.0;
    for (double v : x) s += v;
    const double m = s / x.size();
    for (double v : x) sq += (v - m) * (v - m);
    return {m, std::sqrt(sq / (x.size() - 1) / x.size())};
}
}  // namespace

TEST_CASE("identical returns give a zero gradient") {
    // At theta = 1, K = 50 the defender reimages with probability ~1e-22 at
    // b = 0 and the attacker never probes, so every episode is the same.
    LearnConfig cfg = small_config();
    const auto d = ThresholdPolicy::defender(1.0, 50.0);
    const auto g = estimate_gradient(ModelParams{}, d, ThresholdPolicy::attacker(0.0, kInf), cfg, 3);
    CHECK(g.theta == 0.0);
    const auto next = reinforce_update(ModelParams{}, d, ThresholdPolicy::attacker(0.0, kInf), cfg, 3, 0.02);
    CHECK(next.theta == d.theta);
}

TEST_CASE("projection onto [0, 1]") {
    LearnConfig cfg = small_config();
    cfg.batch_episodes = 256;
    const auto d = ThresholdPolicy::defender(0.99, 1.0);
    const auto g = estimate_gradient(params_with(0.5, 0.05), d, ThresholdPolicy::attacker(0.0, kInf), cfg, 4);
    CHECK(g.theta > 0.0);
    const auto next = reinforce_update(params_with(0.5, 0.05), d, ThresholdPolicy::attacker(0.0, kInf), cfg, 4, 10.0);
    CHECK(next.theta == 1.0);
}

TEST_CASE("zero learning rate leaves the policy unchanged") {
    LearnConfig cfg = small_config();
    cfg.learning_rate = 0.0;
    const auto a = ThresholdPolicy::attacker(0.37, 50.0);
    const auto out = learn_best_response(ModelParams{}, a, ThresholdPolicy::defender(0.4, 50.0), cfg, 5);
    CHECK(out == a);
}

TEST_CASE("gradient matches common-random-number finite differences") {
    const auto params = params_with(0.5, 0.05);
    const double h = 0.01;
    const int n = 4000;
    const int horizon = default_horizon(params);
    LearnConfig single;
    single.batch_episodes = 1;
    single.baseline = Baseline::None;

    SUBCASE("defender") {
        const auto d = ThresholdPolicy::defender(0.3, 10.0);
        const auto a = ThresholdPolicy::attacker(0.4, 50.0);
        std::vector<double> g(n), fd(n);
        for (int i = 0; i < n; ++i) {
            g[i] = estimate_gradient(params, d, a, single, static_cast<std::uint64_t>(i)).theta;
            const auto seed = child_seed(static_cast<std::uint64_t>(i), 0);
            auto up = d, down = d;
            up.theta += h;
            down.theta -= h;
            fd[i] = (discounted_returns(rollout(params, up, a, horizon, seed), params.gamma).defender -
                     discounted_returns(rollout(params, down, a, horizon, seed), params.gamma).defender) /
                    (2.0 * h);
        }
        const auto mg = mean_se(g), mf = mean_se(fd);
        CHECK(std::abs(mg.mean - mf.mean) <= 3.0 * std::hypot(mg.se, mf.se));
    }
    SUBCASE("attacker") {
        const auto d = ThresholdPolicy::defender(0.3, 50.0);
        const auto a = ThresholdPolicy::attacker(0.2, 10.0);
        std::vector<double> g(n), fd(n);
        for (int i = 0; i < n; ++i) {
            // The filter model stays at the unperturbed policy, as in the learner.
            g[i] = estimate_gradient(params, a, d, single, static_cast<std::uint64_t>(i), a).theta;
            const auto seed = child_seed(static_cast<std::uint64_t>(i), 0);
            auto up = a, down = a;
            up.theta += h;
            down.theta -= h;
            fd[i] = (discounted_returns(rollout(params, d, up, horizon, seed, a), params.gamma).attacker -
                     discounted_returns(rollout(params, d, down, horizon, seed, a), params.gamma).attacker) /
                    (2.0 * h);
        }
        const auto mg = mean_se(g), mf = mean_se(fd);
        CHECK(std::abs(mg.mean - mf.mean) <= 3.0 * std::hypot(mg.se, mf.se));
    }
}

TEST_CASE("baseline keeps the estimator centred") {
    // Mean over many independent batches with and without the baseline agree.
    const auto params = params_with(0.5, 0.05);
    const auto d = ThresholdPolicy::defender(0.3, 10.0);
    const auto a = ThresholdPolicy::attacker(0.4, 50.0);
    LearnConfig with = small_config();
    with.batch_episodes = 16;
    LearnConfig without = with;
    without.baseline = Baseline::None;
    std::vector<double> gw, gn;
    for (int i = 0; i < 400; ++i) {
        gw.push_back(estimate_gradient(params, d, a, with, 1000 + i).theta);
        gn.push_back(estimate_gradient(params, d, a, without, 1000 + i).theta);
    }
    const auto mw = mean_se(gw), mn = mean_se(gn);
    CHECK(std::abs(mw.mean - mn.mean) <= 3.0 * std::hypot(mw.se, mn.se));
    CHECK(mw.se < mn.se);
}

TEST_CASE("attacker learns to stay out against a defender that always reimages") {
    const auto params = params_with(0.5, 0.1);
    const auto defender = ThresholdPolicy::defender(0.0, kInf);
    LearnConfig cfg;
    cfg.batch_episodes = 64;
    cfg.steepness_start = 1.0;  // at K = 50 the start point is saturated
    const auto learned = learn_best_response(params, ThresholdPolicy::attacker(0.5, 50.0), defender, cfg, 21);
    const auto oracle =
        attacker_best_response(defender, ThresholdPolicy::attacker(learned.theta, 50.0), BeliefGrid(201), params);
    REQUIRE(oracle.threshold);
    CHECK(*oracle.threshold == 0.0);
    CHECK(std::abs(learned.theta - *oracle.threshold) <= 0.05);
}

TEST_CASE("defender learns to stop reimaging when nobody probes") {
    const auto params = params_with(0.5, 0.05);
    const auto attacker = ThresholdPolicy::attacker(0.0, kInf);
    LearnConfig cfg;
    cfg.batch_episodes = 64;
    cfg.steepness_start = 1.0;
    const auto learned = learn_best_response(params, ThresholdPolicy::defender(0.5, 50.0), attacker, cfg, 22);
    CHECK(learned.theta >= 0.95);
    // Only b = 0 is ever visited; the oracle continues there.
    const auto oracle = defender_best_response(attacker, BeliefGrid(201), params);
    CHECK(oracle.action[0] == DefenderAction::Continue);
}

TEST_CASE("fixed steepness stalls on a saturated start") {
    // Documents why annealing exists: the only visited belief is b = 0 and
    // the K = 50 sigmoid is flat there, so the default learner does not move.
    const auto params = params_with(0.5, 0.1);
    LearnConfig cfg;
    cfg.batch_episodes = 64;
    cfg.inner_iterations = 20;
    const auto learned =
        learn_best_response(params, ThresholdPolicy::attacker(0.5, 50.0), ThresholdPolicy::defender(0.0, kInf), cfg, 21);
    CHECK(std::abs(learned.theta - 0.5) < 1e-6);
}

TEST_CASE("infinite tolerance stops after one round") {
    LearnConfig cfg = small_config();
    cfg.convergence_tol = kInf;
    const auto r = fictitious_play(ModelParams{}, cfg);
    CHECK(r.converged);
    CHECK(r.rounds_used == 1);
    CHECK(r.history.size() == 1);
}

TEST_CASE("fictitious play is deterministic") {
    LearnConfig cfg = small_config();
    const auto a = fictitious_play(ModelParams{}, cfg);
    const auto b = fictitious_play(ModelParams{}, cfg);
    CHECK(a == b);
    cfg.workers = 4;
    CHECK(fictitious_play(ModelParams{}, cfg) == a);
    cfg.seed = 12;
    cfg.workers = 1;
    CHECK_FALSE(fictitious_play(ModelParams{}, cfg) == a);
}

TEST_CASE("history stays in range") {
    LearnConfig cfg = small_config();
    cfg.learning_rate = 5.0;
    cfg.steepness_start = 1.0;
    const auto r = fictitious_play(params_with(0.1, 0.05), cfg);
    CHECK(r.history.size() == static_cast<std::size_t>(r.rounds_used));
    for (const auto& h : r.history) {
        CHECK(h.theta_defender >= 0.0);
        CHECK(h.theta_defender <= 1.0);
        CHECK(h.theta_attacker >= 0.0);
        CHECK(h.theta_attacker <= 1.0);
        CHECK(std::isfinite(h.value_defender));
        CHECK(std::isfinite(h.value_attacker));
    }
    std::ostringstream out;
    write_history_csv(out, r);
    CHECK(out.str().rfind("round,theta_D,theta_A,J_D,J_A\n", 0) == 0);
}

TEST_CASE("compromised-state threshold can be learned") {
    LearnConfig cfg = small_config();
    cfg.learn_attacker_compromised = true;
    const auto r = fictitious_play(ModelParams{}, cfg);
    REQUIRE(r.theta_attacker_compromised);
    CHECK(*r.theta_attacker_compromised >= 0.0);
    CHECK(*r.theta_attacker_compromised <= 1.0);
}

TEST_CASE("config validation") {
    LearnConfig cfg;
    cfg.batch_episodes = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = LearnConfig{};
    cfg.convergence_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = LearnConfig{};
    cfg.inner_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
