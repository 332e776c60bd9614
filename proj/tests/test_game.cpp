#include <cmath>

#include "doctest.h"
#include "mtd/error.hpp"
#include "mtd/game.hpp"
#include "mtd/rng.hpp"

using namespace mtd;

namespace {
constexpr double kStay = 0.8187307530779818;    // exp(-0.2)
constexpr double kBreach = 0.18126924692201818; // 1 - exp(-0.2)
}  // namespace

TEST_CASE("transition rows at the reference alpha") {
    const ModelParams p;
    const auto probe = transition_distribution(SystemState::DefenderControls, DefenderAction::Continue,
                                               AttackerAction::Probe, p);
    CHECK(probe[0] == doctest::Approx(kStay).epsilon(1e-15));
    CHECK(probe[1] == doctest::Approx(kBreach).epsilon(1e-15));

    const auto idle = transition_distribution(SystemState::DefenderControls, DefenderAction::Continue,
                                              AttackerAction::NoProbe, p);
    CHECK(idle[0] == 1.0);
    CHECK(idle[1] == 0.0);

    // A compromised system stays compromised until reimaged.
    for (auto a : {AttackerAction::Probe, AttackerAction::NoProbe}) {
        const auto row = transition_distribution(SystemState::AttackerControls, DefenderAction::Continue, a, p);
        CHECK(row[1] == 1.0);
        for (auto s : {SystemState::DefenderControls, SystemState::AttackerControls}) {
            const auto reset = transition_distribution(s, DefenderAction::Reimage, a, p);
            CHECK(reset[0] == 1.0);
            CHECK(reset[1] == 0.0);
        }
    }
}

TEST_CASE("rows sum to one across random parameters") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        ModelParams p;
        p.alpha = 1e-6 + 5.0 * rng.uniform();
        for (int s = 0; s < 2; ++s)
            for (int d = 0; d < 2; ++d)
                for (int a = 0; a < 2; ++a) {
                    const auto row = transition_distribution(static_cast<SystemState>(s), static_cast<DefenderAction>(d),
                                                             static_cast<AttackerAction>(a), p);
                    CHECK(row[0] + row[1] == doctest::Approx(1.0).epsilon(1e-15));
                    CHECK(row[0] >= 0.0);
                    CHECK(row[1] >= 0.0);
                }
    }
}

TEST_CASE("tail-sum dominance of the compromised row") {
    // P(s' = 1 | s = 1) >= P(s' = 1 | s = 0) for every action pair.
    for (double alpha : {0.01, 0.2, 1.0, 4.0}) {
        ModelParams p;
        p.alpha = alpha;
        for (int d = 0; d < 2; ++d)
            for (int a = 0; a < 2; ++a) {
                const auto lo = transition_distribution(SystemState::DefenderControls, static_cast<DefenderAction>(d),
                                                        static_cast<AttackerAction>(a), p);
                const auto hi = transition_distribution(SystemState::AttackerControls, static_cast<DefenderAction>(d),
                                                        static_cast<AttackerAction>(a), p);
                CHECK(hi[1] >= lo[1]);
            }
    }
}

TEST_CASE("reward tables") {
    ModelParams p;
    p.cost_defender = 0.3;
    p.cost_attacker = 0.05;
    CHECK(reward_defender(SystemState::DefenderControls, DefenderAction::Continue, p) == 1.0);
    CHECK(reward_defender(SystemState::AttackerControls, DefenderAction::Continue, p) == 0.0);
    CHECK(reward_defender(SystemState::DefenderControls, DefenderAction::Reimage, p) == doctest::Approx(0.7));
    CHECK(reward_defender(SystemState::AttackerControls, DefenderAction::Reimage, p) == doctest::Approx(0.7));
    CHECK(reward_attacker(SystemState::DefenderControls, AttackerAction::Probe, p) == doctest::Approx(-0.05));
    CHECK(reward_attacker(SystemState::DefenderControls, AttackerAction::NoProbe, p) == 0.0);
    CHECK(reward_attacker(SystemState::AttackerControls, AttackerAction::Probe, p) == doctest::Approx(0.95));
    CHECK(reward_attacker(SystemState::AttackerControls, AttackerAction::NoProbe, p) == 1.0);
}

TEST_CASE("rewards are bounded by 1 + max cost") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        ModelParams p;
        p.cost_defender = 3.0 * rng.uniform();
        p.cost_attacker = 3.0 * rng.uniform();
        const double bound = 1.0 + std::max(p.cost_defender, p.cost_attacker);
        for (int s = 0; s < 2; ++s)
            for (int x = 0; x < 2; ++x) {
                CHECK(std::abs(reward_defender(static_cast<SystemState>(s), static_cast<DefenderAction>(x), p)) <= bound);
                CHECK(std::abs(reward_attacker(static_cast<SystemState>(s), static_cast<AttackerAction>(x), p)) <= bound);
            }
    }
}

TEST_CASE("sampled transitions match the kernel frequency") {
    const ModelParams p;
    Rng rng(3);
    const int n = 200000;
    int breaches = 0;
    for (int i = 0; i < n; ++i) {
        breaches += sample_transition(SystemState::DefenderControls, DefenderAction::Continue, AttackerAction::Probe, p,
                                      rng) == SystemState::AttackerControls;
    }
    const double freq = static_cast<double>(breaches) / n;
    const double se = std::sqrt(kBreach * kStay / n);
    CHECK(std::abs(freq - kBreach) < 4.0 * se);
}

TEST_CASE("induced attacker kernel mixes reimage and continue rows") {
    const ModelParams p;
    const double r = 0.3;
    const auto k = induced_attacker_kernel(r, AttackerAction::Probe, p);
    CHECK(k[0][1] == doctest::Approx((1.0 - r) * kBreach));
    CHECK(k[1][1] == doctest::Approx(1.0 - r));
    CHECK(k[0][0] + k[0][1] == doctest::Approx(1.0));
    CHECK(k[1][0] + k[1][1] == doctest::Approx(1.0));
}

TEST_CASE("parameter validation") {
    auto bad = [](auto mutate) {
        ModelParams p;
        mutate(p);
        CHECK_THROWS_AS(p.validate(), ValidationError);
    };
    bad([](ModelParams& p) { p.gamma = 1.5; });
    bad([](ModelParams& p) { p.gamma = 1.0; });
    bad([](ModelParams& p) { p.gamma = 0.0; });
    bad([](ModelParams& p) { p.alpha = 0.0; });
    bad([](ModelParams& p) { p.nu = 1.2; });
    bad([](ModelParams& p) { p.cost_defender = -0.1; });
    bad([](ModelParams& p) { p.steepness = 0.0; });
    bad([](ModelParams& p) { p.alpha = std::nan(""); });
    CHECK_NOTHROW(ModelParams{}.validate());
}

TEST_CASE("child seeds are distinct and stable") {
    CHECK(child_seed(1, 0) != child_seed(1, 1));
    CHECK(child_seed(1, 0) != child_seed(2, 0));
    CHECK(child_seed(42, 5) == child_seed(42, 5));
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
