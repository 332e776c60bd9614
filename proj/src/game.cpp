#include "mtd/game.hpp"

#include <cmath>
#include <string>

#include "mtd/error.hpp"

namespace mtd {

void ModelParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(what);
    };
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
    require(nu >= 0.0 && nu <= 1.0, "nu must lie in [0, 1]");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(std::isfinite(cost_defender) && cost_defender >= 0.0, "cost_defender must be >= 0");
    require(std::isfinite(cost_attacker) && cost_attacker >= 0.0, "cost_attacker must be >= 0");
    require(steepness > 0.0, "steepness must be > 0");
}

StateDistribution transition_distribution(SystemState s, DefenderAction d, AttackerAction a,
                                          const ModelParams& params) {
    if (d == DefenderAction::Reimage) return {1.0, 0.0};
    if (s == SystemState::AttackerControls) return {0.0, 1.0};
    if (a == AttackerAction::NoProbe) return {1.0, 0.0};
    return {std::exp(-params.alpha), -std::expm1(-params.alpha)};
}

SystemState sample_transition(SystemState s, DefenderAction d, AttackerAction a,
                              const ModelParams& params, Rng& rng) {
    // Exactly one draw per call, so streams stay aligned across policies.
    const StateDistribution row = transition_distribution(s, d, a, params);
    return rng.uniform() < row[1] ? SystemState::AttackerControls : SystemState::DefenderControls;
}

double reward_defender(SystemState s, DefenderAction d, const ModelParams& params) {
    if (d == DefenderAction::Reimage) return 1.0 - params.cost_defender;
    return s == SystemState::DefenderControls ? 1.0 : 0.0;
}

double reward_attacker(SystemState s, AttackerAction a, const ModelParams& params) {
    const double control = s == SystemState::AttackerControls ? 1.0 : 0.0;
    return a == AttackerAction::Probe ? control - params.cost_attacker : control;
}

Kernel2 induced_attacker_kernel(double p_reimage, AttackerAction a, const ModelParams& params) {
    Kernel2 k{};
    for (int i = 0; i < 2; ++i) {
        const auto s = static_cast<SystemState>(i);
        const auto keep = transition_distribution(s, DefenderAction::Continue, a, params);
        const auto reset = transition_distribution(s, DefenderAction::Reimage, a, params);
        for (int j = 0; j < 2; ++j) k[i][j] = p_reimage * reset[j] + (1.0 - p_reimage) * keep[j];
    }
    return k;
}

}  // namespace mtd
