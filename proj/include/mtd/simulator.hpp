#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mtd/belief.hpp"
#include "mtd/game.hpp"
#include "mtd/policy.hpp"

namespace mtd {

struct Step {
    SystemState state = SystemState::DefenderControls;
    Belief belief_before;
    DefenderAction defender_action = DefenderAction::Continue;
    AttackerAction attacker_action = AttackerAction::NoProbe;
    Observation observation = Observation::NoDetection;
    double reward_defender = 0.0;
    double reward_attacker = 0.0;

    friend bool operator==(const Step&, const Step&) = default;
};

struct Trajectory {
    std::vector<Step> steps;
    std::uint64_t seed = 0;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Returns {
    double defender = 0.0;
    double attacker = 0.0;
};

struct ValueEstimate {
    double mean_defender = 0.0;
    double mean_attacker = 0.0;
    double stderr_defender = 0.0;
    double stderr_attacker = 0.0;
    std::size_t episodes = 0;

    friend bool operator==(const ValueEstimate&, const ValueEstimate&) = default;
};

/// Smallest H >= 1 with gamma^H * r_max / (1 - gamma) < epsilon.
int truncation_horizon(double gamma, double epsilon, double r_max);

/// Horizon whose truncation bias is below 1e-3 for the given parameters.
int default_horizon(const ModelParams& params);

/// One episode from s = DefenderControls, b = 0. Each step draws the
/// defender action, the attacker action, the next state and the observation,
/// one uniform each. The belief is filtered with the probe profile of
/// `filter_model` (the acting attacker policy when not given).
Trajectory rollout(const ModelParams& params, const ThresholdPolicy& defender,
                   const ThresholdPolicy& attacker, int horizon, std::uint64_t seed,
                   const std::optional<ThresholdPolicy>& filter_model = std::nullopt);

Returns discounted_returns(const Trajectory& traj, double gamma);

/// Monte Carlo value of a policy pair; episode e is seeded with
/// child_seed(seed, e). Bitwise independent of `workers`.
ValueEstimate estimate_values(const ModelParams& params, const ThresholdPolicy& defender,
                              const ThresholdPolicy& attacker, std::size_t episodes, int horizon,
                              std::uint64_t seed, unsigned workers = 1);

/// CSV with header t,s,b,d,a,o,r_D,r_A; enums are written as their integer codes.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace mtd
