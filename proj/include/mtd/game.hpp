#pragma once

#include <array>

#include "mtd/rng.hpp"

namespace mtd {

enum class SystemState : int { DefenderControls = 0, AttackerControls = 1 };
enum class DefenderAction : int { Reimage = 0, Continue = 1 };
enum class AttackerAction : int { Probe = 0, NoProbe = 1 };

/// Scalar constants of the game.
struct ModelParams {
    double alpha = 0.2;          // probe effectiveness; success probability is 1 - exp(-alpha)
    double nu = 0.2;             // probability that a probe goes undetected
    double gamma = 0.95;         // discount factor
    double cost_defender = 0.5;  // reimage cost C_D
    double cost_attacker = 0.05; // probe cost C_A
    double steepness = 50.0;     // sigmoid steepness K shared by both policies

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

/// Probability vector indexed by SystemState.
using StateDistribution = std::array<double, 2>;

/// Row T(., s, d, a) of the transition kernel.
StateDistribution transition_distribution(SystemState s, DefenderAction d, AttackerAction a,
                                          const ModelParams& params);

SystemState sample_transition(SystemState s, DefenderAction d, AttackerAction a,
                              const ModelParams& params, Rng& rng);

double reward_defender(SystemState s, DefenderAction d, const ModelParams& params);
double reward_attacker(SystemState s, AttackerAction a, const ModelParams& params);

/// 2x2 kernel seen by the attacker when the defender reimages with
/// probability `p_reimage`: row i is the next-state distribution from state i.
using Kernel2 = std::array<StateDistribution, 2>;
Kernel2 induced_attacker_kernel(double p_reimage, AttackerAction a, const ModelParams& params);

constexpr int index(SystemState s) noexcept { return static_cast<int>(s); }

}  // namespace mtd
