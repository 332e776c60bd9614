#pragma once

#include <optional>

#include "mtd/belief.hpp"
#include "mtd/game.hpp"

namespace mtd {

enum class Role : int { Defender = 0, Attacker = 1 };

/// Sigmoid threshold policy pi(high | b) = 1 / (1 + exp(-K (b - theta))).
///
/// The "high" action is Reimage for the defender and NoProbe for the
/// attacker, so the defender reimages above theta and the attacker stops
/// probing above theta. An infinite steepness gives the exact step policy
/// (high action for b >= theta).
///
/// The attacker's action in the compromised state is fixed to NoProbe unless
/// `theta_compromised` is set, in which case that state gets its own
/// threshold with the same orientation.
struct ThresholdPolicy {
    double theta = 0.5;
    double steepness = 50.0;
    Role role = Role::Defender;
    std::optional<double> theta_compromised;

    static ThresholdPolicy defender(double theta, double steepness) {
        return {theta, steepness, Role::Defender, std::nullopt};
    }
    static ThresholdPolicy attacker(double theta, double steepness) {
        return {theta, steepness, Role::Attacker, std::nullopt};
    }

    /// Throws ValidationError.
    void validate() const;
    bool is_step() const;
    friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
};

double defender_reimage_probability(const ThresholdPolicy& policy, Belief b);
double attacker_probe_probability(const ThresholdPolicy& policy, SystemState s, Belief b);

/// Probe profile of an attacker policy at belief b, as the filter needs it.
ProbeProfile probe_profile(const ThresholdPolicy& attacker, Belief b);

/// log pi(chosen | .), computed without cancellation in either tail.
double log_action_probability(const ThresholdPolicy& policy, Belief b, DefenderAction chosen);
double log_action_probability(const ThresholdPolicy& policy, SystemState s, Belief b, AttackerAction chosen);

/// d/dtheta log pi(chosen | .). For the attacker this is the derivative with
/// respect to the threshold that governs state `s`; it is zero where the
/// action is fixed. Zero everywhere for step policies.
double log_policy_gradient(const ThresholdPolicy& policy, Belief b, DefenderAction chosen);
double log_policy_gradient(const ThresholdPolicy& policy, SystemState s, Belief b, AttackerAction chosen);

}  // namespace mtd
