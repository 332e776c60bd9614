#include "mtd/policy.hpp"

#include <cmath>
#include <limits>

#include "mtd/error.hpp"

namespace mtd {

namespace {

// 1 / (1 + exp(-x)) evaluated on the side that does not cancel.
double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

// Probability of the high action given the signed distance b - theta.
double high_probability(double steepness, double b, double theta) {
    if (std::isinf(steepness)) return b >= theta ? 1.0 : 0.0;
    return sigmoid(steepness * (b - theta));
}

double low_probability(double steepness, double b, double theta) {
    if (std::isinf(steepness)) return b >= theta ? 0.0 : 1.0;
    return sigmoid(-steepness * (b - theta));
}

double log_probability(double steepness, double b, double theta, bool high) {
    if (std::isinf(steepness)) {
        const bool is_high = b >= theta;
        return is_high == high ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double x = steepness * (b - theta);
    return high ? log_sigmoid(x) : log_sigmoid(-x);
}

// d/dtheta log pi: the high action has derivative -K (1 - p_high), the low
// action +K p_high.
double score(double steepness, double b, double theta, bool high) {
    if (std::isinf(steepness)) return 0.0;
    return high ? -steepness * low_probability(steepness, b, theta)
                : steepness * high_probability(steepness, b, theta);
}

std::optional<double> attacker_theta(const ThresholdPolicy& p, SystemState s) {
    if (s == SystemState::DefenderControls) return p.theta;
    return p.theta_compromised;
}

}  // namespace

void ThresholdPolicy::validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("policy theta must lie in [0, 1]");
    if (!(steepness > 0.0)) throw ValidationError("policy steepness must be > 0");
    if (theta_compromised) {
        if (role != Role::Attacker) throw ValidationError("theta_compromised is an attacker-only parameter");
        if (!(*theta_compromised >= 0.0 && *theta_compromised <= 1.0)) {
            throw ValidationError("policy theta_compromised must lie in [0, 1]");
        }
    }
}

bool ThresholdPolicy::is_step() const { return std::isinf(steepness); }

double defender_reimage_probability(const ThresholdPolicy& policy, Belief b) {
    return high_probability(policy.steepness, b.p_attacker, policy.theta);
}

double attacker_probe_probability(const ThresholdPolicy& policy, SystemState s, Belief b) {
    const auto theta = attacker_theta(policy, s);
    if (!theta) return 0.0;
    return low_probability(policy.steepness, b.p_attacker, *theta);
}

ProbeProfile probe_profile(const ThresholdPolicy& attacker, Belief b) {
    return {attacker_probe_probability(attacker, SystemState::DefenderControls, b),
            attacker_probe_probability(attacker, SystemState::AttackerControls, b)};
}

double log_action_probability(const ThresholdPolicy& policy, Belief b, DefenderAction chosen) {
    return log_probability(policy.steepness, b.p_attacker, policy.theta, chosen == DefenderAction::Reimage);
}

double log_action_probability(const ThresholdPolicy& policy, SystemState s, Belief b, AttackerAction chosen) {
    const auto theta = attacker_theta(policy, s);
    const bool high = chosen == AttackerAction::NoProbe;
    if (!theta) return high ? 0.0 : -std::numeric_limits<double>::infinity();
    return log_probability(policy.steepness, b.p_attacker, *theta, high);
}

double log_policy_gradient(const ThresholdPolicy& policy, Belief b, DefenderAction chosen) {
    return score(policy.steepness, b.p_attacker, policy.theta, chosen == DefenderAction::Reimage);
}

double log_policy_gradient(const ThresholdPolicy& policy, SystemState s, Belief b, AttackerAction chosen) {
    const auto theta = attacker_theta(policy, s);
    if (!theta) return 0.0;
    return score(policy.steepness, b.p_attacker, *theta, chosen == AttackerAction::NoProbe);
}

}  // namespace mtd
