#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "mtd/game.hpp"
#include "mtd/policy.hpp"

namespace mtd {

enum class Baseline { None, MeanReturn };

struct LearnConfig {
    std::size_t batch_episodes = 256;
    int horizon = 0;  // 0: default_horizon(params)
    double learning_rate = 0.02;
    int inner_iterations = 300;
    int outer_rounds_max = 50;
    double convergence_tol = 1e-3;
    Baseline baseline = Baseline::MeanReturn;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double init_theta_defender = 0.5;
    double init_theta_attacker = 0.5;
    /// Learn a separate attacker threshold for the compromised state instead
    /// of fixing NoProbe there.
    bool learn_attacker_compromised = false;
    /// When > 0, each best-response phase starts its own policy at this
    /// steepness and raises it geometrically to params.steepness over the
    /// first half of the phase.
    double steepness_start = 0.0;

    void validate() const;
};

/// Score-function estimate of dJ/dtheta for the player owning `policy`.
struct GradientEstimate {
    double theta = 0.0;
    double theta_compromised = 0.0;  // attacker only, when that threshold is learned
};

/// REINFORCE over batch_episodes rollouts seeded child_seed(seed, e):
/// mean over episodes of sum_t dlog pi(a_t)/dtheta * (W_t - baseline_t), with
/// W_t = sum_{k >= t} gamma^k r_k. MeanReturn uses the leave-one-out batch
/// mean of W_t, which keeps the estimator unbiased. The defender's filter
/// conditions on `filter_model` (the attacker in play when not given).
GradientEstimate estimate_gradient(const ModelParams& params, const ThresholdPolicy& policy,
                                   const ThresholdPolicy& opponent, const LearnConfig& cfg, std::uint64_t seed,
                                   const std::optional<ThresholdPolicy>& filter_model = std::nullopt);

/// One projected gradient-ascent step: theta <- clamp(theta + step_size * g, 0, 1).
ThresholdPolicy reinforce_update(const ModelParams& params, const ThresholdPolicy& policy,
                                 const ThresholdPolicy& opponent, const LearnConfig& cfg, std::uint64_t seed,
                                 double step_size, const std::optional<ThresholdPolicy>& filter_model = std::nullopt);

/// inner_iterations updates against a frozen opponent with step size
/// learning_rate / sqrt(t). When the learner is the attacker, the defender's
/// filter stays conditioned on the attacker policy the phase started from.
ThresholdPolicy learn_best_response(const ModelParams& params, const ThresholdPolicy& policy,
                                    const ThresholdPolicy& opponent, const LearnConfig& cfg, std::uint64_t seed);

struct RoundRecord {
    int round = 0;
    double theta_defender = 0.0;
    double theta_attacker = 0.0;
    double value_defender = 0.0;
    double value_attacker = 0.0;

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct EquilibriumResult {
    double theta_defender = 0.0;
    double theta_attacker = 0.0;
    std::optional<double> theta_attacker_compromised;
    int rounds_used = 0;
    std::vector<RoundRecord> history;
    bool converged = false;

    friend bool operator==(const EquilibriumResult&, const EquilibriumResult&) = default;
};

/// Alternating best-response learning, attacker first in each round, until
/// neither threshold moves by more than convergence_tol over a round.
EquilibriumResult fictitious_play(const ModelParams& params, const LearnConfig& cfg);

/// round,theta_D,theta_A,J_D,J_A
void write_history_csv(std::ostream& out, const EquilibriumResult& result);

}  // namespace mtd
