#include "mtd/learner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mtd/csv.hpp"
#include "mtd/error.hpp"
#include "mtd/parallel.hpp"
#include "mtd/rng.hpp"
#include "mtd/simulator.hpp"

namespace mtd {

void LearnConfig::validate() const {
    if (batch_episodes < 1) throw ValidationError("batch_episodes must be >= 1");
    if (horizon < 0) throw ValidationError("horizon must be >= 1 (or 0 for the default)");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning_rate must be >= 0");
    if (inner_iterations < 1) throw ValidationError("inner_iterations must be >= 1");
    if (outer_rounds_max < 1) throw ValidationError("outer_rounds_max must be >= 1");
    if (!(convergence_tol > 0.0)) throw ValidationError("convergence_tol must be > 0");
    if (!(init_theta_defender >= 0.0 && init_theta_defender <= 1.0) ||
        !(init_theta_attacker >= 0.0 && init_theta_attacker <= 1.0)) {
        throw ValidationError("initial thresholds must lie in [0, 1]");
    }
}

namespace {

struct EpisodeTerms {
    std::vector<double> score;       // dlog pi / dtheta per step
    std::vector<double> score_comp;  // same for the compromised-state threshold
    std::vector<double> weight;      // sum_{k >= t} gamma^k r_k
};

EpisodeTerms episode_terms(const ModelParams& params, const ThresholdPolicy& policy, const Trajectory& traj) {
    const std::size_t h = traj.steps.size();
    EpisodeTerms terms;
    terms.score.assign(h, 0.0);
    terms.score_comp.assign(h, 0.0);
    terms.weight.assign(h, 0.0);
    const bool defender = policy.role == Role::Defender;
    double discount = 1.0;
    std::vector<double> discounted(h);
    for (std::size_t t = 0; t < h; ++t) {
        const Step& st = traj.steps[t];
        if (defender) {
            terms.score[t] = log_policy_gradient(policy, st.belief_before, st.defender_action);
            discounted[t] = discount * st.reward_defender;
        } else {
            const double g = log_policy_gradient(policy, st.state, st.belief_before, st.attacker_action);
            (st.state == SystemState::DefenderControls ? terms.score : terms.score_comp)[t] = g;
            discounted[t] = discount * st.reward_attacker;
        }
        discount *= params.gamma;
    }
    double tail = 0.0;
    for (std::size_t t = h; t-- > 0;) {
        tail += discounted[t];
        terms.weight[t] = tail;
    }
    return terms;
}

}  // namespace

GradientEstimate estimate_gradient(const ModelParams& params, const ThresholdPolicy& policy,
                                   const ThresholdPolicy& opponent, const LearnConfig& cfg, std::uint64_t seed,
                                   const std::optional<ThresholdPolicy>& filter_model) {
    const bool defender = policy.role == Role::Defender;
    const ThresholdPolicy& pol_d = defender ? policy : opponent;
    const ThresholdPolicy& pol_a = defender ? opponent : policy;
    const int horizon = cfg.horizon > 0 ? cfg.horizon : default_horizon(params);
    const std::size_t n = cfg.batch_episodes;

    std::vector<EpisodeTerms> episodes(n);
    parallel_for(n, cfg.workers, [&](std::size_t e) {
        episodes[e] = episode_terms(params, policy,
                                    rollout(params, pol_d, pol_a, horizon, child_seed(seed, e), filter_model));
    });

    const auto h = static_cast<std::size_t>(horizon);
    // Sums are shifted by the first episode so identical returns cancel exactly.
    const std::vector<double>& ref = episodes.front().weight;
    std::vector<double> total(h, 0.0);
    if (cfg.baseline == Baseline::MeanReturn) {
        for (const auto& ep : episodes) {
            for (std::size_t t = 0; t < h; ++t) total[t] += ep.weight[t] - ref[t];
        }
    }
    const bool loo = cfg.baseline == Baseline::MeanReturn && n > 1;
    GradientEstimate g;
    for (const auto& ep : episodes) {
        for (std::size_t t = 0; t < h; ++t) {
            const double dev = ep.weight[t] - ref[t];
            const double adv = loo ? dev - (total[t] - dev) / static_cast<double>(n - 1) : ep.weight[t];
            g.theta += ep.score[t] * adv;
            g.theta_compromised += ep.score_comp[t] * adv;
        }
    }
    g.theta /= static_cast<double>(n);
    g.theta_compromised /= static_cast<double>(n);
    if (!std::isfinite(g.theta) || !std::isfinite(g.theta_compromised)) {
        throw Error("NonFiniteGradient", "policy gradient estimate is not finite");
    }
    return g;
}

ThresholdPolicy reinforce_update(const ModelParams& params, const ThresholdPolicy& policy,
                                 const ThresholdPolicy& opponent, const LearnConfig& cfg, std::uint64_t seed,
                                 double step_size, const std::optional<ThresholdPolicy>& filter_model) {
    const GradientEstimate g = estimate_gradient(params, policy, opponent, cfg, seed, filter_model);
    ThresholdPolicy next = policy;
    next.theta = std::clamp(policy.theta + step_size * g.theta, 0.0, 1.0);
    if (next.theta_compromised) {
        next.theta_compromised = std::clamp(*policy.theta_compromised + step_size * g.theta_compromised, 0.0, 1.0);
    }
    return next;
}

ThresholdPolicy learn_best_response(const ModelParams& params, const ThresholdPolicy& policy,
                                    const ThresholdPolicy& opponent, const LearnConfig& cfg, std::uint64_t seed) {
    std::optional<ThresholdPolicy> model;
    if (policy.role == Role::Attacker) model = policy;
    ThresholdPolicy current = policy;
    const double k_final = policy.steepness;
    const bool anneal = cfg.steepness_start > 0.0 && cfg.steepness_start < k_final && cfg.inner_iterations > 1;
    const int ramp = std::max(1, cfg.inner_iterations / 2);
    for (int t = 1; t <= cfg.inner_iterations; ++t) {
        if (anneal) {
            const double f = std::min(1.0, static_cast<double>(t - 1) / ramp);
            current.steepness = cfg.steepness_start * std::pow(k_final / cfg.steepness_start, f);
        }
        const double step = cfg.learning_rate / std::sqrt(static_cast<double>(t));
        current = reinforce_update(params, current, opponent, cfg, child_seed(seed, static_cast<std::uint64_t>(t)),
                                   step, model);
    }
    current.steepness = k_final;
    return current;
}

EquilibriumResult fictitious_play(const ModelParams& params, const LearnConfig& cfg) {
    params.validate();
    cfg.validate();
    const int horizon = cfg.horizon > 0 ? cfg.horizon : default_horizon(params);
    ThresholdPolicy defender = ThresholdPolicy::defender(cfg.init_theta_defender, params.steepness);
    ThresholdPolicy attacker = ThresholdPolicy::attacker(cfg.init_theta_attacker, params.steepness);
    if (cfg.learn_attacker_compromised) attacker.theta_compromised = 1.0;

    EquilibriumResult result;
    for (int round = 1; round <= cfg.outer_rounds_max; ++round) {
        const std::uint64_t round_seed = child_seed(cfg.seed, static_cast<std::uint64_t>(round));
        const ThresholdPolicy prev_d = defender;
        const ThresholdPolicy prev_a = attacker;
        attacker = learn_best_response(params, attacker, defender, cfg, child_seed(round_seed, 0));
        defender = learn_best_response(params, defender, attacker, cfg, child_seed(round_seed, 1));

        const auto est = estimate_values(params, defender, attacker, std::max<std::size_t>(cfg.batch_episodes, 2),
                                         horizon, child_seed(round_seed, 2), cfg.workers);
        result.history.push_back({round, defender.theta, attacker.theta, est.mean_defender, est.mean_attacker});
        result.rounds_used = round;

        double moved = std::max(std::abs(defender.theta - prev_d.theta), std::abs(attacker.theta - prev_a.theta));
        if (attacker.theta_compromised) {
            moved = std::max(moved, std::abs(*attacker.theta_compromised - *prev_a.theta_compromised));
        }
        if (moved <= cfg.convergence_tol) {
            result.converged = true;
            break;
        }
    }
    result.theta_defender = defender.theta;
    result.theta_attacker = attacker.theta;
    result.theta_attacker_compromised = attacker.theta_compromised;
    return result;
}

void write_history_csv(std::ostream& out, const EquilibriumResult& result) {
    out << "round,theta_D,theta_A,J_D,J_A\n";
    for (const auto& r : result.history) {
        out << r.round << ',' << format_double(r.theta_defender) << ',' << format_double(r.theta_attacker) << ','
            << format_double(r.value_defender) << ',' << format_double(r.value_attacker) << '\n';
    }
}

}  // namespace mtd
