#include "mtd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mtd/csv.hpp"
#include "mtd/error.hpp"
#include "mtd/parallel.hpp"

namespace mtd {

int truncation_horizon(double gamma, double epsilon, double r_max) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
    if (!(epsilon > 0.0) || !(r_max > 0.0)) throw ValidationError("epsilon and r_max must be > 0");
    const double scale = r_max / (1.0 - gamma);
    // Start from the analytic estimate and settle the boundary exactly.
    int h = std::max(1, static_cast<int>(std::floor(std::log(epsilon / scale) / std::log(gamma))));
    while (h > 1 && std::pow(gamma, h - 1) * scale < epsilon) --h;
    while (!(std::pow(gamma, h) * scale < epsilon)) ++h;
    return h;
}

int default_horizon(const ModelParams& params) {
    return truncation_horizon(params.gamma, 1e-3, 1.0 + std::max(params.cost_defender, params.cost_attacker));
}

Trajectory rollout(const ModelParams& params, const ThresholdPolicy& defender,
                   const ThresholdPolicy& attacker, int horizon, std::uint64_t seed,
                   const std::optional<ThresholdPolicy>& filter_model) {
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    Rng rng(seed);
    Trajectory traj;
    traj.seed = seed;
    traj.steps.reserve(static_cast<std::size_t>(horizon));

    const bool model_is_actor = !filter_model || *filter_model == attacker;
    const ThresholdPolicy& model = filter_model ? *filter_model : attacker;

    SystemState s = SystemState::DefenderControls;
    Belief b;
    for (int t = 0; t < horizon; ++t) {
        Step step;
        step.state = s;
        step.belief_before = b;

        const double u_d = rng.uniform();
        const double u_a = rng.uniform();
        step.defender_action =
            u_d < defender_reimage_probability(defender, b) ? DefenderAction::Reimage : DefenderAction::Continue;
        step.attacker_action =
            u_a < attacker_probe_probability(attacker, s, b) ? AttackerAction::Probe : AttackerAction::NoProbe;
        step.reward_defender = reward_defender(s, step.defender_action, params);
        step.reward_attacker = reward_attacker(s, step.attacker_action, params);

        const SystemState next = sample_transition(s, step.defender_action, step.attacker_action, params, rng);
        step.observation = sample_observation(step.attacker_action == AttackerAction::Probe, params, rng);

        const ProbeProfile probes = probe_profile(model, b);
        b = model_is_actor ? posterior(b, step.defender_action, step.observation, probes, params).belief
                           : posterior_or_predict(b, step.defender_action, step.observation, probes, params);
        s = next;
        traj.steps.push_back(step);
    }
    return traj;
}

Returns discounted_returns(const Trajectory& traj, double gamma) {
    Returns r;
    double discount = 1.0;
    for (const auto& step : traj.steps) {
        r.defender += discount * step.reward_defender;
        r.attacker += discount * step.reward_attacker;
        discount *= gamma;
    }
    return r;
}

ValueEstimate estimate_values(const ModelParams& params, const ThresholdPolicy& defender,
                              const ThresholdPolicy& attacker, std::size_t episodes, int horizon,
                              std::uint64_t seed, unsigned workers) {
    if (episodes < 2) throw ValidationError("estimate_values needs at least 2 episodes");
    std::vector<Returns> per_episode(episodes);
    parallel_for(episodes, workers, [&](std::size_t e) {
        per_episode[e] = discounted_returns(rollout(params, defender, attacker, horizon, child_seed(seed, e)),
                                            params.gamma);
    });

    // Shifted sums: identical episodes give the exact value and zero error.
    const Returns& ref = per_episode.front();
    const double n = static_cast<double>(episodes);
    double sum_d = 0.0, sum_a = 0.0, sq_d = 0.0, sq_a = 0.0;
    for (const auto& r : per_episode) {
        const double dd = r.defender - ref.defender;
        const double da = r.attacker - ref.attacker;
        sum_d += dd;
        sum_a += da;
        sq_d += dd * dd;
        sq_a += da * da;
    }
    ValueEstimate est;
    est.episodes = episodes;
    est.mean_defender = ref.defender + sum_d / n;
    est.mean_attacker = ref.attacker + sum_a / n;
    est.stderr_defender = std::sqrt(std::max(0.0, (sq_d - sum_d * sum_d / n) / (n - 1.0)) / n);
    est.stderr_attacker = std::sqrt(std::max(0.0, (sq_a - sum_a * sum_a / n) / (n - 1.0)) / n);
    return est;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,s,b,d,a,o,r_D,r_A\n";
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
        const Step& st = traj.steps[t];
        out << t << ',' << index(st.state) << ',' << format_double(st.belief_before.p_attacker) << ','
            << static_cast<int>(st.defender_action) << ',' << static_cast<int>(st.attacker_action) << ','
            << static_cast<int>(st.observation) << ',' << format_double(st.reward_defender) << ','
            << format_double(st.reward_attacker) << '\n';
    }
}

}  // namespace mtd
