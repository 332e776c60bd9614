#pragma once

#include "mtd/game.hpp"
#include "mtd/rng.hpp"

namespace mtd {

/// Defender's probability that the attacker controls the system.
struct Belief {
    double p_attacker = 0.0;

    constexpr Belief() = default;
    /// Throws ValidationError outside [0, 1].
    explicit Belief(double p);

    double p_defender() const { return 1.0 - p_attacker; }
    friend bool operator==(const Belief&, const Belief&) = default;
};

enum class Observation : int { ProbeDetected = 0, NoDetection = 1 };

/// Probe probabilities of the attacker policy the filter conditions on.
struct ProbeProfile {
    double p_probe_given_s0 = 0.0;
    double p_probe_given_s1 = 0.0;
};

struct Posterior {
    Belief belief;
    double likelihood = 0.0;  // total probability of the observation
};

/// 1 - exp(-alpha).
double probe_success_probability(const ModelParams& params);

/// Detection channel: a probe is seen with probability 1 - nu; there are no
/// false alarms.
Observation sample_observation(bool probe_occurred, const ModelParams& params, Rng& rng);

/// sigma(o, b): probability of `o` before it is seen. Does not depend on the
/// defender's action because the probe and the reimage happen in the same step.
double observation_likelihood(Belief b, Observation o, const ProbeProfile& probes,
                              const ModelParams& params);

/// HMM filter step. A reimage resets the belief to zero whatever is observed.
/// Throws ImpossibleObservation when `o` has zero likelihood under `probes`.
Posterior posterior(Belief b, DefenderAction d, Observation o, const ProbeProfile& probes,
                    const ModelParams& params);

/// Belief after the transition but before the observation is folded in.
Belief predict(Belief b, DefenderAction d, const ProbeProfile& probes, const ModelParams& params);

/// posterior() that falls back to predict() for an observation the filter
/// model rules out. Used where the acting attacker may differ from the model.
Belief posterior_or_predict(Belief b, DefenderAction d, Observation o, const ProbeProfile& probes,
                            const ModelParams& params);

}  // namespace mtd
