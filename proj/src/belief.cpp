#include "mtd/belief.hpp"

#include <cmath>
#include <string>

#include "mtd/error.hpp"

namespace mtd {

Belief::Belief(double p) : p_attacker(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("belief must lie in [0, 1], got " + std::to_string(p));
}

double probe_success_probability(const ModelParams& params) { return -std::expm1(-params.alpha); }

Observation sample_observation(bool probe_occurred, const ModelParams& params, Rng& rng) {
    // One draw whatever the outcome; u < 1 always, so nu == 0 never misses.
    const double u = rng.uniform();
    return probe_occurred && u < 1.0 - params.nu ? Observation::ProbeDetected : Observation::NoDetection;
}

namespace {

struct Unnormalized {
    double s0;
    double s1;
};

// Joint weight of (next state, observation) after a Continue.
Unnormalized continue_weights(Belief b, Observation o, const ProbeProfile& pr, const ModelParams& params) {
    const double b0 = b.p_defender();
    const double b1 = b.p_attacker;
    const double p0 = pr.p_probe_given_s0;
    const double p1 = pr.p_probe_given_s1;
    const double nu = params.nu;
    const double stay = std::exp(-params.alpha);
    const double breach = probe_success_probability(params);
    if (o == Observation::ProbeDetected) {
        return {b0 * p0 * (1.0 - nu) * stay, b0 * p0 * (1.0 - nu) * breach + b1 * p1 * (1.0 - nu)};
    }
    return {b0 * (p0 * nu * stay + (1.0 - p0)), b0 * p0 * nu * breach + b1 * (p1 * nu + 1.0 - p1)};
}

}  // namespace

double observation_likelihood(Belief b, Observation o, const ProbeProfile& probes,
                              const ModelParams& params) {
    const double detect = (1.0 - params.nu) *
                          (b.p_defender() * probes.p_probe_given_s0 + b.p_attacker * probes.p_probe_given_s1);
    return o == Observation::ProbeDetected ? detect : 1.0 - detect;
}

Posterior posterior(Belief b, DefenderAction d, Observation o, const ProbeProfile& probes,
                    const ModelParams& params) {
    if (d == DefenderAction::Reimage) {
        const double sigma = observation_likelihood(b, o, probes, params);
        if (!(sigma > 0.0)) throw ImpossibleObservation("observation has zero likelihood after reimage");
        return {Belief{}, sigma};
    }
    const auto w = continue_weights(b, o, probes, params);
    const double sigma = w.s0 + w.s1;
    if (!(sigma > 0.0)) {
        throw ImpossibleObservation(std::string("observation ") +
                                    (o == Observation::ProbeDetected ? "ProbeDetected" : "NoDetection") +
                                    " has zero likelihood at belief " + std::to_string(b.p_attacker));
    }
    Posterior out;
    out.belief.p_attacker = w.s1 / sigma;
    out.likelihood = sigma;
    return out;
}

Belief predict(Belief b, DefenderAction d, const ProbeProfile& probes, const ModelParams& params) {
    if (d == DefenderAction::Reimage) return Belief{};
    Belief out;
    out.p_attacker = b.p_attacker + b.p_defender() * probes.p_probe_given_s0 * probe_success_probability(params);
    return out;
}

Belief posterior_or_predict(Belief b, DefenderAction d, Observation o, const ProbeProfile& probes,
                            const ModelParams& params) {
    if (d == DefenderAction::Reimage) return Belief{};
    const auto w = continue_weights(b, o, probes, params);
    const double sigma = w.s0 + w.s1;
    if (!(sigma > 0.0)) return predict(b, d, probes, params);
    Belief out;
    out.p_attacker = w.s1 / sigma;
    return out;
}

}  // namespace mtd
