#include "mtd/checks.hpp"

#include <cmath>
#include <sstream>

#include "mtd/belief.hpp"
#include "mtd/oracle.hpp"
#include "mtd/rng.hpp"

namespace mtd {

namespace {

CheckResult filter_check(std::uint64_t seed) {
    CheckResult res{"filter normalisation and total probability", true, ""};
    Rng rng(seed);
    double worst_norm = 0.0;
    double worst_total = 0.0;
    for (int i = 0; i < 10000; ++i) {
        ModelParams p;
        p.alpha = 0.01 + 3.0 * rng.uniform();
        p.nu = rng.uniform();
        const Belief b{rng.uniform()};
        const ProbeProfile probes{rng.uniform(), rng.uniform()};
        for (auto d : {DefenderAction::Reimage, DefenderAction::Continue}) {
            double total = 0.0;
            for (auto o : {Observation::ProbeDetected, Observation::NoDetection}) {
                const double sigma = observation_likelihood(b, o, probes, p);
                total += sigma;
                if (sigma <= 0.0) continue;
                const auto post = posterior(b, d, o, probes, p);
                const double q = post.belief.p_attacker;
                worst_norm = std::max(worst_norm, std::abs(q + post.belief.p_defender() - 1.0));
                if (q < 0.0 || q > 1.0) res.passed = false;
                if (d == DefenderAction::Reimage && q != 0.0) res.passed = false;
            }
            worst_total = std::max(worst_total, std::abs(total - 1.0));
        }
    }
    if (worst_norm > 1e-12 || worst_total > 1e-12) res.passed = false;
    std::ostringstream os;
    os << "max normalisation error " << worst_norm << ", max total-probability error " << worst_total;
    res.detail = os.str();
    return res;
}

}  // namespace

std::vector<CheckResult> run_structure_checks(std::size_t grid_size, std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(filter_check(seed));

    const BeliefGrid grid(grid_size);
    CheckResult defender{"defender best responses are single-crossing", true, ""};
    CheckResult attacker{"attacker best responses: single-crossing, NoProbe when in control, V(1,b) >= V(0,b)", true, ""};
    int solves = 0;
    for (double alpha : {0.1, 0.2, 0.5}) {
        for (double nu : {0.1, 0.5}) {
            for (double gamma : {0.9, 0.95}) {
                for (double cost : {0.1, 0.5, 0.9}) {
                    ModelParams p;
                    p.alpha = alpha;
                    p.nu = nu;
                    p.gamma = gamma;
                    p.cost_defender = cost;
                    p.cost_attacker = cost;
                    for (double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                        const auto opp_a = ThresholdPolicy::attacker(theta, p.steepness);
                        const auto opp_d = ThresholdPolicy::defender(theta, p.steepness);
                        const auto dt = defender_best_response(opp_a, grid, p);
                        const auto at = attacker_best_response(opp_d, opp_a, grid, p);
                        ++solves;
                        std::ostringstream where;
                        where << "alpha=" << alpha << " nu=" << nu << " gamma=" << gamma << " cost=" << cost
                              << " theta=" << theta;
                        if (!single_crossing(dt)) {
                            defender.passed = false;
                            defender.detail += "[" + where.str() + "] ";
                        }
                        bool ok = single_crossing(at);
                        for (std::size_t i = 0; i < grid.size(); ++i) {
                            ok = ok && at.action[1][i] == AttackerAction::NoProbe;
                            ok = ok && at.value[1][i] >= at.value[0][i];
                        }
                        if (!ok) {
                            attacker.passed = false;
                            attacker.detail += "[" + where.str() + "] ";
                        }
                    }
                }
            }
        }
    }
    if (defender.passed) defender.detail = std::to_string(solves) + " tables";
    if (attacker.passed) attacker.detail = std::to_string(solves) + " tables";
    out.push_back(defender);
    out.push_back(attacker);
    return out;
}

}  // namespace mtd
