#include "mtd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "mtd/belief.hpp"
#include "mtd/csv.hpp"
#include "mtd/error.hpp"

namespace mtd {

BeliefGrid::BeliefGrid(std::size_t n) {
    if (n < 3) throw ValidationError("belief grid needs at least 3 points");
    points_.resize(n);
    const double step = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) points_[i] = static_cast<double>(i) * step;
    points_.back() = 1.0;
}

BeliefGrid::Stencil BeliefGrid::locate(double b) const {
    const std::size_t n = points_.size();
    const double x = std::clamp(b, 0.0, 1.0) * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(std::floor(x));
    if (lo >= n - 1) lo = n - 2;
    return {lo, x - static_cast<double>(lo)};
}

double stopping_bound(double tol, double gamma) { return tol * (1.0 - gamma) / (2.0 * gamma); }

namespace {

double interp(const std::vector<double>& v, BeliefGrid::Stencil st) {
    return (1.0 - st.w) * v[st.lo] + st.w * v[st.lo + 1];
}

// Where the filter goes after a Continue, for each observation with nonzero likelihood.
struct FilterBranch {
    double likelihood = 0.0;
    BeliefGrid::Stencil next;
};

std::array<FilterBranch, 2> continue_branches(Belief b, const ProbeProfile& probes, const BeliefGrid& grid,
                                              const ModelParams& params) {
    std::array<FilterBranch, 2> out{};
    for (int k = 0; k < 2; ++k) {
        const auto o = static_cast<Observation>(k);
        const double sigma = observation_likelihood(b, o, probes, params);
        if (sigma > 0.0) {
            out[k].likelihood = sigma;
            out[k].next = grid.locate(posterior(b, DefenderAction::Continue, o, probes, params).belief.p_attacker);
        }
    }
    return out;
}

[[noreturn]] void fail_to_converge(const char* who, int iterations, double residual) {
    throw NoConvergence(std::string(who) + " did not converge after " + std::to_string(iterations) +
                        " iterations (residual " + std::to_string(residual) + ")");
}

template <typename Action>
bool crossings_at_most_one(std::span<const Action> actions) {
    int switches = 0;
    for (std::size_t i = 1; i < actions.size(); ++i) {
        if (actions[i] != actions[i - 1]) ++switches;
    }
    return switches <= 1;
}

template <typename Action>
std::optional<double> threshold_of(std::span<const Action> actions, std::span<const double> grid, Action low,
                                   Action high) {
    if (actions.empty() || actions.size() != grid.size()) throw ValidationError("action table and grid differ in size");
    if (!crossings_at_most_one(actions)) return std::nullopt;
    if (actions.front() == actions.back()) return actions.front() == high ? 0.0 : 1.0;
    if (actions.front() != low) return std::nullopt;
    const auto first_high = static_cast<std::size_t>(std::find(actions.begin(), actions.end(), high) - actions.begin());
    return 0.5 * (grid[first_high - 1] + grid[first_high]);
}

}  // namespace

DefenderTable defender_best_response(const ThresholdPolicy& attacker, const BeliefGrid& grid,
                                     const ModelParams& params, const SolverOptions& options) {
    params.validate();
    attacker.validate();
    const std::size_t n = grid.size();
    const double gamma = params.gamma;

    std::vector<double> reward_continue(n);
    std::vector<std::array<FilterBranch, 2>> branches(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Belief b{grid[i]};
        reward_continue[i] = b.p_defender() * reward_defender(SystemState::DefenderControls, DefenderAction::Continue, params) +
                             b.p_attacker * reward_defender(SystemState::AttackerControls, DefenderAction::Continue, params);
        branches[i] = continue_branches(b, probe_profile(attacker, b), grid, params);
    }
    const double reward_reimage = 1.0 - params.cost_defender;

    auto q_continue = [&](const std::vector<double>& v, std::size_t i) {
        double future = 0.0;
        for (const auto& br : branches[i]) {
            if (br.likelihood > 0.0) future += br.likelihood * interp(v, br.next);
        }
        return reward_continue[i] + gamma * future;
    };

    DefenderTable table;
    table.grid = grid.points();
    std::vector<double> v(n, 0.0), next(n);
    const double bound = stopping_bound(options.tol, gamma);
    bool done = false;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double q_reimage = reward_reimage + gamma * v[0];
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = std::max(q_continue(v, i), q_reimage);
            change = std::max(change, std::abs(next[i] - v[i]));
        }
        v.swap(next);
        table.residual = change;
        table.iterations = it;
        table.residual_history.push_back(change);
        if (change <= bound) {
            done = true;
            break;
        }
    }
    if (!done) fail_to_converge("defender value iteration", table.iterations, table.residual);

    table.action.resize(n);
    const double q_reimage = reward_reimage + gamma * v[0];
    for (std::size_t i = 0; i < n; ++i) {
        table.action[i] = q_reimage > q_continue(v, i) ? DefenderAction::Reimage : DefenderAction::Continue;
    }
    table.value = std::move(v);
    table.threshold = extract_threshold(table);
    return table;
}

AttackerTable attacker_best_response(const ThresholdPolicy& defender, const ThresholdPolicy& filter_model,
                                     const BeliefGrid& grid, const ModelParams& params,
                                     const SolverOptions& options) {
    params.validate();
    defender.validate();
    filter_model.validate();
    const std::size_t n = grid.size();
    const double gamma = params.gamma;

    std::vector<double> reimage(n);
    std::vector<std::array<FilterBranch, 2>> branches(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Belief b{grid[i]};
        reimage[i] = defender_reimage_probability(defender, b);
        branches[i] = continue_branches(b, probe_profile(filter_model, b), grid, params);
    }

    // Q(s, a) at grid point i.
    auto q_value = [&](const std::array<std::vector<double>, 2>& v, SystemState s, AttackerAction a, std::size_t i) {
        const auto row = transition_distribution(s, DefenderAction::Continue, a, params);
        double cont = 0.0;
        for (const auto& br : branches[i]) {
            if (br.likelihood == 0.0) continue;
            for (int sp = 0; sp < 2; ++sp) {
                if (row[sp] > 0.0) cont += br.likelihood * row[sp] * interp(v[sp], br.next);
            }
        }
        const double future = reimage[i] * v[0][0] + (1.0 - reimage[i]) * cont;
        return reward_attacker(s, a, params) + gamma * future;
    };

    AttackerTable table;
    table.grid = grid.points();
    std::array<std::vector<double>, 2> v{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    auto next = v;
    const double bound = stopping_bound(options.tol, gamma);
    bool done = false;
    for (int it = 1; it <= options.max_iterations; ++it) {
        double change = 0.0;
        for (int si = 0; si < 2; ++si) {
            const auto s = static_cast<SystemState>(si);
            for (std::size_t i = 0; i < n; ++i) {
                next[si][i] = std::max(q_value(v, s, AttackerAction::Probe, i), q_value(v, s, AttackerAction::NoProbe, i));
                change = std::max(change, std::abs(next[si][i] - v[si][i]));
            }
        }
        v.swap(next);
        table.residual = change;
        table.iterations = it;
        table.residual_history.push_back(change);
        if (change <= bound) {
            done = true;
            break;
        }
    }
    if (!done) fail_to_converge("attacker value iteration", table.iterations, table.residual);

    for (int si = 0; si < 2; ++si) {
        const auto s = static_cast<SystemState>(si);
        table.action[si].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            table.action[si][i] = q_value(v, s, AttackerAction::Probe, i) > q_value(v, s, AttackerAction::NoProbe, i)
                                      ? AttackerAction::Probe
                                      : AttackerAction::NoProbe;
        }
    }
    table.value = std::move(v);
    table.threshold = extract_threshold(table);
    return table;
}

bool single_crossing(std::span<const DefenderAction> actions) { return crossings_at_most_one(actions); }
bool single_crossing(std::span<const AttackerAction> actions) { return crossings_at_most_one(actions); }
bool single_crossing(const DefenderTable& table) { return single_crossing(std::span(table.action)); }
bool single_crossing(const AttackerTable& table) { return single_crossing(std::span(table.action[0])); }

std::optional<double> extract_threshold(std::span<const DefenderAction> actions, std::span<const double> grid) {
    return threshold_of(actions, grid, DefenderAction::Continue, DefenderAction::Reimage);
}

std::optional<double> extract_threshold(std::span<const AttackerAction> actions, std::span<const double> grid) {
    return threshold_of(actions, grid, AttackerAction::Probe, AttackerAction::NoProbe);
}

std::optional<double> extract_threshold(const DefenderTable& table) {
    return extract_threshold(std::span(table.action), std::span(table.grid));
}

std::optional<double> extract_threshold(const AttackerTable& table) {
    return extract_threshold(std::span(table.action[0]), std::span(table.grid));
}

PolicyValues evaluate_policies(const ThresholdPolicy& defender, const ThresholdPolicy& attacker,
                               const BeliefGrid& grid, const ModelParams& params, const SolverOptions& options) {
    params.validate();
    defender.validate();
    attacker.validate();
    const std::size_t n = grid.size();
    const double gamma = params.gamma;

    struct Successor {
        double p;
        int state;
        BeliefGrid::Stencil next;
    };
    struct Node {
        double reward_defender = 0.0;
        double reward_attacker = 0.0;
        std::vector<Successor> successors;
    };
    std::array<std::vector<Node>, 2> nodes{std::vector<Node>(n), std::vector<Node>(n)};

    for (int si = 0; si < 2; ++si) {
        const auto s = static_cast<SystemState>(si);
        for (std::size_t i = 0; i < n; ++i) {
            const Belief b{grid[i]};
            const ProbeProfile probes = probe_profile(attacker, b);
            const double p_reimage = defender_reimage_probability(defender, b);
            const double p_probe = attacker_probe_probability(attacker, s, b);
            Node& node = nodes[si][i];
            for (int di = 0; di < 2; ++di) {
                const auto d = static_cast<DefenderAction>(di);
                const double pd = d == DefenderAction::Reimage ? p_reimage : 1.0 - p_reimage;
                if (pd == 0.0) continue;
                for (int ai = 0; ai < 2; ++ai) {
                    const auto a = static_cast<AttackerAction>(ai);
                    const double pa = a == AttackerAction::Probe ? p_probe : 1.0 - p_probe;
                    if (pa == 0.0) continue;
                    node.reward_defender += pd * pa * reward_defender(s, d, params);
                    node.reward_attacker += pd * pa * reward_attacker(s, a, params);
                    const auto row = transition_distribution(s, d, a, params);
                    const double p_detect = a == AttackerAction::Probe ? 1.0 - params.nu : 0.0;
                    for (int oi = 0; oi < 2; ++oi) {
                        const auto o = static_cast<Observation>(oi);
                        const double po = o == Observation::ProbeDetected ? p_detect : 1.0 - p_detect;
                        if (po == 0.0) continue;
                        const auto stencil = grid.locate(posterior_or_predict(b, d, o, probes, params).p_attacker);
                        for (int sp = 0; sp < 2; ++sp) {
                            if (row[sp] > 0.0) node.successors.push_back({pd * pa * po * row[sp], sp, stencil});
                        }
                    }
                }
            }
        }
    }

    PolicyValues out;
    out.grid = grid.points();
    for (auto* v : {&out.defender, &out.attacker}) {
        (*v)[0].assign(n, 0.0);
        (*v)[1].assign(n, 0.0);
    }
    auto next_d = out.defender;
    auto next_a = out.attacker;
    const double bound = stopping_bound(options.tol, gamma);
    for (int it = 1; it <= options.max_iterations; ++it) {
        double change = 0.0;
        for (int si = 0; si < 2; ++si) {
            for (std::size_t i = 0; i < n; ++i) {
                const Node& node = nodes[si][i];
                double fd = 0.0, fa = 0.0;
                for (const auto& succ : node.successors) {
                    fd += succ.p * interp(out.defender[succ.state], succ.next);
                    fa += succ.p * interp(out.attacker[succ.state], succ.next);
                }
                next_d[si][i] = node.reward_defender + gamma * fd;
                next_a[si][i] = node.reward_attacker + gamma * fa;
                change = std::max({change, std::abs(next_d[si][i] - out.defender[si][i]),
                                   std::abs(next_a[si][i] - out.attacker[si][i])});
            }
        }
        out.defender.swap(next_d);
        out.attacker.swap(next_a);
        out.residual = change;
        out.iterations = it;
        if (change <= bound) return out;
    }
    fail_to_converge("policy evaluation", out.iterations, out.residual);
}

OracleEquilibrium oracle_equilibrium(const ModelParams& params, const BeliefGrid& grid, double theta_defender,
                                     double theta_attacker, int max_rounds, double tol,
                                     const SolverOptions& options) {
    OracleEquilibrium eq{theta_defender, theta_attacker, 0, false};
    const double k = params.steepness;
    for (int round = 1; round <= max_rounds; ++round) {
        const auto att = attacker_best_response(ThresholdPolicy::defender(eq.theta_defender, k),
                                                ThresholdPolicy::attacker(eq.theta_attacker, k), grid, params, options);
        if (!att.threshold) throw DegenerateThreshold("attacker best response has more than one switch");
        const auto def = defender_best_response(ThresholdPolicy::attacker(*att.threshold, k), grid, params, options);
        if (!def.threshold) throw DegenerateThreshold("defender best response has more than one switch");
        const double moved = std::max(std::abs(*def.threshold - eq.theta_defender),
                                      std::abs(*att.threshold - eq.theta_attacker));
        eq.theta_defender = *def.threshold;
        eq.theta_attacker = *att.threshold;
        eq.rounds = round;
        if (moved <= tol) {
            eq.converged = true;
            break;
        }
    }
    return eq;
}

void write_table_csv(std::ostream& out, const DefenderTable& table) {
    out << "b,value,action\n";
    for (std::size_t i = 0; i < table.grid.size(); ++i) {
        out << format_double(table.grid[i]) << ',' << format_double(table.value[i]) << ','
            << static_cast<int>(table.action[i]) << '\n';
    }
}

void write_table_csv(std::ostream& out, const AttackerTable& table) {
    out << "s,b,value,action\n";
    for (int s = 0; s < 2; ++s) {
        for (std::size_t i = 0; i < table.grid.size(); ++i) {
            out << s << ',' << format_double(table.grid[i]) << ',' << format_double(table.value[s][i]) << ','
                << static_cast<int>(table.action[s][i]) << '\n';
        }
    }
}

}  // namespace mtd
