#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mtd/game.hpp"
#include "mtd/policy.hpp"

namespace mtd {

/// Uniform grid on [0, 1] with at least 3 points.
class BeliefGrid {
public:
    explicit BeliefGrid(std::size_t n);

    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const { return points_; }

    /// Linear-interpolation stencil: value(b) = (1 - w) v[lo] + w v[lo + 1].
    struct Stencil {
        std::size_t lo = 0;
        double w = 0.0;
    };
    Stencil locate(double b) const;

private:
    std::vector<double> points_;
};

struct SolverOptions {
    double tol = 1e-6;
    int max_iterations = 100000;
};

struct DefenderTable {
    std::vector<double> grid;
    std::vector<double> value;
    std::vector<DefenderAction> action;
    std::optional<double> threshold;  // nullopt marks a degenerate table
    double residual = 0.0;            // last sup-norm change
    int iterations = 0;
    std::vector<double> residual_history;
};

struct AttackerTable {
    std::vector<double> grid;
    std::array<std::vector<double>, 2> value;  // indexed by SystemState
    std::array<std::vector<AttackerAction>, 2> action;
    std::optional<double> threshold;  // from the DefenderControls row
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;
};

/// Value iteration is stopped once the sup-norm change is at most this.
double stopping_bound(double tol, double gamma);

/// Defender POMDP best response on the grid. Successor beliefs come from
/// posterior() with the attacker's probe profile and are read off the grid by
/// linear interpolation. Ties go to Continue. Throws NoConvergence.
DefenderTable defender_best_response(const ThresholdPolicy& attacker, const BeliefGrid& grid,
                                     const ModelParams& params, const SolverOptions& options = {});

/// Attacker MDP best response on (state, belief). The belief is the
/// defender's filter conditioned on `filter_model`; it moves with the
/// filter's own observation likelihood, so the attacker's choice affects the
/// state and its reward but not the belief path. Ties go to NoProbe.
/// Throws NoConvergence.
AttackerTable attacker_best_response(const ThresholdPolicy& defender, const ThresholdPolicy& filter_model,
                                     const BeliefGrid& grid, const ModelParams& params,
                                     const SolverOptions& options = {});

bool single_crossing(std::span<const DefenderAction> actions);
bool single_crossing(std::span<const AttackerAction> actions);
bool single_crossing(const DefenderTable& table);
/// Checks the DefenderControls row.
bool single_crossing(const AttackerTable& table);

/// Midpoint between the last low-action and first high-action grid point
/// (Continue/Reimage for the defender, Probe/NoProbe for the attacker).
/// Constant tables give the boundary (0 when the high action is taken
/// everywhere, 1 otherwise); more than one switch, or a switch from high to
/// low, gives nullopt.
std::optional<double> extract_threshold(std::span<const DefenderAction> actions, std::span<const double> grid);
std::optional<double> extract_threshold(std::span<const AttackerAction> actions, std::span<const double> grid);
std::optional<double> extract_threshold(const DefenderTable& table);
std::optional<double> extract_threshold(const AttackerTable& table);

/// Exact values of a fixed policy pair on (state, belief), with the
/// observation driven by the realised probe and the filter conditioned on
/// `attacker`. Matches what rollout() simulates.
struct PolicyValues {
    std::vector<double> grid;
    std::array<std::vector<double>, 2> defender;
    std::array<std::vector<double>, 2> attacker;
    double residual = 0.0;
    int iterations = 0;

    /// Values at the rollout start (DefenderControls, b = 0).
    double defender_start() const { return defender[0].front(); }
    double attacker_start() const { return attacker[0].front(); }
};

PolicyValues evaluate_policies(const ThresholdPolicy& defender, const ThresholdPolicy& attacker,
                               const BeliefGrid& grid, const ModelParams& params,
                               const SolverOptions& options = {});

struct OracleEquilibrium {
    double theta_defender = 0.5;
    double theta_attacker = 0.5;
    int rounds = 0;
    bool converged = false;
};

/// Alternating best-response iteration on thresholds (attacker first, then
/// defender), each best response turned back into a sigmoid policy with
/// params.steepness. Stops when neither threshold moves by more than `tol`.
/// Throws DegenerateThreshold if a best response is not single-crossing.
OracleEquilibrium oracle_equilibrium(const ModelParams& params, const BeliefGrid& grid, double theta_defender,
                                     double theta_attacker, int max_rounds = 100, double tol = 1e-9,
                                     const SolverOptions& options = {});

/// CSV dumps: b,value,action and s,b,value,action (actions as integer codes).
void write_table_csv(std::ostream& out, const DefenderTable& table);
void write_table_csv(std::ostream& out, const AttackerTable& table);

}  // namespace mtd
