// Command-line front end: simulate, solve, learn, sweep, check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mtd/checks.hpp"
#include "mtd/config.hpp"
#include "mtd/csv.hpp"
#include "mtd/error.hpp"
#include "mtd/learner.hpp"
#include "mtd/oracle.hpp"
#include "mtd/simulator.hpp"
#include "mtd/sweep.hpp"

namespace {

std::string flag_name(const std::string& key) {
    std::string out = "--" + key;
    for (auto& c : out) {
        if (c == '_') c = '-';
    }
    return out;
}

// Config-file path plus one string flag per config key; flags win.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key = value configuration file");
        for (const auto& key : mtd::config_keys()) {
            app->add_option(flag_name(key), values[key], "overrides config key " + key);
        }
    }

    mtd::SweepConfig resolve() const {
        mtd::SweepConfig cfg = config_path.empty() ? mtd::SweepConfig{} : mtd::load_config(config_path);
        for (const auto& [key, value] : values) {
            if (!value.empty()) mtd::set_config_value(cfg, key, value);
        }
        cfg.validate();
        return cfg;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mtd::Error("IoError", "cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moving-target-defence game: simulation, best responses and learned equilibria"};
    app.require_subcommand(1);

    ConfigFlags sim_flags, solve_flags, learn_flags, sweep_flags;

    auto* simulate = app.add_subcommand("simulate", "roll out episodes of a fixed policy pair");
    sim_flags.attach(simulate);
    double sim_theta_d = 0.5, sim_theta_a = 0.5;
    std::size_t sim_episodes = 1;
    std::string sim_out;
    simulate->add_option("--theta-defender", sim_theta_d, "defender reimage threshold")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--theta-attacker", sim_theta_a, "attacker stop-probing threshold")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--episodes", sim_episodes, "episodes for the value estimate");
    simulate->add_option("--out", sim_out, "trajectory CSV of the first episode");

    auto* solve = app.add_subcommand("solve", "oracle best response by value iteration");
    solve_flags.attach(solve);
    std::string solve_player = "defender";
    double solve_opponent = 0.5;
    std::optional<double> solve_model;
    std::string solve_out;
    solve->add_option("--player", solve_player, "defender or attacker")->check(CLI::IsMember({"defender", "attacker"}));
    solve->add_option("--opponent-theta", solve_opponent, "opponent threshold")->check(CLI::Range(0.0, 1.0));
    solve->add_option("--model-theta", solve_model, "attacker threshold the defender's filter assumes (attacker solves)")
        ->check(CLI::Range(0.0, 1.0));
    solve->add_option("--out", solve_out, "table CSV");

    auto* learn = app.add_subcommand("learn", "policy-gradient fictitious play for one parameter point");
    learn_flags.attach(learn);
    std::string learn_history;
    learn->add_option("--history", learn_history, "per-round progress CSV");

    auto* sweep = app.add_subcommand("sweep", "threshold equilibria over a C_D x C_A sweep");
    sweep_flags.attach(sweep);

    auto* check = app.add_subcommand("check", "run the structural property suites");
    std::size_t check_grid = 201;
    check->add_option("--grid-size", check_grid, "belief grid size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto cfg = sim_flags.resolve();
            const auto d = mtd::ThresholdPolicy::defender(sim_theta_d, cfg.base.steepness);
            const auto a = mtd::ThresholdPolicy::attacker(sim_theta_a, cfg.base.steepness);
            const int horizon = cfg.learn.horizon > 0 ? cfg.learn.horizon : mtd::default_horizon(cfg.base);
            const auto traj = mtd::rollout(cfg.base, d, a, horizon, cfg.learn.seed);
            if (!sim_out.empty()) {
                auto out = open_out(sim_out);
                mtd::write_trajectory_csv(out, traj);
            }
            const auto ret = mtd::discounted_returns(traj, cfg.base.gamma);
            std::cout << "episode J_D=" << ret.defender << " J_A=" << ret.attacker << '\n';
            if (sim_episodes >= 2) {
                const auto est = mtd::estimate_values(cfg.base, d, a, sim_episodes, horizon, cfg.learn.seed, cfg.workers);
                std::cout << "estimate J_D=" << est.mean_defender << " +- " << est.stderr_defender
                          << " J_A=" << est.mean_attacker << " +- " << est.stderr_attacker << " (" << est.episodes
                          << " episodes)\n";
            }
        } else if (solve->parsed()) {
            const auto cfg = solve_flags.resolve();
            const mtd::BeliefGrid grid(cfg.grid_size);
            const double k = cfg.base.steepness;
            std::optional<double> threshold;
            double residual = 0.0;
            if (solve_player == "defender") {
                const auto table = mtd::defender_best_response(mtd::ThresholdPolicy::attacker(solve_opponent, k), grid, cfg.base);
                if (!solve_out.empty()) {
                    auto out = open_out(solve_out);
                    mtd::write_table_csv(out, table);
                }
                threshold = table.threshold;
                residual = table.residual;
            } else {
                const auto model = mtd::ThresholdPolicy::attacker(solve_model.value_or(cfg.learn.init_theta_attacker), k);
                const auto table =
                    mtd::attacker_best_response(mtd::ThresholdPolicy::defender(solve_opponent, k), model, grid, cfg.base);
                if (!solve_out.empty()) {
                    auto out = open_out(solve_out);
                    mtd::write_table_csv(out, table);
                }
                threshold = table.threshold;
                residual = table.residual;
            }
            std::cout << "threshold=" << (threshold ? mtd::format_double(*threshold) : "degenerate")
                      << " residual=" << residual << '\n';
        } else if (learn->parsed()) {
            const auto cfg = learn_flags.resolve();
            if (!cfg.seed_given) throw mtd::ValidationError("--seed is required for learn");
            mtd::LearnConfig lc = cfg.learn;
            lc.workers = cfg.workers;
            const auto result = mtd::fictitious_play(cfg.base, lc);
            if (!learn_history.empty()) {
                auto out = open_out(learn_history);
                mtd::write_history_csv(out, result);
            }
            std::cout << "theta_D=" << mtd::format_double(result.theta_defender)
                      << " theta_A=" << mtd::format_double(result.theta_attacker) << " rounds=" << result.rounds_used
                      << " converged=" << (result.converged ? "true" : "false") << '\n';
        } else if (sweep->parsed()) {
            const auto cfg = sweep_flags.resolve();
            if (!cfg.seed_given) throw mtd::ValidationError("--seed is required for sweep");
            for (const auto& path : mtd::run_sweep_to_files(cfg)) std::cout << path << '\n';
        } else if (check->parsed()) {
            bool all = true;
            for (const auto& r : mtd::run_structure_checks(check_grid)) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " -- " << r.detail << '\n';
                all = all && r.passed;
            }
            return all ? 0 : 1;
        }
    } catch (const mtd::Error& e) {
        std::cerr << "error," << e.kind() << ',' << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error,Internal," << e.what() << '\n';
        return 1;
    }
    return 0;
}
