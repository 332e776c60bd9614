#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mtd/config.hpp"

namespace mtd {

struct SweepRow {
    double c_d = 0.0;
    double defender_threshold = 0.0;
    double attacker_threshold = 0.0;
    std::optional<double> oracle_defender_threshold;  // Both mode only
    std::optional<double> oracle_attacker_threshold;
    std::string error;  // empty when the cell succeeded

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepPanel {
    double c_a = 0.0;
    std::vector<SweepRow> rows;  // ascending C_D
};

/// C_D values of the sweep: cd_min when cd_steps == 1, else evenly spaced
/// from cd_min to cd_max inclusive.
std::vector<double> cd_values(const SweepConfig& cfg);

/// Runs every (C_A, C_D) cell on cfg.workers threads. Learn cells call
/// fictitious_play with cfg.learn unchanged apart from the costs; Oracle
/// cells run oracle_equilibrium from the same initial thresholds. A failing
/// cell is reported in its row's error field instead of aborting the sweep.
std::vector<SweepPanel> run_sweep(const SweepConfig& cfg);

/// Header C_D,defender_threshold,attacker_threshold[,oracle_defender_threshold,oracle_attacker_threshold],error
void write_sweep_csv(std::ostream& out, const SweepPanel& panel, SweepMode mode);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// File name of a panel inside cfg.output_dir.
std::string sweep_file_name(double c_a);

/// run_sweep() followed by one CSV per panel; returns the written paths.
std::vector<std::string> run_sweep_to_files(const SweepConfig& cfg);

}  // namespace mtd
