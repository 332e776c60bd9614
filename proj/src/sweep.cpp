#include "mtd/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "mtd/csv.hpp"
#include "mtd/error.hpp"
#include "mtd/oracle.hpp"
#include "mtd/parallel.hpp"

namespace mtd {

std::vector<double> cd_values(const SweepConfig& cfg) {
    if (cfg.cd_steps == 1) return {cfg.cd_min};
    std::vector<double> out(static_cast<std::size_t>(cfg.cd_steps));
    const double span = cfg.cd_max - cfg.cd_min;
    for (int k = 0; k < cfg.cd_steps; ++k) {
        out[static_cast<std::size_t>(k)] = cfg.cd_min + span * static_cast<double>(k) / (cfg.cd_steps - 1);
    }
    out.back() = cfg.cd_max;
    return out;
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string describe(const Error& e) {
    std::string msg = e.kind() + ": " + e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return msg;
}

void append_error(std::string& into, const std::string& msg) {
    into += into.empty() ? msg : " | " + msg;
}

SweepRow run_cell(const SweepConfig& cfg, double c_a, double c_d) {
    ModelParams params = cfg.base;
    params.cost_attacker = c_a;
    params.cost_defender = c_d;
    LearnConfig learn = cfg.learn;
    learn.workers = 1;

    SweepRow row;
    row.c_d = c_d;
    row.defender_threshold = kNan;
    row.attacker_threshold = kNan;

    std::optional<OracleEquilibrium> oracle;
    if (cfg.mode != SweepMode::Learn) {
        try {
            oracle = oracle_equilibrium(params, BeliefGrid(cfg.grid_size), learn.init_theta_defender,
                                        learn.init_theta_attacker, cfg.oracle_max_rounds);
            if (!oracle->converged) {
                append_error(row.error, "NoConvergence: best-response iteration did not settle in " +
                                            std::to_string(cfg.oracle_max_rounds) + " rounds");
            }
        } catch (const Error& e) {
            append_error(row.error, describe(e));
        }
    }
    if (cfg.mode == SweepMode::Oracle) {
        if (oracle) {
            row.defender_threshold = oracle->theta_defender;
            row.attacker_threshold = oracle->theta_attacker;
        }
        return row;
    }
    if (cfg.mode == SweepMode::Both) {
        row.oracle_defender_threshold = oracle ? oracle->theta_defender : kNan;
        row.oracle_attacker_threshold = oracle ? oracle->theta_attacker : kNan;
    }
    try {
        const auto eq = fictitious_play(params, learn);
        row.defender_threshold = eq.theta_defender;
        row.attacker_threshold = eq.theta_attacker;
    } catch (const Error& e) {
        append_error(row.error, describe(e));
    }
    return row;
}

}  // namespace

std::vector<SweepPanel> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto cds = cd_values(cfg);
    const std::size_t per_panel = cds.size();
    std::vector<SweepRow> cells(cfg.ca_values.size() * per_panel);
    parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
        cells[c] = run_cell(cfg, cfg.ca_values[c / per_panel], cds[c % per_panel]);
    });
    std::vector<SweepPanel> panels;
    for (std::size_t p = 0; p < cfg.ca_values.size(); ++p) {
        SweepPanel panel;
        panel.c_a = cfg.ca_values[p];
        panel.rows.assign(cells.begin() + static_cast<std::ptrdiff_t>(p * per_panel),
                          cells.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_panel));
        panels.push_back(std::move(panel));
    }
    return panels;
}

void write_sweep_csv(std::ostream& out, const SweepPanel& panel, SweepMode mode) {
    const bool both = mode == SweepMode::Both;
    out << "C_D,defender_threshold,attacker_threshold";
    if (both) out << ",oracle_defender_threshold,oracle_attacker_threshold";
    out << ",error\n";
    for (const auto& r : panel.rows) {
        out << format_double(r.c_d) << ',' << format_double(r.defender_threshold) << ','
            << format_double(r.attacker_threshold);
        if (both) {
            out << ',' << format_double(r.oracle_defender_threshold.value_or(kNan)) << ','
                << format_double(r.oracle_attacker_threshold.value_or(kNan));
        }
        out << ',' << r.error << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty sweep file");
    const auto header = split(line, ',');
    const bool both = header.size() == 6;
    if (header.size() != 4 && !both) throw ParseError(1, "unexpected sweep header");
    std::vector<SweepRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw ParseError(line_no, "wrong number of fields");
        SweepRow r;
        double x = 0.0;
        auto number = [&](const std::string& s) {
            if (!parse_double(s, x)) throw ParseError(line_no, "bad number '" + s + "'");
            return x;
        };
        r.c_d = number(f[0]);
        r.defender_threshold = number(f[1]);
        r.attacker_threshold = number(f[2]);
        if (both) {
            r.oracle_defender_threshold = number(f[3]);
            r.oracle_attacker_threshold = number(f[4]);
        }
        r.error = f.back();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string sweep_file_name(double c_a) { return "sweep_CA_" + format_double(c_a) + ".csv"; }

std::vector<std::string> run_sweep_to_files(const SweepConfig& cfg) {
    const auto panels = run_sweep(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<std::string> paths;
    for (const auto& panel : panels) {
        const auto path = (std::filesystem::path(cfg.output_dir) / sweep_file_name(panel.c_a)).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("IoError", "cannot write " + path);
        write_sweep_csv(out, panel, cfg.mode);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace mtd
