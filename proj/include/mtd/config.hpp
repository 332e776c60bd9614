#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtd/game.hpp"
#include "mtd/learner.hpp"

namespace mtd {

enum class SweepMode { Learn, Oracle, Both };

struct SweepConfig {
    double cd_min = 0.0;
    double cd_max = 1.0;
    int cd_steps = 21;
    std::vector<double> ca_values{0.01, 0.05, 0.1};
    ModelParams base;
    LearnConfig learn;
    std::size_t grid_size = 201;
    int oracle_max_rounds = 100;
    std::string output_dir = ".";
    SweepMode mode = SweepMode::Learn;
    unsigned workers = 1;
    bool seed_given = false;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// Every key accepted by parse_config and set_config_value.
const std::vector<std::string>& config_keys();

/// Assigns one `key = value` setting. Throws ParseError(line) for unknown
/// keys or malformed values.
void set_config_value(SweepConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Line-oriented `key = value` document; `#` starts a comment. Keys not
/// present keep their defaults. The result is validated.
SweepConfig parse_config(std::string_view text);

SweepConfig load_config(const std::string& path);

std::string to_string(SweepMode mode);

}  // namespace mtd
