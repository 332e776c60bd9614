#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mtd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Structural checks behind `mtd check`: filter normalisation and total
/// probability on random inputs, and single-crossing best responses with
/// the expected attacker structure over the standard parameter matrix.
std::vector<CheckResult> run_structure_checks(std::size_t grid_size = 201, std::uint64_t seed = 0);

}  // namespace mtd
