#include "mtd/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mtd/csv.hpp"
#include "mtd/error.hpp"

namespace mtd {

namespace {

double to_double(std::string_view v, std::string_view key, int line) {
    double x = 0.0;
    if (!parse_double(trim(v), x)) throw ParseError(line, "expected a number for '" + std::string(key) + "'");
    return x;
}

long long to_integer(std::string_view v, std::string_view key, int line) {
    const double x = to_double(v, key, line);
    if (x != std::floor(x) || std::abs(x) > 9.0e15) {
        throw ParseError(line, "expected an integer for '" + std::string(key) + "'");
    }
    return static_cast<long long>(x);
}

bool to_bool(std::string_view v, std::string_view key, int line) {
    const auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ParseError(line, "expected true/false for '" + std::string(key) + "'");
}

using Setter = std::function<void(SweepConfig&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> m;
        auto real = [&m](const char* key, double SweepConfig::*member) {
            m[key] = [member, key](SweepConfig& c, std::string_view v, int line) { c.*member = to_double(v, key, line); };
        };
        auto param = [&m](const char* key, double ModelParams::*member) {
            m[key] = [member, key](SweepConfig& c, std::string_view v, int line) {
                c.base.*member = to_double(v, key, line);
            };
        };
        auto learn_real = [&m](const char* key, double LearnConfig::*member) {
            m[key] = [member, key](SweepConfig& c, std::string_view v, int line) {
                c.learn.*member = to_double(v, key, line);
            };
        };
        param("alpha", &ModelParams::alpha);
        param("nu", &ModelParams::nu);
        param("gamma", &ModelParams::gamma);
        param("cost_defender", &ModelParams::cost_defender);
        param("cost_attacker", &ModelParams::cost_attacker);
        param("steepness", &ModelParams::steepness);
        real("cd_min", &SweepConfig::cd_min);
        real("cd_max", &SweepConfig::cd_max);
        learn_real("learning_rate", &LearnConfig::learning_rate);
        learn_real("convergence_tol", &LearnConfig::convergence_tol);
        learn_real("init_theta_defender", &LearnConfig::init_theta_defender);
        learn_real("init_theta_attacker", &LearnConfig::init_theta_attacker);
        learn_real("steepness_start", &LearnConfig::steepness_start);
        m["cd_steps"] = [](SweepConfig& c, std::string_view v, int line) {
            c.cd_steps = static_cast<int>(to_integer(v, "cd_steps", line));
        };
        m["ca_values"] = [](SweepConfig& c, std::string_view v, int line) {
            c.ca_values.clear();
            for (const auto& item : split(v, ',')) c.ca_values.push_back(to_double(item, "ca_values", line));
        };
        m["grid_size"] = [](SweepConfig& c, std::string_view v, int line) {
            const auto n = to_integer(v, "grid_size", line);
            if (n < 0) throw ParseError(line, "grid_size must be non-negative");
            c.grid_size = static_cast<std::size_t>(n);
        };
        m["oracle_max_rounds"] = [](SweepConfig& c, std::string_view v, int line) {
            c.oracle_max_rounds = static_cast<int>(to_integer(v, "oracle_max_rounds", line));
        };
        m["output_dir"] = [](SweepConfig& c, std::string_view v, int) { c.output_dir = std::string(trim(v)); };
        m["mode"] = [](SweepConfig& c, std::string_view v, int line) {
            const auto t = trim(v);
            if (t == "learn") c.mode = SweepMode::Learn;
            else if (t == "oracle") c.mode = SweepMode::Oracle;
            else if (t == "both") c.mode = SweepMode::Both;
            else throw ParseError(line, "mode must be learn, oracle or both");
        };
        m["workers"] = [](SweepConfig& c, std::string_view v, int line) {
            const auto n = to_integer(v, "workers", line);
            if (n < 1) throw ParseError(line, "workers must be >= 1");
            c.workers = static_cast<unsigned>(n);
        };
        m["seed"] = [](SweepConfig& c, std::string_view v, int line) {
            const auto n = to_integer(v, "seed", line);
            if (n < 0) throw ParseError(line, "seed must be non-negative");
            c.learn.seed = static_cast<std::uint64_t>(n);
            c.seed_given = true;
        };
        m["batch_episodes"] = [](SweepConfig& c, std::string_view v, int line) {
            const auto n = to_integer(v, "batch_episodes", line);
            if (n < 0) throw ParseError(line, "batch_episodes must be non-negative");
            c.learn.batch_episodes = static_cast<std::size_t>(n);
        };
        m["horizon"] = [](SweepConfig& c, std::string_view v, int line) {
            c.learn.horizon = static_cast<int>(to_integer(v, "horizon", line));
        };
        m["inner_iterations"] = [](SweepConfig& c, std::string_view v, int line) {
            c.learn.inner_iterations = static_cast<int>(to_integer(v, "inner_iterations", line));
        };
        m["outer_rounds_max"] = [](SweepConfig& c, std::string_view v, int line) {
            c.learn.outer_rounds_max = static_cast<int>(to_integer(v, "outer_rounds_max", line));
        };
        m["baseline"] = [](SweepConfig& c, std::string_view v, int line) {
            const auto t = trim(v);
            if (t == "none") c.learn.baseline = Baseline::None;
            else if (t == "mean_return") c.learn.baseline = Baseline::MeanReturn;
            else throw ParseError(line, "baseline must be none or mean_return");
        };
        m["learn_attacker_compromised"] = [](SweepConfig& c, std::string_view v, int line) {
            c.learn.learn_attacker_compromised = to_bool(v, "learn_attacker_compromised", line);
        };
        return m;
    }();
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

void set_config_value(SweepConfig& cfg, std::string_view key, std::string_view value, int line) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ParseError(line, "unknown key '" + std::string(key) + "'");
    it->second(cfg, value, line);
}

void SweepConfig::validate() const {
    base.validate();
    learn.validate();
    if (!(cd_min >= 0.0 && cd_max <= 1.0 && cd_min <= cd_max)) {
        throw ValidationError("C_D range must satisfy 0 <= cd_min <= cd_max <= 1");
    }
    if (cd_steps < 1) throw ValidationError("cd_steps must be >= 1");
    if (ca_values.empty()) throw ValidationError("ca_values must not be empty");
    for (double ca : ca_values) {
        if (!(ca >= 0.0) || !std::isfinite(ca)) throw ValidationError("ca_values must all be >= 0");
    }
    if (grid_size < 3) throw ValidationError("grid_size must be >= 3");
    if (oracle_max_rounds < 1) throw ValidationError("oracle_max_rounds must be >= 1");
    if (workers < 1) throw ValidationError("workers must be >= 1");
}

SweepConfig parse_config(std::string_view text) {
    SweepConfig cfg;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");
        if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
        set_config_value(cfg, key, value, line_no);
        if (end == text.size()) break;
    }
    cfg.validate();
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_string(SweepMode mode) {
    switch (mode) {
        case SweepMode::Learn: return "learn";
        case SweepMode::Oracle: return "oracle";
        case SweepMode::Both: return "both";
    }
    return "learn";
}

}  // namespace mtd
