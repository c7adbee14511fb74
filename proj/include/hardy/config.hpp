#pragma once

// Run configuration for the command-line tool. The grammar is flat
// key = value lines grouped in [weight], [params] and [run] sections;
// ';' and '#' start comments and list items are separated by commas.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardy/inequality.hpp"
#include "hardy/variational.hpp"

namespace hardy {

enum class Command { classify, transforms, verify, identities, sharpness, minimize, report };
const char* to_string(Command c);
std::optional<Command> command_from_string(const std::string& name);

struct WeightConfig {
    std::string family = "constant";  // constant | power | exp_inv_pow | power_times_exp | table | preset
    double alpha = 0.0;
    int sign = 1;
    double beta = 1.0;
    std::string preset;  // a built-in name such as "t^2" or "exp(-1/t)", or "t_squared"
    std::string table;   // CSV path with rows t,w
};

struct RunConfig {
    WeightConfig weight;
    // [params]
    double p = 2.0;
    double eta = 1.0;
    double mu = 1.0;
    std::optional<double> M;  // remainder split; default max(2, 4/(mu (p-1)))
    double R = 3.0;           // corollary E
    double alpha = 0.0;       // corollaries F and B
    // [run]
    std::optional<Command> command;
    double tol = 1e-6;
    std::string out = "hardy_out";
    std::uint64_t seed = 1;
    std::string corpus;  // empty: random corpus of `count` functions
    std::size_t count = 100;
    std::vector<std::string> inequalities = {"nct1", "nct2"};
    std::optional<Corollary> corollary;
    std::vector<double> eps = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    std::size_t nodes = 1024;
    std::optional<double> t_floor;
    Boundary boundary;
    std::vector<double> infimum_floors;
    std::size_t points = 200;
    double t_min = 1e-3;  // transforms grid starts at t_min * eta

    double remainder_M() const;
    TransformParams params() const;
};

/// All violations found, not only the first.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parses and validates; throws ConfigError listing every violation.
RunConfig parse_config(const std::string& text);
/// Violations of the preconditions of the configured operation.
std::vector<std::string> validate(const RunConfig& cfg);
/// The effective configuration in the grammar accepted by parse_config.
std::string to_text(const RunConfig& cfg);

/// Builds the weight; reads the table file for family = table.
WeightSpec make_weight(const RunConfig& cfg);

}  // namespace hardy
