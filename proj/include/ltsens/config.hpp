#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltsens/json_fwd.hpp"
#include "ltsens/models.hpp"
#include "ltsens/simulation.hpp"

namespace ltsens {

/// Malformed configuration: unknown keys, wrong types, missing fields.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

struct SweepConfig
{
    std::string parameter;
    std::vector<double> values;
    std::vector<double> horizons;
};

enum class OutputFormat { json, csv };

struct RunConfig
{
    Model model;
    /// Horizon for `value` and `riccati`; defaults to sim.T, then 1.
    double horizon{1};
    /// Grid points for `riccati`.
    std::size_t grid_points{101};
    std::optional<SimConfig> sim;
    std::optional<SweepConfig> sweep;
    std::optional<std::string> output_path;
    OutputFormat format{OutputFormat::json};
};

/// Parses and validates. Throws ConfigError for schema problems and
/// ValidationError for inadmissible parameters.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

/// Model block only, e.g. {"type": "heston", "mu": ..., ...}.
ModelParams parse_model_block(const Json& block);

OutputFormat output_format_from_string(const std::string& name);

}  // namespace ltsens
