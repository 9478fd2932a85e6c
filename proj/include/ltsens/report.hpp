#pragma once

#include <span>
#include <string>
#include <vector>

#include "ltsens/coefficients.hpp"
#include "ltsens/eigenpairs.hpp"
#include "ltsens/sensitivities.hpp"
#include "ltsens/simulation.hpp"
#include "ltsens/valuation.hpp"
#include "ltsens/json_fwd.hpp"

namespace ltsens {

/// Doubles are written with 17 significant digits; NaN and infinities as null.
std::string format_double(double value);

/// Deterministic serializer; objects keep insertion order.
std::string dump_json(const Json& value, int indent = 2);

/// CSV from a header and rows of already-formatted cells.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

/// One-row CSV from a flat object (nested values are written as JSON).
std::string flat_object_csv(const Json& object);

Json constants_json(const Model& model);
Json params_json(const Model& model);

Json eigenpair_json(const Model& model);
Json value_json(const Model& model, double chi, double horizon);
Json coefficient_path_json(const CoefficientPath& path);
std::string coefficient_path_csv(const CoefficientPath& path);
Json sensitivities_json(const SensitivityReport& report);
std::string sensitivities_csv(const SensitivityReport& report);
Json diagnostic_json(std::string_view parameter, const std::vector<DiagnosticRow>& rows);
std::string diagnostic_csv(const std::vector<DiagnosticRow>& rows);
Json decomposition_json(const DecompositionResult& result);
std::string decomposition_csv(const std::vector<DecompositionResult>& results);
Json value_estimate_json(const Model& model, double chi, const SimConfig& config,
                         const ValueEstimate& estimate);

}  // namespace ltsens
