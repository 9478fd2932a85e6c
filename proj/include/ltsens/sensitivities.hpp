#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltsens/models.hpp"

namespace ltsens {

struct SimConfig;

/// One row of the long-term sensitivity table. For parameters the closed
/// form is the per-time limit of d/dtheta ln|U|; for chi it is the
/// x-derivative limit -(1-p)(a2 chi + a1), not normalized by T.
struct SensitivityEntry
{
    std::string name;
    double closed_form{};
    /// -(1-p) dlambda/dtheta for parameters, (1-p) d ln phi/dchi for chi.
    double fd_check{};
    double abs_disagreement{};
    /// Richardson estimate of the finite-difference error.
    double fd_error_estimate{};
    bool flagged{false};
};

struct SensitivityReport
{
    ModelKind model{};
    std::vector<SensitivityEntry> entries;

    bool any_flagged() const noexcept;
    const SensitivityEntry& at(std::string_view name) const;
};

/// Agreement threshold between a printed limit and the oracle.
inline double sensitivity_tolerance(double limit)
{
    return 1e-6 * (1 + (limit < 0 ? -limit : limit));
}

/// Printed long-term limits, in Model::parameter_names() order.
std::vector<std::pair<std::string, double>> printed_limits(const Model& model);

SensitivityReport long_term_sensitivities(const Model& model);

struct FdEstimate
{
    double derivative{};
    double error_estimate{};
    double step{};
};

/// Default step 1e-6 max(|theta|, 1).
double default_fd_step(const Model& model, std::string_view name);

/// Central difference of lambda in one parameter with a Richardson error
/// estimate from h/2. If a bumped set is inadmissible, h shrinks once by
/// 10x; a second failure rethrows the ValidationError.
FdEstimate lambda_fd(const Model& model,
                     std::string_view name,
                     std::optional<double> h = std::nullopt);

struct InitialFactorSensitivity
{
    /// (1-p) d/dchi ln v(chi, T) from the coefficients.
    double finite_horizon{};
    /// (1-p) phi'(chi)/phi(chi)
    double limit{};
    double gap{};
};

/// Factor models only; the complete-market model throws
/// UnsupportedModelError (use mc_bump_sensitivity).
InitialFactorSensitivity initial_factor_sensitivity(const Model& model,
                                                    double chi,
                                                    double horizon);

struct DiagnosticRow
{
    double T{};
    /// (1/T) d/dtheta ln v(chi, T)
    double value{};
    /// -dlambda/dtheta
    double limit{};
    double gap{};
    /// Monte Carlo standard error of value (zero for closed-form rows).
    double se{};
};

/// Finite-horizon convergence of (1/T) d/dtheta ln v toward -dlambda/dtheta.
/// Factor models differentiate the closed-form ln v with re-solved
/// coefficient paths; the complete-market model needs a simulation config
/// and uses common-random-number bumps.
std::vector<DiagnosticRow> convergence_diagnostic(const Model& model,
                                                  std::string_view name,
                                                  std::span<const double> horizons,
                                                  const SimConfig* sim = nullptr);

}  // namespace ltsens
