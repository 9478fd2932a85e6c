#pragma once

#include <string>
#include <vector>

#include "ltsens/json_fwd.hpp"
#include "ltsens/models.hpp"
#include "ltsens/simulation.hpp"

namespace ltsens {

enum class CheckStatus { pass, fail, skip };

std::string_view to_string(CheckStatus status);

struct CheckResult
{
    std::string name;
    CheckStatus status{CheckStatus::skip};
    std::string summary;
    Json detail;
};

struct VerifyReport
{
    ModelKind model{};
    std::uint64_t seed{};
    std::vector<CheckResult> checks;

    /// True iff no check failed (skipped checks do not count against).
    bool all_pass() const noexcept;
};

/// Runs, in order: eigenpair residual grid, Riccati oracle agreement,
/// T = 0 identities, decomposition at T in {1, 5, 10}, two-route value
/// agreement, printed-limit audit, convergence diagnostics. The
/// simulation config supplies paths, steps, seed and workers; its T is
/// ignored except by the complete-market growth check.
VerifyReport run_verify(const Model& model, const SimConfig& sim);

/// Deterministic JSON; excludes worker count and timings.
Json verify_json(const VerifyReport& report);

}  // namespace ltsens
