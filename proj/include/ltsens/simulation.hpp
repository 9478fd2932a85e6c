#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltsens/eigenpairs.hpp"
#include "ltsens/models.hpp"

namespace ltsens {

enum class Scheme { exact_gaussian, euler, full_truncation_euler };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

/// exact_gaussian for Kim-Omberg and the complete-market model,
/// full_truncation_euler for Heston.
Scheme default_scheme(ModelKind kind);

struct SimConfig
{
    double T{1};
    std::size_t n_steps{1000};
    std::size_t n_paths{100000};
    std::uint64_t seed{0};
    std::optional<Scheme> scheme;
    /// Worker threads. Results do not depend on this value.
    unsigned workers{1};
};

/// Minimum step counts for a horizon: below `hard` the run is refused,
/// below `recommended` (10 T rate) a warning is attached.
struct StepFloor
{
    double rate{};
    std::size_t hard{};
    std::size_t recommended{};
};

/// `rate` is the largest mean-reversion speed among the physical and the
/// simulated dynamics.
StepFloor step_floor(const Model& model, double horizon);

class SimulationError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Sample mean and standard error of i.i.d. draws, summed pairwise in a fixed
/// order so the result does not depend on how work was partitioned.
struct MeanSe
{
    double mean{};
    double se{};
};

MeanSe mean_and_se(std::span<const double> values);
double pairwise_sum(std::span<const double> values);

/// Per-path output of a simulation.
struct PathEnsemble
{
    /// Terminal factor (x+ for Heston).
    std::vector<double> x_T;
    /// Accumulated trapezoid integral of the running log weight.
    std::vector<double> integral;
    /// Smallest factor value reported along all paths and steps.
    double min_state{};
    double dt{};
    Scheme scheme{};
    std::vector<std::string> warnings;
};

/// Factor paths under the decomposition measure with integral = int_0^T f.
PathEnsemble simulate_q_paths(const Model& model,
                              const Eigenpair& pair,
                              const SimConfig& config);

/// Mean and SE of exp(int f - ln phi(X_T)), evaluated per path in log space.
MeanSe estimate_error_term(const PathEnsemble& ensemble, const Eigenpair& pair);

/// Per-path exp(int f - ln phi(X_T)).
std::vector<double> error_term_samples(const PathEnsemble& ensemble,
                                       const Eigenpair& pair);

struct DecompositionResult
{
    double chi{};
    double T{};
    double v_closed{};
    double lambda{};
    double phi_chi{};
    /// e^{-lambda T} phi(chi)
    double skeleton{};
    /// v_closed / skeleton
    double ratio{};
    double mc_error_term{};
    double mc_se{};
    double ratio_gap{};
    /// Same quantities at dt/2 with an independent stream.
    double mc_error_term_half{};
    double mc_se_half{};
    double ratio_gap_half{};
    /// |mc - mc_half|
    double step_gap{};
    double step_gap_se{};
    bool pass{};
    std::uint64_t seed{};
    std::size_t n_steps{};
    std::size_t n_paths{};
    Scheme scheme{};
    std::vector<std::string> warnings;
};

/// Checks v = e^{-lambda T} phi(chi) E^Q[e^{int f}/phi(X_T)] by Monte Carlo.
/// PASS iff both step sizes are within 3 SE of the closed-form ratio and
/// agree with each other within 3 combined SE. Factor models only.
DecompositionResult decomposition_check(const Model& model,
                                        double chi,
                                        const SimConfig& config);

struct ValueEstimate
{
    double v{};
    double se{};
    double log_v{};
    /// Estimates at the checkpoint T/2 from the same paths. This is v(T/2)
    /// only when the controls ignore the horizon (complete market); the
    /// factor models steer with T-horizon coefficients.
    double v_half{};
    double se_half{};
    /// -(ln v(T) - ln v(T/2)) / (T/2)
    double growth_rate_fit{};
    std::uint64_t seed{};
};

/// Estimates v by simulating the factor under the utility-adjusted measure
/// and averaging the exponential of the running cost.
ValueEstimate simulate_phat_value(const Model& model,
                                  double chi,
                                  const SimConfig& config);

/// Per-path weights at T and at T/2 (same order as the path index).
struct PhatSamples
{
    std::vector<double> w_T;
    std::vector<double> w_half;
    std::vector<std::string> warnings;
};

PhatSamples simulate_phat_samples(const Model& model,
                                  double chi,
                                  const SimConfig& config);

struct BumpSensitivity
{
    /// (ln v(theta+h) - ln v(theta-h)) / (2h) at T.
    double derivative{};
    double se{};
    /// Same difference between T/2 and T divided by T/2; estimates the
    /// per-time sensitivity without the constant term.
    double slope{};
    double slope_se{};
    double h{};
};

/// Central bump of ln v with common random numbers for both legs.
/// Inadmissible bumps shrink h once by 10x.
BumpSensitivity mc_bump_sensitivity(const Model& model,
                                    std::string_view parameter,
                                    double h,
                                    const SimConfig& config);

}  // namespace ltsens
