#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltsens/models.hpp"

namespace ltsens {

/// Time-dependent HJB coefficients sampled on a grid of time-to-horizon
/// values. Kim-Omberg: v = exp(Lambda - beta x^2/2 - gamma x).
/// Heston: v = exp(-gamma - beta x); Lambda is empty.
struct CoefficientPath
{
    ModelKind model{};
    std::vector<double> grid;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> Lambda;
    /// Step actually used by the quadrature (or ODE integrator).
    double step{};
    std::vector<std::string> warnings;

    bool has_lambda() const noexcept { return !Lambda.empty(); }
};

/// Closed-form Riccati solution for the quadratic coefficient.
double ko_beta(double t, const KimOmbergConstants& c);

struct GammaLambdaPaths
{
    std::vector<double> gamma;
    std::vector<double> Lambda;
    double step{};
    std::vector<std::string> warnings;
};

/// gamma(t) = (alpha3/mu(t)) int_0^t beta(s) mu(s) ds,
/// mu(t) = exp(int_0^t (alpha1 + alpha2 beta)), and
/// Lambda(t) = int_0^t (alpha2 gamma^2/2 - alpha3 gamma - sigma^2 beta/2),
/// by Simpson quadrature on the grid refined to min(step, 0.01/alpha4).
GammaLambdaPaths ko_gamma_lambda(std::span<const double> grid,
                                 const KimOmbergConstants& c);

/// Closed-form Riccati solution, overflow-safe for large beta2 t.
double heston_beta(double t, const HestonConstants& c);

struct GammaPath
{
    std::vector<double> gamma;
    double step{};
    std::vector<std::string> warnings;
};

/// gamma(t) = k m_bar int_0^t beta(s) ds by composite Simpson.
GammaPath heston_gamma(std::span<const double> grid,
                       const HestonConstants& c,
                       double k,
                       double m_bar);

/// Closed-form coefficient path for a factor model. Throws
/// UnsupportedModelError for the complete-market model.
CoefficientPath coefficient_path(const Model& model, std::span<const double> grid);

/// Half-step disagreement of the RK4 oracle exceeded its tolerance.
class OdeStepError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct OdeOptions
{
    double step = 1e-3;
    double tolerance = 1e-6;
};

/// Integrates the governing ODE system with classical fixed-step RK4
/// (independent of the closed forms). Runs again at half the step and throws
/// OdeStepError if the two disagree by more than the tolerance.
CoefficientPath riccati_oracle(const Model& model,
                               std::span<const double> grid,
                               OdeOptions options = {});

/// Uniform grid 0, T/n, ..., T.
std::vector<double> uniform_grid(double horizon, std::size_t intervals);

/// Throws std::invalid_argument unless grid[0] == 0 and strictly increasing.
void check_grid(std::span<const double> grid);

}  // namespace ltsens
