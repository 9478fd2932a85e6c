#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <vector>

#include "ltsens/coefficients.hpp"
#include "ltsens/eigenpairs.hpp"
#include "ltsens/models.hpp"

namespace ltsens {

/// Finite-horizon dual value and the corresponding optimal utility.
struct ValueResult
{
    double v{1};
    double log_v{0};
    /// v^{1-p}/p
    double utility{};
    /// -ln v / T; absent at T = 0.
    std::optional<double> growth_rate_estimate;
};

/// Read-mostly cache of coefficient paths keyed by (model content, grid).
/// Concurrent readers, serialized writers.
class CoefficientCache
{
  public:
    explicit CoefficientCache(std::size_t capacity = 256);

    std::shared_ptr<const CoefficientPath> get(const Model& model,
                                               std::span<const double> grid);
    std::size_t size() const;
    void clear();

    /// Process-wide instance used by the valuation functions.
    static CoefficientCache& global();

  private:
    struct Key
    {
        std::uint64_t model_hash;
        std::vector<double> grid;
        bool operator<(const Key& other) const;
    };

    std::size_t capacity_;
    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const CoefficientPath>> entries_;
};

/// Coefficients at a single time-to-horizon tau.
struct CoefficientsAt
{
    double beta{};
    double gamma{};
    double Lambda{};
};

/// beta(tau), gamma(tau), Lambda(tau) via the cached quadrature path {0, tau}.
CoefficientsAt coefficients_at(const Model& model, double tau);

/// v(chi, T) from the closed-form coefficients. The complete-market model
/// throws UnsupportedModelError (use simulate_phat_value instead).
ValueResult dual_value(const Model& model, double chi, double horizon);

/// Utility-side quantities from a dual value.
ValueResult make_value_result(double log_v, double p, double horizon);

//---------------------------------------------------------------------------//
// Controls and decomposition ingredients. Calendar time t in [0, T]; the
// coefficients are read at T - t.
//---------------------------------------------------------------------------//

double control_hat_xi(const Model& model, double x, double t, double horizon);
double control_hat_xi(const Model& model, double x, const CoefficientsAt& at);

double control_star_xi(const Model& model, double x);

/// f = -(q/2)(1-q)(xi* - xi_hat)^2 from the two controls.
double f_eval(const Model& model, double x, double t, double horizon);
double f_eval(const Model& model, double x, const CoefficientsAt& at);

/// f from the model-specific expansion in (B - beta, C - gamma).
double f_eval_expanded(const Model& model, double x, const CoefficientsAt& at);

/// Q-drift from the model-specific affine expansion.
double kappa_eval(const Model& model, double x, double t, double horizon);
double kappa_eval(const Model& model, double x, const CoefficientsAt& at);

/// Q-drift assembled from its definition
///   m - q theta sigma1 - q xi_hat sigma2 + (phi'/phi)(sigma1^2 + sigma2^2).
double kappa_from_definition(const Model& model, double x, const CoefficientsAt& at);

}  // namespace ltsens
