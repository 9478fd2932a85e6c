#pragma once

#include "ltsens/models.hpp"

namespace ltsens {

/// Recurrent eigenpair of the ergodic HJB equation,
/// phi(x) = exp(-a2 x^2 / 2 - a1 x).
struct Eigenpair
{
    double lambda{};
    double a2{};
    double a1{};
};

Eigenpair eigenpair(const Model& model);

/// phi and its first two derivatives at a point.
///
/// The log-scale fields are always populated. When the exponent exceeds
/// kPhiLogThreshold in magnitude, phi/dphi/d2phi saturate and `log_scale`
/// is set; callers must then use log_phi and the ratios.
struct PhiValues
{
    double phi{};
    double dphi{};
    double d2phi{};
    double log_phi{};
    /// phi'/phi = -(a2 x + a1)
    double dlog_phi{};
    /// phi''/phi = (a2 x + a1)^2 - a2
    double d2_ratio{};
    bool log_scale{false};
};

inline constexpr double kPhiLogThreshold = 700.0;

PhiValues phi_eval(const Eigenpair& pair, double x);

inline double log_phi(const Eigenpair& pair, double x)
{
    return -0.5 * pair.a2 * x * x - pair.a1 * x;
}

/// Scale-free residual of the ergodic HJB equation with the ergodic control
/// substituted:
///   [ (s1^2+s2^2)/2 phi'' + h(xi*, x) phi' + l(xi*, x) phi + lambda phi ]
///     / max(|lambda phi|, phi).
/// The complete-market model uses its own generator under the
/// utility-adjusted measure. Heston requires x > 0.
double ergodic_residual(const Model& model, const Eigenpair& pair, double x);

}  // namespace ltsens
