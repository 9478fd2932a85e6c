#include "ltsens/eigenpairs.hpp"

#include <cmath>
#include <limits>

namespace ltsens {

Eigenpair eigenpair(const Model& model)
{
    switch (model.kind())
    {
        case ModelKind::ou_complete: {
            const auto& m = model.ou_complete();
            const double p = model.prefs().p();
            const double root = std::sqrt(1 - p) - 1;
            const double vs2 = m.varsigma * m.varsigma;
            Eigenpair e;
            e.a2 = m.b * root / ((1 - p) * vs2);
            e.a1 = -m.mu * root / ((1 - p) * vs2);
            e.lambda = m.b * root / (2 * (1 - p));
            return e;
        }
        case ModelKind::kim_omberg: {
            const auto& c = model.kim_omberg_constants();
            const double sigma = model.kim_omberg().sigma;
            // alpha4 - alpha1 loses digits when alpha1 dominates; use the
            // conjugate form (alpha4^2 - alpha1^2)/(alpha4 + alpha1) when
            // alpha1 > 0.
            const double gap = c.alpha1 > 0
                                   ? c.alpha2 * c.forcing / (c.alpha4 + c.alpha1)
                                   : c.alpha4 - c.alpha1;
            Eigenpair e;
            e.a2 = gap / c.alpha2;
            e.a1 = c.alpha3 * gap / (c.alpha2 * c.alpha4);
            e.lambda = -0.5 * c.alpha2 * e.a1 * e.a1 + c.alpha3 * e.a1
                       + 0.5 * sigma * sigma * e.a2;
            return e;
        }
        case ModelKind::heston: {
            const auto& m = model.heston();
            const auto& c = model.heston_constants();
            const double q = c.q;
            Eigenpair e;
            e.a2 = 0;
            // (1-q)(beta2-beta1)/((1-q rho^2) sigma^2) equals
            // forcing/(beta1+beta2); the latter has no cancellation.
            e.a1 = c.beta1 > 0 ? c.forcing / (c.beta1 + c.beta2)
                               : (1 - q) * (c.beta2 - c.beta1)
                                     / ((1 - q * m.rho * m.rho) * m.sigma * m.sigma);
            e.lambda = m.k * m.m_bar * e.a1;
            return e;
        }
    }
    return {};
}

PhiValues phi_eval(const Eigenpair& pair, double x)
{
    PhiValues v;
    const double slope = pair.a2 * x + pair.a1;
    v.log_phi = log_phi(pair, x);
    v.dlog_phi = -slope;
    v.d2_ratio = slope * slope - pair.a2;
    v.log_scale = std::abs(v.log_phi) > kPhiLogThreshold;
    if (v.log_scale)
    {
        const double sat = v.log_phi > 0 ? std::numeric_limits<double>::infinity()
                                         : 0.0;
        v.phi = sat;
        v.dphi = v.dlog_phi == 0 ? 0.0 : std::copysign(sat, v.dlog_phi);
        v.d2phi = v.d2_ratio == 0 ? 0.0 : std::copysign(sat, v.d2_ratio);
    }
    else
    {
        v.phi = std::exp(v.log_phi);
        v.dphi = v.dlog_phi * v.phi;
        v.d2phi = v.d2_ratio * v.phi;
    }
    return v;
}

double ergodic_residual(const Model& model, const Eigenpair& pair, double x)
{
    // Everything is divided through by phi(x) > 0, so the residual is
    // computed from the log-derivatives and never overflows.
    const auto v = phi_eval(pair, x);
    const double q = model.prefs().q();
    double generator = 0;
    switch (model.kind())
    {
        case ModelKind::ou_complete: {
            const auto& m = model.ou_complete();
            const double p = model.prefs().p();
            const double theta = market_price_of_risk(model, x);
            const double alpha = model.ou_complete_constants().alpha_cm;
            generator = 0.5 * m.varsigma * m.varsigma * v.d2_ratio
                        + (m.mu - m.b * x) / (1 - p) * v.dlog_phi
                        - alpha * theta * theta;
            break;
        }
        case ModelKind::kim_omberg:
        case ModelKind::heston: {
            double s1, s2, drift, vol2;
            if (model.kind() == ModelKind::kim_omberg)
            {
                const auto& m = model.kim_omberg();
                const auto& c = model.kim_omberg_constants();
                s1 = c.sigma1;
                s2 = c.sigma2;
                drift = m.k * (m.m_bar - x);
                vol2 = m.sigma * m.sigma;
            }
            else
            {
                if (!(x > 0))
                    throw DomainError("Heston ergodic residual needs x > 0");
                const auto& m = model.heston();
                const auto& c = model.heston_constants();
                const double rx = std::sqrt(x);
                s1 = c.sigma1 * rx;
                s2 = c.sigma2 * rx;
                drift = m.k * (m.m_bar - x);
                vol2 = m.sigma * m.sigma * x;
            }
            const double theta = market_price_of_risk(model, x);
            const double xi_star = -s2 * v.dlog_phi / (1 - q);
            const double l = -0.5 * q * (1 - q) * (theta * theta + xi_star * xi_star);
            const double h = drift - q * theta * s1 - q * xi_star * s2;
            generator = 0.5 * vol2 * v.d2_ratio + h * v.dlog_phi + l;
            break;
        }
    }
    return (generator + pair.lambda) / std::max(std::abs(pair.lambda), 1.0);
}

}  // namespace ltsens
