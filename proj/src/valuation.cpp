#include "ltsens/valuation.hpp"

#include <cmath>
#include <mutex>

namespace ltsens {

//---------------------------------------------------------------------------//
// Cache
//---------------------------------------------------------------------------//

bool CoefficientCache::Key::operator<(const Key& other) const
{
    if (model_hash != other.model_hash)
        return model_hash < other.model_hash;
    return grid < other.grid;
}

CoefficientCache::CoefficientCache(std::size_t capacity) : capacity_(capacity) {}

std::shared_ptr<const CoefficientPath>
CoefficientCache::get(const Model& model, std::span<const double> grid)
{
    Key key{model.content_hash(), std::vector<double>(grid.begin(), grid.end())};
    {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end())
            return it->second;
    }
    auto path = std::make_shared<const CoefficientPath>(coefficient_path(model, grid));
    std::unique_lock lock(mutex_);
    if (entries_.size() >= capacity_)
        entries_.clear();
    return entries_.emplace(std::move(key), std::move(path)).first->second;
}

std::size_t CoefficientCache::size() const
{
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void CoefficientCache::clear()
{
    std::unique_lock lock(mutex_);
    entries_.clear();
}

CoefficientCache& CoefficientCache::global()
{
    static CoefficientCache cache;
    return cache;
}

//---------------------------------------------------------------------------//

CoefficientsAt coefficients_at(const Model& model, double tau)
{
    if (!(tau >= 0))
        throw std::invalid_argument("time to horizon must be >= 0");
    if (model.kind() == ModelKind::ou_complete)
        throw UnsupportedModelError("no closed-form coefficients for the "
                                    "complete-market model");
    if (tau == 0)
        return {};
    const double grid[] = {0.0, tau};
    auto path = CoefficientCache::global().get(model, grid);
    CoefficientsAt at;
    at.beta = path->beta.back();
    at.gamma = path->gamma.back();
    at.Lambda = path->has_lambda() ? path->Lambda.back() : 0.0;
    return at;
}

ValueResult make_value_result(double log_v, double p, double horizon)
{
    ValueResult r;
    r.log_v = log_v;
    r.v = std::exp(log_v);
    r.utility = std::exp((1 - p) * log_v) / p;
    if (horizon > 0)
        r.growth_rate_estimate = -log_v / horizon;
    return r;
}

ValueResult dual_value(const Model& model, double chi, double horizon)
{
    if (!(horizon >= 0))
        throw std::invalid_argument("horizon must be >= 0");
    if (model.kind() == ModelKind::ou_complete)
        throw UnsupportedModelError(
            "the complete-market model has no closed-form finite-horizon value; "
            "estimate it with simulate_phat_value");
    if (model.kind() == ModelKind::heston && !(chi > 0))
        throw DomainError("Heston dual value needs chi > 0");

    const double p = model.prefs().p();
    if (horizon == 0)
        return make_value_result(0.0, p, 0.0);
    const auto at = coefficients_at(model, horizon);
    const double log_v = model.kind() == ModelKind::kim_omberg
                             ? at.Lambda - 0.5 * at.beta * chi * chi - at.gamma * chi
                             : -at.gamma - at.beta * chi;
    return make_value_result(log_v, p, horizon);
}

//---------------------------------------------------------------------------//
// Controls
//---------------------------------------------------------------------------//

namespace {

void check_times(double t, double horizon)
{
    if (!(t >= 0 && t <= horizon))
        throw std::invalid_argument("need 0 <= t <= T");
}

double heston_root(double x)
{
    if (x < 0)
        throw DomainError("Heston factor must be >= 0");
    return std::sqrt(x);
}

}  // namespace

double control_hat_xi(const Model& model, double x, const CoefficientsAt& at)
{
    switch (model.kind())
    {
        case ModelKind::kim_omberg: {
            const auto& c = model.kim_omberg_constants();
            return c.sigma2 / (1 - c.q) * (at.beta * x + at.gamma);
        }
        case ModelKind::heston: {
            const auto& c = model.heston_constants();
            return c.sigma2 / (1 - c.q) * at.beta * heston_root(x);
        }
        case ModelKind::ou_complete:
            break;
    }
    throw UnsupportedModelError("controls are defined for the factor models only");
}

double control_hat_xi(const Model& model, double x, double t, double horizon)
{
    check_times(t, horizon);
    if (model.kind() == ModelKind::heston)
        heston_root(x);
    return control_hat_xi(model, x, coefficients_at(model, horizon - t));
}

double control_star_xi(const Model& model, double x)
{
    const auto e = eigenpair(model);
    switch (model.kind())
    {
        case ModelKind::kim_omberg: {
            const auto& c = model.kim_omberg_constants();
            return c.sigma2 / (1 - c.q) * (e.a2 * x + e.a1);
        }
        case ModelKind::heston: {
            const auto& c = model.heston_constants();
            return c.sigma2 / (1 - c.q) * e.a1 * heston_root(x);
        }
        case ModelKind::ou_complete:
            break;
    }
    throw UnsupportedModelError("controls are defined for the factor models only");
}

double f_eval(const Model& model, double x, const CoefficientsAt& at)
{
    const double q = model.prefs().q();
    const double gap = control_star_xi(model, x) - control_hat_xi(model, x, at);
    return -0.5 * q * (1 - q) * gap * gap;
}

double f_eval(const Model& model, double x, double t, double horizon)
{
    check_times(t, horizon);
    return f_eval(model, x, coefficients_at(model, horizon - t));
}

double f_eval_expanded(const Model& model, double x, const CoefficientsAt& at)
{
    const auto e = eigenpair(model);
    switch (model.kind())
    {
        case ModelKind::kim_omberg: {
            const auto& c = model.kim_omberg_constants();
            const double lin = (e.a2 - at.beta) * x + (e.a1 - at.gamma);
            return -c.q * c.sigma2 * c.sigma2 / (2 * (1 - c.q)) * lin * lin;
        }
        case ModelKind::heston: {
            const auto& c = model.heston_constants();
            const double d = e.a1 - at.beta;
            return -c.q * c.sigma2 * c.sigma2 * heston_root(x) * heston_root(x)
                   / (2 * (1 - c.q)) * d * d;
        }
        case ModelKind::ou_complete:
            break;
    }
    throw UnsupportedModelError("f is defined for the factor models only");
}

double kappa_eval(const Model& model, double x, const CoefficientsAt& at)
{
    const auto e = eigenpair(model);
    switch (model.kind())
    {
        case ModelKind::kim_omberg: {
            const auto& m = model.kim_omberg();
            const auto& c = model.kim_omberg_constants();
            const double s2 = m.sigma * m.sigma;
            const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
            return m.k * m.m_bar - e.a1 * s2 - tilt * at.gamma
                   - (c.alpha1 + e.a2 * s2 + tilt * at.beta) * x;
        }
        case ModelKind::heston: {
            const auto& m = model.heston();
            const auto& c = model.heston_constants();
            heston_root(x);
            const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
            return m.k * m.m_bar
                   - (c.beta1 + m.sigma * m.sigma * e.a1 + tilt * at.beta) * x;
        }
        case ModelKind::ou_complete:
            break;
    }
    throw UnsupportedModelError("kappa is defined for the factor models only");
}

double kappa_eval(const Model& model, double x, double t, double horizon)
{
    check_times(t, horizon);
    return kappa_eval(model, x, coefficients_at(model, horizon - t));
}

double kappa_from_definition(const Model& model, double x, const CoefficientsAt& at)
{
    const auto e = eigenpair(model);
    const double q = model.prefs().q();
    const double theta = market_price_of_risk(model, x);
    const double xi_hat = control_hat_xi(model, x, at);
    const double dlog_phi = phi_eval(e, x).dlog_phi;
    double drift, s1, s2;
    if (model.kind() == ModelKind::kim_omberg)
    {
        const auto& m = model.kim_omberg();
        const auto& c = model.kim_omberg_constants();
        drift = m.k * (m.m_bar - x);
        s1 = c.sigma1;
        s2 = c.sigma2;
    }
    else if (model.kind() == ModelKind::heston)
    {
        const auto& m = model.heston();
        const auto& c = model.heston_constants();
        const double rx = heston_root(x);
        drift = m.k * (m.m_bar - x);
        s1 = c.sigma1 * rx;
        s2 = c.sigma2 * rx;
    }
    else
    {
        throw UnsupportedModelError("kappa is defined for the factor models only");
    }
    return drift - q * theta * s1 - q * xi_hat * s2 + dlog_phi * (s1 * s1 + s2 * s2);
}

}  // namespace ltsens
