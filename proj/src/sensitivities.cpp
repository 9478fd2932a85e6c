#include "ltsens/sensitivities.hpp"

#include <cmath>
#include <stdexcept>

#include "ltsens/eigenpairs.hpp"
#include "ltsens/simulation.hpp"
#include "ltsens/valuation.hpp"

namespace ltsens {

bool SensitivityReport::any_flagged() const noexcept
{
    for (const auto& e : entries)
        if (e.flagged)
            return true;
    return false;
}

const SensitivityEntry& SensitivityReport::at(std::string_view name) const
{
    for (const auto& e : entries)
        if (e.name == name)
            return e;
    throw std::out_of_range("no sensitivity entry named " + std::string(name));
}

namespace {

double chi_limit(const Model& model)
{
    const auto e = eigenpair(model);
    const double chi = model.initial_factor();
    return -(1 - model.prefs().p()) * (e.a2 * chi + e.a1);
}

std::vector<std::pair<std::string, double>> ou_limits(const Model& model)
{
    const double p = model.prefs().p();
    return {{"chi", chi_limit(model)},
            {"mu", 0.0},
            {"b", -(std::sqrt(1 - p) - 1) / 2},
            {"varsigma", 0.0}};
}

std::vector<std::pair<std::string, double>> ko_limits(const Model& model)
{
    const auto& m = model.kim_omberg();
    const auto& c = model.kim_omberg_constants();
    const auto e = eigenpair(model);
    const double p = model.prefs().p();
    const double q = c.q;
    const double k = m.k, mb = m.m_bar, mu = m.mu, vs = m.varsigma, s = m.sigma,
                 r = m.rho;
    const double a1 = c.alpha1, a2 = c.alpha2, a3 = c.alpha3, a4 = c.alpha4;
    const double B = e.a2, C = e.a1;

    std::vector<std::pair<std::string, double>> out{{"chi", chi_limit(model)}};
    if (mu == 0)
    {
        // Every ratio below degenerates to 0/0; lambda is identically zero.
        for (const char* n : {"k", "m_bar", "mu", "varsigma", "rho", "sigma"})
            out.emplace_back(n, 0.0);
        return out;
    }
    const double a44 = a4 * a4;
    // alpha4 - alpha1 = alpha2 B without cancellation.
    const double gap = a2 * B;

    // m_bar/alpha3 = 1/k and C^2 alpha2/alpha3 = alpha2 B C/alpha4.
    const double d_k = (1 - p) * a2 * (1 / k - (a4 + a1) / a44) * C * C
                       - (1 - p) * (2 * mb - a3 * (a4 + a1) / a44) * C
                       + (1 - p) * s * s * B / (2 * a4);
    const double d_mb = (1 - p) * k * a2 * B * C / a4 - 2 * (1 - p) * k * C;
    const double d_mu
        = -p * s * a1 * a3 * a3 * (r * vs * a44 - k * r * vs * a1 - mu * s * a1)
              / (vs * vs * a2 * a44 * a44)
          - p * s * s * s * (r * vs * a4 - q * r * vs - mu * s) / (2 * vs * vs * a2 * a4);
    const double d_vs
        = p * q * mu * mu * s * s * a1 * a3 * a3
              * (r * vs * a44 - k * r * vs * a1 - mu * s * a1)
              / (vs * vs * vs * a2 * a44 * a44)
          + p * mu * s * s * s * (r * vs * a4 - k * r * vs - mu * s)
                / (2 * vs * vs * vs * a2 * a4);
    const double X = (k - a4) * mu * s / (vs * a4 * gap);
    const double rs = r * s * s / ((1 - q) * a2);
    const double kms = k * mu * s / (vs * a44);
    const double d_rho = -a2 * p * C * C * (X + rs - kms)
                         + a3 * p * C * (X + 2 * rs - kms)
                         + 0.5 * p * s * s * B * (X + 2 * rs);
    const double common = (r * vs * a4 - k * r * vs - mu * s) / (vs * vs * a4 * gap);
    const double Y = p * mu * common;
    const double Z = p * mu * (k * r * vs + mu * s) / (vs * vs * a44);
    const double d_sigma = a2 * (Y - (1 - p) / s + Z) * C * C
                           - a3 * (Y - 2 * (1 - p) / s + Z) * C
                           - 0.5 * p * mu * s * s * common * B;
    out.emplace_back("k", d_k);
    out.emplace_back("m_bar", d_mb);
    out.emplace_back("mu", d_mu);
    out.emplace_back("varsigma", d_vs);
    out.emplace_back("rho", d_rho);
    out.emplace_back("sigma", d_sigma);
    return out;
}

std::vector<std::pair<std::string, double>> heston_limits(const Model& model)
{
    const auto& m = model.heston();
    const auto& c = model.heston_constants();
    const auto e = eigenpair(model);
    const double p = model.prefs().p();
    const double q = c.q;
    const double k = m.k, mb = m.m_bar, mu = m.mu, vs = m.varsigma, s = m.sigma,
                 r = m.rho;
    const double b2 = c.beta2, B = e.a1;

    std::vector<std::pair<std::string, double>> out{{"chi", chi_limit(model)}};
    const double d_k = (1 - p) * mb * B * (k / b2 - 1);
    const double d_mb = -(1 - p) * k * B;
    const double d_mu = k * mb * q * (r * vs * b2 - k * r * vs - mu * s)
                        / ((1 - q * r * r) * s * vs * vs * b2);
    double d_vs = 0, d_rho = 0, d_sigma = 0;
    if (mu != 0)
    {
        // beta2 - beta1 = alpha2 B.
        const double gap = c.alpha2 * B;
        d_vs = k * mb * p * mu * s * B * (r * vs * b2 - r * k * vs - mu * s)
               / (vs * vs * vs * b2 * gap);
        d_rho = k * mb * B
                * (-p * mu * s * (b2 - k) / (vs * b2 * gap) + 2 * p * r / (1 - q * r * r));
        d_sigma = k * mb * B
                  * (2 * (1 - p) / s
                     + p * mu * (k * r * vs + mu * s - r * vs * b2) / (vs * vs * b2 * gap));
    }
    out.emplace_back("k", d_k);
    out.emplace_back("m_bar", d_mb);
    out.emplace_back("mu", d_mu);
    out.emplace_back("varsigma", d_vs);
    out.emplace_back("rho", d_rho);
    out.emplace_back("sigma", d_sigma);
    return out;
}

double ln_phi_at(const Model& model, double x)
{
    return log_phi(eigenpair(model), x);
}

}  // namespace

std::vector<std::pair<std::string, double>> printed_limits(const Model& model)
{
    switch (model.kind())
    {
        case ModelKind::ou_complete: return ou_limits(model);
        case ModelKind::kim_omberg: return ko_limits(model);
        case ModelKind::heston: return heston_limits(model);
    }
    return {};
}

double default_fd_step(const Model& model, std::string_view name)
{
    return 1e-6 * std::max(std::abs(model.parameter(name)), 1.0);
}

FdEstimate lambda_fd(const Model& model, std::string_view name, std::optional<double> h)
{
    const double theta = model.parameter(name);
    auto attempt = [&](double step) {
        auto lam = [&](double value) {
            return eigenpair(model.with_parameter(name, value)).lambda;
        };
        const double d1 = (lam(theta + step) - lam(theta - step)) / (2 * step);
        const double d2 = (lam(theta + step / 2) - lam(theta - step / 2)) / step;
        return FdEstimate{d1, std::abs(d1 - d2) * 4 / 3, step};
    };
    const double step = h.value_or(default_fd_step(model, name));
    try
    {
        return attempt(step);
    }
    catch (const ValidationError&)
    {
        return attempt(step / 10);
    }
}

SensitivityReport long_term_sensitivities(const Model& model)
{
    SensitivityReport report;
    report.model = model.kind();
    const double p = model.prefs().p();
    for (auto& [name, limit] : printed_limits(model))
    {
        SensitivityEntry entry;
        entry.name = name;
        entry.closed_form = limit;
        if (name == "chi")
        {
            const double chi = model.initial_factor();
            const double h = 1e-6 * std::max(std::abs(chi), 1.0);
            const double d1 = (ln_phi_at(model, chi + h) - ln_phi_at(model, chi - h)) / (2 * h);
            const double d2
                = (ln_phi_at(model, chi + h / 2) - ln_phi_at(model, chi - h / 2)) / h;
            entry.fd_check = (1 - p) * d1;
            entry.fd_error_estimate = (1 - p) * std::abs(d1 - d2) * 4 / 3;
        }
        else
        {
            const auto fd = lambda_fd(model, name);
            entry.fd_check = -(1 - p) * fd.derivative;
            entry.fd_error_estimate = (1 - p) * fd.error_estimate;
        }
        entry.abs_disagreement = std::abs(entry.closed_form - entry.fd_check);
        entry.flagged = !(entry.abs_disagreement < sensitivity_tolerance(limit));
        report.entries.push_back(std::move(entry));
    }
    return report;
}

InitialFactorSensitivity initial_factor_sensitivity(const Model& model,
                                                    double chi,
                                                    double horizon)
{
    if (model.kind() == ModelKind::ou_complete)
        throw UnsupportedModelError(
            "the complete-market initial-value sensitivity is estimated with "
            "mc_bump_sensitivity");
    if (model.kind() == ModelKind::heston && !(chi > 0))
        throw DomainError("Heston needs chi > 0");
    const double p = model.prefs().p();
    const auto e = eigenpair(model);
    const auto at = coefficients_at(model, horizon);
    InitialFactorSensitivity out;
    out.finite_horizon = model.kind() == ModelKind::kim_omberg
                             ? (1 - p) * (-at.beta * chi - at.gamma)
                             : (1 - p) * (-at.beta);
    out.limit = -(1 - p) * (e.a2 * chi + e.a1);
    out.gap = std::abs(out.finite_horizon - out.limit);
    return out;
}

std::vector<DiagnosticRow> convergence_diagnostic(const Model& model,
                                                  std::string_view name,
                                                  std::span<const double> horizons,
                                                  const SimConfig* sim)
{
    if (name == "chi" || name == "s0")
        throw std::invalid_argument(
            "the initial-factor sensitivity is not per-time; use "
            "initial_factor_sensitivity");
    for (std::size_t i = 0; i < horizons.size(); ++i)
        if (!(horizons[i] > 0) || (i > 0 && !(horizons[i] > horizons[i - 1])))
            throw std::invalid_argument("T grid must be positive and increasing");

    const double limit = -lambda_fd(model, name).derivative;
    std::vector<DiagnosticRow> rows;
    if (model.kind() == ModelKind::ou_complete)
    {
        if (!sim)
            throw UnsupportedModelError(
                "the complete-market diagnostic needs a simulation config");
        const double h = 1e-2 * std::max(std::abs(model.parameter(name)), 1.0);
        for (double T : horizons)
        {
            SimConfig cfg = *sim;
            cfg.T = T;
            const auto bump = mc_bump_sensitivity(model, name, h, cfg);
            DiagnosticRow row{T, bump.derivative / T, limit, 0, bump.se / T};
            row.gap = std::abs(row.value - limit);
            rows.push_back(row);
        }
        return rows;
    }

    const double theta = model.parameter(name);
    double h = 1e-5 * std::max(std::abs(theta), 1.0);
    Model up = model, down = model;
    try
    {
        up = model.with_parameter(name, theta + h);
        down = model.with_parameter(name, theta - h);
    }
    catch (const ValidationError&)
    {
        h /= 10;
        up = model.with_parameter(name, theta + h);
        down = model.with_parameter(name, theta - h);
    }
    for (double T : horizons)
    {
        const double up_v = dual_value(up, up.initial_factor(), T).log_v;
        const double down_v = dual_value(down, down.initial_factor(), T).log_v;
        DiagnosticRow row{T, (up_v - down_v) / (2 * h) / T, limit, 0, 0};
        row.gap = std::abs(row.value - limit);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ltsens
