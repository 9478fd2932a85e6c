#include "ltsens/verify.hpp"

#include <algorithm>
#include <cmath>

#include "ltsens/coefficients.hpp"
#include "ltsens/eigenpairs.hpp"
#include "ltsens/random.hpp"
#include "ltsens/report.hpp"
#include "ltsens/sensitivities.hpp"
#include "ltsens/valuation.hpp"

namespace ltsens {

std::string_view to_string(CheckStatus status)
{
    switch (status)
    {
        case CheckStatus::pass: return "PASS";
        case CheckStatus::fail: return "FAIL";
        case CheckStatus::skip: return "SKIP";
    }
    return "?";
}

bool VerifyReport::all_pass() const noexcept
{
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

namespace {

CheckStatus status_of(bool ok)
{
    return ok ? CheckStatus::pass : CheckStatus::fail;
}

CheckResult skipped(std::string name, std::string why)
{
    return {std::move(name), CheckStatus::skip, std::move(why), Json::object()};
}

/// 101 points over chi +- 4 stationary standard deviations of the factor
/// (positive part for Heston).
std::vector<double> residual_grid(const Model& model)
{
    double center = model.initial_factor(), sd = 0, lo = 0;
    switch (model.kind())
    {
        case ModelKind::ou_complete: {
            const auto& m = model.ou_complete();
            sd = m.varsigma / std::sqrt(2 * m.b / (1 - model.prefs().p()));
            lo = center - 4 * sd;
            break;
        }
        case ModelKind::kim_omberg: {
            const auto& m = model.kim_omberg();
            sd = m.sigma / std::sqrt(2 * m.k);
            lo = center - 4 * sd;
            break;
        }
        case ModelKind::heston: {
            const auto& m = model.heston();
            sd = m.sigma * std::sqrt(m.m_bar / (2 * m.k));
            lo = std::max(center - 4 * sd, 1e-3 * center);
            break;
        }
    }
    const double hi = center + 4 * sd;
    std::vector<double> grid(101);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / 100.0;
    return grid;
}

CheckResult check_residual(const Model& model)
{
    const auto e = eigenpair(model);
    double worst = 0, at = 0;
    for (double x : residual_grid(model))
    {
        const double r = std::abs(ergodic_residual(model, e, x));
        if (!(r <= worst))
        {
            worst = r;
            at = x;
        }
    }
    Json d;
    d["max_abs_residual"] = worst;
    d["at_x"] = at;
    d["tolerance"] = 1e-8;
    return {"eigenpair_residual", status_of(worst < 1e-8),
            "max |r| = " + format_double(worst), d};
}

CheckResult check_riccati(const Model& model)
{
    if (model.kind() == ModelKind::ou_complete)
        return skipped("riccati_oracle", "no Riccati system for the complete-market model");
    const auto grid = uniform_grid(50.0, 500);
    const auto closed = coefficient_path(model, grid);
    Json d;
    d["horizon"] = 50.0;
    d["tolerance"] = 1e-6;
    try
    {
        const auto oracle = riccati_oracle(model, grid);
        auto sup = [](const std::vector<double>& a, const std::vector<double>& b) {
            double m = 0;
            for (std::size_t i = 0; i < a.size(); ++i)
                m = std::max(m, std::abs(a[i] - b[i]));
            return m;
        };
        const double eb = sup(closed.beta, oracle.beta);
        const double eg = sup(closed.gamma, oracle.gamma);
        const double el = closed.has_lambda() ? sup(closed.Lambda, oracle.Lambda) : 0.0;
        d["sup_error_beta"] = eb;
        d["sup_error_gamma"] = eg;
        d["sup_error_Lambda"] = closed.has_lambda() ? Json(el) : Json(nullptr);
        const double worst = std::max({eb, eg, el});
        return {"riccati_oracle", status_of(worst < 1e-6), "sup error " + format_double(worst),
                d};
    }
    catch (const OdeStepError& err)
    {
        d["error"] = err.what();
        return {"riccati_oracle", CheckStatus::fail, err.what(), d};
    }
}

CheckResult check_t0(const Model& model, const SimConfig& sim)
{
    const double p = model.prefs().p();
    const double chi = model.initial_factor();
    Json d;
    bool ok = true;
    if (model.kind() == ModelKind::ou_complete)
    {
        SimConfig c = sim;
        c.T = 0;
        const auto est = simulate_phat_value(model, chi, c);
        d["v"] = est.v;
        d["se"] = est.se;
        ok = est.v == 1 && est.se == 0;
        return {"t0_identities", status_of(ok), ok ? "v(s,0) = 1" : "v(s,0) != 1", d};
    }
    const auto v = dual_value(model, chi, 0);
    const auto path = coefficient_path(model, uniform_grid(1.0, 4));
    const double q = model.prefs().q();
    const double xs = control_star_xi(model, chi);
    const double f_end = f_eval(model, chi, 1.0, 1.0);
    const double xi_end = control_hat_xi(model, chi, 1.0, 1.0);
    SimConfig c = sim;
    c.T = 0;
    const auto dec = decomposition_check(model, chi, c);
    d["v"] = v.v;
    d["utility"] = v.utility;
    d["coefficients_at_zero"] = Json::array(
        {path.beta[0], path.gamma[0], path.has_lambda() ? path.Lambda[0] : 0.0});
    d["f_at_horizon"] = f_end;
    d["xi_hat_at_horizon"] = xi_end;
    d["decomposition_ratio_gap"] = dec.ratio_gap;
    ok = v.v == 1 && v.utility == 1 / p && path.beta[0] == 0 && path.gamma[0] == 0
         && (!path.has_lambda() || path.Lambda[0] == 0) && xi_end == 0
         && std::abs(f_end + 0.5 * q * (1 - q) * xs * xs) <= 1e-15 * (1 + xs * xs)
         && dec.ratio_gap == 0 && dec.mc_se == 0;
    return {"t0_identities", status_of(ok), ok ? "all T = 0 identities hold" : "identity violated",
            d};
}

CheckResult check_decomposition(const Model& model, const SimConfig& sim)
{
    if (model.kind() == ModelKind::ou_complete)
        return skipped("decomposition", "defined for the factor models only");
    Json rows = Json::array();
    bool ok = true;
    std::string first_error;
    const double horizons[] = {1.0, 5.0, 10.0};
    for (std::size_t i = 0; i < 3; ++i)
    {
        SimConfig c = sim;
        c.T = horizons[i];
        c.seed = derive_seed(sim.seed, 10 + i);
        try
        {
            const auto r = decomposition_check(model, model.initial_factor(), c);
            ok = ok && r.pass;
            rows.push_back(decomposition_json(r));
        }
        catch (const std::exception& err)
        {
            ok = false;
            Json row;
            row["T"] = horizons[i];
            row["error"] = err.what();
            rows.push_back(row);
            if (first_error.empty())
                first_error = err.what();
        }
    }
    Json d;
    d["rows"] = rows;
    return {"decomposition", status_of(ok),
            first_error.empty() ? (ok ? "within 3 SE at T = 1, 5, 10" : "outside 3 SE")
                                : first_error,
            d};
}

CheckResult check_two_route(const Model& model, const SimConfig& sim)
{
    if (model.kind() == ModelKind::ou_complete)
        return skipped("two_route_value", "no closed-form finite-horizon value to compare");
    SimConfig c = sim;
    c.T = 2.0;
    c.seed = derive_seed(sim.seed, 20);
    const double chi = model.initial_factor();
    Json d;
    try
    {
        const auto est = simulate_phat_value(model, chi, c);
        const auto v = dual_value(model, chi, 2.0);
        const double gap = std::abs(est.v - v.v);
        d["T"] = 2.0;
        d["v_closed"] = v.v;
        d["v_mc"] = est.v;
        d["se"] = est.se;
        d["gap"] = gap;
        const bool ok = est.se > 0 ? gap < 3 * est.se : gap < 1e-12;
        return {"two_route_value", status_of(ok), "gap " + format_double(gap) + ", 3 SE "
                                                      + format_double(3 * est.se),
                d};
    }
    catch (const std::exception& err)
    {
        d["error"] = err.what();
        return {"two_route_value", CheckStatus::fail, err.what(), d};
    }
}

CheckResult check_audit(const Model& model)
{
    const auto report = long_term_sensitivities(model);
    std::string flagged;
    for (const auto& e : report.entries)
        if (e.flagged)
            flagged += (flagged.empty() ? "" : ", ") + e.name;
    return {"sensitivity_audit", status_of(!report.any_flagged()),
            flagged.empty() ? "every printed limit matches the lambda oracle"
                            : "printed limit disagrees with the lambda oracle: " + flagged,
            sensitivities_json(report)};
}

CheckResult check_convergence(const Model& model, const SimConfig& sim)
{
    Json d;
    if (model.kind() == ModelKind::ou_complete)
    {
        SimConfig c = sim;
        c.seed = derive_seed(sim.seed, 30);
        try
        {
            const auto e = eigenpair(model);
            const auto est = simulate_phat_value(model, model.initial_factor(), c);
            const auto bump = mc_bump_sensitivity(model, "b", 0.01 * model.ou_complete().b, c);
            const double p = model.prefs().p();
            const double b_limit = -(std::sqrt(1 - p) - 1) / 2;
            const double b_value = (1 - p) * bump.slope;
            const double growth_err = std::abs(est.growth_rate_fit - e.lambda);
            const double b_err = std::abs(b_value - b_limit);
            d["T"] = c.T;
            d["growth_rate_fit"] = est.growth_rate_fit;
            d["lambda"] = e.lambda;
            d["b_sensitivity"] = b_value;
            d["b_sensitivity_se"] = (1 - p) * bump.slope_se;
            d["b_limit"] = b_limit;
            const bool ok = growth_err < 0.10 * std::abs(e.lambda) && b_err < 0.15 * std::abs(b_limit);
            return {"convergence", status_of(ok), "growth-rate fit and b slope at T = "
                                                      + format_double(c.T),
                    d};
        }
        catch (const std::exception& err)
        {
            d["error"] = err.what();
            return {"convergence", CheckStatus::fail, err.what(), d};
        }
    }

    const double horizons[] = {5.0, 10.0, 25.0, 50.0};
    bool ok = true;
    Json params = Json::array();
    for (const auto& name : model.parameter_names())
    {
        if (name == "chi")
            continue;
        const auto rows = convergence_diagnostic(model, name, horizons);
        const double tol = 0.05 * std::abs(rows.back().limit) + 1e-4;
        const bool here = rows.back().gap < tol && rows[3].gap <= rows[2].gap + 1e-12
                          && rows[2].gap <= rows[1].gap + 1e-12;
        ok = ok && here;
        Json j = diagnostic_json(name, rows);
        j["tolerance_at_T50"] = tol;
        j["status"] = here ? "PASS" : "FAIL";
        params.push_back(j);
    }
    const auto s5 = initial_factor_sensitivity(model, model.initial_factor(), 5.0);
    const auto s50 = initial_factor_sensitivity(model, model.initial_factor(), 50.0);
    const bool chi_ok = s50.gap <= s5.gap || s50.gap < 1e-12;
    ok = ok && chi_ok;
    d["parameters"] = params;
    d["chi_gap_T5"] = s5.gap;
    d["chi_gap_T50"] = s50.gap;
    return {"convergence", status_of(ok), "per-time sensitivities approach -dlambda/dtheta", d};
}

}  // namespace

VerifyReport run_verify(const Model& model, const SimConfig& sim)
{
    VerifyReport r;
    r.model = model.kind();
    r.seed = sim.seed;
    r.checks.push_back(check_residual(model));
    r.checks.push_back(check_riccati(model));
    r.checks.push_back(check_t0(model, sim));
    r.checks.push_back(check_decomposition(model, sim));
    r.checks.push_back(check_two_route(model, sim));
    r.checks.push_back(check_audit(model));
    r.checks.push_back(check_convergence(model, sim));
    return r;
}

Json verify_json(const VerifyReport& report)
{
    Json j;
    j["model"] = std::string(to_string(report.model));
    j["seed"] = report.seed;
    Json checks = Json::array();
    for (const auto& c : report.checks)
    {
        Json row;
        row["name"] = c.name;
        row["status"] = std::string(to_string(c.status));
        row["summary"] = c.summary;
        row["detail"] = c.detail;
        checks.push_back(std::move(row));
    }
    j["checks"] = std::move(checks);
    j["all_pass"] = report.all_pass();
    return j;
}

}  // namespace ltsens
