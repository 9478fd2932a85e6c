// Acceptance runner: one PASS/FAIL line per criterion. Tolerances, draw
// counts and seeds are fixed here so every run is reproducible.
//
//   acceptance            run criteria 1-10
//   acceptance 3 6        run only the listed criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "ltsens/coefficients.hpp"
#include "ltsens/eigenpairs.hpp"
#include "ltsens/random.hpp"
#include "ltsens/report.hpp"
#include "ltsens/sensitivities.hpp"
#include "ltsens/simulation.hpp"
#include "ltsens/valuation.hpp"
#include "ltsens/verify.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ltsens;
using ltsens::testing::Draws;

namespace {

// ---- pinned tolerances -----------------------------------------------------
constexpr double kResidualTol = 1e-8;
constexpr double kIdentityRelTol = 1e-12;
constexpr double kOracleSupTol = 1e-6;
constexpr double kKoBetaRateTol = 0.10;
constexpr double kHestonRateTol = 0.15;
constexpr double kGrowthTol = 0.05;
constexpr double kMinMixingRate = 0.5;
constexpr double kSeMultiple = 3.0;
constexpr double kChiFdRelTol = 1e-6;
constexpr double kGapDecaySlack = 1.25;
constexpr double kOuGrowthTol = 0.10;
constexpr double kOuBTol = 0.15;

struct Outcome
{
    bool pass{};
    std::string detail;
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double rel(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0 ? 0.0 : std::abs(a - b) / s;
}

double mixing_rate(const Model& m)
{
    return m.kind() == ModelKind::kim_omberg ? m.kim_omberg_constants().alpha4
                                             : m.heston_constants().beta2;
}

/// Stationary factor grid: +-4 standard deviations around m_bar for
/// Kim-Omberg, a positive band around m_bar for Heston.
std::vector<double> stationary_grid(const Model& m, int points)
{
    std::vector<double> g(points);
    if (m.kind() == ModelKind::kim_omberg)
    {
        const auto& p = m.kim_omberg();
        const double sd = p.sigma / std::sqrt(2 * p.k);
        for (int j = 0; j < points; ++j)
            g[j] = p.m_bar - 4 * sd + 8 * sd * j / (points - 1);
    }
    else
    {
        const double mb = m.heston().m_bar;
        for (int j = 0; j < points; ++j)
            g[j] = mb * (0.05 + 4.95 * j / (points - 1));
    }
    return g;
}

// ---- criteria ------------------------------------------------------------

Outcome c1_residual()
{
    Draws d(1001);
    double worst = 0;
    for (int i = 0; i < 100; ++i)
        for (const auto& m : {d.kim_omberg(), d.heston()})
        {
            const auto e = eigenpair(m);
            for (double x : stationary_grid(m, 101))
                worst = std::max(worst, std::abs(ergodic_residual(m, e, x)));
        }
    return {worst < kResidualTol, "max |residual| " + fmt(worst) + " over 2x100 draws x 101 points"};
}

Outcome c2_identities()
{
    Draws d(1002);
    double riccati = 0, consistency = 0, radical = 0;
    for (int i = 0; i < 1000; ++i)
    {
        const auto ko = d.kim_omberg();
        const auto& c = ko.kim_omberg_constants();
        const auto e = eigenpair(ko);
        const double B = e.a2, C = e.a1;
        riccati = std::max(riccati, std::abs(-c.alpha2 * B * B - 2 * c.alpha1 * B + c.forcing)
                                        / (c.alpha2 * B * B + 2 * std::abs(c.alpha1 * B) + c.forcing));
        const double scale = std::abs(c.alpha3 * B) + std::abs(C * c.alpha1) + std::abs(C * c.alpha2 * B);
        if (scale > 0)
            consistency = std::max(consistency,
                                   std::abs(c.alpha3 * B - C * (c.alpha1 + c.alpha2 * B)) / scale);

        const auto h = d.heston();
        const auto& hc = h.heston_constants();
        const auto& hp = h.heston();
        const double rhs = hc.beta1 * hc.beta1
                           + hc.q * (1 - hc.q * hp.rho * hp.rho) * hp.mu * hp.mu * hp.sigma * hp.sigma
                                 / (hp.varsigma * hp.varsigma);
        radical = std::max(radical, rel(hc.beta2 * hc.beta2, rhs));
    }
    const bool ok = riccati < kIdentityRelTol && consistency < kIdentityRelTol && radical < kIdentityRelTol;
    return {ok, "riccati " + fmt(riccati) + ", consistency " + fmt(consistency) + ", beta2 radical "
                    + fmt(radical) + " (relative, 1000 draws)"};
}

Outcome c3_oracle()
{
    Draws d(1003);
    const auto grid = uniform_grid(50.0, 500);
    double beta_err = 0, gl_err = 0;
    for (int i = 0; i < 100; ++i)
        for (const auto& m : {d.kim_omberg(), d.heston()})
        {
            const auto closed = coefficient_path(m, grid);
            const auto rk4 = riccati_oracle(m, grid);
            for (std::size_t j = 0; j < grid.size(); ++j)
            {
                beta_err = std::max(beta_err, std::abs(closed.beta[j] - rk4.beta[j]));
                gl_err = std::max(gl_err, std::abs(closed.gamma[j] - rk4.gamma[j]));
                if (closed.has_lambda())
                    gl_err = std::max(gl_err, std::abs(closed.Lambda[j] - rk4.Lambda[j]));
            }
        }
    return {beta_err < kOracleSupTol && gl_err < kOracleSupTol,
            "sup beta error " + fmt(beta_err) + ", sup gamma/Lambda error " + fmt(gl_err)
                + " on [0, 50], 2x100 draws"};
}

Outcome c4_rates()
{
    // Generic sets: the two reference models plus draws with mixing rate >= 0.5.
    std::vector<Model> ko{ltsens::testing::ko_reference()}, he{ltsens::testing::heston_reference()};
    Draws d(1004);
    while (ko.size() < 21)
        if (auto m = d.kim_omberg(); mixing_rate(m) >= kMinMixingRate && m.kim_omberg().mu != 0)
            ko.push_back(m);
    while (he.size() < 21)
        if (auto m = d.heston(); mixing_rate(m) >= kMinMixingRate && m.heston().mu != 0)
            he.push_back(m);

    double ko_rate = 0, he_rate = 0, lam_ko = 0, lam_he = 0;
    for (const auto& m : ko)
    {
        const auto& c = m.kim_omberg_constants();
        const double B = eigenpair(m).a2;
        const double t0 = 3 / c.alpha4, t1 = 6 / c.alpha4;
        const double s = (std::log(B - ko_beta(t1, c)) - std::log(B - ko_beta(t0, c))) / (t1 - t0);
        ko_rate = std::max(ko_rate, std::abs(s / (-2 * c.alpha4) - 1));
        const double lambda = eigenpair(m).lambda;
        const auto at = coefficients_at(m, 50.0);
        lam_ko = std::max(lam_ko, std::abs(at.Lambda / 50 + lambda) / lambda);
    }
    for (const auto& m : he)
    {
        const auto& c = m.heston_constants();
        const double B = eigenpair(m).a1;
        const double t0 = 2 / c.beta2, t1 = 5 / c.beta2;
        const double s = (std::log(B - heston_beta(t1, c)) - std::log(B - heston_beta(t0, c))) / (t1 - t0);
        he_rate = std::max(he_rate, std::abs(s / (-c.beta2) - 1));
        const double lambda = eigenpair(m).lambda;
        lam_he = std::max(lam_he, std::abs(coefficients_at(m, 50.0).gamma / 50 - lambda) / lambda);
    }
    const bool ok = ko_rate < kKoBetaRateTol && he_rate < kHestonRateTol && lam_ko < kGrowthTol
                    && lam_he < kGrowthTol;
    return {ok, "beta slope rel. error KO " + fmt(ko_rate) + " / Heston " + fmt(he_rate)
                    + "; |Lambda(50)/50 + lambda|/lambda " + fmt(lam_ko)
                    + "; |gamma(50)/50 - lambda|/lambda " + fmt(lam_he) + " (21 sets each)"};
}

Outcome c5_audit()
{
    Draws d(1005);
    std::map<std::string, std::pair<int, double>> flagged;
    int entries = 0;
    for (int i = 0; i < 20; ++i)
        for (const auto& m : {d.ou_complete(), d.kim_omberg(), d.heston()})
        {
            const auto r = long_term_sensitivities(m);
            for (const auto& e : r.entries)
            {
                ++entries;
                if (!e.flagged)
                    continue;
                auto& slot = flagged[std::string(to_string(m.kind())) + "." + e.name];
                ++slot.first;
                slot.second = std::max(slot.second, e.abs_disagreement / sensitivity_tolerance(e.closed_form));
            }
        }
    std::ostringstream os;
    os << entries << " lines checked over 20 draws per model";
    for (const auto& [name, v] : flagged)
        os << "; " << name << " flagged " << v.first << "/20, worst gap " << fmt(v.second)
           << "x tolerance";
    return {flagged.empty(), os.str()};
}

Outcome c6_decomposition(unsigned workers)
{
    Draws d(1006);
    int runs = 0, passed = 0;
    double worst = 0;
    std::string failures;
    for (int i = 0; i < 5; ++i)
        for (const auto& m : {d.kim_omberg_mc(), d.heston_mc()})
            for (double T : {1.0, 5.0, 10.0})
            {
                SimConfig c;
                c.T = T;
                c.n_steps = 1000;
                c.n_paths = 100000;
                c.seed = derive_seed(6000 + i, static_cast<std::uint64_t>(T));
                c.workers = workers;
                const auto r = decomposition_check(m, m.initial_factor(), c);
                ++runs;
                passed += r.pass;
                worst = std::max({worst, r.ratio_gap / r.mc_se, r.ratio_gap_half / r.mc_se_half,
                                  r.step_gap / r.step_gap_se});
                if (!r.pass)
                    failures += " " + std::string(to_string(m.kind())) + "#" + std::to_string(i)
                                + "@T=" + fmt(T);
            }
    return {passed == runs, std::to_string(passed) + "/" + std::to_string(runs)
                                + " runs within 3 SE, worst gap " + fmt(worst) + " SE"
                                + (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome c7_two_route(unsigned workers)
{
    bool ok = true;
    std::string detail;
    for (const auto& m : {ltsens::testing::ko_reference(), ltsens::testing::heston_reference()})
    {
        SimConfig c;
        c.T = 2.0;
        c.n_steps = 1000;
        c.n_paths = 100000;
        c.seed = 7007;
        c.workers = workers;
        const auto est = simulate_phat_value(m, m.initial_factor(), c);
        const double closed = dual_value(m, m.initial_factor(), 2.0).v;
        const double z = std::abs(est.v - closed) / est.se;
        ok = ok && z < kSeMultiple;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(m.kind()))
                  + " gap " + fmt(z) + " SE";
    }
    return {ok, detail + " at T = 2"};
}

Outcome c8_initial_factor()
{
    Draws d(1008);
    double fd_err = 0, decay = 0;
    bool monotone = true;
    for (int i = 0; i < 50; ++i)
        for (const auto& m : {d.kim_omberg(), d.heston()})
        {
            const double chi = m.initial_factor(), p = m.prefs().p();
            const double h = 1e-5 * (1 + std::abs(chi));
            for (double T : {1.0, 10.0})
            {
                const auto s = initial_factor_sensitivity(m, chi, T);
                const double fd = (1 - p)
                                  * (dual_value(m, chi + h, T).log_v - dual_value(m, chi - h, T).log_v)
                                  / (2 * h);
                fd_err = std::max(fd_err, std::abs(fd - s.finite_horizon) / (std::abs(s.finite_horizon) + 1e-300));
            }
            // Gap decays at least as fast as exp(-rate T); rate alpha4 for
            // Kim-Omberg, beta2 for Heston, once the transient has died out.
            const double rate = mixing_rate(m);
            if (m.kind() == ModelKind::kim_omberg && m.kim_omberg().mu == 0)
                continue;
            const double t1 = 5 / rate;
            const double g1 = initial_factor_sensitivity(m, chi, t1).gap;
            const double g2 = initial_factor_sensitivity(m, chi, 2 * t1).gap;
            const double g3 = initial_factor_sensitivity(m, chi, 3 * t1).gap;
            if (g1 < 1e-13)
                continue;
            monotone = monotone && g2 <= g1 && g3 <= g2;
            decay = std::max(decay, (g3 / g1) / std::exp(-rate * 2 * t1));
        }
    const bool ok = fd_err < kChiFdRelTol && monotone && decay < kGapDecaySlack;
    return {ok, "chi FD rel. error " + fmt(fd_err) + " at T in {1, 10}; gap ratio from 5 to 15 time constants "
                    + fmt(decay) + "x the exponential bound; monotone " + (monotone ? "yes" : "no")
                    + " (2x50 draws)"};
}

Outcome c9_ou_growth(unsigned workers)
{
    const auto m = Model::validate(OUCompleteParams{0.08, 0.6, 0.2, 0.1}, Preferences(-3));
    const double p = -3;
    const double lambda = eigenpair(m).lambda;
    const double b = m.ou_complete().b;
    const double expect_lambda = b * (std::sqrt(1 - p) - 1) / (2 * (1 - p));
    SimConfig c;
    c.T = 40;
    c.n_steps = 1000;
    c.n_paths = 100000;
    c.seed = 9009;
    c.workers = workers;
    const auto est = simulate_phat_value(m, m.initial_factor(), c);
    const auto bump = mc_bump_sensitivity(m, "b", 0.01 * b, c);
    const double b_value = (1 - p) * bump.slope;
    const double b_limit = -(std::sqrt(1 - p) - 1) / 2;
    const double g_err = std::abs(est.growth_rate_fit - lambda) / lambda;
    const double b_err = std::abs(b_value - b_limit) / std::abs(b_limit);
    const bool ok = rel(lambda, expect_lambda) < 1e-14 && g_err < kOuGrowthTol && b_err < kOuBTol;
    return {ok, "growth fit " + fmt(est.growth_rate_fit) + " vs lambda " + fmt(lambda) + " (rel. "
                    + fmt(g_err) + "); b slope " + fmt(b_value) + " vs " + fmt(b_limit) + " (rel. "
                    + fmt(b_err) + ") at T = 40"};
}

Outcome c10_determinism()
{
    SimConfig base;
    base.T = 5;
    base.n_steps = 200;
    base.n_paths = 2000;
    base.seed = 1010;
    bool ok = true;
    for (const auto& m : {ltsens::testing::ko_reference(), ltsens::testing::heston_reference(),
                          Model::validate(OUCompleteParams{0.08, 0.6, 0.2, 0.1}, Preferences(-3))})
    {
        std::string first;
        for (unsigned w : {1u, 4u, 8u, 1u})
        {
            SimConfig c = base;
            c.workers = w;
            const auto text = dump_json(verify_json(run_verify(m, c)));
            if (first.empty())
                first = text;
            ok = ok && text == first;
        }
    }
    return {ok, std::string(ok ? "byte-identical" : "differs")
                    + " verify JSON for workers 1, 4, 8 and a repeat, three models"};
}

}  // namespace

int main(int argc, char** argv)
{
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    const std::vector<std::function<Outcome()>> criteria{
        c1_residual,
        c2_identities,
        c3_oracle,
        c4_rates,
        c5_audit,
        [&] { return c6_decomposition(workers); },
        [&] { return c7_two_route(workers); },
        c8_initial_factor,
        [&] { return c9_ou_growth(workers); },
        c10_determinism,
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (int i = 1; i <= 10; ++i)
            selected.push_back(i);

    int failures = 0;
    for (int n : selected)
    {
        if (n < 1 || n > 10)
        {
            std::fprintf(stderr, "no criterion %d\n", n);
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[n - 1]();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d %s  %s  [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
