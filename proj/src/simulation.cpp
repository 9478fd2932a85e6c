#include "ltsens/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "ltsens/coefficients.hpp"
#include "ltsens/random.hpp"
#include "ltsens/valuation.hpp"

namespace ltsens {

std::string_view to_string(Scheme scheme)
{
    switch (scheme)
    {
        case Scheme::exact_gaussian: return "exact_gaussian";
        case Scheme::euler: return "euler";
        case Scheme::full_truncation_euler: return "full_truncation_euler";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view name)
{
    for (auto s : {Scheme::exact_gaussian, Scheme::euler, Scheme::full_truncation_euler})
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

Scheme default_scheme(ModelKind kind)
{
    return kind == ModelKind::heston ? Scheme::full_truncation_euler
                                     : Scheme::exact_gaussian;
}

StepFloor step_floor(const Model& model, double horizon)
{
    double rate = 0;
    const auto e = eigenpair(model);
    switch (model.kind())
    {
        case ModelKind::ou_complete:
            rate = model.ou_complete().b;
            break;
        case ModelKind::kim_omberg: {
            const auto& m = model.kim_omberg();
            const auto& c = model.kim_omberg_constants();
            const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
            rate = std::max({m.k, c.alpha4, std::abs(c.alpha1) + e.a2 * (m.sigma * m.sigma + tilt)});
            break;
        }
        case ModelKind::heston: {
            const auto& m = model.heston();
            const auto& c = model.heston_constants();
            const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
            rate = std::max({m.k, c.beta2, std::abs(c.beta1) + e.a1 * (m.sigma * m.sigma + tilt)});
            break;
        }
    }
    StepFloor f;
    f.rate = rate;
    f.hard = static_cast<std::size_t>(std::ceil(horizon * rate));
    f.recommended = static_cast<std::size_t>(std::ceil(10 * horizon * rate));
    return f;
}

//---------------------------------------------------------------------------//
// Reductions
//---------------------------------------------------------------------------//

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 16)
    {
        double s = 0;
        for (double v : values)
            s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

MeanSe mean_and_se(std::span<const double> values)
{
    if (values.empty())
        throw std::invalid_argument("empty sample");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi)
        return {*lo, 0.0};
    const double n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(),
                   [mean](double v) { return (v - mean) * (v - mean); });
    const double var = values.size() > 1 ? pairwise_sum(sq) / (n - 1) : 0.0;
    return {mean, std::sqrt(var / n)};
}

//---------------------------------------------------------------------------//
// Kernel: dX = (a(t) - b(t) X) dt + sigma X^{0 or 1/2} dW with a running log
// weight c2 X^2 + c1 X + c0 integrated by the trapezoid rule.
//---------------------------------------------------------------------------//

namespace {

struct Kernel
{
    Scheme scheme{};
    bool sqrt_diffusion{false};
    double sigma{};
    double dt{};
    std::size_t n{};
    double x0{};
    // exact_gaussian: decay, shift, sd. Euler variants: a, b, (unused).
    std::vector<double> s0, s1, s2;
    std::vector<double> c2, c1, c0;
    std::size_t checkpoint{0};
};

struct KernelOut
{
    std::vector<double> x_T;
    std::vector<double> integral;
    std::vector<double> integral_checkpoint;
    double min_state{std::numeric_limits<double>::infinity()};
};

void set_exact_step(Kernel& k, std::size_t j, double a, double b)
{
    const double dt = k.dt;
    const double em1 = -std::expm1(-b * dt);
    const double em2 = -std::expm1(-2 * b * dt);
    k.s0[j] = 1 - em1;
    k.s1[j] = b != 0 ? a * em1 / b : a * dt;
    k.s2[j] = k.sigma * (b != 0 ? std::sqrt(em2 / (2 * b)) : std::sqrt(dt));
}

template <Scheme S>
void run_range_impl(const Kernel& k, std::uint64_t seed, std::size_t begin, std::size_t end,
                    KernelOut& out, double& min_state)
{
    const double sqrt_dt = std::sqrt(k.dt);
    const double half_dt = 0.5 * k.dt;
    double local_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = begin; i < end; ++i)
    {
        const NormalStream rng(seed, i);
        double x = k.x0;
        double g_prev = (k.c2[0] * x + k.c1[0]) * x + k.c0[0];
        double acc = 0;
        for (std::size_t j = 0; j < k.n; ++j)
        {
            const double dw = rng(j);
            if constexpr (S == Scheme::exact_gaussian)
                x = k.s0[j] * x + k.s1[j] + k.s2[j] * dw;
            else if constexpr (S == Scheme::euler)
                x += (k.s0[j] - k.s1[j] * x) * k.dt + k.sigma * sqrt_dt * dw;
            else
            {
                const double xp = x > 0 ? x : 0.0;
                x += (k.s0[j] - k.s1[j] * xp) * k.dt + k.sigma * std::sqrt(xp) * sqrt_dt * dw;
            }
            const double xs = k.sqrt_diffusion && x < 0 ? 0.0 : x;
            if (xs < local_min)
                local_min = xs;
            const double g = (k.c2[j + 1] * xs + k.c1[j + 1]) * xs + k.c0[j + 1];
            acc += half_dt * (g_prev + g);
            g_prev = g;
            if (j + 1 == k.checkpoint)
                out.integral_checkpoint[i] = acc;
        }
        out.x_T[i] = k.sqrt_diffusion && x < 0 ? 0.0 : x;
        out.integral[i] = acc;
    }
    min_state = local_min;
}

void run_range(const Kernel& k, std::uint64_t seed, std::size_t begin, std::size_t end,
               KernelOut& out, double& min_state)
{
    switch (k.scheme)
    {
        case Scheme::exact_gaussian:
            return run_range_impl<Scheme::exact_gaussian>(k, seed, begin, end, out, min_state);
        case Scheme::euler:
            return run_range_impl<Scheme::euler>(k, seed, begin, end, out, min_state);
        case Scheme::full_truncation_euler:
            return run_range_impl<Scheme::full_truncation_euler>(k, seed, begin, end, out,
                                                                 min_state);
    }
}

KernelOut run_kernel(const Kernel& k, std::size_t n_paths, std::uint64_t seed,
                     unsigned workers)
{
    KernelOut out;
    out.x_T.resize(n_paths);
    out.integral.resize(n_paths);
    out.integral_checkpoint.assign(n_paths, 0.0);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_paths)));
    std::vector<double> mins(workers, std::numeric_limits<double>::infinity());
    if (workers == 1)
    {
        run_range(k, seed, 0, n_paths, out, mins[0]);
    }
    else
    {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n_paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w)
        {
            const std::size_t b = std::min(n_paths, w * chunk);
            const std::size_t e = std::min(n_paths, b + chunk);
            pool.emplace_back(run_range, std::cref(k), seed, b, e, std::ref(out),
                              std::ref(mins[w]));
        }
        for (auto& t : pool)
            t.join();
    }
    out.min_state = std::min(k.x0, *std::min_element(mins.begin(), mins.end()));
    return out;
}

Scheme resolve_scheme(const Model& model, const SimConfig& cfg)
{
    const Scheme s = cfg.scheme.value_or(default_scheme(model.kind()));
    const bool ok = model.kind() == ModelKind::heston
                        ? s == Scheme::full_truncation_euler
                        : (s == Scheme::exact_gaussian || s == Scheme::euler);
    if (!ok)
        throw SimulationError("scheme " + std::string(to_string(s))
                              + " is not available for the "
                              + std::string(to_string(model.kind())) + " model");
    return s;
}

std::vector<std::string> check_config(const Model& model, const SimConfig& cfg)
{
    if (!(cfg.T >= 0) || !std::isfinite(cfg.T))
        throw SimulationError("T must be finite and >= 0");
    if (cfg.n_paths < 100)
        throw SimulationError("n_paths must be >= 100");
    if (cfg.n_steps < 1)
        throw SimulationError("n_steps must be >= 1");
    std::vector<std::string> warnings;
    const auto floor = step_floor(model, cfg.T);
    if (cfg.n_steps < floor.hard)
        throw SimulationError("n_steps = " + std::to_string(cfg.n_steps)
                              + " is below the stability floor; need at least "
                              + std::to_string(floor.hard) + " (recommended "
                              + std::to_string(floor.recommended) + ")");
    if (cfg.n_steps < floor.recommended)
        warnings.push_back("n_steps below recommended " + std::to_string(floor.recommended));
    return warnings;
}

Kernel base_kernel(const Model& model, const SimConfig& cfg, Scheme scheme, double x0)
{
    Kernel k;
    k.scheme = scheme;
    k.sqrt_diffusion = model.kind() == ModelKind::heston;
    k.dt = cfg.T / static_cast<double>(cfg.n_steps);
    k.n = cfg.n_steps;
    k.x0 = x0;
    k.s0.resize(k.n);
    k.s1.resize(k.n);
    k.s2.resize(k.n);
    k.c2.assign(k.n + 1, 0.0);
    k.c1.assign(k.n + 1, 0.0);
    k.c0.assign(k.n + 1, 0.0);
    return k;
}

/// Linear drift a - b x of a time-to-horizon, evaluated for the factor models.
struct Drift
{
    double a, b;
};

/// Fills the per-step arrays from a drift function of (beta, gamma) at
/// time-to-horizon points taken from a half-step coefficient path.
template <class DriftFn, class WeightFn>
void fill_factor_kernel(Kernel& k, const CoefficientPath& path, DriftFn drift,
                        WeightFn weight)
{
    const std::size_t n = k.n;
    auto at = [&](std::size_t idx) { return CoefficientsAt{path.beta[idx], path.gamma[idx], 0.0}; };
    for (std::size_t j = 0; j < n; ++j)
    {
        if (k.scheme == Scheme::exact_gaussian)
        {
            const auto d = drift(at(2 * n - 2 * j - 1));
            set_exact_step(k, j, d.a, d.b);
        }
        else
        {
            const auto d = drift(at(2 * n - 2 * j));
            k.s0[j] = d.a;
            k.s1[j] = d.b;
        }
    }
    for (std::size_t j = 0; j <= n; ++j)
    {
        const auto w = weight(at(2 * n - 2 * j));
        k.c2[j] = w[0];
        k.c1[j] = w[1];
        k.c0[j] = w[2];
    }
}

std::shared_ptr<const CoefficientPath> half_step_path(const Model& model, const SimConfig& cfg)
{
    const auto grid = uniform_grid(cfg.T, 2 * cfg.n_steps);
    return CoefficientCache::global().get(model, grid);
}

Kernel q_kernel(const Model& model, const Eigenpair& e, const SimConfig& cfg, Scheme scheme,
                double x0)
{
    Kernel k = base_kernel(model, cfg, scheme, x0);
    const auto path = half_step_path(model, cfg);
    if (model.kind() == ModelKind::kim_omberg)
    {
        const auto& m = model.kim_omberg();
        const auto& c = model.kim_omberg_constants();
        k.sigma = m.sigma;
        const double s2 = m.sigma * m.sigma;
        const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
        const double K = tilt / 2;
        fill_factor_kernel(
            k, *path,
            [&](const CoefficientsAt& at) {
                return Drift{m.k * m.m_bar - e.a1 * s2 - tilt * at.gamma,
                             c.alpha1 + e.a2 * s2 + tilt * at.beta};
            },
            [&](const CoefficientsAt& at) {
                const double d2 = e.a2 - at.beta, d1 = e.a1 - at.gamma;
                return std::array<double, 3>{-K * d2 * d2, -2 * K * d2 * d1, -K * d1 * d1};
            });
    }
    else
    {
        const auto& m = model.heston();
        const auto& c = model.heston_constants();
        k.sigma = m.sigma;
        const double s2 = m.sigma * m.sigma;
        const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
        const double K = tilt / 2;
        fill_factor_kernel(
            k, *path,
            [&](const CoefficientsAt& at) {
                return Drift{m.k * m.m_bar, c.beta1 + s2 * e.a1 + tilt * at.beta};
            },
            [&](const CoefficientsAt& at) {
                const double d = e.a1 - at.beta;
                return std::array<double, 3>{0.0, -K * d * d, 0.0};
            });
    }
    return k;
}

Kernel phat_kernel(const Model& model, const SimConfig& cfg, Scheme scheme, double x0)
{
    Kernel k = base_kernel(model, cfg, scheme, x0);
    const double q = model.prefs().q();
    const double K0 = 0.5 * q * (1 - q);
    switch (model.kind())
    {
        case ModelKind::ou_complete: {
            const auto& m = model.ou_complete();
            const double p = model.prefs().p();
            const double alpha = model.ou_complete_constants().alpha_cm;
            k.sigma = m.varsigma;
            const double a = m.mu / (1 - p), b = m.b / (1 - p);
            for (std::size_t j = 0; j < k.n; ++j)
            {
                if (scheme == Scheme::exact_gaussian)
                    set_exact_step(k, j, a, b);
                else
                {
                    k.s0[j] = a;
                    k.s1[j] = b;
                }
            }
            // -alpha theta^2 = -alpha (mu - b s)^2 / varsigma^2
            const double w = alpha / (m.varsigma * m.varsigma);
            std::fill(k.c2.begin(), k.c2.end(), -w * m.b * m.b);
            std::fill(k.c1.begin(), k.c1.end(), 2 * w * m.mu * m.b);
            std::fill(k.c0.begin(), k.c0.end(), -w * m.mu * m.mu);
            return k;
        }
        case ModelKind::kim_omberg: {
            const auto& m = model.kim_omberg();
            const auto& c = model.kim_omberg_constants();
            k.sigma = m.sigma;
            const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
            const double s = c.sigma2 / (1 - c.q);
            const double th = m.mu * m.mu / (m.varsigma * m.varsigma);
            fill_factor_kernel(
                k, *half_step_path(model, cfg),
                [&](const CoefficientsAt& at) {
                    return Drift{m.k * m.m_bar - tilt * at.gamma, c.alpha1 + tilt * at.beta};
                },
                [&](const CoefficientsAt& at) {
                    const double sb = s * at.beta, sg = s * at.gamma;
                    return std::array<double, 3>{-K0 * (th + sb * sb), -K0 * 2 * sb * sg,
                                                 -K0 * sg * sg};
                });
            return k;
        }
        case ModelKind::heston: {
            const auto& m = model.heston();
            const auto& c = model.heston_constants();
            k.sigma = m.sigma;
            const double tilt = c.q * c.sigma2 * c.sigma2 / (1 - c.q);
            const double s = c.sigma2 / (1 - c.q);
            const double th = m.mu * m.mu / (m.varsigma * m.varsigma);
            fill_factor_kernel(
                k, *half_step_path(model, cfg),
                [&](const CoefficientsAt& at) {
                    return Drift{m.k * m.m_bar, c.beta1 + tilt * at.beta};
                },
                [&](const CoefficientsAt& at) {
                    const double sb = s * at.beta;
                    return std::array<double, 3>{0.0, -K0 * (th + sb * sb), 0.0};
                });
            return k;
        }
    }
    return k;
}

void require_factor_model(const Model& model)
{
    if (model.kind() == ModelKind::ou_complete)
        throw UnsupportedModelError(
            "the decomposition check applies to the factor models only");
}

}  // namespace

//---------------------------------------------------------------------------//

PathEnsemble simulate_q_paths(const Model& model, const Eigenpair& pair,
                              const SimConfig& config)
{
    require_factor_model(model);
    const Scheme scheme = resolve_scheme(model, config);
    PathEnsemble ens;
    ens.warnings = check_config(model, config);
    ens.scheme = scheme;
    const double x0 = model.initial_factor();
    if (model.kind() == ModelKind::heston && !(x0 > 0))
        throw DomainError("Heston needs chi > 0");
    if (config.T == 0)
    {
        ens.x_T.assign(config.n_paths, x0);
        ens.integral.assign(config.n_paths, 0.0);
        ens.min_state = x0;
        return ens;
    }
    const Kernel k = q_kernel(model, pair, config, scheme, x0);
    auto out = run_kernel(k, config.n_paths, config.seed, config.workers);
    ens.x_T = std::move(out.x_T);
    ens.integral = std::move(out.integral);
    ens.min_state = out.min_state;
    ens.dt = k.dt;
    return ens;
}

std::vector<double> error_term_samples(const PathEnsemble& ensemble, const Eigenpair& pair)
{
    std::vector<double> w(ensemble.x_T.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::exp(ensemble.integral[i] - log_phi(pair, ensemble.x_T[i]));
    return w;
}

MeanSe estimate_error_term(const PathEnsemble& ensemble, const Eigenpair& pair)
{
    const auto w = error_term_samples(ensemble, pair);
    return mean_and_se(w);
}

DecompositionResult decomposition_check(const Model& model, double chi,
                                        const SimConfig& config)
{
    require_factor_model(model);
    const Model m = chi == model.initial_factor() ? model : model.with_parameter("chi", chi);
    const auto e = eigenpair(m);
    DecompositionResult r;
    r.chi = chi;
    r.T = config.T;
    r.seed = config.seed;
    r.n_steps = config.n_steps;
    r.n_paths = config.n_paths;
    r.scheme = resolve_scheme(m, config);
    r.lambda = e.lambda;
    const double lphi = log_phi(e, chi);
    r.phi_chi = std::exp(lphi);
    const auto value = dual_value(m, chi, config.T);
    r.v_closed = value.v;
    r.skeleton = std::exp(-e.lambda * config.T + lphi);
    r.ratio = std::exp((value.log_v + e.lambda * config.T) - lphi);

    const auto main = simulate_q_paths(m, e, config);
    r.warnings = main.warnings;
    const auto est = estimate_error_term(main, e);
    r.mc_error_term = est.mean;
    r.mc_se = est.se;
    r.ratio_gap = std::abs(r.ratio - r.mc_error_term);

    if (config.T == 0)
    {
        r.mc_error_term_half = r.mc_error_term;
        r.mc_se_half = 0;
        r.ratio_gap_half = r.ratio_gap;
        r.step_gap = 0;
        r.step_gap_se = 0;
        r.pass = r.ratio_gap == 0;
        return r;
    }

    SimConfig half = config;
    half.n_steps = 2 * config.n_steps;
    half.seed = derive_seed(config.seed, 1);
    const auto fine = simulate_q_paths(m, e, half);
    const auto est_half = estimate_error_term(fine, e);
    r.mc_error_term_half = est_half.mean;
    r.mc_se_half = est_half.se;
    r.ratio_gap_half = std::abs(r.ratio - est_half.mean);
    r.step_gap = std::abs(est.mean - est_half.mean);
    r.step_gap_se = std::hypot(est.se, est_half.se);

    auto within = [](double gap, double se) { return se > 0 ? gap < 3 * se : gap < 1e-12; };
    r.pass = within(r.ratio_gap, r.mc_se) && within(r.ratio_gap_half, r.mc_se_half)
             && within(r.step_gap, r.step_gap_se);
    return r;
}

PhatSamples simulate_phat_samples(const Model& model, double chi, const SimConfig& config)
{
    const Model m = chi == model.initial_factor() ? model : model.with_parameter("chi", chi);
    const Scheme scheme = resolve_scheme(m, config);
    PhatSamples s;
    s.warnings = check_config(m, config);
    if (m.kind() == ModelKind::heston && !(chi > 0))
        throw DomainError("Heston needs chi > 0");
    if (config.T == 0)
    {
        s.w_T.assign(config.n_paths, 1.0);
        s.w_half = s.w_T;
        return s;
    }
    Kernel k = phat_kernel(m, config, scheme, chi);
    k.checkpoint = config.n_steps / 2;
    const auto out = run_kernel(k, config.n_paths, config.seed, config.workers);
    s.w_T.resize(config.n_paths);
    s.w_half.resize(config.n_paths);
    for (std::size_t i = 0; i < config.n_paths; ++i)
    {
        s.w_T[i] = std::exp(out.integral[i]);
        s.w_half[i] = std::exp(out.integral_checkpoint[i]);
    }
    return s;
}

namespace {

double checkpoint_time(const SimConfig& cfg)
{
    return cfg.T * static_cast<double>(cfg.n_steps / 2) / static_cast<double>(cfg.n_steps);
}

}  // namespace

ValueEstimate simulate_phat_value(const Model& model, double chi, const SimConfig& config)
{
    const auto s = simulate_phat_samples(model, chi, config);
    const auto at_T = mean_and_se(s.w_T);
    const auto at_half = mean_and_se(s.w_half);
    ValueEstimate v;
    v.v = at_T.mean;
    v.se = at_T.se;
    v.log_v = std::log(at_T.mean);
    v.v_half = at_half.mean;
    v.se_half = at_half.se;
    v.seed = config.seed;
    const double span = config.T - checkpoint_time(config);
    v.growth_rate_fit = span > 0 ? -(v.log_v - std::log(at_half.mean)) / span : 0.0;
    return v;
}

BumpSensitivity mc_bump_sensitivity(const Model& model, std::string_view parameter,
                                    double h, const SimConfig& config)
{
    if (!(h > 0))
        throw std::invalid_argument("bump size must be > 0");
    const double theta = model.parameter(parameter);
    Model up = model, down = model;
    try
    {
        up = model.with_parameter(parameter, theta + h);
        down = model.with_parameter(parameter, theta - h);
    }
    catch (const ValidationError&)
    {
        h /= 10;
        up = model.with_parameter(parameter, theta + h);
        down = model.with_parameter(parameter, theta - h);
    }
    const auto su = simulate_phat_samples(up, up.initial_factor(), config);
    const auto sd = simulate_phat_samples(down, down.initial_factor(), config);
    const double mu_T = mean_and_se(su.w_T).mean, md_T = mean_and_se(sd.w_T).mean;
    const double mu_h = mean_and_se(su.w_half).mean, md_h = mean_and_se(sd.w_half).mean;

    const std::size_t n = su.w_T.size();
    std::vector<double> d_T(n), d_slope(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        d_T[i] = su.w_T[i] / mu_T - sd.w_T[i] / md_T;
        d_slope[i] = d_T[i] - (su.w_half[i] / mu_h - sd.w_half[i] / md_h);
    }
    BumpSensitivity b;
    b.h = h;
    b.derivative = (std::log(mu_T) - std::log(md_T)) / (2 * h);
    b.se = mean_and_se(d_T).se / (2 * h);
    const double span = config.T - checkpoint_time(config);
    if (span > 0)
    {
        b.slope = ((std::log(mu_T) - std::log(md_T)) - (std::log(mu_h) - std::log(md_h)))
                  / (2 * h * span);
        b.slope_se = mean_and_se(d_slope).se / (2 * h * span);
    }
    return b;
}

}  // namespace ltsens
