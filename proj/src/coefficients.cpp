#include "ltsens/coefficients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ltsens {

namespace {

std::size_t substeps(double width, double h_max)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(width / h_max - 1e-9)));
}

void note_refinement(std::span<const double> grid,
                     double h_quad,
                     std::vector<std::string>& warnings)
{
    double widest = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        widest = std::max(widest, grid[i] - grid[i - 1]);
    if (widest > h_quad)
    {
        std::ostringstream os;
        os.precision(6);
        os << "grid step " << widest << " is coarse relative to the "
           << "coefficient timescale; refined internally to " << h_quad;
        warnings.push_back(os.str());
    }
}

}  // namespace

std::vector<double> uniform_grid(double horizon, std::size_t intervals)
{
    if (!(horizon >= 0) || intervals == 0)
        throw std::invalid_argument("uniform_grid needs T >= 0 and n > 0");
    std::vector<double> g(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        g[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
    g.back() = horizon;
    return g;
}

void check_grid(std::span<const double> grid)
{
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("coefficient grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("coefficient grid must be strictly increasing");
}

//---------------------------------------------------------------------------//
// Kim-Omberg
//---------------------------------------------------------------------------//

double ko_beta(double t, const KimOmbergConstants& c)
{
    if (c.forcing == 0)
        return 0;
    const double decay = std::exp(-2 * c.alpha4 * t);
    return c.forcing * (-std::expm1(-2 * c.alpha4 * t))
           / (c.alpha4 + c.alpha1 + (c.alpha4 - c.alpha1) * decay);
}

GammaLambdaPaths ko_gamma_lambda(std::span<const double> grid,
                                 const KimOmbergConstants& c)
{
    check_grid(grid);
    GammaLambdaPaths out;
    out.gamma.assign(grid.size(), 0.0);
    out.Lambda.assign(grid.size(), 0.0);

    const double h_quad = 0.01 / c.alpha4;
    out.step = h_quad;
    note_refinement(grid, h_quad, out.warnings);

    const double sigma_sq = c.sigma1 * c.sigma1 + c.sigma2 * c.sigma2;
    auto rate = [&](double s) { return c.alpha1 + c.alpha2 * ko_beta(s, c); };
    auto source = [&](double gamma, double beta) {
        return 0.5 * c.alpha2 * gamma * gamma - c.alpha3 * gamma
               - 0.5 * sigma_sq * beta;
    };

    double gamma = 0;
    double Lambda = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
    {
        const double t0 = grid[i - 1];
        const std::size_t n = substeps(grid[i] - t0, h_quad);
        const double h = (grid[i] - t0) / static_cast<double>(n);
        out.step = std::min(out.step, h);
        for (std::size_t j = 0; j < n; ++j)
        {
            const double a = t0 + h * static_cast<double>(j);
            const double b = (j + 1 == n) ? grid[i] : a + h;
            const double m = 0.5 * (a + b);
            const double q1 = 0.5 * (a + m);

            const double beta_a = ko_beta(a, c);
            const double beta_q1 = ko_beta(q1, c);
            const double beta_m = ko_beta(m, c);
            const double beta_b = ko_beta(b, c);

            // Integrals of alpha1 + alpha2 beta over [a,q1], [a,m], [a,b],
            // each by three-point Simpson.
            const double rate_a = c.alpha1 + c.alpha2 * beta_a;
            const double rate_q1 = c.alpha1 + c.alpha2 * beta_q1;
            const double rate_m = c.alpha1 + c.alpha2 * beta_m;
            const double rate_b = c.alpha1 + c.alpha2 * beta_b;
            const double L_aq1 = (h / 24) * (rate_a + 4 * rate(a + h / 8) + rate_q1);
            const double L_am = (h / 12) * (rate_a + 4 * rate_q1 + rate_m);
            const double L_ab = (h / 6) * (rate_a + 4 * rate_m + rate_b);

            // Integrating-factor recurrences, log space throughout.
            const double gamma_m
                = gamma * std::exp(-L_am)
                  + c.alpha3 * (h / 12)
                        * (beta_a * std::exp(-L_am)
                           + 4 * beta_q1 * std::exp(-(L_am - L_aq1)) + beta_m);
            const double gamma_b
                = gamma * std::exp(-L_ab)
                  + c.alpha3 * (h / 6)
                        * (beta_a * std::exp(-L_ab)
                           + 4 * beta_m * std::exp(-(L_ab - L_am)) + beta_b);

            Lambda += (h / 6)
                      * (source(gamma, beta_a) + 4 * source(gamma_m, beta_m)
                         + source(gamma_b, beta_b));
            gamma = gamma_b;
        }
        out.gamma[i] = gamma;
        out.Lambda[i] = Lambda;
    }
    return out;
}

//---------------------------------------------------------------------------//
// Heston
//---------------------------------------------------------------------------//

double heston_beta(double t, const HestonConstants& c)
{
    if (c.forcing == 0)
        return 0;
    const double x = 0.5 * c.beta2 * t;
    if (c.beta2 * t > 50)
    {
        // Divide numerator and denominator by e^{x}.
        const double e = std::exp(-2 * x);
        return c.forcing * (1 - e)
               / (c.beta2 * (1 + e) + c.beta1 * (1 - e));
    }
    const double sh = std::sinh(x);
    return c.forcing * sh / (c.beta2 * std::cosh(x) + c.beta1 * sh);
}

GammaPath heston_gamma(std::span<const double> grid,
                       const HestonConstants& c,
                       double k,
                       double m_bar)
{
    check_grid(grid);
    GammaPath out;
    out.gamma.assign(grid.size(), 0.0);
    const double h_quad = 0.02 / c.beta2;
    out.step = h_quad;
    note_refinement(grid, h_quad, out.warnings);

    double integral = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
    {
        const double t0 = grid[i - 1];
        const std::size_t n = substeps(grid[i] - t0, h_quad);
        const double h = (grid[i] - t0) / static_cast<double>(n);
        out.step = std::min(out.step, h);
        double f_prev = heston_beta(t0, c);
        for (std::size_t j = 0; j < n; ++j)
        {
            const double a = t0 + h * static_cast<double>(j);
            const double b = (j + 1 == n) ? grid[i] : a + h;
            const double f_b = heston_beta(b, c);
            integral += (h / 6) * (f_prev + 4 * heston_beta(0.5 * (a + b), c) + f_b);
            f_prev = f_b;
        }
        out.gamma[i] = k * m_bar * integral;
    }
    return out;
}

//---------------------------------------------------------------------------//

CoefficientPath coefficient_path(const Model& model, std::span<const double> grid)
{
    check_grid(grid);
    CoefficientPath path;
    path.model = model.kind();
    path.grid.assign(grid.begin(), grid.end());
    switch (model.kind())
    {
        case ModelKind::kim_omberg: {
            const auto& c = model.kim_omberg_constants();
            path.beta.reserve(grid.size());
            for (double t : grid)
                path.beta.push_back(ko_beta(t, c));
            auto gl = ko_gamma_lambda(grid, c);
            path.gamma = std::move(gl.gamma);
            path.Lambda = std::move(gl.Lambda);
            path.step = gl.step;
            path.warnings = std::move(gl.warnings);
            return path;
        }
        case ModelKind::heston: {
            const auto& m = model.heston();
            const auto& c = model.heston_constants();
            path.beta.reserve(grid.size());
            for (double t : grid)
                path.beta.push_back(heston_beta(t, c));
            auto g = heston_gamma(grid, c, m.k, m.m_bar);
            path.gamma = std::move(g.gamma);
            path.step = g.step;
            path.warnings = std::move(g.warnings);
            return path;
        }
        case ModelKind::ou_complete:
            break;
    }
    throw UnsupportedModelError(
        "no finite-horizon coefficient path for the complete-market model; "
        "use Monte Carlo");
}

//---------------------------------------------------------------------------//
// RK4 oracle
//---------------------------------------------------------------------------//

namespace {

using State = std::array<double, 3>;

template<class Rhs>
std::vector<State> rk4_on_grid(std::span<const double> grid, double h_max, std::size_t refine,
                               Rhs rhs)
{
    std::vector<State> out(grid.size(), State{0, 0, 0});
    State y{0, 0, 0};
    for (std::size_t i = 1; i < grid.size(); ++i)
    {
        const double t0 = grid[i - 1];
        const std::size_t n = refine * substeps(grid[i] - t0, h_max);
        const double h = (grid[i] - t0) / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j)
        {
            auto axpy = [](const State& a, double s, const State& b) {
                return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
            };
            const State k1 = rhs(y);
            const State k2 = rhs(axpy(y, h / 2, k1));
            const State k3 = rhs(axpy(y, h / 2, k2));
            const State k4 = rhs(axpy(y, h, k3));
            for (int d = 0; d < 3; ++d)
                y[d] += h / 6 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
        }
        out[i] = y;
    }
    return out;
}

}  // namespace

CoefficientPath riccati_oracle(const Model& model,
                               std::span<const double> grid,
                               OdeOptions options)
{
    check_grid(grid);
    if (!(options.step > 0))
        throw std::invalid_argument("ODE step must be positive");

    std::vector<State> coarse, fine;
    const bool ko = model.kind() == ModelKind::kim_omberg;
    if (ko)
    {
        const auto& c = model.kim_omberg_constants();
        const double sigma_sq = c.sigma1 * c.sigma1 + c.sigma2 * c.sigma2;
        // State: (beta, gamma, Lambda); the system is autonomous.
        auto rhs = [&](const State& y) {
            const double b = y[0], g = y[1];
            return State{-c.alpha2 * b * b - 2 * c.alpha1 * b + c.forcing,
                         -(c.alpha1 + c.alpha2 * b) * g + c.alpha3 * b,
                         0.5 * c.alpha2 * g * g - c.alpha3 * g - 0.5 * sigma_sq * b};
        };
        coarse = rk4_on_grid(grid, options.step, 1, rhs);
        fine = rk4_on_grid(grid, options.step, 2, rhs);
    }
    else if (model.kind() == ModelKind::heston)
    {
        const auto& m = model.heston();
        const auto& c = model.heston_constants();
        // Substituting v = exp(-gamma - beta x) into the Heston HJB:
        //   beta'  = forcing/2 - beta1 beta - alpha2 beta^2 / 2
        //   gamma' = k m_bar beta
        auto rhs = [&](const State& y) {
            const double b = y[0];
            return State{0.5 * c.forcing - c.beta1 * b - 0.5 * c.alpha2 * b * b,
                         m.k * m.m_bar * b,
                         0.0};
        };
        coarse = rk4_on_grid(grid, options.step, 1, rhs);
        fine = rk4_on_grid(grid, options.step, 2, rhs);
    }
    else
    {
        throw UnsupportedModelError("no Riccati system for the complete-market model");
    }

    double worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (int d = 0; d < 3; ++d)
            worst = std::max(worst, std::abs(coarse[i][d] - fine[i][d]));
    if (worst > options.tolerance)
    {
        std::ostringstream os;
        os << "RK4 half-step disagreement " << worst << " exceeds tolerance "
           << options.tolerance << "; reduce the ODE step";
        throw OdeStepError(os.str());
    }

    CoefficientPath path;
    path.model = model.kind();
    path.grid.assign(grid.begin(), grid.end());
    path.step = options.step / 2;
    for (auto const& y : fine)
    {
        path.beta.push_back(y[0]);
        path.gamma.push_back(y[1]);
        if (ko)
            path.Lambda.push_back(y[2]);
    }
    return path;
}

}  // namespace ltsens
