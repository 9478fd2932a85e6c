#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "ltsens/models.hpp"

namespace ltsens::testing {

inline double rel_err(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

/// Reproducible random admissible parameter sets.
class Draws
{
  public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

    /// Broad ranges for closed-form checks.
    Model kim_omberg()
    {
        for (;;)
        {
            KimOmbergParams m{uniform(-1.5, 1.5), uniform(0.1, 0.5), uniform(0.2, 3.0),
                              uniform(-0.5, 0.5), uniform(0.05, 0.6), uniform(-0.95, 0.95),
                              uniform(-0.5, 0.5)};
            if (auto v = accept(m, uniform(-6.0, -0.2)))
                return *v;
        }
    }

    Model heston()
    {
        for (;;)
        {
            const double k = uniform(0.3, 4.0);
            const double m_bar = uniform(0.01, 0.3);
            const double sigma = uniform(0.05, 0.98) * std::sqrt(2 * k * m_bar);
            HestonParams m{uniform(-3.0, 3.0), uniform(0.1, 0.6), k, m_bar, sigma,
                           uniform(-0.95, 0.95), uniform(0.2, 2.0) * m_bar};
            if (auto v = accept(m, uniform(-6.0, -0.2)))
                return *v;
        }
    }

    Model ou_complete()
    {
        OUCompleteParams m{uniform(-0.5, 0.5), uniform(0.2, 2.0), uniform(0.1, 0.5),
                           uniform(-0.5, 0.5)};
        return Model::validate(m, Preferences(uniform(-6.0, -0.2)));
    }

    /// Moderate ranges for Monte Carlo checks: error-term weights stay light
    /// tailed and the step floor is met at 1000 steps over T = 10.
    Model kim_omberg_mc()
    {
        for (;;)
        {
            KimOmbergParams m{uniform(-0.6, 0.6), uniform(0.15, 0.4), uniform(0.5, 2.0),
                              uniform(-0.3, 0.3), uniform(0.1, 0.4), uniform(-0.8, 0.8),
                              uniform(-0.3, 0.3)};
            if (auto v = accept(m, uniform(-3.0, -0.5)))
                return *v;
        }
    }

    Model heston_mc()
    {
        for (;;)
        {
            const double k = uniform(0.8, 3.0);
            const double m_bar = uniform(0.03, 0.15);
            const double sigma = uniform(0.2, 0.8) * std::sqrt(2 * k * m_bar);
            HestonParams m{uniform(-0.8, 0.8), uniform(0.15, 0.4), k, m_bar, sigma,
                           uniform(-0.8, 0.8), uniform(0.5, 1.5) * m_bar};
            if (auto v = accept(m, uniform(-3.0, -0.5)))
                return *v;
        }
    }

  private:
    template <class P>
    static std::optional<Model> accept(const P& params, double p)
    {
        try
        {
            return Model::validate(params, Preferences(p));
        }
        catch (const ValidationError&)
        {
            return std::nullopt;
        }
    }

    std::mt19937_64 rng_;
};

/// Fixed parameter sets used across the suite.
inline Model ko_reference()
{
    return Model::validate(KimOmbergParams{0.5, 0.2, 1.0, 0.3, 0.3, -0.5, 0.2}, Preferences(-1));
}

inline Model heston_reference()
{
    return Model::validate(HestonParams{0.5, 0.25, 2.0, 0.09, 0.3, -0.7, 0.09}, Preferences(-1));
}

}  // namespace ltsens::testing
