#include "doctest.h"

#include <cmath>

#include "ltsens/eigenpairs.hpp"
#include "support.hpp"

using namespace ltsens;
using ltsens::testing::Draws;
using ltsens::testing::rel_err;

namespace {

/// Positive root of -a y^2 - 2 b y + c = 0 in the cancellation-free form.
double stationary_root(double a, double b, double c)
{
    return c / (b + std::sqrt(b * b + a * c));
}

}  // namespace

TEST_CASE("complete-market eigenvalue at p = -3 is b/8")
{
    const auto m = Model::validate(OUCompleteParams{0.3, 0.8, 0.25, 0.1}, Preferences(-3));
    const auto e = eigenpair(m);
    CHECK(e.lambda == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(e.a2 == doctest::Approx(0.8 / (4 * 0.0625)).epsilon(1e-14));
    CHECK(e.a1 == doctest::Approx(-0.3 / (4 * 0.0625)).epsilon(1e-14));
}

TEST_CASE("zero eigenpair at mu = 0")
{
    const auto ko = Model::validate(KimOmbergParams{0, 0.2, 1.0, 0.3, 0.3, -0.5, 0.2},
                                    Preferences(-1));
    const auto h = Model::validate(HestonParams{0, 0.2, 1.0, 0.05, 0.3, -0.5, 0.05},
                                   Preferences(-1));
    for (const auto& m : {ko, h})
    {
        const auto e = eigenpair(m);
        CHECK(e.lambda == 0.0);
        CHECK(e.a2 == 0.0);
        CHECK(e.a1 == 0.0);
        for (double x : {0.01, 0.2, 1.5})
            CHECK(ergodic_residual(m, e, x) == 0.0);
    }
}

TEST_CASE("reference eigenvalues match independent hand evaluations")
{
    const auto ko = eigenpair(ltsens::testing::ko_reference());
    CHECK(ko.a2 == doctest::Approx(0.885534211003101814016992878697).epsilon(1e-13));
    CHECK(ko.a1 == doctest::Approx(0.279063212212958822436808811937).epsilon(1e-13));
    CHECK(ko.lambda == doctest::Approx(0.117435246391691305768695714024).epsilon(1e-13));
    // Heston B from a high-precision root of the stationary Riccati quadratic.
    const auto h = eigenpair(ltsens::testing::heston_reference());
    CHECK(h.a2 == 0.0);
    CHECK(h.a1 == doctest::Approx(0.276428905443020791782981540445).epsilon(1e-13));
    CHECK(h.lambda == doctest::Approx(0.04975720297974374252093667728).epsilon(1e-13));
}

TEST_CASE("stationary Riccati identities over random draws")
{
    Draws d(21);
    for (int i = 0; i < 1000; ++i)
    {
        const auto ko = d.kim_omberg();
        const auto& c = ko.kim_omberg_constants();
        const auto e = eigenpair(ko);
        const double B = e.a2, C = e.a1;
        const double riccati = -c.alpha2 * B * B - 2 * c.alpha1 * B + c.forcing;
        CHECK(std::abs(riccati) <= 1e-12 * (c.alpha2 * B * B + 2 * std::abs(c.alpha1 * B) + c.forcing));
        const double consistency = c.alpha3 * B - C * (c.alpha1 + c.alpha2 * B);
        CHECK(std::abs(consistency)
              <= 1e-12 * (std::abs(c.alpha3 * B) + std::abs(C * c.alpha1) + std::abs(C * c.alpha2 * B)) + 1e-300);
        CHECK(rel_err(B, stationary_root(c.alpha2, c.alpha1, c.forcing)) < 1e-12);
        CHECK(B >= 0);
        CHECK(e.lambda >= 0);

        const auto h = d.heston();
        const auto& hc = h.heston_constants();
        const auto& hp = h.heston();
        const auto he = eigenpair(h);
        CHECK(he.a2 == 0.0);
        CHECK(rel_err(he.a1, stationary_root(hc.alpha2, hc.beta1, hc.forcing)) < 1e-12);
        CHECK(rel_err(he.lambda, hp.k * hp.m_bar * he.a1) < 1e-15);
        const double lhs = hc.beta2 * hc.beta2;
        const double rhs = hc.beta1 * hc.beta1 + hc.q * (1 - hc.q * hp.rho * hp.rho) * hp.mu * hp.mu * hp.sigma
                           * hp.sigma / (hp.varsigma * hp.varsigma);
        CHECK(rel_err(lhs, rhs) < 1e-12);
        CHECK(he.lambda >= 0);
    }
}

TEST_CASE("lambda is invariant under (mu, rho) -> (-mu, -rho)")
{
    Draws d(22);
    for (int i = 0; i < 200; ++i)
    {
        for (const auto& m : {d.kim_omberg(), d.heston()})
        {
            auto params = m.params();
            std::visit(
                [](auto& p) {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(p)>, OUCompleteParams>)
                    {
                        p.mu = -p.mu;
                        p.rho = -p.rho;
                    }
                },
                params);
            const auto flipped = Model::validate(params, m.prefs());
            CHECK(rel_err(eigenpair(m).lambda, eigenpair(flipped).lambda) < 1e-12);
        }
    }
}

TEST_CASE("phi evaluation and derivatives")
{
    auto v = phi_eval({0.0, 0.0, 0.0}, 3.7);
    CHECK(v.phi == 1.0);
    CHECK(v.dphi == 0.0);
    CHECK(v.d2phi == 0.0);

    v = phi_eval({0.0, 0.0, 0.4}, 2.0);
    CHECK(v.dlog_phi == doctest::Approx(-0.4));
    CHECK(v.dphi / v.phi == doctest::Approx(-0.4).epsilon(1e-15));

    v = phi_eval({0.0, 1.0, 0.0}, 1.0);
    CHECK(v.phi == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(v.dphi == doctest::Approx(-std::exp(-0.5)).epsilon(1e-15));
    CHECK(v.d2phi == 0.0);
    CHECK_FALSE(v.log_scale);

    // Exponent beyond the threshold: log scale carries the information.
    v = phi_eval({0.0, 2.0, 0.0}, 40.0);
    CHECK(v.log_scale);
    CHECK(v.log_phi == doctest::Approx(-1600.0));
    CHECK(v.dlog_phi == doctest::Approx(-80.0));
    CHECK(v.d2_ratio == doctest::Approx(6400.0 - 2.0));
    CHECK(std::isfinite(v.phi));
    CHECK(v.phi >= 0);
}

TEST_CASE("phi derivatives match finite differences")
{
    Draws d(23);
    for (int i = 0; i < 100; ++i)
    {
        const Eigenpair e{0.0, d.uniform(0, 3), d.uniform(-2, 2)};
        const double x = d.uniform(-2, 2), h = 1e-5;
        const auto v = phi_eval(e, x);
        const double fd1 = (phi_eval(e, x + h).phi - phi_eval(e, x - h).phi) / (2 * h);
        const double fd2 = (phi_eval(e, x + h).phi - 2 * v.phi + phi_eval(e, x - h).phi) / (h * h);
        CHECK(std::abs(fd1 - v.dphi) < 1e-7 * (1 + std::abs(v.dphi)));
        CHECK(std::abs(fd2 - v.d2phi) < 1e-3 * (1 + std::abs(v.d2phi)));
        CHECK(v.phi > 0);
    }
}

TEST_CASE("ergodic residual on the stationary grid")
{
    const auto ko = ltsens::testing::ko_reference();
    CHECK(std::abs(ergodic_residual(ko, eigenpair(ko), 0.2)) < 1e-10);
    const auto h = ltsens::testing::heston_reference();
    CHECK(std::abs(ergodic_residual(h, eigenpair(h), 0.09)) < 1e-10);
    CHECK_THROWS_AS(ergodic_residual(h, eigenpair(h), 0.0), DomainError);

    Draws d(24);
    for (int i = 0; i < 50; ++i)
    {
        const auto m = d.kim_omberg();
        const auto& p = m.kim_omberg();
        const auto e = eigenpair(m);
        const double sd = p.sigma / std::sqrt(2 * p.k);
        for (int j = 0; j <= 100; ++j)
            CHECK(std::abs(ergodic_residual(m, e, p.chi - 4 * sd + 0.08 * sd * j)) < 1e-8);
        const auto ou = d.ou_complete();
        const auto oe = eigenpair(ou);
        for (double s : {-1.0, 0.0, 0.3, 2.0})
            CHECK(std::abs(ergodic_residual(ou, oe, s)) < 1e-8);
    }
}
