#include "ltsens/models.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace ltsens {

namespace {

std::string fmt_double(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

template<class T>
const T& get_or_throw(const auto& v, const char* what)
{
    if (auto const* p = std::get_if<T>(&v))
        return *p;
    throw UnsupportedModelError(std::string("model is not ") + what);
}

// Shared by Kim-Omberg and Heston: they carry identical fields.
template<class P>
void check_factor_fields(const P& m, std::vector<Violation>& out)
{
    if (!(m.varsigma > 0))
        out.push_back({"varsigma_positive",
                       "varsigma must be > 0, got " + fmt_double(m.varsigma)});
    if (!(m.k > 0))
        out.push_back({"k_positive", "k must be > 0, got " + fmt_double(m.k)});
    if (!(m.sigma > 0))
        out.push_back(
            {"sigma_positive", "sigma must be > 0, got " + fmt_double(m.sigma)});
    if (!(std::abs(m.rho) < 1))
        out.push_back({"rho_range",
                       "|rho| must be < 1, got " + fmt_double(m.rho)});
    if (!std::isfinite(m.mu))
        out.push_back({"mu_finite", "mu must be finite"});
    if (!std::isfinite(m.m_bar))
        out.push_back({"m_bar_finite", "m_bar must be finite"});
    if (!std::isfinite(m.chi))
        out.push_back({"chi_finite", "chi must be finite"});
}

}  // namespace

std::string_view to_string(ModelKind kind)
{
    switch (kind)
    {
        case ModelKind::ou_complete:
            return "ou_complete";
        case ModelKind::kim_omberg:
            return "kim_omberg";
        case ModelKind::heston:
            return "heston";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name)
{
    if (name == "ou_complete")
        return ModelKind::ou_complete;
    if (name == "kim_omberg")
        return ModelKind::kim_omberg;
    if (name == "heston")
        return ModelKind::heston;
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

ValidationError::ValidationError(std::string condition,
                                 const std::string& message)
    : std::invalid_argument(condition + ": " + message)
    , condition_(std::move(condition))
{
}

//---------------------------------------------------------------------------//

double dual_exponent(double p)
{
    if (!(p < 0) || !std::isfinite(p))
        throw ValidationError("p_negative",
                              "risk exponent p must be < 0, got "
                                  + fmt_double(p));
    return -p / (1 - p);
}

double risk_exponent(double q)
{
    if (!(q > 0 && q < 1))
        throw std::invalid_argument("dual exponent q must lie in (0,1)");
    return -q / (1 - q);
}

Preferences::Preferences(double p) : p_(p), q_(dual_exponent(p)) {}

ModelKind kind_of(const ModelParams& params)
{
    return static_cast<ModelKind>(params.index());
}

//---------------------------------------------------------------------------//

DerivedConstants derive_constants(const ModelParams& params,
                                  const Preferences& prefs)
{
    const double q = prefs.q();
    return std::visit(
        [&](const auto& m) -> DerivedConstants {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, OUCompleteParams>)
            {
                const double p = prefs.p();
                return OUCompleteConstants{q, -p / (2 * (1 - p) * (1 - p))};
            }
            else
            {
                const double s1 = m.rho * m.sigma;
                const double s2 = std::sqrt(1 - m.rho * m.rho) * m.sigma;
                const double sharpe2 = m.mu * m.mu / (m.varsigma * m.varsigma);
                const double forcing = q * (1 - q) * sharpe2;
                const double a1 = m.k + q * m.mu * s1 / m.varsigma;
                const double a2 = s1 * s1 + s2 * s2 / (1 - q);
                if constexpr (std::is_same_v<T, KimOmbergParams>)
                {
                    KimOmbergConstants c;
                    c.q = q;
                    c.sigma1 = s1;
                    c.sigma2 = s2;
                    c.alpha1 = a1;
                    c.alpha2 = a2;
                    c.alpha3 = m.k * m.m_bar;
                    c.alpha4 = std::sqrt(a1 * a1 + a2 * forcing);
                    c.forcing = forcing;
                    return c;
                }
                else
                {
                    HestonConstants c;
                    c.q = q;
                    c.sigma1 = s1;
                    c.sigma2 = s2;
                    c.beta1 = a1;
                    c.beta2 = std::sqrt(a1 * a1
                                        + q * (1 - q * m.rho * m.rho) * sharpe2
                                              * m.sigma * m.sigma);
                    c.alpha2 = a2;
                    c.forcing = forcing;
                    return c;
                }
            }
        },
        params);
}

std::vector<Violation> check_admissibility(const ModelParams& params,
                                           const Preferences& prefs,
                                           double margin)
{
    std::vector<Violation> out;
    const double q = prefs.q();
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, OUCompleteParams>)
            {
                if (!(m.varsigma > 0))
                    out.push_back({"varsigma_positive",
                                   "varsigma must be > 0, got "
                                       + fmt_double(m.varsigma)});
                if (!(m.b > 0))
                    out.push_back({"b_positive",
                                   "b must be > 0, got " + fmt_double(m.b)});
                if (!std::isfinite(m.mu) || !std::isfinite(m.s0))
                    out.push_back({"finite", "mu and s0 must be finite"});
            }
            else
            {
                check_factor_fields(m, out);
                if constexpr (std::is_same_v<T, HestonParams>)
                {
                    if (!(m.m_bar > 0))
                        out.push_back({"m_bar_positive",
                                       "m_bar must be > 0, got "
                                           + fmt_double(m.m_bar)});
                    if (!(m.chi > 0))
                        out.push_back({"chi_positive",
                                       "chi must be > 0, got "
                                           + fmt_double(m.chi)});
                }
                if (!out.empty())
                    return;

                const double drift_q = m.k + q * m.mu * m.rho * m.sigma / m.varsigma;
                if constexpr (std::is_same_v<T, HestonParams>)
                {
                    const double feller = 2 * m.k * m.m_bar - m.sigma * m.sigma;
                    if (!(feller > margin))
                        out.push_back(
                            {"feller",
                             "Feller condition 2 k m_bar > sigma^2 fails: 2*"
                                 + fmt_double(m.k) + "*" + fmt_double(m.m_bar)
                                 + " = " + fmt_double(2 * m.k * m.m_bar)
                                 + " vs " + fmt_double(m.sigma * m.sigma)});
                    if (!(drift_q > margin))
                        out.push_back(
                            {"mean_reversion",
                             "k + q mu rho sigma / varsigma must be > 0, got "
                                 + fmt_double(drift_q)});
                }
                else
                {
                    const auto c = std::get<KimOmbergConstants>(
                        derive_constants(m, prefs));
                    const double b_coef = (c.alpha4 - c.alpha1) / c.alpha2;
                    const double cond
                        = drift_q + b_coef * m.sigma * m.sigma / 2;
                    if (!(cond > margin))
                        out.push_back({"mean_reversion",
                                       "k + q mu rho sigma / varsigma + B "
                                       "sigma^2 / 2 must be > 0, got "
                                           + fmt_double(cond)});
                }
            }
        },
        params);
    return out;
}

//---------------------------------------------------------------------------//

Model::Model(ModelParams params, Preferences prefs, DerivedConstants constants)
    : params_(std::move(params)), prefs_(prefs), constants_(std::move(constants))
{
}

Model Model::validate(const ModelParams& params,
                      const Preferences& prefs,
                      double margin)
{
    auto violations = check_admissibility(params, prefs, margin);
    if (!violations.empty())
        throw ValidationError(violations.front().condition,
                              violations.front().detail);
    return Model(params, prefs, derive_constants(params, prefs));
}

Model validate(const ModelParams& params, const Preferences& prefs, double margin)
{
    return Model::validate(params, prefs, margin);
}

const OUCompleteParams& Model::ou_complete() const
{
    return get_or_throw<OUCompleteParams>(params_, "ou_complete");
}
const KimOmbergParams& Model::kim_omberg() const
{
    return get_or_throw<KimOmbergParams>(params_, "kim_omberg");
}
const HestonParams& Model::heston() const
{
    return get_or_throw<HestonParams>(params_, "heston");
}
const OUCompleteConstants& Model::ou_complete_constants() const
{
    return get_or_throw<OUCompleteConstants>(constants_, "ou_complete");
}
const KimOmbergConstants& Model::kim_omberg_constants() const
{
    return get_or_throw<KimOmbergConstants>(constants_, "kim_omberg");
}
const HestonConstants& Model::heston_constants() const
{
    return get_or_throw<HestonConstants>(constants_, "heston");
}

double Model::initial_factor() const noexcept
{
    return std::visit(
        [](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>,
                                         OUCompleteParams>)
                return m.s0;
            else
                return m.chi;
        },
        params_);
}

namespace {

// Field table: name -> pointer-to-member for each parameter struct.
template<class P>
struct FieldRef
{
    const char* name;
    double P::*member;
};

constexpr FieldRef<OUCompleteParams> kOuFields[] = {
    {"chi", &OUCompleteParams::s0},
    {"mu", &OUCompleteParams::mu},
    {"b", &OUCompleteParams::b},
    {"varsigma", &OUCompleteParams::varsigma},
};

template<class P>
constexpr FieldRef<P> kFactorFields[] = {
    {"chi", &P::chi},
    {"k", &P::k},
    {"m_bar", &P::m_bar},
    {"mu", &P::mu},
    {"varsigma", &P::varsigma},
    {"rho", &P::rho},
    {"sigma", &P::sigma},
};

template<class P>
auto const& fields_for()
{
    if constexpr (std::is_same_v<P, OUCompleteParams>)
        return kOuFields;
    else
        return kFactorFields<P>;
}

template<class P>
double P::*find_member(std::string_view name)
{
    if constexpr (std::is_same_v<P, OUCompleteParams>)
    {
        if (name == "s0")
            return &OUCompleteParams::s0;
    }
    for (auto const& f : fields_for<P>())
        if (name == f.name)
            return f.member;
    throw std::invalid_argument("unknown parameter '" + std::string(name)
                                + "'");
}

}  // namespace

std::vector<std::string> Model::parameter_names() const
{
    return std::visit(
        [](const auto& m) {
            using P = std::decay_t<decltype(m)>;
            std::vector<std::string> names;
            for (auto const& f : fields_for<P>())
                names.emplace_back(f.name);
            return names;
        },
        params_);
}

double Model::parameter(std::string_view name) const
{
    return std::visit(
        [&](const auto& m) {
            using P = std::decay_t<decltype(m)>;
            return m.*find_member<P>(name);
        },
        params_);
}

Model Model::with_parameter(std::string_view name, double value) const
{
    ModelParams bumped = std::visit(
        [&](auto m) -> ModelParams {
            using P = std::decay_t<decltype(m)>;
            m.*find_member<P>(name) = value;
            return m;
        },
        params_);
    return Model::validate(bumped, prefs_);
}

std::uint64_t Model::content_hash() const noexcept
{
    // FNV-1a over the bit patterns.
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t word) {
        for (int i = 0; i < 8; ++i)
        {
            h ^= (word >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    mix(static_cast<std::uint64_t>(params_.index()));
    mix(std::bit_cast<std::uint64_t>(prefs_.p()));
    std::visit(
        [&](const auto& m) {
            using P = std::decay_t<decltype(m)>;
            for (auto const& f : fields_for<P>())
                mix(std::bit_cast<std::uint64_t>(m.*f.member));
        },
        params_);
    return h;
}

//---------------------------------------------------------------------------//

double market_price_of_risk(const Model& model, double x)
{
    return std::visit(
        [x](const auto& m) {
            using P = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<P, OUCompleteParams>)
                return (m.mu - m.b * x) / m.varsigma;
            else if constexpr (std::is_same_v<P, KimOmbergParams>)
                return m.mu * x / m.varsigma;
            else
            {
                if (x < 0)
                    throw DomainError("Heston market price of risk needs x >= 0");
                return m.mu * std::sqrt(x) / m.varsigma;
            }
        },
        model.params());
}

}  // namespace ltsens
