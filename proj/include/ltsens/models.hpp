#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ltsens {

enum class ModelKind { ou_complete, kim_omberg, heston };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

/// A parameter set failed one of the admissibility conditions.
class ValidationError : public std::invalid_argument
{
  public:
    ValidationError(std::string condition, const std::string& message);

    /// Short machine-readable name of the violated condition, e.g. "feller".
    const std::string& condition() const noexcept { return condition_; }

  private:
    std::string condition_;
};

/// A state variable is outside the model's domain (e.g. negative variance).
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// The requested operation has no closed form for this model.
class UnsupportedModelError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

//---------------------------------------------------------------------------//
// Preferences
//---------------------------------------------------------------------------//

/// q = -p/(1-p). Requires p < 0.
double dual_exponent(double p);

/// Inverse of dual_exponent: p = -q/(1-q).
double risk_exponent(double q);

/// Power utility x^p/p with p < 0, together with its conjugate exponent.
class Preferences
{
  public:
    explicit Preferences(double p);

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }

  private:
    double p_;
    double q_;
};

//---------------------------------------------------------------------------//
// Parameter containers
//---------------------------------------------------------------------------//

/// Complete market, dS = (mu - b S) dt + varsigma dW.
struct OUCompleteParams
{
    double mu{};
    double b{};
    double varsigma{};
    double s0{};
};

/// Stochastic excess return X: dS/S = mu X dt + varsigma dW1,
/// dX = k (m_bar - X) dt + sigma dZ, d<W1, Z> = rho dt.
struct KimOmbergParams
{
    double mu{};
    double varsigma{};
    double k{};
    double m_bar{};
    double sigma{};
    double rho{};
    double chi{};
};

/// Stochastic variance X: dS/S = mu X dt + varsigma sqrt(X) dW1,
/// dX = k (m_bar - X) dt + sigma sqrt(X) dZ, d<W1, Z> = rho dt.
struct HestonParams
{
    double mu{};
    double varsigma{};
    double k{};
    double m_bar{};
    double sigma{};
    double rho{};
    double chi{};
};

using ModelParams = std::variant<OUCompleteParams, KimOmbergParams, HestonParams>;

ModelKind kind_of(const ModelParams& params);

//---------------------------------------------------------------------------//
// Derived constants
//---------------------------------------------------------------------------//

struct OUCompleteConstants
{
    double q{};
    /// Exponent of the Feynman-Kac weight exp(-alpha int theta^2).
    double alpha_cm{};
};

struct KimOmbergConstants
{
    double q{};
    double sigma1{};
    double sigma2{};
    double alpha1{};
    double alpha2{};
    double alpha3{};
    double alpha4{};
    /// q(1-q) mu^2 / varsigma^2, the source term of the beta Riccati equation.
    double forcing{};
};

struct HestonConstants
{
    double q{};
    double sigma1{};
    double sigma2{};
    double beta1{};
    double beta2{};
    /// sigma1^2 + sigma2^2/(1-q) = sigma^2 (1 - q rho^2)/(1-q).
    double alpha2{};
    double forcing{};
};

using DerivedConstants
    = std::variant<OUCompleteConstants, KimOmbergConstants, HestonConstants>;

DerivedConstants derive_constants(const ModelParams& params,
                                  const Preferences& prefs);

//---------------------------------------------------------------------------//
// Validation
//---------------------------------------------------------------------------//

inline constexpr double kAdmissibilityMargin = 1e-12;

struct Violation
{
    std::string condition;
    std::string detail;
};

/// Every violated condition, in a fixed order. Empty iff admissible.
std::vector<Violation> check_admissibility(const ModelParams& params,
                                           const Preferences& prefs,
                                           double margin = kAdmissibilityMargin);

/// Validated, immutable model. Derived constants are computed once here.
class Model
{
  public:
    /// Throws ValidationError naming the first violated condition.
    static Model validate(const ModelParams& params,
                          const Preferences& prefs,
                          double margin = kAdmissibilityMargin);

    ModelKind kind() const noexcept { return kind_of(params_); }
    const ModelParams& params() const noexcept { return params_; }
    const Preferences& prefs() const noexcept { return prefs_; }
    const DerivedConstants& constants() const noexcept { return constants_; }

    // Typed accessors; throw UnsupportedModelError on a kind mismatch.
    const OUCompleteParams& ou_complete() const;
    const KimOmbergParams& kim_omberg() const;
    const HestonParams& heston() const;
    const OUCompleteConstants& ou_complete_constants() const;
    const KimOmbergConstants& kim_omberg_constants() const;
    const HestonConstants& heston_constants() const;

    /// chi for the factor models, s0 for the complete-market model.
    double initial_factor() const noexcept;

    /// Names accepted by parameter()/with_parameter(), in report order.
    std::vector<std::string> parameter_names() const;
    double parameter(std::string_view name) const;
    /// Re-validates; throws ValidationError if the bumped set is inadmissible.
    Model with_parameter(std::string_view name, double value) const;

    /// Stable hash of kind, parameters and p (bitwise), for caching.
    std::uint64_t content_hash() const noexcept;

  private:
    Model(ModelParams params, Preferences prefs, DerivedConstants constants);

    ModelParams params_;
    Preferences prefs_;
    DerivedConstants constants_;
};

/// Free-function spelling of Model::validate.
Model validate(const ModelParams& params,
               const Preferences& prefs,
               double margin = kAdmissibilityMargin);

/// theta(x): (mu - b x)/varsigma for the complete-market model evaluated at
/// the asset price, mu x/varsigma for Kim-Omberg, mu sqrt(x)/varsigma for
/// Heston (x >= 0 required).
double market_price_of_risk(const Model& model, double x);

}  // namespace ltsens
