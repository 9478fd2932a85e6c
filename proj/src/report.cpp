#include "ltsens/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ltsens {

std::string format_double(double value)
{
    if (!std::isfinite(value))
        return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s;
}

namespace {

void dump_rec(const Json& v, int indent, int depth, std::string& out)
{
    const auto newline = [&](int d) {
        if (indent < 0)
            return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type())
    {
        case Json::value_t::object: {
            if (v.empty())
            {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it)
            {
                if (!first)
                    out += ',';
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_rec(it.value(), indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty())
            {
                out += "[]";
                return;
            }
            // Numeric arrays stay on one line.
            const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) {
                return e.is_number() || e.is_null();
            });
            out += '[';
            bool first = true;
            for (const auto& e : v)
            {
                if (!first)
                    out += flat ? ", " : ",";
                first = false;
                if (!flat)
                    newline(depth + 1);
                dump_rec(e, indent, depth + 1, out);
            }
            if (!flat)
                newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float:
            out += format_double(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

std::string cell(const Json& v)
{
    if (v.is_number_float())
        return format_double(v.get<double>());
    if (v.is_string())
        return v.get<std::string>();
    return dump_json(v, -1);
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string dump_json(const Json& value, int indent)
{
    std::string out;
    dump_rec(value, indent, 0, out);
    return out;
}

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows)
{
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos)
            {
                os << '"';
                for (char ch : c)
                    os << (ch == '"' ? "\"\"" : std::string(1, ch));
                os << '"';
            }
            else
                os << c;
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows)
        line(r);
    return os.str();
}

std::string flat_object_csv(const Json& object)
{
    std::vector<std::string> header, row;
    for (auto it = object.begin(); it != object.end(); ++it)
    {
        header.push_back(it.key());
        row.push_back(cell(it.value()));
    }
    return render_csv(header, {row});
}

Json params_json(const Model& model)
{
    Json j;
    j["type"] = std::string(to_string(model.kind()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, OUCompleteParams>)
            {
                j["mu"] = p.mu;
                j["b"] = p.b;
                j["varsigma"] = p.varsigma;
                j["s0"] = p.s0;
            }
            else
            {
                j["mu"] = p.mu;
                j["varsigma"] = p.varsigma;
                j["k"] = p.k;
                j["m_bar"] = p.m_bar;
                j["sigma"] = p.sigma;
                j["rho"] = p.rho;
                j["chi"] = p.chi;
            }
        },
        model.params());
    return j;
}

Json constants_json(const Model& model)
{
    Json j;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            j["q"] = c.q;
            if constexpr (std::is_same_v<T, OUCompleteConstants>)
            {
                j["alpha_cm"] = c.alpha_cm;
            }
            else if constexpr (std::is_same_v<T, KimOmbergConstants>)
            {
                j["sigma1"] = c.sigma1;
                j["sigma2"] = c.sigma2;
                j["alpha1"] = c.alpha1;
                j["alpha2"] = c.alpha2;
                j["alpha3"] = c.alpha3;
                j["alpha4"] = c.alpha4;
            }
            else
            {
                j["sigma1"] = c.sigma1;
                j["sigma2"] = c.sigma2;
                j["beta1"] = c.beta1;
                j["beta2"] = c.beta2;
            }
        },
        model.constants());
    return j;
}

Json eigenpair_json(const Model& model)
{
    const auto e = eigenpair(model);
    Json j;
    j["model"] = std::string(to_string(model.kind()));
    j["lambda"] = e.lambda;
    j["a2"] = e.a2;
    j["a1"] = e.a1;
    j["derived_constants"] = constants_json(model);
    return j;
}

Json value_json(const Model& model, double chi, double horizon)
{
    const auto r = dual_value(model, chi, horizon);
    Json j;
    j["model"] = std::string(to_string(model.kind()));
    j["chi"] = chi;
    j["T"] = horizon;
    j["v"] = r.v;
    j["utility"] = r.utility;
    j["growth_rate_estimate"] = optional_number(r.growth_rate_estimate);
    j["lambda"] = eigenpair(model).lambda;
    return j;
}

Json coefficient_path_json(const CoefficientPath& path)
{
    Json j;
    j["model"] = std::string(to_string(path.model));
    j["grid"] = path.grid;
    j["beta"] = path.beta;
    j["gamma"] = path.gamma;
    j["Lambda"] = path.has_lambda() ? Json(path.Lambda) : Json(nullptr);
    j["step"] = path.step;
    j["warnings"] = path.warnings;
    return j;
}

std::string coefficient_path_csv(const CoefficientPath& path)
{
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < path.grid.size(); ++i)
        rows.push_back({format_double(path.grid[i]), format_double(path.beta[i]),
                        format_double(path.gamma[i]),
                        path.has_lambda() ? format_double(path.Lambda[i]) : ""});
    return render_csv({"t", "beta", "gamma", "Lambda"}, rows);
}

Json sensitivities_json(const SensitivityReport& report)
{
    Json j;
    j["model"] = std::string(to_string(report.model));
    Json entries = Json::array();
    for (const auto& e : report.entries)
    {
        Json row;
        row["parameter"] = e.name;
        row["closed_form"] = e.closed_form;
        row["fd_check"] = e.fd_check;
        row["abs_disagreement"] = e.abs_disagreement;
        row["fd_error_estimate"] = e.fd_error_estimate;
        row["tolerance"] = sensitivity_tolerance(e.closed_form);
        row["flagged"] = e.flagged;
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    j["any_flagged"] = report.any_flagged();
    j["chi_note"] = "chi is the limit of (1-p) d/dchi ln v, not divided by T";
    return j;
}

std::string sensitivities_csv(const SensitivityReport& report)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : report.entries)
        rows.push_back({e.name, format_double(e.closed_form), format_double(e.fd_check),
                        format_double(e.abs_disagreement)});
    return render_csv({"parameter", "closed_form", "fd_check", "gap"}, rows);
}

Json diagnostic_json(std::string_view parameter, const std::vector<DiagnosticRow>& rows)
{
    Json j;
    j["parameter"] = std::string(parameter);
    Json table = Json::array();
    for (const auto& r : rows)
    {
        Json row;
        row["T"] = r.T;
        row["value"] = r.value;
        row["limit"] = r.limit;
        row["gap"] = r.gap;
        row["se"] = r.se;
        table.push_back(std::move(row));
    }
    j["rows"] = std::move(table);
    return j;
}

std::string diagnostic_csv(const std::vector<DiagnosticRow>& rows)
{
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows)
        out.push_back({format_double(r.T), format_double(r.value), format_double(r.limit),
                       format_double(r.gap)});
    return render_csv({"T", "value", "limit", "gap"}, out);
}

Json decomposition_json(const DecompositionResult& r)
{
    Json j;
    j["T"] = r.T;
    j["chi"] = r.chi;
    j["seed"] = r.seed;
    j["n_steps"] = r.n_steps;
    j["n_paths"] = r.n_paths;
    j["scheme"] = std::string(to_string(r.scheme));
    j["v_closed"] = r.v_closed;
    j["lambda"] = r.lambda;
    j["phi_chi"] = r.phi_chi;
    j["skeleton"] = r.skeleton;
    j["ratio"] = r.ratio;
    j["mc_error_term"] = r.mc_error_term;
    j["mc_se"] = r.mc_se;
    j["ratio_gap"] = r.ratio_gap;
    j["mc_error_term_half_dt"] = r.mc_error_term_half;
    j["mc_se_half_dt"] = r.mc_se_half;
    j["ratio_gap_half_dt"] = r.ratio_gap_half;
    j["step_gap"] = r.step_gap;
    j["step_gap_se"] = r.step_gap_se;
    j["status"] = r.pass ? "PASS" : "FAIL";
    j["warnings"] = r.warnings;
    return j;
}

std::string decomposition_csv(const std::vector<DecompositionResult>& results)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : results)
        rows.push_back({format_double(r.T), format_double(r.v_closed), format_double(r.skeleton),
                        format_double(r.ratio), format_double(r.mc_error_term),
                        format_double(r.mc_se), format_double(r.ratio_gap),
                        r.pass ? "PASS" : "FAIL"});
    return render_csv({"T", "v_closed", "skeleton", "ratio", "mc_error_term", "mc_se",
                       "ratio_gap", "status"},
                      rows);
}

Json value_estimate_json(const Model& model, double chi, const SimConfig& config,
                         const ValueEstimate& est)
{
    Json j;
    j["model"] = std::string(to_string(model.kind()));
    j["chi"] = chi;
    j["T"] = config.T;
    j["seed"] = config.seed;
    j["n_steps"] = config.n_steps;
    j["n_paths"] = config.n_paths;
    j["v"] = est.v;
    j["se"] = est.se;
    j["utility"] = std::exp((1 - model.prefs().p()) * est.log_v) / model.prefs().p();
    j["growth_rate_estimate"] = config.T > 0 ? Json(-est.log_v / config.T) : Json(nullptr);
    j["growth_rate_fit"] = est.growth_rate_fit;
    j["lambda"] = eigenpair(model).lambda;
    return j;
}

}  // namespace ltsens
