#include "ltsens/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace ltsens {

namespace {

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double number(const Json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key))
        throw ConfigError("missing key '" + key + "' in " + where);
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("'" + key + "' in " + where + " must be a number");
    return v.get<double>();
}

std::uint64_t unsigned_int(const Json& v, const std::string& key)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError("'" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> number_list(const Json& v, const std::string& key)
{
    if (!v.is_array())
        throw ConfigError("'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v)
    {
        if (!e.is_number())
            throw ConfigError("'" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

SimConfig parse_sim(const Json& s)
{
    reject_unknown(s, {"T", "n_steps", "n_paths", "seed", "scheme", "workers"}, "sim");
    SimConfig c;
    c.T = number(s, "T", "sim");
    if (s.contains("n_steps"))
        c.n_steps = unsigned_int(s.at("n_steps"), "n_steps");
    if (s.contains("n_paths"))
        c.n_paths = unsigned_int(s.at("n_paths"), "n_paths");
    if (s.contains("seed"))
        c.seed = unsigned_int(s.at("seed"), "seed");
    if (s.contains("workers"))
        c.workers = static_cast<unsigned>(unsigned_int(s.at("workers"), "workers"));
    if (s.contains("scheme"))
    {
        if (!s.at("scheme").is_string())
            throw ConfigError("'scheme' must be a string");
        try
        {
            c.scheme = scheme_from_string(s.at("scheme").get<std::string>());
        }
        catch (const std::invalid_argument& e)
        {
            throw ConfigError(e.what());
        }
    }
    return c;
}

}  // namespace

OutputFormat output_format_from_string(const std::string& name)
{
    if (name == "json")
        return OutputFormat::json;
    if (name == "csv")
        return OutputFormat::csv;
    throw ConfigError("unknown output format '" + name + "' (expected json or csv)");
}

ModelParams parse_model_block(const Json& block)
{
    if (!block.is_object() || !block.contains("type") || !block.at("type").is_string())
        throw ConfigError("model block needs a string 'type'");
    const auto type = block.at("type").get<std::string>();
    ModelKind kind;
    try
    {
        kind = model_kind_from_string(type);
    }
    catch (const std::exception&)
    {
        throw ConfigError("unknown model type '" + type
                          + "' (expected ou_complete, kim_omberg or heston)");
    }
    if (kind == ModelKind::ou_complete)
    {
        reject_unknown(block, {"type", "mu", "b", "varsigma", "s0"}, "model");
        return OUCompleteParams{number(block, "mu", "model"), number(block, "b", "model"),
                                number(block, "varsigma", "model"),
                                number(block, "s0", "model")};
    }
    reject_unknown(block, {"type", "mu", "varsigma", "k", "m_bar", "sigma", "rho", "chi"},
                   "model");
    const double mu = number(block, "mu", "model");
    const double vs = number(block, "varsigma", "model");
    const double k = number(block, "k", "model");
    const double mb = number(block, "m_bar", "model");
    const double sigma = number(block, "sigma", "model");
    const double rho = number(block, "rho", "model");
    const double chi = number(block, "chi", "model");
    if (kind == ModelKind::kim_omberg)
        return KimOmbergParams{mu, vs, k, mb, sigma, rho, chi};
    return HestonParams{mu, vs, k, mb, sigma, rho, chi};
}

RunConfig parse_config(const Json& doc)
{
    reject_unknown(doc,
                   {"model", "preferences", "horizon", "grid_points", "sim", "sweep", "output"},
                   "config");
    if (!doc.contains("model"))
        throw ConfigError("config needs exactly one 'model' block");
    if (!doc.contains("preferences"))
        throw ConfigError("config needs a 'preferences' block");
    const auto& prefs_block = doc.at("preferences");
    reject_unknown(prefs_block, {"p"}, "preferences");
    const double p = number(prefs_block, "p", "preferences");
    if (!(p < 0))
        throw ValidationError("p_negative", "risk exponent p must be < 0");

    const auto params = parse_model_block(doc.at("model"));
    RunConfig cfg{Model::validate(params, Preferences(p)), 1.0, 101, std::nullopt,
                  std::nullopt, std::nullopt, OutputFormat::json};

    if (doc.contains("sim"))
        cfg.sim = parse_sim(doc.at("sim"));
    if (doc.contains("horizon"))
        cfg.horizon = number(doc, "horizon", "config");
    else if (cfg.sim)
        cfg.horizon = cfg.sim->T;
    if (!(cfg.horizon >= 0))
        throw ConfigError("'horizon' must be >= 0");
    if (doc.contains("grid_points"))
    {
        cfg.grid_points = unsigned_int(doc.at("grid_points"), "grid_points");
        if (cfg.grid_points < 2)
            throw ConfigError("'grid_points' must be >= 2");
    }
    if (doc.contains("sweep"))
    {
        const auto& s = doc.at("sweep");
        reject_unknown(s, {"parameter", "values", "T"}, "sweep");
        SweepConfig sw;
        if (s.contains("parameter"))
        {
            if (!s.at("parameter").is_string())
                throw ConfigError("'parameter' in sweep must be a string");
            sw.parameter = s.at("parameter").get<std::string>();
            const auto names = cfg.model.parameter_names();
            if (std::find(names.begin(), names.end(), sw.parameter) == names.end())
                throw ConfigError("sweep parameter '" + sw.parameter
                                  + "' does not exist for this model");
        }
        if (s.contains("values"))
            sw.values = number_list(s.at("values"), "values");
        if (s.contains("T"))
            sw.horizons = number_list(s.at("T"), "T");
        cfg.sweep = std::move(sw);
    }
    if (doc.contains("output"))
    {
        const auto& o = doc.at("output");
        reject_unknown(o, {"path", "format"}, "output");
        for (const char* key : {"path", "format"})
            if (o.contains(key) && !o.at(key).is_string())
                throw ConfigError("'" + std::string(key) + "' in output must be a string");
        if (o.contains("path"))
            cfg.output_path = o.at("path").get<std::string>();
        if (o.contains("format"))
            cfg.format = output_format_from_string(o.at("format").get<std::string>());
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    Json doc;
    try
    {
        doc = Json::parse(in);
    }
    catch (const Json::parse_error& e)
    {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace ltsens
