#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "ltsens/config.hpp"
#include "ltsens/json_fwd.hpp"

using namespace ltsens;

namespace {

Json heston_doc()
{
    return Json::parse(R"({
        "model": {"type": "heston", "mu": 0.5, "varsigma": 0.25, "k": 2, "m_bar": 0.09,
                  "sigma": 0.3, "rho": -0.7, "chi": 0.09},
        "preferences": {"p": -1}
    })");
}

}  // namespace

TEST_CASE("minimal config parses with defaults")
{
    const auto cfg = parse_config(heston_doc());
    CHECK(cfg.model.kind() == ModelKind::heston);
    CHECK(cfg.model.prefs().p() == -1);
    CHECK(cfg.horizon == 1.0);
    CHECK(cfg.grid_points == 101);
    CHECK_FALSE(cfg.sim.has_value());
    CHECK(cfg.format == OutputFormat::json);
}

TEST_CASE("sim block and horizon fallback")
{
    auto doc = heston_doc();
    doc["sim"] = Json::parse(R"({"T": 2.5, "n_steps": 50, "n_paths": 400, "seed": 9,
                                 "scheme": "full_truncation_euler", "workers": 4})");
    const auto cfg = parse_config(doc);
    REQUIRE(cfg.sim.has_value());
    CHECK(cfg.horizon == 2.5);
    CHECK(cfg.sim->n_steps == 50);
    CHECK(cfg.sim->n_paths == 400);
    CHECK(cfg.sim->seed == 9);
    CHECK(cfg.sim->workers == 4);
    CHECK(*cfg.sim->scheme == Scheme::full_truncation_euler);
    doc["horizon"] = 7.0;
    CHECK(parse_config(doc).horizon == 7.0);
}

TEST_CASE("schema errors")
{
    auto bad = [](auto edit) {
        auto doc = heston_doc();
        edit(doc);
        return doc;
    };
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["extra"] = 1; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["model"]["kappa"] = 1; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["model"].erase("rho"); })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["model"]["mu"] = "x"; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["model"]["type"] = "cir"; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d.erase("preferences"); })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["sim"] = {{"n_paths", 10}}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["sim"] = {{"T", 1}, {"seed", -1}}; })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["sim"] = {{"T", 1}, {"scheme", "milstein"}}; })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["grid_points"] = 1; })), ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["sweep"] = {{"parameter", "b"}}; })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(bad([](Json& d) { d["output"] = {{"format", "xml"}}; })),
                    ConfigError);
}

TEST_CASE("admissibility errors keep their own type")
{
    auto doc = heston_doc();
    doc["model"]["m_bar"] = 0.01;
    try
    {
        parse_config(doc);
        FAIL("accepted a Feller violation");
    }
    catch (const ValidationError& e)
    {
        CHECK(e.condition() == "feller");
    }
    doc = heston_doc();
    doc["preferences"]["p"] = 0.5;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("sweep and output blocks")
{
    auto doc = heston_doc();
    doc["sweep"] = Json::parse(R"({"parameter": "m_bar", "values": [0.1, 0.2], "T": [5, 10]})");
    doc["output"] = Json::parse(R"({"path": "out.csv", "format": "csv"})");
    const auto cfg = parse_config(doc);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->parameter == "m_bar");
    CHECK(cfg.sweep->values == std::vector<double>{0.1, 0.2});
    CHECK(cfg.sweep->horizons == std::vector<double>{5.0, 10.0});
    CHECK(*cfg.output_path == "out.csv");
    CHECK(cfg.format == OutputFormat::csv);
}

TEST_CASE("loading from disk")
{
    const std::string path = "ltsens_test_config.json";
    {
        std::ofstream out(path);
        out << heston_doc().dump();
    }
    CHECK(load_config(path).model.kind() == ModelKind::heston);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config("does/not/exist.json"), ConfigError);

    const auto ou = parse_model_block(Json::parse(R"({"type": "ou_complete", "mu": 0.1,
        "b": 0.5, "varsigma": 0.2, "s0": 0.2})"));
    CHECK(std::holds_alternative<OUCompleteParams>(ou));
}
