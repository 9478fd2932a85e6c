#include "doctest.h"

#include <cmath>
#include <limits>

#include "ltsens/report.hpp"
#include "support.hpp"

using namespace ltsens;

TEST_CASE("doubles round trip with 17 significant digits")
{
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(NAN) == "null");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "null");
    ltsens::testing::Draws d(61);
    for (int i = 0; i < 1000; ++i)
    {
        const double x = d.uniform(-1, 1) * std::pow(10.0, d.uniform(-200, 200));
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("JSON dump keeps insertion order and is valid")
{
    Json j;
    j["zeta"] = 1.5;
    j["alpha"] = Json::array({1.0, 2.0});
    j["nested"] = {{"b", "x"}, {"a", nullptr}};
    j["empty"] = Json::object();
    j["n"] = 3;
    const auto text = dump_json(j);
    CHECK(text.find("\"zeta\"") < text.find("\"alpha\""));
    CHECK(text.find("[1.0, 2.0]") != std::string::npos);
    const auto back = Json::parse(text);
    CHECK(back == j);
    CHECK(dump_json(j, -1).find('\n') == std::string::npos);
    CHECK(dump_json(Json(NAN)) == "null");
}

TEST_CASE("CSV quoting")
{
    const auto csv = render_csv({"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", ""}});
    CHECK(csv == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",\n");
    Json flat;
    flat["v"] = 0.5;
    flat["name"] = "ko";
    flat["list"] = Json::array({1, 2});
    CHECK(flat_object_csv(flat) == "v,name,list\n0.5,ko,\"[1, 2]\"\n");
}

TEST_CASE("report shapes")
{
    const auto ko = ltsens::testing::ko_reference();
    const auto e = eigenpair_json(ko);
    CHECK(e["model"] == "kim_omberg");
    CHECK(e["derived_constants"].contains("alpha4"));
    const auto v = value_json(ko, 0.2, 0.0);
    CHECK(v["v"] == 1.0);
    CHECK(v["growth_rate_estimate"].is_null());
    const auto s = sensitivities_json(long_term_sensitivities(ko));
    CHECK(s["entries"].size() == 7);
    CHECK(s["any_flagged"] == true);
    const auto path = coefficient_path(ltsens::testing::heston_reference(), uniform_grid(1.0, 4));
    CHECK(coefficient_path_json(path)["Lambda"].is_null());
    const auto csv = coefficient_path_csv(path);
    CHECK(csv.substr(0, csv.find('\n')) == "t,beta,gamma,Lambda");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
