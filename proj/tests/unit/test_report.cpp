#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "henon/error.hpp"
#include "henon/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace henon;
using namespace henon::report;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("henon_report_test_" + name);
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("config round trip")
{
    RunConfig c;
    c.N = 5;
    c.alpha = 2.7;
    c.p = 2.2;
    c.spectral.x_max = 33.3;
    c.spectral.margin = 1.0 / 3.0;
    c.symmetry = "full";
    c.sweep.axis = "alpha";
    CHECK(config_from_json(Json::parse(dump(to_json(c)))) == c);
    CHECK(config_from_json(to_json(RunConfig{})) == RunConfig{});
}

TEST_CASE("config errors name the field")
{
    auto expect = [](const std::string& text, const std::string& field) {
        try {
            config_from_json(Json::parse(text));
            FAIL("accepted " << text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };
    expect(R"({"spectral": {"gird": 10}})", "spectral.gird");
    expect(R"({"colour": 1})", "colour");
    expect(R"({"N": 2.5})", "'N'");
    expect(R"({"p": "three"})", "'p'");
    expect(R"({"oracle": 4})", "oracle");

    RunConfig c;
    c.oracle.n = 8000;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = RunConfig{};
    c.symmetry = "cyclic:3";  // N = 3
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = RunConfig{};
    c.sweep.axis = "N";
    CHECK_THROWS_AS(validate(c), ConfigError);
    CHECK_NOTHROW(validate(RunConfig{}));
}

TEST_CASE("number formatting")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(NAN) == "nan");
    Json j;
    j["a"] = 0.1;
    j["b"] = NAN;
    j["c"] = 2.0;
    j["d"] = 7;
    CHECK(dump(j, 0) == "{\"a\":0.10000000000000001,\"b\":null,\"c\":2.0,\"d\":7}\n");
}

TEST_CASE("cache key")
{
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
    RunConfig a, b;
    b.symmetry = "full";
    b.out = "elsewhere";
    b.workers = 1;
    CHECK(spectrum_cache_key(a) == spectrum_cache_key(b));
    b.spectral.grid = 2048;
    CHECK(spectrum_cache_key(a) != spectrum_cache_key(b));
}

TEST_CASE("solve writes profile files")
{
    RunConfig c;
    c.out = scratch("solve").string();
    CHECK(cmd_solve(c) == 0);
    for (const char* f : {"profile.csv", "profile_physical.csv", "profile.json"}) CHECK(fs::exists(fs::path(c.out) / f));
    const Json j = Json::parse(slurp(fs::path(c.out) / "profile.json"));
    CHECK(j["zeros"].size() == 2);
    CHECK(slurp(fs::path(c.out) / "profile.csv").rfind("t,v,v_prime\n", 0) == 0);

    c.N = 2;
    c.alpha = 4.0;
    c.p = 5.0;
    c.m = 3;
    CHECK(cmd_solve(c) == 0);
    CHECK(Json::parse(slurp(fs::path(c.out) / "profile.json"))["zeros"].size() == 3);
}

TEST_CASE("spectrum command and cache")
{
    RunConfig c;
    c.out = scratch("spectrum").string();
    CHECK(cmd_spectrum(c) == 0);
    const std::string first = slurp(fs::path(c.out) / "spectrum.json");
    CHECK(fs::exists(fs::path(c.out) / "cache" / ("spectrum-" + spectrum_cache_key(c) + ".json")));
    CHECK(compute_spectra(c).from_cache);
    CHECK(cmd_spectrum(c) == 0);
    CHECK(slurp(fs::path(c.out) / "spectrum.json") == first);

    const Json j = Json::parse(first);
    CHECK(j["singular"]["negative_count"] == 2);

    c.zero_potential = true;
    CHECK(cmd_spectrum(c) == 0);
    CHECK(Json::parse(slurp(fs::path(c.out) / "spectrum.json"))["singular"]["pairs"].empty());
}

TEST_CASE("morse command")
{
    RunConfig c;
    c.out = scratch("morse").string();
    c.p = 4.9;
    CHECK(cmd_morse(c) == 0);
    const Json j = Json::parse(slurp(fs::path(c.out) / "morse.json"));
    CHECK(j["total"] == 5);
    CHECK(j["bounds"]["with_f3"] == 5);
    CHECK(j["prediction"] == 5);
    CHECK(j.contains("degeneracy"));
    CHECK(slurp(fs::path(c.out) / "morse.csv").rfind("i,nu_hat,Lambda_hat,J,contribution\n", 0) == 0);
}

TEST_CASE("sweep")
{
    RunConfig c;
    c.use_cache = false;
    c.out = scratch("sweep").string();
    c.sweep.steps = 0;
    CHECK(cmd_sweep(c) == 0);
    CHECK(slurp(fs::path(c.out) / "sweep.csv") ==
          "param,M,nu_1,nu_2,nu_3,nu_4,radial_morse,total,bound_general,bound_f3,status\n");

    c.sweep.steps = 5;
    c.workers = 1;
    const std::string serial = sweep_csv(run_sweep(c), c.k);
    c.workers = 4;
    CHECK(sweep_csv(run_sweep(c), c.k) == serial);

    CHECK(sweep_points({"p", 1.0, 2.0, 3}) == std::vector<double>{1.0, 1.5, 2.0});
    CHECK(sweep_points({"p", 1.0, 2.0, 1}) == std::vector<double>{1.0});
}

TEST_CASE("oracle comparison")
{
    RunConfig c;
    c.out = scratch("oracle").string();
    c.p = 2.2;
    CHECK(cmd_oracle(c) == 0);
    const auto cmp = compare_with_oracle(c);
    CHECK(!cmp.rows.empty());
    for (const auto& r : cmp.rows) CHECK(r.rel_diff < 1e-4);

    c.spectral.grid = 256;
    const auto coarse = compare_with_oracle(c);
    CHECK(coarse.rows.at(0).rel_diff > cmp.rows.at(0).rel_diff);
    CHECK(cmd_oracle(c) == 0);
}
