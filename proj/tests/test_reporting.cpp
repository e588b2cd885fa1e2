#include "common.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/reporting.hpp"

#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dnfkpp;
namespace fs = std::filesystem;

namespace {

report::json example_config() {
    return report::json::parse(R"({
      "model": {"kappa_plus": 1.0, "kappa_minus": 1.0, "m": 0.5},
      "kernels": {"plus": {"type": "gaussian", "l": 2.0}, "minus": {"type": "gaussian_pair", "q": 2.0}},
      "family": {"h_min": 0.1, "h_max": 20.0},
      "branch": {"eps": [0.001]},
      "stability": {"eps": [0.001]},
      "sweep": {"m": [0.3, 0.5], "h": [2.0, 4.0, 6.0]},
      "seed": 3
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("dnfkpp_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string config_error_of(const report::json& j) {
    try {
        report::parse_config(j);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("shortest round-trip formatting") {
    CHECK(report::format_double(0.1) == "0.1");
    CHECK(report::format_double(1e-4) == "1e-04");
    CHECK(report::format_double(-2.0) == "-2");
    auto g = testing::rng(81);
    for (int i = 0; i < 1000; ++i) {
        const double x = testing::uniform(g, -1.0, 1.0) * std::pow(10.0, testing::uniform(g, -30, 30));
        const std::string s = report::format_double(x);
        double y = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), y);
        CHECK(y == x);
    }
}

TEST_CASE("sha256 digest") {
    CHECK(report::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("configuration errors name the field") {
    auto j = example_config();
    j["model"].erase("m");
    CHECK(config_error_of(j).find("model.m") != std::string::npos);

    j = example_config();
    j["kernels"]["plus"]["type"] = "cauchy";
    CHECK(config_error_of(j).find("kernels.plus.type") != std::string::npos);

    j = example_config();
    j["kernels"]["minus"] = {{"type", "tabulated"}, {"file", "does_not_exist.csv"}};
    j.erase("family");
    CHECK(config_error_of(j).find("kernels.minus.file") != std::string::npos);

    j = example_config();
    j["branch"]["eps"] = report::json::array();
    CHECK(config_error_of(j).find("branch.eps") != std::string::npos);

    j = example_config();
    j["model"]["m"] = 2.0;
    CHECK(config_error_of(j).find("model") != std::string::npos);

    j = example_config();
    j["sweep"]["m"] = {0.5, 1.5};
    CHECK(config_error_of(j).find("sweep.m[1]") != std::string::npos);

    CHECK(config_error_of(example_config()).empty());
}

TEST_CASE("critical writes the point and the dispersion curve") {
    const auto cfg = report::parse_config(example_config());
    const fs::path out = fresh_dir("critical");
    report::RunOptions o;
    o.subcommand = "critical";
    o.out_dir = out.string();
    REQUIRE(report::run(cfg, o) == 0);
    const auto j = report::json::parse(slurp(out / "critical.json"));
    CHECK(j["h_c"].get<double>() == doctest::Approx(testing::gauss_h_c).epsilon(1e-11));
    CHECK(j["k_c"].get<double>() == doctest::Approx(testing::gauss_k_c).epsilon(1e-11));
    CHECK(j["assumptions"]["pass"].get<bool>());
    CHECK(j["touching_maxima"].get<int>() == 1);
    const std::string csv = slurp(out / "dispersion.csv");
    CHECK(csv.rfind("p,alpha\n", 0) == 0);
    const auto m = report::json::parse(slurp(out / "manifest.json"));
    CHECK(m["exit_code"].get<int>() == 0);
    CHECK(m["config_sha256"].get<std::string>().size() == 64);
    CHECK(m["steps"][0]["status"] == "ok");
}

TEST_CASE("solver failures exit with 3 and name the stage") {
    auto j = example_config();
    j["family"]["h_max"] = 0.5;
    const auto cfg = report::parse_config(j);
    const fs::path out = fresh_dir("fail");
    report::RunOptions o;
    o.subcommand = "branch";
    o.out_dir = out.string();
    CHECK(report::run(cfg, o) == 3);
    const auto m = report::json::parse(slurp(out / "manifest.json"));
    CHECK(m["steps"][0]["name"] == "branch");
    CHECK(m["steps"][0]["status"] == "failed");
    CHECK(m["steps"][0]["error"].get<std::string>().find("NoTangency") != std::string::npos);
}

TEST_CASE("commands that need a family exit with 2 without one") {
    auto j = example_config();
    j.erase("family");
    j.erase("sweep");
    const auto cfg = report::parse_config(j);
    report::RunOptions o;
    o.subcommand = "critical";
    o.out_dir = fresh_dir("nofamily").string();
    CHECK(report::run(cfg, o) == 2);
}

TEST_CASE("sweeps do not depend on the worker count") {
    const auto cfg = report::parse_config(example_config());
    const auto serial = report::sweep_table(report::run_sweep(cfg, 1)).csv();
    const auto parallel = report::sweep_table(report::run_sweep(cfg, 4)).csv();
    CHECK(serial == parallel);
    CHECK(std::count(serial.begin(), serial.end(), '\n') == 7);
}

TEST_CASE("repeated runs are byte-identical apart from wall time") {
    const auto cfg = report::parse_config(example_config());
    std::vector<fs::path> dirs{fresh_dir("det_a"), fresh_dir("det_b")};
    for (const auto& d : dirs) {
        report::RunOptions o;
        o.subcommand = "analyze";
        o.out_dir = d.string();
        REQUIRE(report::run(cfg, o) == 0);
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
        const std::string name = e.path().filename().string();
        if (name == "manifest.json") {
            auto a = report::json::parse(slurp(e.path())), b = report::json::parse(slurp(dirs[1] / name));
            a.erase("wall_time_s");
            b.erase("wall_time_s");
            CHECK(a == b);
        } else {
            INFO(name);
            CHECK(slurp(e.path()) == slurp(dirs[1] / name));
        }
    }
}
