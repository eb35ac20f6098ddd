#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rd/config.hpp"
#include "rd/io.hpp"

using namespace rd;

namespace {

std::string tmp_file(const std::string& name, const std::string& body) {
    auto dir = std::filesystem::temp_directory_path() / "rd_config_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / name).string();
    std::ofstream f(path);
    f << body;
    return path;
}

} // namespace

TEST_CASE("apply_key sets every field") {
    RunConfig c;
    apply_key(c, "equation", "cahn_hilliard");
    apply_key(c, "eps0", "0.05");
    apply_key(c, "mu", "2.5");
    apply_key(c, "nx", "48");
    apply_key(c, "ht", "0.002");
    apply_key(c, "nt", "3");
    apply_key(c, "windows", "7");
    apply_key(c, "solver", "newton");
    apply_key(c, "tau_u", "0.25");
    apply_key(c, "tau_p", "0.8");
    apply_key(c, "omega", "1.5");
    apply_key(c, "eps", "0.2");
    apply_key(c, "tol", "1e-8");
    apply_key(c, "max_iter", "500");
    apply_key(c, "adaptive", "true");
    apply_key(c, "ht_cap", "0.016");
    apply_key(c, "fast_iters", "64");
    apply_key(c, "out", "results/run1");
    apply_key(c, "jobs", "4");
    apply_key(c, "snapshot_times", "0.1, 0.2,0.30000000000000004");
    apply_key(c, "sweep_ht", "1e-4,1e-3");
    apply_key(c, "sweep_nt", "1,2,4");
    apply_key(c, "sweep_nx", "32,64");

    CHECK(c.equation == "cahn_hilliard");
    CHECK(c.eps0 == 0.05);
    CHECK(c.mu == 2.5);
    CHECK(c.nx == 48);
    CHECK(c.ht == 0.002);
    CHECK(c.nt == 3);
    CHECK(c.windows == 7);
    CHECK(c.solver == "newton");
    CHECK(c.params.tau_u == 0.25);
    CHECK(c.params.tau_p == 0.8);
    CHECK(c.params.omega == 1.5);
    CHECK(c.params.epsilon == 0.2);
    CHECK(c.params.tol == 1e-8);
    CHECK(c.params.max_iter == 500);
    CHECK(c.adaptive);
    CHECK(c.ht_cap == 0.016);
    CHECK(c.fast_iters == 64);
    CHECK(c.out == "results/run1");
    CHECK(c.jobs == 4);
    REQUIRE(c.snapshot_times.size() == 3);
    CHECK(c.snapshot_times[2] == 0.30000000000000004);
    CHECK(c.sweep_ht == std::vector<double>{1e-4, 1e-3});
    CHECK(c.sweep_nt == std::vector<int>{1, 2, 4});
    CHECK(c.sweep_nx == std::vector<int>{32, 64});
    validate_config(c);
}

TEST_CASE("unknown keys and malformed values carry the offending key") {
    RunConfig c;
    CHECK_THROWS_AS(apply_key(c, "stride", "3"), unknown_key_error);
    try {
        apply_key(c, "stride", "3");
    } catch (const config_error& e) {
        CHECK(e.key == "stride");
    }

    CHECK_THROWS_AS(apply_key(c, "ht", "fast"), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "ht", ""), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "ht", "1e999"), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "ht", "nan"), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "nx", "2.5"), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "nx", "99999999999999"), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "adaptive", "yes"), bad_value_error);
    CHECK_THROWS_AS(apply_key(c, "sweep_ht", "1e-3,oops"), bad_value_error);
    try {
        apply_key(c, "tol", "abc");
    } catch (const config_error& e) {
        CHECK(e.key == "tol");
    }
    // failed assignments must not corrupt the config
    CHECK(c.ht == RunConfig{}.ht);
}

TEST_CASE("config echo reparses to an identical echo") {
    RunConfig c;
    c.eps0 = 0.1;            // inexact binary value
    c.ht = 1.0 / 3.0;
    c.params.tol = 5e-13;
    c.snapshot_times = {0.1 + 0.2, 1e-300};
    c.sweep_nx = {50, 100, 150};
    c.adaptive = true;
    c.ht_cap = 8.0 * c.ht;
    const std::string echo1 = echo_config(c);

    RunConfig d;
    const auto path = tmp_file("echo.cfg", echo1);
    load_config_file(d, path);
    CHECK(echo_config(d) == echo1);
    CHECK(d.ht == c.ht);
    CHECK(d.snapshot_times == c.snapshot_times);
}

TEST_CASE("config files allow comments, blanks, and spacing") {
    const auto path = tmp_file("style.cfg",
                               "# run setup\n"
                               "\n"
                               "  equation = allen_cahn   # trailing comment\n"
                               "nx=32\n"
                               "\t tol =  1e-9 \n");
    RunConfig c;
    load_config_file(c, path);
    CHECK(c.equation == "allen_cahn");
    CHECK(c.nx == 32);
    CHECK(c.params.tol == 1e-9);

    RunConfig d;
    CHECK_THROWS_AS(load_config_file(d, tmp_file("bad.cfg", "nx 32\n")), unknown_key_error);
    CHECK_THROWS_AS(load_config_file(d, tmp_file("unk.cfg", "grid=32\n")), unknown_key_error);
    CHECK_THROWS_AS(load_config_file(d, "/nonexistent/rd.cfg"), io_error);
}

TEST_CASE("later assignments override earlier ones") {
    const auto path = tmp_file("base.cfg", "nx=32\nht=0.01\n");
    RunConfig c;
    load_config_file(c, path);
    apply_key(c, "nx", "64"); // command-line flag applied after the file
    CHECK(c.nx == 64);
    CHECK(c.ht == 0.01);
}

TEST_CASE("validate_config rejects out-of-range fields by name") {
    auto expect_bad = [](RunConfig c, const std::string& key) {
        try {
            validate_config(c);
            FAIL_CHECK("expected rejection for ", key);
        } catch (const bad_value_error& e) {
            CHECK(e.key == key);
        }
    };
    validate_config(RunConfig{});

    RunConfig c;
    c.nx = 1;
    expect_bad(c, "nx");
    c = RunConfig{};
    c.ht = 0.0;
    expect_bad(c, "ht");
    c = RunConfig{};
    c.eps0 = 0.0;
    expect_bad(c, "eps0");
    c = RunConfig{};
    c.params.tol = -1.0;
    expect_bad(c, "tol");
    c = RunConfig{};
    c.adaptive = true;
    c.ht = 0.01;
    c.ht_cap = 0.005;
    expect_bad(c, "ht_cap");
    c = RunConfig{};
    c.sweep_nx = {64, 1};
    expect_bad(c, "sweep_nx");
    c = RunConfig{};
    c.jobs = 0;
    expect_bad(c, "jobs");
}

TEST_CASE("model and plan builders honor the config") {
    RunConfig c;
    c.equation = "cahn_hilliard";
    c.nx = 16;
    c.eps0 = 0.05;
    const RDModel m = model_from(c);
    CHECK(m.kind == ModelKind::cahn_hilliard);
    CHECK(m.grid.nx == 16);
    CHECK(m.eps0 == 0.05);

    c.eps0 = -1.0; // model default
    CHECK(model_from(c).eps0 == 0.1);

    c.equation = "burgers";
    CHECK_THROWS_AS(model_from(c), domain_error);

    RunConfig p;
    p.windows = 4;
    p.nt = 2;
    p.ht = 0.003;
    p.solver = "nl_sor";
    p.snapshot_times = {0.004};
    MarchPlan plan = plan_from(p);
    CHECK(plan.windows == 4);
    CHECK(plan.nt == 2);
    CHECK(plan.solver == SolverKind::nl_sor);
    CHECK_FALSE(plan.adaptive.has_value());
    CHECK(plan.snapshot_times == std::vector<double>{0.004});

    p.adaptive = true;
    plan = plan_from(p);
    REQUIRE(plan.adaptive.has_value());
    CHECK(plan.adaptive->ht_cap == 8.0 * 0.003); // default cap
    CHECK(plan.adaptive->fast_iter_threshold == 200);
    p.ht_cap = 0.01;
    p.fast_iters = 77;
    plan = plan_from(p);
    CHECK(plan.adaptive->ht_cap == 0.01);
    CHECK(plan.adaptive->fast_iter_threshold == 77);

    p.solver = "sor";
    CHECK_THROWS_AS(plan_from(p), domain_error);
}

TEST_CASE("manifest is valid json with full-precision inputs") {
    RunConfig c;
    c.ht = 0.1 + 0.2;
    c.sweep_nx = {32, 64};
    const auto j = nlohmann::json::parse(manifest_json(c, "solve"));
    CHECK(j["tool"] == "rdsolve");
    CHECK(j["command"] == "solve");
    CHECK(j["config"]["ht"].get<double>() == c.ht);
    CHECK(j["config"]["sweep_nx"].size() == 2);
    CHECK(j["wall_time_seconds"].get<double>() == -1.0);
    CHECK(j.contains("version"));
    CHECK(j.contains("generated_utc"));

    const auto done = nlohmann::json::parse(manifest_json(c, "solve", 12.5));
    CHECK(done["wall_time_seconds"].get<double>() == 12.5);
}
