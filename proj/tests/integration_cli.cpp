#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file = "/tmp/hjq_cli_test_out.txt";
    const std::string cmd = std::string(HJQ_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {code, buf.str()};
}

std::string models_dir() { return HJQ_MODELS_DIR; }

} // namespace

TEST_CASE("analyze: builtin models exit cleanly") {
    CHECK(run_cli("analyze --builtin free-particle").exit_code == 0);
    auto r = run_cli("analyze --builtin yang-mills-su2-homogeneous");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("CLOSED") != std::string::npos);
    CHECK(r.output.find("first class") != std::string::npos);
}

TEST_CASE("analyze: model files from disk") {
    for (const char* f : {"free_particle.hjm", "toy_singular.hjm",
                          "yang_mills_su2_homogeneous.hjm", "proca_homogeneous.hjm"}) {
        INFO(f);
        CHECK(run_cli("analyze " + models_dir() + "/" + f).exit_code == 0);
    }
}

TEST_CASE("analyze: exit code contract") {
    CHECK(run_cli("analyze /nonexistent/missing.hjm").exit_code == 2);

    // syntax error
    {
        std::ofstream bad("/tmp/hjq_bad_syntax.hjm");
        bad << "model \"bad\"\ncoordinates: q\nlagrangian: dot(q +\n";
    }
    CHECK(run_cli("analyze /tmp/hjq_bad_syntax.hjm").exit_code == 2);

    // polynomial fragment violation
    {
        std::ofstream bad("/tmp/hjq_bad_div.hjm");
        bad << "model \"bad\"\ncoordinates: q1, q2\nlagrangian: dot(q1)/q2\n";
    }
    CHECK(run_cli("analyze /tmp/hjq_bad_div.hjm").exit_code == 3);

    // velocity degree > 2
    {
        std::ofstream bad("/tmp/hjq_bad_cubic.hjm");
        bad << "model \"bad\"\ncoordinates: q\nlagrangian: dot(q)^3\n";
    }
    CHECK(run_cli("analyze /tmp/hjq_bad_cubic.hjm").exit_code == 3);
}

TEST_CASE("verify: gates and exit codes") {
    CHECK(run_cli("verify --builtin toy-singular --t-end 2").exit_code == 0);
    auto ok = run_cli("verify --builtin yang-mills-su2-homogeneous --dt 1e-3 --t-end 10 --seed 7");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("EQUIVALENT") != std::string::npos);

    auto coarse = run_cli("verify --builtin yang-mills-su2-homogeneous --dt 0.5");
    CHECK(coarse.exit_code == 4);
}

TEST_CASE("measure: determinant report and refusals") {
    auto ok = run_cli("measure --builtin toy-singular --gauge q2 --gauge q1 --out /tmp/hjq_measure.json");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("det|{phi, chi}| = 1") != std::string::npos);
    auto j = nlohmann::json::parse(std::ifstream("/tmp/hjq_measure.json"));
    CHECK(j["measure"]["determinant"]["text"] == "1");
    CHECK(j["measure"]["delta_factors"].size() == 4);

    CHECK(run_cli("measure --builtin toy-singular --gauge p2 --gauge p1").exit_code == 5);
    CHECK(run_cli("measure --builtin free-particle").exit_code == 5);
    CHECK(run_cli("measure --builtin proca-homogeneous --gauge A0 --gauge \"A[1]\"").exit_code == 5);
}

TEST_CASE("reports are byte-identical across runs, excluding the timestamp") {
    REQUIRE(run_cli("analyze --builtin yang-mills-su2-homogeneous --out /tmp/hjq_det_a.json")
                .exit_code == 0);
    REQUIRE(run_cli("analyze --builtin yang-mills-su2-homogeneous --out /tmp/hjq_det_b.json")
                .exit_code == 0);
    auto a = nlohmann::json::parse(std::ifstream("/tmp/hjq_det_a.json"));
    auto b = nlohmann::json::parse(std::ifstream("/tmp/hjq_det_b.json"));
    CHECK(a["meta"]["content_hash"] == b["meta"]["content_hash"]);
    a["meta"].erase("timestamp");
    b["meta"].erase("timestamp");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("json report structure") {
    REQUIRE(run_cli("analyze --builtin yang-mills-su2-homogeneous --out /tmp/hjq_schema.json")
                .exit_code == 0);
    auto j = nlohmann::json::parse(std::ifstream("/tmp/hjq_schema.json"));
    for (const char* key : {"model", "legendre", "hamiltonians", "chain", "action",
                            "path_integral", "measure", "verify", "meta"})
        CHECK(j.contains(key));
    CHECK(j["chain"]["status"] == "CLOSED");
    CHECK(j["chain"]["constraints"].size() == 6);
    CHECK(j["legendre"]["rank"] == 9);
    CHECK(j["path_integral"]["integration_variables"].size() == 9);
    CHECK(j["path_integral"]["gauge_condition_count"] == 0);
    // expressions carry both text and monomial forms
    const auto& h0 = j["hamiltonians"]["h0"];
    CHECK(h0.contains("text"));
    CHECK(h0.contains("monomials"));
    CHECK(h0["monomials"].size() > 0);

    auto r = run_cli("analyze --builtin toy-singular --json-only");
    REQUIRE(r.exit_code == 0);
    CHECK_NOTHROW(nlohmann::json::parse(r.output));
}

TEST_CASE("verify writes its section into the json report") {
    REQUIRE(run_cli("verify --builtin toy-singular --t-end 2 --out /tmp/hjq_verify.json")
                .exit_code == 0);
    auto j = nlohmann::json::parse(std::ifstream("/tmp/hjq_verify.json"));
    CHECK(j["verify"]["comparison"]["equivalent"] == true);
    CHECK(j["verify"]["drift_ok"] == true);
    CHECK(j["verify"]["probe_ok"] == true);
    CHECK(j["verify"]["drift"].contains("halving_ratio"));
}
