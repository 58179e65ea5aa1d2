// End-to-end checks of the command-line tool: flag parsing, exit codes, and
// emitted formats. Each case spawns the real binary.
#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "orthoglide/report.hpp"

namespace {

struct RunResult {
    int status = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(ORTHOGLIDE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
    const int rc = pclose(pipe);
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return result;
}

}  // namespace

TEST_CASE("synthesize subcommand") {
    SECTION("JSON output carries the full design set") {
        const auto run = run_cli("synthesize --cube 1 --mu 0.5 --strategy all --format json");
        REQUIRE(run.status == 0);
        const auto j = nlohmann::json::parse(run.output);
        REQUIRE(j["results"].size() == 3);
        REQUIRE(j["results"][0]["strategy"] == 1);
        REQUIRE(std::abs(j["results"][0]["link_length"].get<double>() - 1.553) < 2e-3);
        REQUIRE(j["results"][1]["mu_joint"][1].get<double>() > 2.1);
        REQUIRE(j["results"][0]["mu_joint"] == "singular");
        // parsed reports reconstruct library results
        const auto r = orthoglide::design_result_from_json(j["results"][2]);
        REQUIRE(r.strategy_id == 3);
        REQUIRE(std::abs(r.rho_min - 0.789) < 2e-3);
    }
    SECTION("unit suffixes flow through to the report") {
        const std::string path = "cli_test_report.json";
        const auto run =
            run_cli("synthesize --cube 200mm --mu 0.5 --strategy 1 --json " + path);
        REQUIRE(run.status == 0);
        std::ifstream in(path);
        REQUIRE(in.good());
        const auto j = nlohmann::json::parse(in);
        REQUIRE(j["unit"] == "mm");
        REQUIRE(std::abs(j["results"][0]["link_length"].get<double>() - 310.57) < 0.1);
        std::filesystem::remove(path);
    }
    SECTION("text output mirrors the reference table") {
        const auto run = run_cli("synthesize --cube 1 --mu 0.5 --strategy all");
        REQUIRE(run.status == 0);
        REQUIRE(run.output.find("1.553") != std::string::npos);
        REQUIRE(run.output.find("1.704") != std::string::npos);
        REQUIRE(run.output.find("1.764") != std::string::npos);
        REQUIRE(run.output.find("singularity") != std::string::npos);
    }
    SECTION("other criteria") {
        REQUIRE(run_cli("synthesize --cube 1 --condition 2.5 --strategy 1,2").status == 0);
        REQUIRE(run_cli("synthesize --cube 1 --manipulability 0.8 --strategy 1").status == 0);
        REQUIRE(run_cli("synthesize --cube 1 --lambda-min 0.5 --lambda-max 2 --strategy 2")
                    .status == 0);
        const auto all = run_cli(
            "synthesize --cube 1 --condition 2.5 --strategy all --format json");
        REQUIRE(all.status == 0);
        REQUIRE(nlohmann::json::parse(all.output)["results"].size() == 2);
    }
    SECTION("usage errors exit with status 1") {
        REQUIRE(run_cli("synthesize --cube 1 --mu 1.5").status == 1);
        REQUIRE(run_cli("synthesize --cube -3 --mu 0.5").status == 1);
        REQUIRE(run_cli("synthesize --cube 1 --mu 0.5 --strategy 9").status == 1);
        REQUIRE(run_cli("synthesize --cube 1 --mu 0.5 --unknown-flag").status == 1);
        REQUIRE(run_cli("synthesize --cube 1").status == 1);  // no criterion
        REQUIRE(run_cli("synthesize --cube 1 --condition 2.5 --strategy 3").status == 1);
        REQUIRE(run_cli("nonsense").status == 1);
    }
}

TEST_CASE("tables and contour subcommands") {
    const auto tables = run_cli("tables");
    REQUIRE(tables.status == 0);
    REQUIRE(tables.output.find("P2") != std::string::npos);
    REQUIRE(tables.output.find("0.7782") != std::string::npos);

    const auto contour = run_cli("contour --grid 5");
    REQUIRE(contour.status == 0);
    REQUIRE(contour.output.rfind("rho_min,rho_max,mu_min,mu_max,kind_min,kind_max\n", 0) == 0);

    const std::string path = "cli_test_contour.csv";
    REQUIRE(run_cli("contour --grid 5 --output " + path).status == 0);
    REQUIRE(std::filesystem::exists(path));
    std::filesystem::remove(path);
}

TEST_CASE("explore subcommand") {
    const auto vol =
        run_cli("explore --volume --bound two-sided:0.3333 --rays 1000 --tol 1e-3");
    REQUIRE(vol.status == 0);
    REQUIRE(vol.output.find("V0") != std::string::npos);

    const auto sf = run_cli("explore --singularity-free --samples 1000000");
    REQUIRE(sf.status == 0);
    REQUIRE(sf.output.find("singularity-free") != std::string::npos);

    REQUIRE(run_cli("explore --volume --bound nonsense:1").status == 1);
    REQUIRE(run_cli("explore").status == 1);
    REQUIRE(run_cli("explore --volume --bound lower:2").status == 1);
}

TEST_CASE("verify subcommand") {
    const auto run = run_cli("verify --pairs 2 --resolution 21 --points 150");
    REQUIRE(run.status == 0);
    REQUIRE(run.output.find("all checks passed") != std::string::npos);
    REQUIRE(run.output.find("[FAIL]") == std::string::npos);
}
