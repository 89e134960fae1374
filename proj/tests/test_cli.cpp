#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AKVF_CLI_PATH) + " " + args + " > cli_stdout.txt 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

struct OutDir {
    fs::path dir;
    explicit OutDir(const std::string& name) : dir(name) { fs::remove_all(dir); }
    ~OutDir() { fs::remove_all(dir); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("solve writes solution, summary and manifest") {
    OutDir out("cli_solve");
    REQUIRE(run_cli("solve --problem synthetic --k 1 --level 1 --out cli_solve") == 0);

    REQUIRE(fs::exists(out.dir / "solution.vtk"));
    {
        std::ifstream vtk(out.dir / "solution.vtk");
        std::string first;
        std::getline(vtk, first);
        CHECK(first == "# vtk DataFile Version 3.0");
        std::string body((std::istreambuf_iterator<char>(vtk)), std::istreambuf_iterator<char>());
        CHECK(body.find("VECTORS velocity double") != std::string::npos);
        CHECK(body.find("SCALARS lambda double 1") != std::string::npos);
    }

    const json summary = read_json(out.dir / "summary.json");
    CHECK(summary.at("problem") == "synthetic");
    CHECK(summary.at("kernel_dim") == 1);
    CHECK(summary.at("expected_kernel_dim") == 1);
    CHECK(summary.at("residuals").at("momentum").get<double>() < 1e-7);
    CHECK(summary.at("residuals").at("constraint").get<double>() < 1e-7);
    CHECK(summary.at("degeneracy_violations") == 0);
    CHECK(summary.at("timings").at("total").get<double>() > 0);

    const json manifest = read_json(out.dir / "manifest.json");
    CHECK(manifest.at("command") == "solve");
    CHECK(manifest.at("config").at("problem") == "synthetic");
    CHECK(manifest.at("config").at("k") == 1);
    CHECK(manifest.at("outputs").size() == 2);
}

TEST_CASE("bad input exits with the config code") {
    CHECK(run_cli("solve --problem peanut --out cli_err") == 2);
    CHECK(run_cli("solve --no-such-flag") == 2);
    CHECK(run_cli("converge --problem synthetic --k 9 --out cli_err") == 2);

    {
        std::ofstream cfg("cli_bad_cfg.json");
        cfg << "{\"problm\": \"synthetic\"}\n";
    }
    CHECK(run_cli("solve --config cli_bad_cfg.json --out cli_err") == 2);
    fs::remove("cli_bad_cfg.json");
    fs::remove_all("cli_err");
}

TEST_CASE("degenerate gradients abort under the fail policy") {
    OutDir out("cli_degen");
    const int code =
        run_cli("solve --problem deforming-critical --k 1 --level 3 --out cli_degen");
    CHECK(code == 3);
    CHECK(run_cli("kernel --problem deforming-critical --k 1 --level 3 --degeneracy warn "
                  "--out cli_degen") == 0);
    const json j = read_json(out.dir / "kernel.json");
    CHECK(j.at("detected_dim") == 0);
}

TEST_CASE("flags override the config file") {
    OutDir out("cli_override");
    {
        std::ofstream cfg("cli_cfg.json");
        cfg << "{\"problem\": \"synthetic\", \"k\": 1, \"level\": 0, \"out\": \"ignored\"}\n";
    }
    REQUIRE(run_cli("solve --config cli_cfg.json --k 2 --out cli_override") == 0);
    fs::remove("cli_cfg.json");

    const json manifest = read_json(out.dir / "manifest.json");
    CHECK(manifest.at("config").at("k") == 2);
    CHECK(manifest.at("config").at("problem") == "synthetic");
    CHECK(manifest.at("config").at("out") == "cli_override");
}

TEST_CASE("converge emits the study table") {
    OutDir out("cli_conv");
    REQUIRE(run_cli("converge --problem synthetic --k 1 --levels 2 --out cli_conv") == 0);

    std::ifstream csv(out.dir / "synthetic_k1_l0.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "level,h,ndof_u,ndof_lambda,err_u_h1,err_u_l2,err_lambda_h1,eoc_u_h1,energy,lambda_h1,"
          "ratio");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 2);

    const json j = read_json(out.dir / "synthetic_k1_l0.json");
    CHECK(j.at("reference") == "exact");
    CHECK(j.at("records").size() == 2);
}

TEST_CASE("track emits trajectories and metrics") {
    OutDir out("cli_track");
    REQUIRE(run_cli("track --problem rotating --k 1 --level 1 --steps 4 --seeds 5 "
                    "--mode both --out cli_track") == 0);

    REQUIRE(fs::exists(out.dir / "trajectories_iso.csv"));
    REQUIRE(fs::exists(out.dir / "trajectories_baseline.csv"));
    REQUIRE(fs::exists(out.dir / "metrics.csv"));

    std::ifstream metrics(out.dir / "metrics.csv");
    std::string header;
    std::getline(metrics, header);
    CHECK(header == "step,t,drift,distortion_iso,distortion_baseline");
    int rows = 0;
    std::string line;
    while (std::getline(metrics, line)) ++rows;
    CHECK(rows == 5); // steps + 1

    std::ifstream traj(out.dir / "trajectories_iso.csv");
    rows = 0;
    while (std::getline(traj, line)) ++rows;
    CHECK(rows == 1 + 5 * 5); // header + seeds x (steps + 1)
}

TEST_CASE("mesh and kernel subcommands") {
    OutDir out("cli_mesh");
    REQUIRE(run_cli("mesh --problem deforming-regular --level 1 --out cli_mesh") == 0);
    CHECK(fs::exists(out.dir / "mesh.txt"));
    CHECK(fs::exists(out.dir / "mesh.vtk"));

    OutDir kout("cli_kernel");
    REQUIRE(run_cli("kernel --problem synthetic --k 1 --level 1 --out cli_kernel") == 0);
    const json j = read_json(kout.dir / "kernel.json");
    CHECK(j.at("detected_dim") == 1);
    CHECK(j.at("rank_diagnostic").at("kernel_dim_bound") == 1);
    CHECK(j.at("rank_diagnostic").at("rank") == 2);
    CHECK(j.at("detection_values").size() == 3);

    fs::remove("cli_stdout.txt");
}

} // TEST_SUITE
