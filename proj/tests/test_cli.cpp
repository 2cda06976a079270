#include "commands.hpp"

#include "bmf/io.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bmf;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result bmf_run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    return json::parse(in);
}

}  // namespace

TEST_CASE("generate")
{
    test::TempDir dir("cli_generate");

    SUBCASE("defaults")
    {
        const Result r = bmf_run({"generate", "--out", (dir / "g").string()});
        REQUIRE(r.code == cli::kExitOk);
        for (const char* f : {"data.csv", "z_true.csv", "u_true.csv", "manifest.json"})
            CHECK(fs::exists(dir / "g" / f));
        const BinaryMatrix x = load({dir / "g" / "data.csv", MatrixFormat::dense_csv, std::nullopt});
        const BinaryMatrix z = load({dir / "g" / "z_true.csv", MatrixFormat::dense_csv, std::nullopt});
        const BinaryMatrix u = load({dir / "g" / "u_true.csv", MatrixFormat::dense_csv, std::nullopt});
        CHECK(x.rows() == 200);
        CHECK(x.cols() == 500);
        CHECK(z.cols() == 5);
        CHECK(x == boolean_product(z, u));
        const json m = read_json(dir / "g" / "manifest.json");
        CHECK(m["subcommand"] == "generate");
        CHECK(m["args"]["latent"] == 5);
        CHECK(m.contains("version"));
        CHECK(m.contains("wall_clock_seconds"));
    }
    SUBCASE("ten percent noise")
    {
        REQUIRE(bmf_run({"generate", "--noise", "0.1", "--seed", "4", "--out", (dir / "n").string()}).code == 0);
        const BinaryMatrix x = load({dir / "n" / "data.csv", MatrixFormat::dense_csv, std::nullopt});
        const BinaryMatrix z = load({dir / "n" / "z_true.csv", MatrixFormat::dense_csv, std::nullopt});
        const BinaryMatrix u = load({dir / "n" / "u_true.csv", MatrixFormat::dense_csv, std::nullopt});
        const double flipped = static_cast<double>(prediction_counts(x, z, u).wrong()) / (200.0 * 500.0);
        CHECK(std::abs(flipped - 0.1) <= 0.01);
    }
    SUBCASE("sparse output")
    {
        REQUIRE(bmf_run({"generate", "--rows", "20", "--cols", "30", "--latent", "2", "--format", "sparse-coo",
                         "--out", (dir / "s").string()})
                    .code == 0);
        CHECK(load({dir / "s" / "data.coo", MatrixFormat::sparse_coo, std::nullopt}).cols() == 30);
    }
    SUBCASE("usage errors")
    {
        CHECK(bmf_run({"generate", "--latent", "0", "--out", (dir / "z").string()}).code == cli::kExitUsage);
        CHECK(bmf_run({"generate", "--noise", "0.7", "--out", (dir / "z").string()}).code == cli::kExitUsage);
        CHECK(bmf_run({"generate"}).code == cli::kExitUsage);
        CHECK(bmf_run({"generate", "--out", (dir / "z").string(), "--bogus", "1"}).code == cli::kExitUsage);
        CHECK(bmf_run({}).code == cli::kExitUsage);
    }
}

TEST_CASE("fit and summarize")
{
    test::TempDir dir("cli_fit");
    const std::string data_dir = (dir / "data").string();
    REQUIRE(bmf_run({"generate", "--latent", "3", "--seed", "3", "--out", data_dir}).code == 0);
    const std::string data = (dir / "data" / "data.csv").string();

    SUBCASE("finite model with the true dimension reconstructs noiseless data")
    {
        const std::string out = (dir / "finite").string();
        const Result r = bmf_run({"fit", "--model", "finite", "--latent", "3", "--input", data, "--out", out});
        REQUIRE(r.code == cli::kExitOk);
        CHECK(r.out.find("wall-clock") != std::string::npos);
        for (const char* f : {"chain.json", "traces.csv", "summary.json", "heatmap.pgm", "manifest.json"})
            CHECK(fs::exists(dir / "finite" / f));
        const json summary = read_json(dir / "finite" / "summary.json");
        CHECK(summary["reconstruction_error"].get<double>() <= 0.01);
        CHECK(summary["L"]["mode"] == 3);
        const std::string heat = read_text(dir / "finite" / "heatmap.pgm");
        CHECK(heat.rfind("P5\n3 200\n255\n", 0) == 0);

        SUBCASE("summarize reproduces the in-run summary")
        {
            const std::string again = (dir / "again").string();
            REQUIRE(bmf_run({"summarize", "--chain", out, "--input", data, "--out", again}).code == 0);
            CHECK(read_text(dir / "again" / "summary.json") == read_text(dir / "finite" / "summary.json"));
            CHECK(read_text(dir / "again" / "heatmap.pgm") == heat);
        }
        SUBCASE("summarize against the ground truth")
        {
            const Result s = bmf_run({"summarize", "--chain", out, "--truth",
                                      (dir / "data" / "u_true.csv").string(), "--out", (dir / "t").string()});
            REQUIRE(s.code == 0);
            const json with_truth = read_json(dir / "t" / "summary.json");
            CHECK(with_truth["factor_match"]["mean_jaccard"].get<double>() >= 0.95);
        }
    }
    SUBCASE("ibp model")
    {
        const std::string out = (dir / "ibp").string();
        const Result r = bmf_run({"fit", "--model", "ibp", "--input", data, "--samples", "40", "--burn-in", "20",
                                  "--out", out});
        REQUIRE(r.code == cli::kExitOk);
        const Chain chain = load_chain(out);
        CHECK(chain.size() == 20);
        CHECK(chain.config["model"] == "ibp");
        const json m = read_json(dir / "ibp" / "manifest.json");
        CHECK(m["args"]["samples"] == 40);
        CHECK(m["args"]["alpha"] == 1.0);
    }
    SUBCASE("traces only")
    {
        const std::string out = (dir / "traces").string();
        REQUIRE(bmf_run({"fit", "--model", "ibp", "--input", data, "--samples", "10", "--burn-in", "5",
                         "--traces-only", "--out", out})
                    .code == 0);
        CHECK_FALSE(fs::exists(dir / "traces" / "factors"));
        CHECK_FALSE(fs::exists(dir / "traces" / "heatmap.pgm"));
    }
    SUBCASE("usage and runtime errors")
    {
        const std::string out = (dir / "bad").string();
        CHECK(bmf_run({"fit", "--model", "ibp", "--input", data, "--samples", "100", "--burn-in", "100", "--out",
                       out})
                  .code == cli::kExitUsage);
        CHECK(bmf_run({"fit", "--model", "finite", "--input", data, "--out", out}).code == cli::kExitUsage);
        CHECK(bmf_run({"fit", "--model", "pca", "--input", data, "--out", out}).code == cli::kExitUsage);
        CHECK(bmf_run({"fit", "--model", "ibp", "--input", data, "--threads", "lots", "--out", out}).code ==
              cli::kExitUsage);
        CHECK(bmf_run({"fit", "--model", "ibp", "--input", (dir / "missing.csv").string(), "--out", out}).code ==
              cli::kExitFailure);
        CHECK(bmf_run({"summarize", "--chain", (dir / "nowhere").string()}).code == cli::kExitFailure);
    }
}

TEST_CASE("runs replay byte for byte, whatever the thread count")
{
    test::TempDir dir("cli_determinism");
    REQUIRE(bmf_run({"generate", "--rows", "80", "--cols", "300", "--latent", "4", "--noise", "0.05", "--seed", "8",
                     "--out", (dir / "data").string()})
                .code == 0);
    const std::string data = (dir / "data" / "data.csv").string();
    for (const char* model : {"ibp", "finite"}) {
        std::vector<std::string> traces;
        for (const char* threads : {"1", "4", "1"}) {
            const fs::path out = dir / (std::string(model) + "_" + threads + "_" + std::to_string(traces.size()));
            REQUIRE(bmf_run({"fit", "--model", model, "--latent", "4", "--input", data, "--samples", "30",
                             "--burn-in", "10", "--seed", "12", "--threads", threads, "--out", out.string()})
                        .code == 0);
            traces.push_back(read_text(out / "traces.csv"));
        }
        CHECK(traces[0] == traces[1]);
        CHECK(traces[0] == traces[2]);
    }
}

TEST_CASE("bench")
{
    test::TempDir dir("cli_bench");
    const Result r = bmf_run({"bench", "--rows", "10", "--cols", "10", "--out", (dir / "b").string()});
    REQUIRE(r.code == cli::kExitOk);
    const json report = json::parse(r.out);
    CHECK(report["subcommand"] == "bench");
    CHECK(report["sampling_seconds"].get<double>() < 1.0);
    CHECK(report["samples_per_second"].get<double>() > 0.0);
    CHECK(report.contains("version"));
    CHECK(fs::exists(dir / "b" / "bench.json"));
    CHECK(bmf_run({"bench", "--density", "1.5"}).code == cli::kExitUsage);
}

TEST_CASE("installed binary")
{
    // Exit codes as seen by a shell.
    auto status = [](const std::string& args) {
        const int raw = std::system((std::string(BMF_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--version") == 0);
    CHECK(status("generate --latent 0 --out /tmp/unused") == 2);
    CHECK(status("summarize --chain /nonexistent/chain") == 1);
}
