#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "mcca/metrics.hpp"
#include "mcca/serialize.hpp"

using namespace mcca;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int n = 0;
        path = fs::temp_directory_path() /
               ("mcca-cli-" + std::to_string(static_cast<unsigned long>(::getpid())) + "-" +
                std::to_string(n++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const std::string cmd =
        "MCCA_LOG=quiet '" + std::string(MCCA_TOOL_PATH) + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST_CASE("help exits zero, bad usage exits two") {
    CHECK(run("--help") == 0);
    CHECK(run("fit --help") == 0);
    CHECK(run("no-such-command") == 2);
    CHECK(run("fit") == 2); // missing required options
}

TEST_CASE("synth -> fit -> info pipeline") {
    TempDir dir;
    const fs::path data = dir.path / "data";
    REQUIRE(run("synth --out " + q(data) +
                " --shape 4x3 --ranks 2x2 --groups 2 --samples 5 --seed 7") == 0);
    REQUIRE(fs::exists(data / "manifest.json"));
    REQUIRE(fs::exists(data / "g00" / "sample_000.mctn"));
    REQUIRE(fs::exists(data / "g01" / "sample_004.mctn"));

    SUBCASE("mcca fit writes model and report") {
        const fs::path out = dir.path / "fit";
        CHECK(run("fit --manifest " + q(data / "manifest.json") +
                  " --method mcca --ranks 2x2 --out " + q(out)) == 0);
        CHECK(fs::exists(out / "report.csv"));
        const StoredModel model = read_model(out / "model.mcca");
        CHECK(model.tag == Method::Mcca);
        CHECK(model.shape == std::vector<std::size_t>{4, 3});
        CHECK(model.ranks == std::vector<std::size_t>{2, 2});
        CHECK(model.latent.size() == 2);

        const std::string header = read_file(out / "report.csv");
        CHECK(header.rfind("iteration,objective,alpha_1,", 0) == 0);

        CHECK(run("info --model " + q(out / "model.mcca")) == 0);
    }

    SUBCASE("every method writes a loadable model") {
        for (const std::string spec :
             {std::string("--method pca --ranks 5"), std::string("--method cca --ranks 5"),
              std::string("--method mpca --ranks 2x2")}) {
            const fs::path out = dir.path / "m";
            CHECK(run("fit --manifest " + q(data / "manifest.json") + " " + spec +
                      " --out " + q(out)) == 0);
            CHECK_NOTHROW(read_model(out / "model.mcca"));
        }
    }

    SUBCASE("ranks above the extent exit with the input-error code") {
        CHECK(run("fit --manifest " + q(data / "manifest.json") +
                  " --method mcca --ranks 9x9 --out " + q(dir.path / "bad")) == 2);
    }

    SUBCASE("missing manifest exits with the input-error code") {
        CHECK(run("fit --manifest " + q(dir.path / "nope.json") +
                  " --method mcca --ranks 2x2 --out " + q(dir.path / "bad")) == 2);
    }

    SUBCASE("info on the manifest") {
        CHECK(run("info --manifest " + q(data / "manifest.json")) == 0);
    }
}

TEST_CASE("synth output is byte-identical across runs") {
    TempDir dir;
    const std::string spec = " --shape 3x3 --ranks 2x2 --groups 2 --samples 3 --seed 99";
    REQUIRE(run("synth --out " + q(dir.path / "a") + spec) == 0);
    REQUIRE(run("synth --out " + q(dir.path / "b") + spec) == 0);
    for (const char* g : {"g00", "g01"})
        for (int i = 0; i < 3; ++i) {
            char fname[32];
            std::snprintf(fname, sizeof(fname), "sample_%03d.mctn", i);
            CHECK(read_file(dir.path / "a" / g / fname) ==
                  read_file(dir.path / "b" / g / fname));
        }
}

TEST_CASE("alpha-scan reports alpha = 1 at full ranks") {
    TempDir dir;
    const fs::path data = dir.path / "data";
    REQUIRE(run("synth --out " + q(data) +
                " --shape 4x3 --ranks 2x2 --groups 2 --samples 6 --seed 3") == 0);
    const fs::path out = dir.path / "scan";
    REQUIRE(run("alpha-scan --manifest " + q(data / "manifest.json") +
                " --grid 2,4x2,3 --svg --out " + q(out)) == 0);
    CHECK(fs::exists(out / "alpha.svg"));

    std::ifstream is(out / "alpha.csv");
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "ranks,mode,alpha");
    bool saw_full = false;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string ranks, mode, alpha;
        REQUIRE(std::getline(ss, ranks, ','));
        REQUIRE(std::getline(ss, mode, ','));
        REQUIRE(std::getline(ss, alpha, ','));
        const double a = std::stod(alpha);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        if (ranks == "4x3") {
            saw_full = true;
            CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(saw_full);
}

TEST_CASE("rer-curve writes a parseable csv over all methods") {
    TempDir dir;
    const fs::path data = dir.path / "data";
    REQUIRE(run("synth --out " + q(data) +
                " --shape 4x4 --ranks 2x2 --groups 2 --samples 6 --seed 11") == 0);
    const fs::path out = dir.path / "curve";
    REQUIRE(run("rer-curve --manifest " + q(data / "manifest.json") +
                " --methods mcca,pca,cca,mpca --grid 1,2,3 --tie --svg --out " + q(out)) == 0);
    CHECK(fs::exists(out / "rer.svg"));

    std::ifstream is(out / "rer.csv");
    const auto records = read_records_csv(is);
    CHECK(records.size() == 12); // 4 methods x 3 tied grid points
    for (const auto& rec : records) {
        CHECK(rec.rer >= 0.0);
        CHECK(rec.rer <= 1.0 + 1e-12);
        CHECK(rec.params > 0);
    }
    // per-method CR columns are sorted ascending
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].method == records[i - 1].method)
            CHECK(records[i].cr >= records[i - 1].cr);
}
