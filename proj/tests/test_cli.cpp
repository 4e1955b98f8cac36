#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dars/cli.hpp"
#include "dars/preference.hpp"
#include "dars/select.hpp"
#include "dars/vdg.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("dars_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json doc;
    in >> doc;
    return doc;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kExampleDeps =
    "from,to,quality,strength\n"
    "1,2,+,0.4\n"
    "2,4,+,0.3\n"
    "1,3,+,0.8\n"
    "3,4,+,0.8\n"
    "1,4,-,0.1\n"
    "3,1,+,0.6\n"
    "4,2,+,0.55\n"
    "4,3,+,0.2\n";

}  // namespace

TEST_CASE("identify on a perfect co-occurrence fixture") {
    TempDir dir("identify");
    const auto prefs = dir.file("prefs.csv", "1,1\n1,1\n0,0\n0,0\n");
    const int rc = dars::cli::run(
        {"--output-dir", dir.sub("out"), "--quiet", "identify", "--prefs", prefs});
    CHECK(rc == dars::cli::kExitOk);
    const std::string deps = read_text(dir.sub("out") + "/dependencies.csv");
    CHECK(deps.find("1,2,+,1") != std::string::npos);
    const json eells = read_json(dir.sub("out") + "/eells.json");
    CHECK(eells["n"] == 2);
    CHECK(eells["values"][0][1] == 1.0);
    CHECK(fs::exists(dir.sub("out") + "/manifest.json"));
}

TEST_CASE("identify on an independence fixture writes no dependencies") {
    TempDir dir("independence");
    const auto prefs = dir.file("prefs.csv", "1,1\n1,0\n0,1\n0,0\n");
    const int rc = dars::cli::run(
        {"--output-dir", dir.sub("out"), "--quiet", "identify", "--prefs", prefs});
    CHECK(rc == dars::cli::kExitOk);
    const std::string deps = read_text(dir.sub("out") + "/dependencies.csv");
    CHECK(deps == "from,to,quality,strength\n");
}

TEST_CASE("identify parse failures exit with the input code") {
    TempDir dir("badprefs");
    const auto prefs = dir.file("prefs.csv", "1,0\n0,2\n");
    const int rc = dars::cli::run(
        {"--output-dir", dir.sub("out"), "--quiet", "identify", "--prefs", prefs});
    CHECK(rc == dars::cli::kExitInput);
}

TEST_CASE("identify equals the library pipeline on a random fixture") {
    TempDir dir("identlib");
    std::ostringstream csv;
    dars::SplitMix64 rng(606);
    const int users = 9, reqs = 10;
    std::vector<std::vector<int>> rows(users, std::vector<int>(reqs));
    for (int u = 0; u < users; ++u) {
        for (int i = 0; i < reqs; ++i) {
            rows[u][i] = rng.next_below(2) ? 1 : 0;
            csv << rows[u][i] << (i + 1 < reqs ? "," : "");
        }
        csv << '\n';
    }
    const auto prefs_path = dir.file("prefs.csv", csv.str());
    const int rc = dars::cli::run(
        {"--output-dir", dir.sub("out"), "--quiet", "identify", "--prefs", prefs_path});
    REQUIRE(rc == dars::cli::kExitOk);

    dars::PreferenceMatrix m;
    m.users = users;
    m.requirements = reqs;
    m.entries = dars::Matrix<std::uint8_t>(users, reqs);
    for (int u = 0; u < users; ++u)
        for (int i = 0; i < reqs; ++i) m.entries(u, i) = static_cast<std::uint8_t>(rows[u][i]);
    const auto eta = dars::eells_measure(m);
    const auto deps = dars::to_dependencies(eta, std::nullopt);
    const auto graph = dars::ValueDependencyGraph::from_dependencies(reqs, deps);
    std::ostringstream expected;
    dars::write_dependency_csv(expected, graph);
    CHECK(read_text(dir.sub("out") + "/dependencies.csv") == expected.str());
}

TEST_CASE("analyze reproduces the worked-example influence") {
    TempDir dir("analyze");
    const auto deps = dir.file("deps.csv", kExampleDeps);
    const int rc =
        dars::cli::run({"--output-dir", dir.sub("out"), "--quiet", "analyze", "--deps", deps});
    REQUIRE(rc == dars::cli::kExitOk);
    const json inf = read_json(dir.sub("out") + "/influence.json");
    CHECK(inf["influence"][0][3] == 0.7);
    const json strengths = read_json(dir.sub("out") + "/strengths.json");
    CHECK(strengths["positive"][0][3] == 0.8);
    CHECK(strengths["negative"][0][3] == 0.1);
    CHECK(strengths["positive"][1][0] == 0.2);
    const json metrics = read_json(dir.sub("out") + "/metrics.json");
    CHECK(metrics["edges"] == 8);
    CHECK(metrics["nvdl"] == 0.125);
}

TEST_CASE("analyze of an edgeless file reports vdl 0 and null nvdl") {
    TempDir dir("edgeless");
    const auto deps = dir.file("deps.csv", "from,to,quality,strength\n");
    const int rc = dars::cli::run(
        {"--output-dir", dir.sub("out"), "--quiet", "analyze", "--deps", deps, "--n", "3"});
    REQUIRE(rc == dars::cli::kExitOk);
    const json metrics = read_json(dir.sub("out") + "/metrics.json");
    CHECK(metrics["vdl"] == 0.0);
    CHECK(metrics["nvdl"].is_null());
    const json strengths = read_json(dir.sub("out") + "/strengths.json");
    CHECK(strengths["positive"][0][1].is_null());
}

TEST_CASE("analyze matches the library byte for byte on a random graph") {
    TempDir dir("analyzelib");
    dars::SplitMix64 rng(7070);
    const auto graph = oracles::random_vdg(6, 0.5, 0.3, rng);
    std::ostringstream csv;
    dars::write_dependency_csv(csv, graph);
    const auto deps_path = dir.file("deps.csv", csv.str());
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("a"), "--quiet", "analyze", "--deps",
                            deps_path}) == dars::cli::kExitOk);
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("b"), "--quiet", "analyze", "--deps",
                            deps_path}) == dars::cli::kExitOk);
    CHECK(read_text(dir.sub("a") + "/influence.json") == read_text(dir.sub("b") + "/influence.json"));
    const json inf = read_json(dir.sub("a") + "/influence.json");
    const auto expected = dars::influence(dars::all_pairs_strengths(graph));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(inf["influence"][i][j].get<double>() ==
                  doctest::Approx(expected(i, j)).epsilon(1e-8));
}

TEST_CASE("select a single requirement") {
    TempDir dir("select1");
    const auto reqs = dir.file("reqs.csv", "1,5,7,1\n");
    const int rc = dars::cli::run({"--output-dir", dir.sub("out"), "--quiet", "select",
                                   "--requirements", reqs, "--method", "dars", "--budget", "10"});
    CHECK(rc == dars::cli::kExitOk);
    const json sol = read_json(dir.sub("out") + "/solution.json");
    CHECK(sol["x"] == json::array({1}));
    CHECK(sol["feasible"] == true);
    CHECK(sol["ov"] == 7.0);
}

TEST_CASE("select sweeps a budget range into one file per level") {
    TempDir dir("sweep");
    const auto reqs = dir.file("reqs.csv", "1,2,4,1\n2,3,5,1\n3,4,6,1\n");
    const int rc = dars::cli::run({"--output-dir", dir.sub("out"), "--quiet", "select",
                                   "--requirements", reqs, "--method", "pcbk", "--budget-pct",
                                   "1..100"});
    CHECK(rc == dars::cli::kExitOk);
    int files = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir.sub("out"))) ++files;
    // 100 solutions + manifest
    CHECK(files == 101);
    CHECK(fs::exists(dir.sub("out") + "/solution_p001.json"));
    CHECK(fs::exists(dir.sub("out") + "/solution_p100.json"));
    const json full = read_json(dir.sub("out") + "/solution_p100.json");
    CHECK(full["av"] == 15.0);
}

TEST_CASE("select cross-method comparison favors dars overall value") {
    TempDir dir("cross");
    const auto reqs = dir.file("reqs.csv", "1,1,1,1\n2,1,1,1\n3,1,1,1\n4,1,1,1\n");
    const auto deps = dir.file("deps.csv", kExampleDeps);
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("bk"), "--quiet", "select", "--requirements",
                            reqs, "--deps", deps, "--method", "bk", "--budget", "3"}) ==
            dars::cli::kExitOk);
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("dars"), "--quiet", "select",
                            "--requirements", reqs, "--deps", deps, "--method", "dars",
                            "--budget", "3"}) == dars::cli::kExitOk);
    const json bk = read_json(dir.sub("bk") + "/solution.json");
    const json dars_sol = read_json(dir.sub("dars") + "/solution.json");
    CHECK(dars_sol["ov"].get<double>() >= bk["ov"].get<double>() - 1e-9);
}

TEST_CASE("select writes the LP model on request") {
    TempDir dir("lp");
    const auto reqs = dir.file("reqs.csv", "1,1,2,1\n2,1,3,1\n");
    const int rc = dars::cli::run({"--output-dir", dir.sub("out"), "--quiet", "select",
                                   "--requirements", reqs, "--method", "dars", "--budget", "2",
                                   "--emit-lp"});
    CHECK(rc == dars::cli::kExitOk);
    const std::string lp = read_text(dir.sub("out") + "/model.lp");
    CHECK(lp.find("Maximize") != std::string::npos);
    CHECK(lp.find("Binaries") != std::string::npos);
}

TEST_CASE("select exit codes: infeasible floor and capacity") {
    TempDir dir("codes");
    const auto reqs = dir.file("reqs.csv", "1,2,4,1\n2,3,5,1\n");
    SUBCASE("unreachable complementary floor exits 3") {
        const int rc = dars::cli::run({"--output-dir", dir.sub("out"), "--quiet", "select",
                                       "--requirements", reqs, "--method", "dars_complementary",
                                       "--budget", "2", "--floor", "2"});
        CHECK(rc == dars::cli::kExitInfeasible);
    }
    SUBCASE("capacity overflow exits 4") {
        std::ostringstream many;
        for (int i = 1; i <= 30; ++i) many << i << ",1,1,1\n";
        const auto big = dir.file("big.csv", many.str());
        const int rc = dars::cli::run({"--output-dir", dir.sub("out2"), "--quiet", "select",
                                       "--requirements", big, "--method", "pcbk", "--budget",
                                       "10"});
        CHECK(rc == dars::cli::kExitCapacity);
    }
    SUBCASE("unknown method exits 2") {
        const int rc = dars::cli::run({"--output-dir", dir.sub("out3"), "--quiet", "select",
                                       "--requirements", reqs, "--method", "magic", "--budget",
                                       "2"});
        CHECK(rc == dars::cli::kExitInput);
    }
    SUBCASE("dimension mismatch between files exits 2") {
        const auto deps = dir.file("deps.csv", "from,to,quality,strength\n1,5,+,0.5\n");
        const int rc = dars::cli::run({"--output-dir", dir.sub("out4"), "--quiet", "select",
                                       "--requirements", reqs, "--deps", deps, "--method",
                                       "dars", "--budget", "2"});
        CHECK(rc == dars::cli::kExitInput);
    }
}

TEST_CASE("identify with the significance filter keeps only supported pairs") {
    TempDir dir("signif");
    std::ostringstream csv;
    for (int i = 0; i < 20; ++i) csv << "1,1\n";
    for (int i = 0; i < 20; ++i) csv << "0,0\n";
    const auto prefs = dir.file("prefs.csv", csv.str());
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("on"), "--quiet", "identify", "--prefs",
                            prefs, "--significance"}) == dars::cli::kExitOk);
    const std::string deps = read_text(dir.sub("on") + "/dependencies.csv");
    CHECK(deps.find("1,2,+,1") != std::string::npos);

    // a 4-user sample cannot reach significance at 95%
    TempDir small("signifsmall");
    const auto tiny = small.file("prefs.csv", "1,1\n1,1\n0,0\n0,0\n");
    REQUIRE(dars::cli::run({"--output-dir", small.sub("on"), "--quiet", "identify", "--prefs",
                            tiny, "--significance"}) == dars::cli::kExitOk);
    CHECK(read_text(small.sub("on") + "/dependencies.csv") == "from,to,quality,strength\n");
}

TEST_CASE("select honors the value cap and estimated-value flags") {
    TempDir dir("capflags");
    const auto reqs = dir.file("reqs.csv", "1,1,6,0.5\n2,1,5,0.5\n3,1,4,0.5\n");
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("cap"), "--quiet", "select",
                            "--requirements", reqs, "--method", "pcbk", "--budget", "3",
                            "--value-cap-pct", "40"}) == dars::cli::kExitOk);
    const json capped = read_json(dir.sub("cap") + "/solution.json");
    CHECK(capped["av"].get<double>() <= 0.4 * 15.0 + 1e-9);

    REQUIRE(dars::cli::run({"--output-dir", dir.sub("est"), "--quiet", "select",
                            "--requirements", reqs, "--method", "dars", "--budget", "3",
                            "--use-estimated-values"}) == dars::cli::kExitOk);
    const json est = read_json(dir.sub("est") + "/solution.json");
    CHECK(est["ov"] == 15.0);  // weights are the estimated values, no penalties
}

TEST_CASE("select complementary count mode via the CLI") {
    TempDir dir("compmode");
    const auto reqs = dir.file("reqs.csv", "1,4,8,1\n2,2,3,1\n3,2,2,1\n");
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("out"), "--quiet", "select",
                            "--requirements", reqs, "--method", "dars_complementary",
                            "--budget", "6", "--comp-mode", "max-count", "--floor", "5"}) ==
            dars::cli::kExitOk);
    const json sol = read_json(dir.sub("out") + "/solution.json");
    CHECK(sol["x"] == json::array({0, 1, 1}));
}

TEST_CASE("simulate writes records, deltas, and a manifest; reruns are identical") {
    TempDir dir("simulate");
    const auto config = dir.file("config.json", R"({
        "n": 8,
        "budget_percents": [40, 80],
        "vdl": [0.3],
        "nvdl": [0.0],
        "pdl": [0.05],
        "npdl": [0.0],
        "methods": ["pcbk", "dars"],
        "seed": 21,
        "replicates": 2
    })");
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("a"), "--quiet", "simulate", "--config",
                            config}) == dars::cli::kExitOk);
    REQUIRE(dars::cli::run({"--output-dir", dir.sub("b"), "--quiet", "simulate", "--config",
                            config}) == dars::cli::kExitOk);

    auto strip_runtime = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, out;
        while (std::getline(in, line)) {
            const auto cut = line.rfind(',');
            out += line.substr(0, cut);
            out += '\n';
        }
        return out;
    };
    const std::string a = read_text(dir.sub("a") + "/records.csv");
    const std::string b = read_text(dir.sub("b") + "/records.csv");
    CHECK(strip_runtime(a) == strip_runtime(b));
    CHECK(read_text(dir.sub("a") + "/deltas.csv") == read_text(dir.sub("b") + "/deltas.csv"));
    CHECK(fs::exists(dir.sub("a") + "/manifest.json"));

    // one row per cell x method x replicate, plus the header
    int lines = 0;
    std::istringstream count(a);
    for (std::string line; std::getline(count, line);) ++lines;
    CHECK(lines == 1 + 2 * 2 * 2);
}

TEST_CASE("simulate rejects a config with a bad field, naming it") {
    TempDir dir("simbad");
    const auto config = dir.file("config.json", R"({"n": 8, "replicates": 0})");
    const int rc = dars::cli::run(
        {"--output-dir", dir.sub("out"), "--quiet", "simulate", "--config", config});
    CHECK(rc == dars::cli::kExitInput);
}
