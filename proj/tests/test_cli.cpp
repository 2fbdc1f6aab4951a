#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/tool_commands.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = ntw::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path dir() {
    const auto d = fs::path(NTW_TEST_TMPDIR) / "cli";
    fs::create_directories(d);
    return d;
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto p = dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string small_data() {
    return write_file("small.csv",
                      "1,0,1,3,1,0,0\n"
                      "1,0,0,1,3,1,0\n"
                      "1,0,0,0,1,3,1,0\n"
                      "2,5,5,5\n");
}

}  // namespace

TEST_CASE("align writes the manifest") {
    const auto out = (dir() / "align_ok").string();
    fs::remove_all(out);
    const auto r = call({"align", "--input", small_data(), "--label", "1", "--updates", "5", "--out", out});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("aligned 3 series") != std::string::npos);
    for (const char* f : {"warpings.csv", "aligned.csv", "average.csv", "loss_history.csv", "metrics.json",
                          "plot.svg"}) {
        CHECK(fs::exists(fs::path(out) / f));
        CHECK(r.out.find(f) != std::string::npos);
    }
    // Z defaults to N * max T = 3 * 6
    std::ifstream w(fs::path(out) / "warpings.csv");
    std::string line;
    int rows = -1;
    while (std::getline(w, line)) ++rows;
    CHECK(rows == 19);
}

TEST_CASE("align input errors exit with 2") {
    const auto missing = (dir() / "does_not_exist.csv").string();
    auto r = call({"align", "--input", missing, "--out", (dir() / "x").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("does_not_exist.csv") != std::string::npos);

    r = call({"align", "--input", small_data(), "--updates", "0", "--out", (dir() / "x").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("updates must be >= 1") != std::string::npos);

    r = call({"align", "--input", small_data(), "--bogus"});
    CHECK(r.code == 2);

    r = call({"align", "--input", small_data(), "--label", "2", "--out", (dir() / "x").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("fewer than two series") != std::string::npos);

    CHECK(call({}).code == 2);
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("align reports divergence with exit 1") {
    const auto data = write_file("huge.csv", "1,1e200,-1e200,1e200\n1,-1e200,1e200,0\n");
    const auto r = call({"align", "--input", data, "--updates", "2", "--out", (dir() / "huge").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("diverge") != std::string::npos);
}

TEST_CASE("dtw subcommand") {
    const auto a = write_file("a.txt", "0\n1\n2\n");
    const auto b = write_file("b.txt", "1\n");
    const auto c = write_file("c.txt", "3\n");
    const auto d = write_file("d.txt", "0,0,1\n");
    const auto e = write_file("e.txt", "0,1\n");
    CHECK(call({"dtw", a, a}).out == "0\n");
    CHECK(call({"dtw", b, c}).out == "4\n");
    const auto path = (dir() / "path.csv").string();
    const auto r = call({"dtw", d, e, "--path", path});
    CHECK(r.code == 0);
    CHECK(r.out == "0\n");
    CHECK(slurp(path).rfind("i,j\n0,0\n", 0) == 0);
    CHECK(call({"dtw", a}).code == 2);
    CHECK(call({"dtw", a, (dir() / "none.txt").string()}).code == 2);
}

TEST_CASE("metrics and average recompute from saved warpings") {
    const auto data = small_data();
    const auto run = dir() / "run_metrics";
    fs::remove_all(run);
    REQUIRE(call({"align", "--input", data, "--label", "1", "--updates", "4", "--out", run.string()}).code == 0);
    const auto warpings = (run / "warpings.csv").string();

    const auto again = dir() / "again";
    fs::remove_all(again);
    auto r = call({"metrics", "--input", data, "--label", "1", "--warpings", warpings, "--out", again.string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(slurp(again / "metrics.json") == slurp(run / "metrics.json"));

    r = call({"metrics", "--input", data, "--label", "1", "--warpings", warpings});
    CHECK(r.out == slurp(run / "metrics.json"));

    r = call({"average", "--input", data, "--label", "1", "--warpings", warpings, "--out", again.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(again / "average.csv") == slurp(run / "average.csv"));

    // wrong series count
    const auto wide = write_file("wide.csv", "1,0,1,3,1,0,0\n1,0,0,1,3,1,0\n1,0,0,0,1,3,1,0\n1,1,2,3,4,5,6,7\n");
    r = call({"metrics", "--input", wide, "--label", "1", "--warpings", warpings});
    CHECK(r.code == 2);
    CHECK(r.err.find("3 series x 19 rows") != std::string::npos);
    CHECK(r.err.find("4 series") != std::string::npos);

    // truncated table
    std::string text = slurp(warpings);
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    const auto cut = write_file("cut.csv", text);
    r = call({"metrics", "--input", data, "--label", "1", "--warpings", cut});
    CHECK(r.code == 2);
    CHECK(r.err.find("row count mismatch") != std::string::npos);
}

TEST_CASE("config file values yield to flags") {
    const auto data = small_data();
    const auto cfg = write_file("run.ini", "[align]\nupdates = 3\nlabel = 1\n");
    const auto out = dir() / "cfg";
    fs::remove_all(out);
    auto r = call({"align", "--config", cfg, "--input", data, "--out", out.string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "metrics.json").find("\"updates\": 3") != std::string::npos);

    r = call({"align", "--config", cfg, "--input", data, "--updates", "2", "--out", out.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(out / "metrics.json").find("\"updates\": 2") != std::string::npos);
}
