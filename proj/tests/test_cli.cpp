#include "oracles.hpp"
#include "shp/cli.hpp"
#include "shp/metrics.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace shp;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "shp");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Scratch {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("shp_cli_test_" + std::to_string(::getpid()));
    Scratch() {
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "six.hgr") << "3 6\n1 2 6\n1 2 3 4\n4 5 6\n";
    }
    ~Scratch() { std::filesystem::remove_all(dir); }
    std::string operator()(const std::string &name) const { return (dir / name).string(); }
};

} // namespace

TEST_CASE("partition writes partition, report and trace") {
    Scratch s;
    const Run r = cli({"partition", "--input", s("six.hgr"), "--k", "2", "--output", s("p.tsv"), "--report",
                       s("r.json"), "--trace", s("t.csv")});
    REQUIRE(r.code == kExitOk);
    const auto report = report_from_json(nlohmann::json::parse(slurp(s("r.json"))));
    CHECK(report.k == 2);
    CHECK(report.average_fanout <= 2.0);
    CHECK(report.bucket_sizes == std::vector<std::uint32_t>{3, 3});
    const std::string trace = slurp(s("t.csv"));
    CHECK(trace.rfind("level,iteration,objective,exactFanout,movedFraction,phase2Payload,elapsedMs\n", 0) == 0);
    CHECK(slurp(s("p.tsv")).size() > 0);
}

TEST_CASE("six-vertex example with default settings reaches 5/3 for some seed") {
    Scratch s;
    double best = 10;
    for (int seed = 1; seed <= 16; ++seed) {
        const Run r = cli({"partition", "--input", s("six.hgr"), "--k", "2", "--seed", std::to_string(seed)});
        REQUIRE(r.code == kExitOk);
        best = std::min(best, report_from_json(nlohmann::json::parse(r.out)).average_fanout);
    }
    CHECK(best <= 5.0 / 3 + 1e-12);
}

TEST_CASE("evaluate reproduces the partition report exactly") {
    Scratch s;
    REQUIRE(cli({"generate", "--groups", "4", "--vertices-per-group", "30", "--queries-per-group", "60", "--noise",
                 "0.1", "--output", s("planted.tsv.gz")})
                .code == kExitOk);
    REQUIRE(cli({"partition", "--input", s("planted.tsv.gz"), "-k", "4", "--mode", "recursive", "--output",
                 s("p.tsv"), "--report", s("r.json"), "-p", "0.4"})
                .code == kExitOk);
    const Run e = cli({"evaluate", "--input", s("planted.tsv.gz"), "--partition", s("p.tsv"), "-p", "0.4", "-k", "4"});
    REQUIRE(e.code == kExitOk);
    CHECK(e.out == slurp(s("r.json")));

    const Run p1 = cli({"evaluate", "--input", s("planted.tsv.gz"), "--partition", s("p.tsv"), "-p", "1"});
    const auto rep = report_from_json(nlohmann::json::parse(p1.out));
    CHECK(rep.p_fanout == rep.average_fanout);
}

TEST_CASE("identical configuration gives byte-identical partitions") {
    Scratch s;
    REQUIRE(cli({"generate", "--output", s("g.tsv"), "--seed", "3"}).code == kExitOk);
    for (const char *name : {"a.tsv", "b.tsv"}) {
        REQUIRE(cli({"partition", "--input", s("g.tsv"), "-k", "2", "--seed", "5", "--workers", "2", "--output",
                     s(name), "--report", s("r.json")})
                    .code == kExitOk);
    }
    CHECK(slurp(s("a.tsv")) == slurp(s("b.tsv")));
}

TEST_CASE("a dominating penalty returns the initial partition") {
    Scratch s;
    REQUIRE(cli({"generate", "--output", s("g.tsv"), "--noise", "0.3"}).code == kExitOk);
    REQUIRE(cli({"partition", "--input", s("g.tsv"), "-k", "2", "--max-iterations", "1", "--output", s("init.tsv"),
                 "--report", s("r.json")})
                .code == kExitOk);
    REQUIRE(cli({"partition", "--input", s("g.tsv"), "-k", "2", "--initial-partition", s("init.tsv"), "--penalty",
                 "1e9", "--output", s("out.tsv"), "--report", s("r.json")})
                .code == kExitOk);
    CHECK(slurp(s("init.tsv")) == slurp(s("out.tsv")));
    CHECK(cli({"partition", "--input", s("g.tsv"), "-k", "2", "--mode", "recursive", "--initial-partition",
               s("init.tsv")})
              .code == kExitValidation);
}

TEST_CASE("failures exit nonzero without partial outputs") {
    Scratch s;
    const Run missing = cli({"partition", "--input", s("absent.hgr"), "-k", "2", "--output", s("p.tsv"), "--trace",
                             s("t.csv")});
    CHECK(missing.code == kExitIo);
    CHECK(!missing.err.empty());
    CHECK(!std::filesystem::exists(s("p.tsv")));
    CHECK(!std::filesystem::exists(s("t.csv")));

    CHECK(cli({"partition", "--input", s("six.hgr"), "-k", "7"}).code == kExitValidation);
    CHECK(cli({"partition", "--input", s("six.hgr"), "-k", "2", "-p", "0"}).code == kExitValidation);
    CHECK(cli({"partition", "--input", s("six.hgr"), "-k", "2", "--mode", "sideways"}).code == kExitValidation);
    CHECK(cli({"partition", "--input", s("six.hgr"), "-k", "2", "--report", s("no/dir/r.json"), "--output",
               s("p.tsv")})
              .code == kExitIo);
    CHECK(!std::filesystem::exists(s("p.tsv")));
    std::ofstream(s("bad.hgr")) << "2 3 1\n1 2\n2 3\n";
    const Run bad = cli({"partition", "--input", s("bad.hgr"), "-k", "2"});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.err.find("line 1") != std::string::npos);

    std::ofstream(s("short.tsv")) << "0\t0\n1\t1\n";
    CHECK(cli({"evaluate", "--input", s("six.hgr"), "--partition", s("short.tsv")}).code == kExitValidation);
    CHECK(cli({"frobnicate"}).code == kExitValidation);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("bench emits one row per configuration") {
    Scratch s;
    const Run r = cli({"bench", "--planted", "2,50,100,3,0.05,7", "--ps", "0.1", "0.5", "0.9", "--ks", "2", "4",
                       "--modes", "direct", "recursive", "--output", s("b.csv")});
    REQUIRE(r.code == kExitOk);
    const std::string csv = slurp(s("b.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2 * 2);
    CHECK(csv.rfind("instance,numQueries,numData,numEdges,k,p,mode,seed,averageFanout", 0) == 0);
    CHECK(csv.find("\n\"planted:2,50,100,3,0.05,7\",") != std::string::npos);
    CHECK(cli({"bench"}).code == kExitValidation);
}
