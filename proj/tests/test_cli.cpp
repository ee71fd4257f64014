#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SYMBRIDGE_CLI_PATH;

struct Scratch {
    fs::path dir;
    Scratch(const std::string& tag) {
        dir = fs::temp_directory_path() / ("symbridge_test_" + tag);
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

int run(const std::string& args) {
    int rc = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("help and usage errors") {
    CHECK(run("--help") == 0);
    CHECK(run("bogus-subcommand") == 1);
    CHECK(run("sample --beta 1 --box 0:1") == 1);  // missing required --n
    CHECK(run("verify --suite not-a-suite") == 1);
}

TEST_CASE("trace writes the spec CSV and meets the deviation bound") {
    Scratch s("trace");
    int rc = run("--out-dir " + s.dir.string() +
                 " trace --beta 1 --box 0:1 --grid 400 --potential zero --n-max 200");
    CHECK(rc == 0);
    auto rows = lines_of(slurp(s.dir / "trace.csv"));
    CHECK(rows.front() == "N,logZ,a_N,target,deviation");
    REQUIRE(rows.size() == 201);
    // final deviation column < 0.05
    auto last = rows.back();
    auto pos = last.rfind(',');
    double dev = std::stod(last.substr(pos + 1));
    CHECK(dev < 0.05);
    CHECK(fs::exists(s.dir / "trace.manifest.json"));

    // quadratic trap variant in JSON format
    rc = run("--out-dir " + s.dir.string() +
             " trace --beta 1 --box 0:1 --grid 200 --potential quadratic:100 "
             "--n-max 64 --out json --prefix trap");
    CHECK(rc == 0);
    json rep = json::parse(slurp(s.dir / "trap.json"));
    CHECK(rep.contains("beta_lambda_W"));
    CHECK(rep["deviation"].back().get<double>() < 0.05);
}

TEST_CASE("sample output is reproducible and well formed") {
    Scratch s("sample");
    std::string base = "--seed 71 --out-dir " + s.dir.string() +
                       " sample --n 32 --beta 0.5 --box 0:1 --steps 8 --ensembles 3 "
                       "--grid 20 --paths";
    CHECK(run(base) == 0);
    std::string first = slurp(s.dir / "sample.jsonl");
    std::string first_paths = slurp(s.dir / "sample.paths.bin");

    auto rows = lines_of(first);
    REQUIRE(rows.size() == 3);
    json line = json::parse(rows[0]);
    auto sigma = line["sigma"].get<std::vector<int>>();
    REQUIRE(sigma.size() == 32);
    std::vector<bool> seen(32, false);
    for (int v : sigma) {
        REQUIRE(v >= 0);
        REQUIRE(v < 32);
        seen[v] = true;
    }
    for (bool b : seen) CHECK(b);
    CHECK(line["occupation"].size() == 20);

    json sidecar = json::parse(slurp(s.dir / "sample.paths.json"));
    auto shape = sidecar["shape"].get<std::vector<long long>>();
    CHECK(shape == std::vector<long long>{3, 32, 9, 1});
    CHECK(first_paths.size() == 3ull * 32 * 9 * 1 * 8);

    // byte-identical rerun with the same seed; different with another seed
    CHECK(run(base) == 0);
    CHECK(slurp(s.dir / "sample.jsonl") == first);
    CHECK(slurp(s.dir / "sample.paths.bin") == first_paths);
    CHECK(run("--seed 72 --out-dir " + s.dir.string() +
              " sample --n 32 --beta 0.5 --box 0:1 --steps 8 --ensembles 3 --grid 20") ==
          0);
    CHECK(slurp(s.dir / "sample.jsonl") != first);
}

TEST_CASE("sample accepts an atomic initial measure") {
    Scratch s("atoms");
    json atoms;
    atoms["points"] = {{0.25}, {0.75}};
    atoms["weights"] = {1.0, 3.0};
    std::ofstream(s.dir / "atoms.json") << atoms.dump();
    CHECK(run("--seed 3 --out-dir " + s.dir.string() + " sample --n 200 --beta 0.3 "
              "--box 0:1 --steps 2 --atoms " + (s.dir / "atoms.json").string()) == 0);
    json line = json::parse(lines_of(slurp(s.dir / "sample.jsonl"))[0]);
    int hi = 0;
    for (const auto& e : line["endpoints"]) {
        double v = e[0].get<double>();
        CHECK((v == 0.25 || v == 0.75));
        hi += v == 0.75;
    }
    CHECK(hi > 100);  // weight 3:1 favours the upper atom
    CHECK(hi < 200);
}

TEST_CASE("mixture endpoint histogram equals eta exactly") {
    Scratch s("mixture");
    json eta;
    eta["sigma"] = 2;
    eta["entries"] = {{0.25, 0.25}, {0.25, 0.25}};
    std::ofstream(s.dir / "eta.json") << eta.dump();
    int rc = run("--out-dir " + s.dir.string() + " mixture --eta " +
                 (s.dir / "eta.json").string() +
                 " --n 64 --beta 0.4 --box 0:1 --cells 2 --steps 4 --ensembles 2");
    CHECK(rc == 0);
    json pairs = json::parse(slurp(s.dir / "mixture.pairs.json"));
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(pairs["entries"][r][c].get<double>() == 0.25);
}

TEST_CASE("rate solves a small saddle job end to end") {
    Scratch s("rate");
    json job;
    job["mode"] = "canonical";
    job["beta"] = 1.0;
    job["grid"] = {{"dim", 1}, {"lo", {0.0}}, {"hi", {1.0}}, {"n", 60}};
    std::vector<double> p(60);
    for (int i = 0; i < 60; ++i) {
        double x = (i + 1) / 61.0;
        double sn = std::sin(3.14159265358979324 * x);
        p[i] = 2.0 * sn * sn;
    }
    job["p"] = p;
    job["cells"] = {6};
    job["steps"] = 8;
    std::ofstream(s.dir / "job.json") << job.dump();

    int rc = run("--out-dir " + s.dir.string() + " rate --job " +
                 (s.dir / "job.json").string() + " --track " +
                 (s.dir / "track.csv").string());
    CHECK(rc == 0);
    json res = json::parse(slurp(s.dir / "rate.result.json"));
    double value = res["value"].get<double>();
    CHECK(std::fabs(value - 9.8696) / 9.8696 < 0.05);
    CHECK(res["diagnostics"]["marginal_gap"].get<double>() < 1e-8);
    CHECK(lines_of(slurp(s.dir / "track.csv")).size() >= 2);

    // physics parameters must be explicit
    json bad = job;
    bad.erase("mode");
    std::ofstream(s.dir / "bad.json") << bad.dump();
    CHECK(run("--out-dir " + s.dir.string() + " rate --job " +
              (s.dir / "bad.json").string()) == 1);

    // starved solver budget fails with exit 2 and a history file
    json starved = job;
    starved["tolerances"] = {{"max_outer", 1}, {"f_tol", 1e-14}};
    // make the instance genuinely need iterations
    for (int i = 0; i < 60; ++i) {
        double x = (i + 1) / 61.0;
        double sn = std::sin(3.14159265358979324 * x);
        double s2 = std::sin(2 * 3.14159265358979324 * x);
        p[i] = 2.0 * sn * sn + 1.5 * s2 * s2;
    }
    starved["p"] = p;
    std::ofstream(s.dir / "starved.json") << starved.dump();
    CHECK(run("--out-dir " + s.dir.string() + " rate --prefix starved --job " +
              (s.dir / "starved.json").string()) == 2);
    CHECK(fs::exists(s.dir / "starved.history.csv"));
}

TEST_CASE("verify counting suite passes and reports json") {
    Scratch s("verify");
    int rc = run("--out-dir " + s.dir.string() + " verify --suite counting --out " +
                 (s.dir / "report.json").string());
    CHECK(rc == 0);
    json rep = json::parse(slurp(s.dir / "report.json"));
    CHECK(rep["all_pass"].get<bool>());
    for (const auto& c : rep["checks"]) CHECK(c["pass"].get<bool>());
}

TEST_CASE("count subcommand prints exact big integers") {
    Scratch s("count");
    json eta;
    eta["sigma"] = 2;
    eta["entries"] = {{1.0 / 3.0, 1.0 / 3.0}, {1.0 / 3.0, 0.0}};
    std::ofstream(s.dir / "eta.json") << eta.dump();
    int rc = std::system((kCli + " count --eta " + (s.dir / "eta.json").string() +
                          " --n 3 --brute > " + (s.dir / "out.json").string() + " 2>&1")
                             .c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    json out = json::parse(slurp(s.dir / "out.json"));
    CHECK(out["count_total"].get<std::string>() == "12");
    CHECK(out["brute_total"].get<std::string>() == "12");
}

TEST_CASE("sample output does not depend on the worker count") {
    Scratch s("threads");
    std::string tail = " sample --n 64 --beta 0.3 --box 0:1 --steps 4 --ensembles 8";
    CHECK(run("--seed 5 --threads 1 --out-dir " + s.dir.string() + tail) == 0);
    std::string one = slurp(s.dir / "sample.jsonl");
    CHECK(run("--seed 5 --threads 4 --out-dir " + s.dir.string() + tail) == 0);
    CHECK(slurp(s.dir / "sample.jsonl") == one);
}

TEST_CASE("manifest rerun reproduces outputs byte-identically") {
    Scratch s("rerun");
    CHECK(run("--seed 99 --out-dir " + s.dir.string() +
              " sample --n 16 --beta 0.4 --box 0:1 --steps 4 --ensembles 2 --paths") ==
          0);
    std::string jsonl = slurp(s.dir / "sample.jsonl");
    std::string bin = slurp(s.dir / "sample.paths.bin");
    fs::remove(s.dir / "sample.jsonl");
    fs::remove(s.dir / "sample.paths.bin");
    CHECK(run("rerun --manifest " + (s.dir / "sample.manifest.json").string()) == 0);
    CHECK(slurp(s.dir / "sample.jsonl") == jsonl);
    CHECK(slurp(s.dir / "sample.paths.bin") == bin);
}

TEST_CASE("trace accepts a potential loaded from a grid-function file") {
    Scratch s("potfile");
    json pot;
    pot["grid"] = {{"dim", 1}, {"lo", {0.0}}, {"hi", {1.0}}, {"n", 120}};
    std::vector<double> w(120);
    for (int i = 0; i < 120; ++i) {
        double x = (i + 1) / 121.0;
        w[i] = 40.0 * (x - 0.5) * (x - 0.5);
    }
    pot["values"] = w;
    std::ofstream(s.dir / "pot.json") << pot.dump();
    int rc = run("--out-dir " + s.dir.string() + " trace --beta 1 --box 0:1 --grid 120 "
                 "--potential " + (s.dir / "pot.json").string() +
                 " --n-max 40 --out json");
    CHECK(rc == 0);
    json rep = json::parse(slurp(s.dir / "trace.json"));
    CHECK(rep["spectrum_source"] == "finite-difference");
    CHECK(rep["deviation"].back().get<double>() < 0.05);
}

TEST_CASE("environment overrides for output directory") {
    Scratch s("env");
    std::string cmd = "SYMBRIDGE_OUT_DIR=" + s.dir.string() + " " + kCli +
                      " count --stirling 10 > " + (s.dir / "stir.json").string();
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    json out = json::parse(slurp(s.dir / "stir.json"));
    CHECK(out["stirling"]["within"].get<bool>());
}

TEST_SUITE_END();
