#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("symidx_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
    fs::path p = workdir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

Result run(const std::string& args, const std::string& stdin_text = "") {
    const fs::path out = workdir() / "stdout", err = workdir() / "stderr", in = workdir() / "stdin";
    std::ofstream(in, std::ios::binary) << stdin_text;
    const std::string cmd = std::string(SYMIDX_BIN) + " " + args + " <" + in.string() + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

const char* kRotationThird = R"([{"label": "x", "loop_index": 0, "rotations": [{"rational": [1, 3]}]}])";
const char* kIrrational = R"({"orbits": [{"label": "x", "loop_index": 0, "rotations": [{"irrational": 0.41421356237309515}]}]})";
const char* kAcyclic = R"({"generators": [{"id": "a", "degree": 0, "filtration": 0}, {"id": "b", "degree": 1, "filtration": 1}],
                          "boundary": {"entries": [[0, 1, "1"]]}})";
const char* kRotationPath = R"({"m": 1, "steps": 800, "generator": [{"t": 0, "H": [[1.8849555921538759, 0], [0, 1.8849555921538759]]},
                                                                      {"t": 1, "H": [[1.8849555921538759, 0], [0, 1.8849555921538759]]}]})";

}  // namespace

TEST_CASE("index on a generated rotation path") {
    auto p = write("rot.json", kRotationPath);
    auto r = run("index --path " + p.string());
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["report"]["mean_index"].get<double>() == doctest::Approx(0.6));
    CHECK(j["report"]["cz_index"] == 1);
    CHECK(j["manifest"]["inputs"][0]["fnv1a64"].get<std::string>().size() == 16);
}

TEST_CASE("index on coarse samples is a numerical failure") {
    auto p = write("coarse.json", R"({"m": 1, "samples": [{"t": 0, "matrix": [[1, 0], [0, 1]]},
        {"t": 1, "matrix": [[-0.4161468365471424, -0.9092974268256817], [0.9092974268256817, -0.4161468365471424]]}]})");
    auto r = run("index --path " + p.string());
    CHECK(r.code == 4);
    CHECK(r.err.find("refine") != std::string::npos);
}

TEST_CASE("iterate reads models from stdin") {
    auto r = run("iterate --orbits - --k 1..3", kRotationThird);
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    auto it = j["orbits"][0]["iterates"];
    CHECK(it[2]["mu_minus"] == 1);
    CHECK(it[2]["mu_plus"] == 3);
    CHECK(it[1]["mu_minus"] == 1);
}

TEST_CASE("recur: success, exhaustion and a rejected certificate") {
    auto m = write("irr.json", kIrrational);
    auto ok = run("recur --orbits " + m.string() + " --count 3");
    REQUIRE(ok.code == 0);
    auto j = json::parse(ok.out);
    CHECK(j["certificates"].size() == 3);
    CHECK(j["certificates"][0]["d"] == 2);
    CHECK(j["verified"] == true);

    auto ex = run("recur --orbits " + m.string() + " --eta 0.01 --kmax 5");
    CHECK(ex.code == 2);

    auto good = write("good.json", R"({"d": 2, "k": [2]})");
    CHECK(run("recur --orbits " + m.string() + " --certificate " + good.string()).code == 0);
    auto bad = write("bad.json", R"({"d": 3, "k": [2]})");
    auto br = run("recur --orbits " + m.string() + " --certificate " + bad.string());
    CHECK(br.code == 3);
    CHECK(json::parse(br.out)["verified"] == false);
}

TEST_CASE("collapse") {
    auto c = write("pair.json", kAcyclic);
    auto r = run("collapse --complex " + c.string() + " --r0 1");
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["consistent"] == true);
}

TEST_CASE("shdim") {
    auto r = run("shdim --manifold stsn --n 3 --range 1..10 --check");
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["check"]["pass"] == true);
    CHECK(run("shdim --manifold stsn --n 2 --range 1..10").code == 1);
}

TEST_CASE("mult subcommands") {
    auto b = run("mult bound --kind sphere --n 4 --q 5");
    REQUIRE(b.code == 0);
    CHECK(json::parse(b.out)["bound"]["r"] == 3);

    auto e = run("mult ellipsoid --radii-sq 1,1.4142135623730951 --count 200 --check-carriers --check-limit");
    CHECK(e.code == 0);

    auto models = run("mult ellipsoid --radii-sq 1,1.4142135623730951,2.7320508075688772 --count 5");
    REQUIRE(models.code == 0);
    auto mj = json::parse(models.out);
    REQUIRE(mj.contains("models"));
    auto f = write("ell3.json", json{{"orbits", mj["models"]}}.dump());
    auto w = run("mult witness --orbits " + f.string() + " --kind sphere --n 3 --nondeg");
    CHECK(w.code == 0);
    CHECK(json::parse(w.out)["bound"]["witness"]["status"] == "consistent");

    auto slow = write("slow.json", R"([{"rotations": [{"irrational": 0.3}, {"irrational": 0.41}]}])");
    CHECK(run("mult witness --orbits " + slow.string() + " --kind sphere --n 3").code == 1);
}

TEST_CASE("input errors") {
    auto r = run("iterate --orbits - --k 1..2", "[{\"loop_index\": 2,, }]");
    CHECK(r.code == 1);
    CHECK(r.err.find("byte") != std::string::npos);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("shdim --manifold sphere --n 3 --range 1..4 --bogus").code == 1);
    CHECK(run("iterate --orbits /nonexistent/file.json --k 1..2").code == 1);
}

TEST_CASE("determinism and output files") {
    auto m = write("irr2.json", kIrrational);
    // The manifest records the command line, so both runs write to the same path.
    const fs::path a = workdir() / "a.json";
    REQUIRE(run("recur --orbits " + m.string() + " --count 4 --output " + a.string()).code == 0);
    const std::string first = slurp(a);
    REQUIRE(run("recur --orbits " + m.string() + " --count 4 --output " + a.string()).code == 0);
    CHECK(first == slurp(a));
    CHECK(!first.empty());
    // The serial scan writes the same certificates.
    auto s = run("recur --orbits " + m.string() + " --count 4 --serial");
    auto ja = json::parse(slurp(a)), js = json::parse(s.out);
    CHECK(ja["certificates"] == js["certificates"]);
}

TEST_CASE("text and json carry the same values") {
    auto m = write("irr3.json", kIrrational);
    auto j = run("recur --orbits " + m.string() + " --count 2");
    auto t = run("recur --orbits " + m.string() + " --count 2 --format text");
    REQUIRE(j.code == 0);
    REQUIRE(t.code == 0);
    auto js = json::parse(j.out);
    std::map<std::string, std::string> lines;
    std::istringstream in(t.out);
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) lines[line.substr(0, eq)] = line.substr(eq + 3);
    }
    CHECK(lines.at("certificates[0].d") == js["certificates"][0]["d"].dump());
    CHECK(lines.at("certificates[1].k") == js["certificates"][1]["k"].dump());
    CHECK(lines.at("epsilon") == js["epsilon"].dump());
    CHECK(lines.at("certificates[0].mean_gaps") == js["certificates"][0]["mean_gaps"].dump());
}

TEST_CASE("tolerance from the environment") {
    const std::string cmd = std::string("SYMIDX_TOL=1e-7 ") + SYMIDX_BIN + " shdim --manifold sphere --n 2 --range 0..4";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    CHECK(pclose(p) == 0);
    CHECK(json::parse(out)["manifest"]["tolerances"]["symplectic"].get<double>() == doctest::Approx(1e-7));
}
