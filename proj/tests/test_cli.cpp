// End-to-end tests of the command-line tool. The binary path and the sample
// directory come from the environment (set by CMake for ctest runs).
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string cli_path() {
    const char* env = std::getenv("NUPBR_CLI");
    REQUIRE(env != nullptr);
    return env;
}

std::string samples_dir() {
    const char* env = std::getenv("NUPBR_SAMPLES");
    REQUIRE(env != nullptr);
    return env;
}

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    while (std::size_t n = fread(buffer, 1, sizeof buffer, pipe)) result.output.append(buffer, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("gen is deterministic and emits valid models") {
    const std::string out1 = std::string(std::tmpnam(nullptr)) + ".json";
    const std::string out2 = std::string(std::tmpnam(nullptr)) + ".json";
    REQUIRE(run("gen --seed 42 --outcomes 8 --horizon 3 -o " + out1).exit_code == 0);
    REQUIRE(run("gen --seed 42 --outcomes 8 --horizon 3 -o " + out2).exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));

    // generated file feeds straight back into check
    const RunResult check = run("check " + out1 + " --filtration F");
    CHECK((check.exit_code == 0 || check.exit_code == 3));
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("check: worked model under G, stopped") {
    const RunResult r = run("check " + samples_dir() + "/e1.json --filtration G --mode stopped");
    CHECK(r.exit_code == 3);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["verdict"]["nupbr"] == false);
    CHECK(j["verdict"]["witness"]["t"] == 1);
    CHECK(j["verdict"]["witness"]["atom"] == nlohmann::json::array({0}));

    const RunResult ok = run("check " + samples_dir() + "/e1.json --filtration F");
    CHECK(ok.exit_code == 0);
    const auto jo = nlohmann::json::parse(ok.output);
    CHECK(jo["verdict"]["nupbr"] == true);
}

TEST_CASE("check: one-jump measures") {
    const RunResult r = run("check " + samples_dir() +
                            "/e1.json --filtration F --measure QTILDE --at 1");
    CHECK(r.exit_code == 3);  // the four-way equivalence: fails under the tilt too

    const RunResult bad_at = run("check " + samples_dir() +
                                 "/e1.json --filtration F --measure QTILDE --at 7");
    CHECK(bad_at.exit_code == 2);
}

TEST_CASE("check: invalid inputs exit 2 with a located message") {
    const std::string broken = std::string(std::tmpnam(nullptr)) + ".json";
    {
        std::ofstream out(broken);
        out << R"({"schema":1,"probs":["1/2","0.5"],"filtration":[[[0,1]]],"assets":[],"tau":[0,0]})";
    }
    const RunResult r = run("check " + broken);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("probs[1]") != std::string::npos);
    std::remove(broken.c_str());

    const RunResult missing = run("check /nonexistent.json");
    CHECK(missing.exit_code == 2);

    const RunResult never_after =
        run("check " + samples_dir() + "/never.json --filtration G --mode after");
    CHECK(never_after.exit_code == 2);
    CHECK(never_after.output.find("infinite") != std::string::npos);
}

TEST_CASE("deflate: both sides on the worked model; dishonest after-side rejected") {
    const RunResult before = run("deflate " + samples_dir() + "/e1.json --side before");
    REQUIRE(before.exit_code == 0);
    const auto j = nlohmann::json::parse(before.output);
    CHECK(j["checks"]["martingale"] == true);
    CHECK(j["checks"]["jump_ratio"] == true);
    CHECK(j["tables"]["ltilde"].size() == 2);

    // tau = (1, 0) is honest, so the after side works on this model
    const RunResult after_ok = run("deflate " + samples_dir() + "/e1.json --side after");
    CHECK(after_ok.exit_code == 0);

    const RunResult dishonest = run("deflate " + samples_dir() + "/dishonest.json --side after");
    CHECK(dishonest.exit_code == 2);
    CHECK(dishonest.output.find("honest") != std::string::npos);
}

TEST_CASE("theorems: deterministic reports, independent of jobs") {
    const std::string flags = " --suite stopped-single-jump --models 6 --seed 5 --outcomes 6";
    const RunResult a = run("theorems" + flags);
    const RunResult b = run("theorems" + flags);
    const RunResult c = run("theorems" + flags + " --jobs 3");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output == c.output);
    const auto j = nlohmann::json::parse(a.output);
    CHECK(j["total_disagreements"] == 0);
    CHECK(j["suites"][0]["models"] == 6);

    const RunResult empty = run("theorems --suite after-thin --models 0");
    CHECK(empty.exit_code == 0);

    const RunResult unknown = run("theorems --suite nonsense --models 1");
    CHECK(unknown.exit_code == 2);
}
