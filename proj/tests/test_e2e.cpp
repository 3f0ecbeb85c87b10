// Exit-code contract of the command-line tool, run as a child process.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "test_helpers.hpp"

using testutil::fresh_dir;
using testutil::slurp;
using testutil::spit;

namespace {

struct Outcome {
    int code;
    std::string err;
};

Outcome run_cli(const std::string& args, const std::filesystem::path& dir) {
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string(FRONTLAB_CLI) + " " + args + " >/dev/null 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

const char* kLinear = R"([model]
nonlinear = false
[weights]
alpha = 0.25
[grid]
L = 50
N = 512
[time]
T = 20
dt = 0.1
[perturbation]
center = 20
width = 2
)";

}  // namespace

TEST(ExitCodes, Matrix) {
    const auto dir = fresh_dir("e2e");
    const auto out = (dir / "out").string();
    spit(dir / "pass.ini", kLinear);
    spit(dir / "fail.ini", std::string(kLinear) + "[verify]\nrate_floor = 5\n");
    spit(dir / "malformed.ini", "[model]\nkappa = 1\nthis line is broken\n");
    spit(dir / "badvalue.ini", "[model]\nkappa = -2\n");
    spit(dir / "unknown.ini", "[model]\nkapa = 1\n");
    spit(dir / "nobracket.ini", "[model]\nepsilon = 0\n[front]\nmode = shoot\nc_min = 1\nc_max = 2\nscan_count = 3\n");
    spit(dir / "eps.ini", "[model]\nepsilon = 0.5\n[front]\nmode = shoot\n");
    spit(dir / "sweep.ini", std::string(kLinear) + "[sweep]\nparameter = alpha\nvalues = 0.2, 0.7\n");

    struct Case {
        std::string args;
        int code;
    };
    const std::vector<Case> cases{
        {"verify --config " + (dir / "pass.ini").string(), 0},
        {"simulate --config " + (dir / "pass.ini").string(), 0},
        {"spectrum --config " + (dir / "pass.ini").string() + " --seed 7", 0},
        {"sweep --config " + (dir / "sweep.ini").string(), 0},
        {"verify --config " + (dir / "fail.ini").string(), 1},
        {"front --config " + (dir / "nobracket.ini").string(), 1},
        {"front --config " + (dir / "eps.ini").string(), 2},
        {"verify --config " + (dir / "malformed.ini").string(), 2},
        {"spectrum --config " + (dir / "badvalue.ini").string(), 2},
        {"spectrum --config " + (dir / "unknown.ini").string(), 2},
        {"verify --config " + (dir / "missing.ini").string(), 2},
        {"verify", 2},
        {"explode --config " + (dir / "pass.ini").string(), 2},
        {"", 2},
    };
    for (const auto& c : cases) {
        const Outcome o = run_cli(c.args + " --out " + out, dir);
        EXPECT_EQ(o.code, c.code) << c.args << "\n" << o.err;
    }
}

TEST(ExitCodes, MalformedConfigNamesTheLine) {
    const auto dir = fresh_dir("e2e_line");
    spit(dir / "bad.ini", "[model]\nkappa = 1\n\nthis line is broken\n");
    const Outcome o = run_cli("verify --config " + (dir / "bad.ini").string() + " --out " + (dir / "o").string(), dir);
    EXPECT_EQ(o.code, 2);
    EXPECT_NE(o.err.find("bad.ini:4"), std::string::npos) << o.err;
}

TEST(ExitCodes, SeedOverrideIsRecorded) {
    const auto dir = fresh_dir("e2e_seed");
    spit(dir / "s.ini", "[model]\nkind = exo_endo\n[weights]\nalpha = 0.3\n");
    const auto out = dir / "o";
    ASSERT_EQ(run_cli("spectrum --config " + (dir / "s.ini").string() + " --seed 99 --out " + out.string(), dir).code, 0);
    EXPECT_NE(slurp(out / "summary.txt").find("seed: 99"), std::string::npos);
}
