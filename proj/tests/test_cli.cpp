#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = robinlab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Cli, SpectrumOfDisc)
{
    const Result r = run({"spectrum", "--domain", "ball", "--dim", "2", "--radius", "1", "--kmax", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 12u);
    EXPECT_EQ(l[0], "index,degree,mu,residual");
    EXPECT_EQ(l[1].substr(0, 6), "1,0,0,");
    EXPECT_EQ(l[11].substr(0, 7), "11,5,5,");
}

TEST(Cli, AnnulusEnergyPoles)
{
    const Result r = run({"energy", "--domain", "annulus", "--dim", "3", "--radius", "1", "--kappa", "0.5",
                          "--alpha-grid", "0.1:8:200", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["poles"], (nlohmann::json{0.0, 5.0}));
    EXPECT_EQ(j["rows"].size(), 200u);
    EXPECT_NE(r.err.find("poles {0, 5}"), std::string::npos);
}

TEST(Cli, GridExclusionIsLogged)
{
    const Result r = run({"energy", "--domain", "annulus", "--dim", "3", "--kappa", "0.5", "--alpha-grid", "4:6:3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("excluded alpha=5"), std::string::npos);
    EXPECT_EQ(lines(r.out).size(), 3u);   // header + two rows
}

TEST(Cli, JsonMirrorsCsv)
{
    const std::vector<std::string> base = {"energy", "--domain", "ball", "--dim", "3", "--alpha-grid", "0.5:2:4"};
    const Result csv = run(base);
    std::vector<std::string> with_json = base;
    with_json.push_back("--json");
    const Result js = run(with_json);
    ASSERT_EQ(csv.code, 0);
    ASSERT_EQ(js.code, 0);
    const auto rows = nlohmann::json::parse(js.out)["rows"];
    const auto l = lines(csv.out);
    ASSERT_EQ(rows.size() + 1, l.size());
    EXPECT_EQ(rows[0]["alpha"].get<double>(), 0.5);
}

TEST(Cli, SecondVariationFdCheck)
{
    const Result r = run({"second-variation", "--alpha", "1", "--modes", "k2=1", "--fd-check", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto row = nlohmann::json::parse(r.out)["rows"][0];
    EXPECT_DOUBLE_EQ(row["E_ddot"].get<double>(), row["E_ddot_radial"].get<double>());
    EXPECT_LT(row["relative_difference"].get<double>(), 0.01);
}

TEST(Cli, ByteIdenticalRuns)
{
    const std::vector<std::string> args = {"corpus", "--count", "3", "--seed", "11"};
    const Result a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const Result c = run({"corpus", "--count", "3", "--seed", "12"});
    EXPECT_NE(a.out, c.out);
}

TEST(Cli, ConfigFile)
{
    const std::string path = testing::TempDir() + "robinlab_cfg.json";
    {
        std::ofstream f(path);
        f << R"({"command": "energy", "domain": {"kind": "annulus", "dim": 3, "R": 1, "kappa": 0.5},
                 "alpha_grid": "1:2:2", "json": true})";
    }
    const Result r = run({"--config", path});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["domain"]["kind"], "annulus");
    EXPECT_EQ(j["rows"].size(), 2u);
    // Command-line values override the file.
    const Result o = run({"energy", "--config", path, "--alpha-grid", "1:2:3"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(nlohmann::json::parse(o.out)["rows"].size(), 3u);
    std::remove(path.c_str());
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"energy", "--domain", "torus"}).code, 2);
    EXPECT_EQ(run({"energy", "--domain", "annulus", "--kappa", "1.5", "--alpha", "1"}).code, 2);
    EXPECT_EQ(run({"energy", "--alpha-grid", "1:2"}).code, 2);
    EXPECT_EQ(run({"second-variation", "--alpha", "2", "--modes", "k2=1"}).code, 2);
    EXPECT_EQ(run({"energy", "--domain", "annulus", "--dim", "3", "--kappa", "0.5", "--alpha", "7", "--modes", "1"}).code,
              3);
    EXPECT_EQ(run({"--config", "/nonexistent/cfg.json"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--help"}).code, 0);
}

TEST(Cli, OtherCommandsRun)
{
    const std::vector<std::vector<std::string>> cmds = {
        {"split", "--domain", "ellipse", "--t", "0.1", "--alpha", "0.5"},
        {"alpha0", "--domain", "ellipse", "--t", "0.1"},
        {"first-variation", "--alpha", "0.7", "--modes", "k2=1,k3.1=0.4"},
        {"j-variations", "--alpha", "0.7", "--modes", "k3=1"},
        {"pw-check", "--domain", "ellipse", "--t", "0.1", "--alpha", "0.5"},
        {"pw-check", "--area", "3.14159", "--perimeter", "6.3"},
        {"corollary-check", "--domain", "ellipse", "--t", "0.1"},
        {"second-variation", "--alpha", "2.5", "--sign-table", "--kmax", "10"},
        {"oracle-verify", "--domain", "square", "--levels", "2"},
    };
    for (const auto& c : cmds) {
        const Result r = run(c);
        EXPECT_EQ(r.code, 0) << c[0] << ": " << r.err;
        EXPECT_GE(lines(r.out).size(), 2u) << c[0];
    }
}

TEST(Cli, BinaryRuns)
{
    const std::string cmd = std::string(ROBINLAB_CLI_PATH) + " spectrum --kmax 1 > /dev/null";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
}
