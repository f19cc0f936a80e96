#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nldisp/cli.hpp"

using namespace nldisp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nldisp_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "nldisp");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

const char* kWaveConfig = R"(# 1-D profile
seed = 1
[kernel]
dimension = 1
support_radius = 1.0
exponent = 2
[nonlinearity]
a = 0.25
kappa = 1
[wave]
zmax = 40
h = 0.05
)";

}  // namespace

TEST(Config, ParsesSectionsListsAndComments) {
    const Config c = Config::parse_string("threads = 2\n[domain]\nbox = [-1, 2.5, -3, 4] # trailing\nh=0.1\n");
    EXPECT_EQ(c.integer("threads", 1), 2);
    EXPECT_EQ(c.list("domain.box", {}), (std::vector<double>{-1, 2.5, -3, 4}));
    EXPECT_EQ(c.num("domain.h", 0.0), 0.1);
    EXPECT_EQ(c.num("wave.zmax", 40.0), 40.0);
}

TEST(Config, RejectsUnknownAndDuplicateKeys) {
    try {
        Config::parse_string("[kernel]\nradius = 1\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("kernel.radius"), std::string::npos);
    }
    EXPECT_THROW(Config::parse_string("seed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(Config::parse_string("[kernel]\ndimension = two\n").integer("kernel.dimension", 2), ConfigError);
}

TEST(Config, HashIgnoresOrderAndComments) {
    const Config a = Config::parse_string("seed = 1\n[wave]\nh = 0.05\nzmax = 40\n");
    const Config b = Config::parse_string("# x\n[wave]\nzmax = 40\nh = 0.05\n[]\nseed = 1\n");
    EXPECT_EQ(a.hash(), b.hash());
    const Config d = Config::parse_string("seed = 2\n[wave]\nh = 0.05\nzmax = 40\n");
    EXPECT_NE(a.hash(), d.hash());
}

TEST(Config, BuildersValidate) {
    EXPECT_THROW(kernel_from(Config::parse_string("[kernel]\nexponent = 1\n")), ConfigError);
    EXPECT_THROW(obstacle_from(Config::parse_string("[obstacle]\nkind = star\n")), ConfigError);
    const ObstacleSpec o =
        obstacle_from(Config::parse_string("[obstacle]\nkind = disc\ncenter = [-5, 0]\nradius = 1.6\n"));
    EXPECT_EQ(o.kind, ObstacleKind::disc);
    EXPECT_EQ(o.cx, -5.0);
    EXPECT_EQ(cert_kind_from("uplus"), CertKind::Uplus);
    EXPECT_THROW(cert_kind_from("sideways"), ConfigError);
}

TEST(Cli, UnknownKeyExitsTwo) {
    const fs::path d = scratch("unknown");
    write(d / "bad.cfg", "[wave]\nzmax = 40\nbogus_key = 3\n");
    testing::internal::CaptureStderr();
    EXPECT_EQ(run({"wave", "--config", (d / "bad.cfg").string(), "--out", (d / "o").string()}), 2);
    EXPECT_NE(testing::internal::GetCapturedStderr().find("wave.bogus_key"), std::string::npos);
}

TEST(Cli, ZfnWritesTableAndSummary) {
    const fs::path d = scratch("zfn");
    testing::internal::CaptureStdout();
    EXPECT_EQ(run({"zfn", "--eta", "0.3", "--eps1", "0.1", "--t1", "20", "--out", d.string()}), 0);
    const std::string out = testing::internal::GetCapturedStdout();
    EXPECT_NE(out.find("pass=1"), std::string::npos);
    const std::string csv = slurp(d / "zfn.csv");
    EXPECT_EQ(csv.rfind("t,z,dz\n0,0.1,", 0), 0u);
}

TEST(Cli, WaveConfigProducesProfile) {
    const fs::path d = scratch("wave");
    write(d / "w.cfg", kWaveConfig);
    testing::internal::CaptureStdout();
    EXPECT_EQ(run({"wave", "--config", (d / "w.cfg").string(), "--out", (d / "a").string()}), 0);
    testing::internal::GetCapturedStdout();
    const WaveProfile p = load_profile((d / "a" / "profile.csv").string());
    EXPECT_LE(p.residual, 1e-8);
    EXPECT_TRUE(fs::exists(d / "a" / "manifest.txt"));
    EXPECT_NE(slurp(d / "a" / "manifest.txt").find("config_hash="), std::string::npos);

    // same config, same bytes
    testing::internal::CaptureStdout();
    EXPECT_EQ(run({"wave", "--config", (d / "w.cfg").string(), "--out", (d / "b").string()}), 0);
    testing::internal::GetCapturedStdout();
    EXPECT_EQ(slurp(d / "a" / "profile.csv"), slurp(d / "b" / "profile.csv"));
}

TEST(Cli, DryRunWritesNothing) {
    const fs::path d = scratch("dry");
    write(d / "w.cfg", kWaveConfig);
    testing::internal::CaptureStdout();
    EXPECT_EQ(run({"wave", "--config", (d / "w.cfg").string(), "--out", (d / "o").string(), "--dry-run"}), 0);
    EXPECT_NE(testing::internal::GetCapturedStdout().find("plan:"), std::string::npos);
    EXPECT_FALSE(fs::exists(d / "o"));
}

TEST(Cli, MissingConfigIsUsageError) {
    testing::internal::CaptureStderr();
    testing::internal::CaptureStdout();
    EXPECT_EQ(run({"wave", "--config", "/nonexistent/x.cfg"}), 2);
    testing::internal::GetCapturedStdout();
    testing::internal::GetCapturedStderr();
}

TEST(Cli, SimulateOneDimensionalPlanar) {
    const fs::path d = scratch("sim");
    write(d / "s.cfg", std::string(kWaveConfig) +
                           "[domain]\nbox = [-20, 20]\nh = 0.05\n[evolve]\nt1 = 2\ndt = 0.02\ninitial = planar\n");
    testing::internal::CaptureStdout();
    const int code = run({"simulate", "--config", (d / "s.cfg").string(), "--out", d.string()});
    const std::string out = testing::internal::GetCapturedStdout();
    EXPECT_EQ(code, 0) << out;
    EXPECT_TRUE(fs::exists(d / "diagnostics.csv"));
}
