#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qrabi_cli/commands.hpp"
#include "qrabi_cli/config.hpp"
#include "qrabi_cli/output.hpp"

using namespace qrabi::cli;
namespace fs = std::filesystem;

namespace {

class CliDir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("qrabi_cli_") + info->name() + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& name, const json& doc) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << doc.dump(2);
        return p.string();
    }

    int run(const std::string& args) const {
        const std::string cmd = std::string(QRABI_EXE) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " +
                                (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json small_scan(const std::string& out) {
    return {{"experiment", "spectroscopy"},
            {"params", {{"omega", 1.0}, {"omega0", 0.3}, {"beta", 0.1}}},
            {"dims", {{"n_cut", 30}}},
            {"output", {{"dir", out}, {"prefix", "scan"}}},
            {"spectroscopy", {{"reference_rates", true}, {"nbar", {0.5}}, {"omega_s", {0.29, 0.294, 0.298}}}}};
}

}  // namespace

TEST(Config, DefaultsAndUnknownKeys) {
    const RunConfig cfg = parse_config(json::object(), Command::spectrum);
    EXPECT_EQ(cfg.n_cut, 40);
    EXPECT_EQ(cfg.threads, 1);
    EXPECT_THROW(parse_config({{"params", {{"omega0", 0.1}, {"bta", 0.1}}}}, Command::spectrum), ConfigError);
    EXPECT_THROW(parse_config({{"colour", 1}}, Command::spectrum), ConfigError);
    EXPECT_THROW(parse_config({{"params", {{"beta", "big"}}}}, Command::spectrum), ConfigError);
    EXPECT_THROW(parse_config({{"experiment", "drive"}}, Command::spectrum), ConfigError);
    EXPECT_THROW(parse_config({{"numerics", {{"dt", -1.0}}}}, Command::relax), ConfigError);
    EXPECT_THROW(parse_command("dance"), ConfigError);
}

TEST(Config, ResolvedDumpReparsesToItself) {
    for (Command c : {Command::spectrum, Command::fidelity, Command::relax, Command::drive, Command::spectroscopy}) {
        RunConfig cfg = parse_config({{"params", {{"omega0", 0.3}, {"beta", 0.1}}}}, c);
        resolve(cfg);
        const json once = to_json(cfg);
        RunConfig again = parse_config(once, c);
        resolve(again);
        EXPECT_EQ(to_json(again), once) << to_string(c);
    }
}

TEST(Output, RoundTripFormatting) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.294}) EXPECT_EQ(std::stod(fmt(v)), v);
    EXPECT_EQ(config_digest(json{{"a", 1}}), config_digest(json{{"a", 1}}));
    EXPECT_NE(config_digest(json{{"a", 1}}), config_digest(json{{"a", 2}}));
}

TEST_F(CliDir, SpectrumSucceedsAndWritesMetadataLines) {
    const std::string cfg = write_config("spec.json", {{"dims", {{"n_cut", 30}}}, {"spectrum", {{"levels", 4}}}});
    EXPECT_EQ(run("spectrum --config " + cfg + " --out " + dir_.string()), kExitOk) << slurp(dir_ / "stderr.txt");
    const std::string csv = slurp(dir_ / "spectrum.csv");
    ASSERT_FALSE(csv.empty());
    EXPECT_EQ(csv.front(), '#');
    EXPECT_NE(csv.find("# config_digest: "), std::string::npos);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    const json meta = json::parse(slurp(dir_ / "spectrum.json"));
    EXPECT_EQ(meta["command"], "spectrum");
    EXPECT_TRUE(meta.contains("resolved_config"));
}

TEST_F(CliDir, ConfigErrorsExitTwo) {
    EXPECT_EQ(run("spectrum --seedless --out " + dir_.string()), kExitConfig);
    EXPECT_EQ(run("spectrum --config " + write_config("bad.json", {{"nope", 1}})), kExitConfig);
    EXPECT_EQ(run("spectrum --config " + write_config("omega.json", {{"params", {{"omega", -1.0}}}}) + " --out " +
                  dir_.string()),
              kExitConfig);
    EXPECT_EQ(run("spectrum --config " + (dir_ / "missing.json").string()), kExitConfig);
    EXPECT_EQ(run("spectrum --n-cut 1 --out " + dir_.string()), kExitConfig);
    EXPECT_EQ(run("frobnicate"), kExitConfig);
    std::ofstream(dir_ / "broken.json") << "{ not json";
    EXPECT_EQ(run("spectrum --config " + (dir_ / "broken.json").string()), kExitConfig);
}

TEST_F(CliDir, NumericFailureExitsThree) {
    json doc = small_scan(dir_.string());
    doc["numerics"] = {{"tolerance", 1e-300}, {"max_halvings", 0}};
    EXPECT_EQ(run("spectroscopy --config " + write_config("fail.json", doc)), kExitNumeric) << slurp(dir_ / "stderr.txt");
    const json meta = json::parse(slurp(dir_ / "scan.json"));
    EXPECT_EQ(meta["diagnostics"]["failed_points"], 3);
}

TEST_F(CliDir, ResolvedConfigReproducesTablesBitForBit) {
    const fs::path first = dir_ / "first", second = dir_ / "second";
    ASSERT_EQ(run("spectroscopy --config " + write_config("scan.json", small_scan(first.string()))), kExitOk)
        << slurp(dir_ / "stderr.txt");
    json resolved = json::parse(slurp(first / "scan.json"))["resolved_config"];
    resolved["output"]["dir"] = second.string();
    ASSERT_EQ(run("spectroscopy --config " + write_config("resolved.json", resolved)), kExitOk)
        << slurp(dir_ / "stderr.txt");
    for (const char* name : {"scan.csv", "scan_curve0.csv"}) {
        const std::string a = slurp(first / name);
        ASSERT_FALSE(a.empty()) << name;
        EXPECT_EQ(a, slurp(second / name)) << name;
    }
    EXPECT_EQ(json::parse(slurp(second / "scan.json"))["resolved_config"]["spectroscopy"],
              resolved["spectroscopy"]);
}

TEST_F(CliDir, FlagsOverrideConfig) {
    const std::string cfg = write_config("v.json", {{"dims", {{"n_levels", 4}}}});
    ASSERT_EQ(run("validate --config " + cfg + " --n-levels 6 --out " + dir_.string()), kExitOk);
    const json meta = json::parse(slurp(dir_ / "validate.json"));
    EXPECT_EQ(meta["resolved_config"]["dims"]["n_levels"], 6);
    EXPECT_EQ(meta["resolved_config"]["output"]["dir"], dir_.string());
}

TEST(RunCommand, InProcessValidate) {
    const fs::path d = fs::temp_directory_path() / ("qrabi_cli_inproc_" + std::to_string(::getpid()));
    RunConfig cfg = parse_config({{"dims", {{"n_levels", 4}}}, {"output", {{"dir", d.string()}}}}, Command::validate);
    resolve(cfg);
    std::ostringstream log;
    const RunOutput out = run_command(cfg, log);
    EXPECT_FALSE(out.numeric_failure);
    EXPECT_EQ(out.files.size(), 2u);
    EXPECT_TRUE(out.metadata["validity"]["beta_ok"].get<bool>());
    fs::remove_all(d);
}
