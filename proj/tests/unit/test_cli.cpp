#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using namespace alphahyper;
using namespace alphahyper::cli;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out, err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("alphahyper_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static RunResult run(std::vector<std::string> args) {
        args.insert(args.begin(), "alphahyper");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        std::ostringstream out, err;
        const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir_;
};

const char* alpha1_cfg =
    "# reference set\n"
    "alpha = 1\na = 0.1\nb = 0.3\nsigma = 0.5\nrho = -0.5\nV0 = 0.04\n";

const char* alpha2_cfg = "alpha = 2\na = 0.1\nb = 0.2\nsigma = 0.3\nrho = 0\nV0 = 0.04\n";

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

TEST(ConfigParse, KeysAndComments) {
    RunConfig rc;
    apply_config_text(rc, "alpha = 1.5  # exponent\n\nsigma=0.4\nV0 = 0.09\nstrikes = 0.9, 1.0,1.1\nseed = 7\n");
    EXPECT_EQ(rc.model.alpha, 1.5);
    EXPECT_EQ(rc.model.sigma, 0.4);
    EXPECT_NEAR(rc.model.V0(), 0.09, 1e-15);
    EXPECT_EQ(rc.strikes, (std::vector<double>{0.9, 1.0, 1.1}));
    EXPECT_EQ(rc.seed, 7u);
}

TEST(ConfigParse, ErrorsNameLineAndField) {
    RunConfig rc;
    try {
        apply_config_text(rc, "alpha = 1\nsigma = abc\n");
        FAIL();
    } catch (const ConfigError& e) {
        const std::string w = e.what();
        EXPECT_NE(w.find("line 2"), std::string::npos) << w;
        EXPECT_NE(w.find("sigma"), std::string::npos) << w;
    }
    EXPECT_THROW(apply_config_text(rc, "nonsense = 3\n"), ConfigError);
    EXPECT_THROW(apply_config_text(rc, "alpha\n"), ConfigError);
}

TEST(ConfigValidate, RejectsBadCombinations) {
    RunConfig rc;
    apply_config_text(rc, alpha2_cfg);
    rc.command = Command::Price;
    EXPECT_THROW(validate(rc), ConfigError);
    rc.command = Command::Vs;
    EXPECT_NO_THROW(validate(rc));
    rc.model.sigma = -1.0;
    EXPECT_THROW(validate(rc), ConfigError);
}

TEST_F(CliTest, CheckAlphaTwo) {
    const auto r = run({"check", "--config", write("c.cfg", alpha2_cfg)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("martingale,yes (alpha >= 2)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("lambda_star"), std::string::npos);
    EXPECT_NE(r.out.find("long_term_limit"), std::string::npos);
}

TEST_F(CliTest, CheckNonMartingaleNamesClause) {
    const auto r = run({"check", "--config", write("c.cfg", "alpha = 1\na = 0.1\nb = 0.2\nsigma = 0.5\nrho = 0.8\n")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("martingale,NO ("), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("b < rho sigma"), std::string::npos) << r.out;
}

TEST_F(CliTest, MalformedConfigWritesNothing) {
    const auto out = path("out.csv");
    const auto r = run({"check", "--config", write("bad.cfg", "alpha = 1\nb = oops\n"), "--out", out});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("config error"), std::string::npos);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_EQ(run({"check", "--config", path("missing.cfg")}).code, 2);
    EXPECT_EQ(run({"frobnicate", "--config", write("c.cfg", alpha2_cfg)}).code, 2);
    EXPECT_EQ(run({"check"}).code, 2);
}

TEST_F(CliTest, VsTableAlphaTwo) {
    const auto cfg = write("v.cfg", std::string(alpha2_cfg) + "maturities = 0.25, 1, 5\n");
    const auto r = run({"vs", "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = data_lines(r.out);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "t,vs_analytic,vs_short_term,vs_bound");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto c = split(lines[i], ',');
        ASSERT_EQ(c.size(), 4u);
        EXPECT_LT(std::stod(c[1]), std::stod(c[3])) << lines[i];
    }
}

TEST_F(CliTest, VsWithMonteCarloFlagsRows) {
    const auto cfg = write("v.cfg", std::string(alpha1_cfg) + "maturities = 0.5\n");
    const auto r = run({"vs", "--config", cfg, "--with-mc", "--paths", "40000", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["command"], "vs");
    ASSERT_EQ(j["rows"].size(), 1u);
    const auto& row = j["rows"][0];
    EXPECT_FALSE(row.contains("vs_bound"));
    EXPECT_EQ(row["mc_check"], "pass");
    EXPECT_LT(std::abs(row["vs_analytic"].get<double>() - row["vs_mc"].get<double>()),
              3.0 * row["mc_se"].get<double>());
}

TEST_F(CliTest, PriceSmile) {
    const auto cfg =
        write("p.cfg", std::string(alpha1_cfg) + "maturity = 0.5\nstrikes = 0.0001, 0.8, 0.9, 1, 1.1, 1.2, 1.5\n");
    const auto r = run({"price", "--config", cfg, "--rate", "0.03"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = data_lines(r.out);
    ASSERT_EQ(lines.size(), 8u);
    EXPECT_EQ(lines[0], "k,price,implied_vol");
    std::vector<double> px;
    for (std::size_t i = 1; i < lines.size(); ++i) px.push_back(std::stod(split(lines[i], ',')[1]));
    EXPECT_NEAR(px[0] / std::exp(-0.03 * 0.5), 1.0, 1e-3);
    for (std::size_t i = 1; i < px.size(); ++i) EXPECT_LE(px[i], px[i - 1] + 1e-6);
}

TEST_F(CliTest, PriceWithMonteCarlo) {
    const auto cfg = write("p.cfg", std::string(alpha1_cfg) + "maturity = 0.5\nstrikes = 0.9, 1.1\n");
    const auto r = run({"price", "--config", cfg, "--with-mc", "--paths", "100000", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 2u);
    for (const auto& row : j["rows"]) {
        EXPECT_EQ(row["mc_check"], "pass") << row.dump();
        EXPECT_TRUE(row.contains("mc_price") && row.contains("mc_se"));
    }
}

TEST_F(CliTest, PriceRejectsAlphaTwo) {
    const auto out = path("o.csv");
    const auto r = run({"price", "--config", write("p.cfg", alpha2_cfg), "--out", out});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("alpha"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, NumericalFailureReportsNode) {
    const auto cfg = write("p.cfg", std::string(alpha1_cfg) + "maturity = 0.5\nstrikes = 1\ntalbot_shift = 1e6\n");
    const auto out = path("o.csv");
    const auto r = run({"price", "--config", cfg, "--out", out});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("node"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, SimulateIsByteIdenticalForSeed) {
    const auto cfg = write("s.cfg", std::string(alpha1_cfg) + "maturity = 1\npaths = 20000\nsteps_per_year = 50\n");
    const auto a = path("a.json"), b = path("b.json");
    ASSERT_EQ(run({"simulate", "--config", cfg, "--seed", "5", "--out", a, "--format", "json"}).code, 0);
    ASSERT_EQ(run({"simulate", "--config", cfg, "--seed", "5", "--out", b, "--format", "json"}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto j = nlohmann::json::parse(slurp(a));
    EXPECT_EQ(j["metadata"]["seed"], 5);
    const auto c = run({"simulate", "--config", cfg, "--seed", "6", "--format", "json"});
    EXPECT_NE(c.out, slurp(a));
}

TEST_F(CliTest, SimulateMartingaleAndZeroVol) {
    const auto cfg = write("s.cfg", std::string(alpha1_cfg) + "maturity = 1\npaths = 50000\nsteps_per_year = 50\n");
    const auto r = run({"simulate", "--config", cfg, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    double ef = alphahyper::nan, se = alphahyper::nan;
    for (const auto& row : j["rows"])
        if (row["quantity"] == "ef_t") {
            ef = row["mean"].get<double>();
            se = row["se"].get<double>();
        }
    EXPECT_LT(std::abs(ef - 1.0), 3.0 * se);

    const auto z = write("z.cfg", "alpha = 2\na = 0.1\nb = 0.2\nsigma = 0\nV0 = 0.04\nmaturity = 1\npaths = 100\n");
    const auto rz = run({"simulate", "--config", z, "--format", "json"});
    ASSERT_EQ(rz.code, 0) << rz.err;
    for (const auto& row : nlohmann::json::parse(rz.out)["rows"])
        if (row["quantity"] == "vs_t") EXPECT_EQ(row["se"].get<double>(), 0.0);
}
