#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "polpair/errors.hpp"

using namespace polpair;
using namespace polpair::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / fmt_name(info->test_suite_name(), info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    static std::string fmt_name(const std::string& a, const std::string& b) { return "polpair_" + a + "_" + b; }

    fs::path write(const std::string& name, const std::string& text) const
    {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    int run(const std::string& command, const std::string& config, const std::string& out = "out",
            unsigned threads = 1)
    {
        RunContext ctx;
        ctx.config = Config::parse(config);
        ctx.out_dir = dir_ / out;
        ctx.threads = threads;
        ctx.log = &log_;
        err_.str("");
        return run_command(command, ctx, err_);
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    // Value column (last numeric column named "value") of a spectrum CSV.
    static std::vector<double> values(const fs::path& p)
    {
        const auto csv = read_csv(p);
        std::vector<double> out;
        for (const auto& row : csv.rows) {
            out.push_back(std::strtod(row.back().c_str(), nullptr));
        }
        return out;
    }

    fs::path dir_;
    std::ostringstream log_;
    std::ostringstream err_;
};

const std::string kDiamond = R"(medium.name = diamond_demo
medium.sellmeier.a = 0.3306, 4.3356
medium.sellmeier.l_um = 0.175, 0.106
grid.k.min = 1e5
grid.k.max = 2e8
grid.k.count = 40
)";

const std::string kSinusoid = R"(medium.name = fused_silica
perturbation.kind = time_sinusoid
perturbation.eta = 1e24
perturbation.a = 5e15
spectrum.volume = 1e-12
spectrum.observation_time = 1e-12
grid.omega.min = 1e15
grid.omega.max = 4e15
grid.omega.count = 61
grid.theta.min = 0
grid.theta.max = 3.141592653589793
grid.theta.count = 3
)";

std::string gaussian_pulse(double eta)
{
    return "medium.name = fused_silica\n"
           "perturbation.kind = time_gaussian\n"
           "perturbation.eta = " + std::to_string(eta) + "\n"
           "perturbation.a = 1e30\n"
           "spectrum.volume = 1e-12\n"
           "grid.omega.min = 1e15\n"
           "grid.omega.max = 4e15\n"
           "grid.omega.count = 21\n"
           "grid.theta.min = 0\n"
           "grid.theta.max = 1\n"
           "grid.theta.count = 2\n";
}

const std::string kTravelling = R"(medium.name = fused_silica
perturbation.kind = travelling_gaussian
perturbation.dchi0 = 1e25
perturbation.sigma_rho = 1e-7
perturbation.sigma_z = 1e-7
perturbation.T = 1e-12
rate.partner_band.min = 5e14
rate.partner_band.max = 4e15
grid.omega.min = 1e15
grid.omega.max = 4e15
grid.omega.count = 7
grid.theta.min = 0
grid.theta.max = 1.5
grid.theta.count = 4
grid.theta_prime.min = 0
grid.theta_prime.max = 1.5
grid.theta_prime.count = 4
)";

}  // namespace

//---------------------------------------------------------------------------//
// Config
//---------------------------------------------------------------------------//

TEST(Config, ParsesValuesListsAndComments)
{
    const auto c = Config::parse("# comment\n\n medium.name = fused_silica \nmedium.omega0 = 1e16, 2e16\n"
                                 "grid.k.count = 5\noutput.svg = false\n");
    EXPECT_EQ(c.get_string("medium.name"), "fused_silica");
    EXPECT_EQ(c.get_list("medium.omega0"), (std::vector<double>{1e16, 2e16}));
    EXPECT_EQ(c.get_int("grid.k.count"), 5);
    EXPECT_FALSE(c.get_bool("output.svg"));
    EXPECT_EQ(c.get_double("medium.pole_guard", 1e-9), 1e-9);
    EXPECT_FALSE(c.has("medium.chi0"));
}

TEST(Config, RejectsMalformedInput)
{
    EXPECT_THROW(Config::parse("medium.colour = red\n"), ConfigError);
    EXPECT_THROW(Config::parse("medium.name\n"), ConfigError);
    EXPECT_THROW(Config::parse("medium.name =\n"), ConfigError);
    EXPECT_THROW(Config::parse("medium.name = a\nmedium.name = b\n"), ConfigError);
    const auto c = Config::parse("grid.k.count = 2.5\ngrid.k.min = 1e5x\noutput.svg = maybe\ngrid.k.max = nan\n");
    EXPECT_THROW(c.get_int("grid.k.count"), ConfigError);
    EXPECT_THROW(c.get_double("grid.k.min"), ConfigError);
    EXPECT_THROW(c.get_double("grid.k.max"), ConfigError);
    EXPECT_THROW(c.get_bool("output.svg"), ConfigError);
    EXPECT_THROW(c.get_double("medium.pole_guard"), ConfigError);
    EXPECT_THROW(Config::load("/nonexistent/polpair.cfg"), IoError);
}

TEST(Config, HashIgnoresOrderAndWhitespace)
{
    const auto a = Config::parse("medium.name = fused_silica\ngrid.k.count = 5\n");
    const auto b = Config::parse("grid.k.count=5\n# x\nmedium.name    =    fused_silica\n");
    const auto c = Config::parse("grid.k.count = 6\nmedium.name = fused_silica\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    // Published FNV-1a 64 test vectors.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, AxisSpacing)
{
    const auto lin = build_axis(Config::parse("grid.k.min = 1\ngrid.k.max = 3\ngrid.k.count = 3\n"), "k");
    EXPECT_EQ(lin, (std::vector<double>{1.0, 2.0, 3.0}));
    const auto log = build_axis(
        Config::parse("grid.k.min = 1\ngrid.k.max = 100\ngrid.k.count = 3\ngrid.k.spacing = log\n"), "k");
    EXPECT_NEAR(log[1], 10.0, 1e-13);
    EXPECT_EQ(log.back(), 100.0);
    EXPECT_EQ(build_axis(Config::parse("grid.k.min = 7\ngrid.k.max = 7\ngrid.k.count = 1\n"), "k").size(), 1u);
    EXPECT_THROW(build_axis(Config::parse("grid.k.min = 3\ngrid.k.max = 1\ngrid.k.count = 3\n"), "k"), ConfigError);
    EXPECT_THROW(build_axis(Config::parse("grid.k.min = 0\ngrid.k.max = 1\ngrid.k.count = 3\ngrid.k.spacing = log\n"),
                            "k"),
                 ConfigError);
    EXPECT_THROW(build_axis(Config::parse("grid.k.min = 0\ngrid.k.max = 1\ngrid.k.count = 0\n"), "k"), ConfigError);
}

TEST(Config, BuildsMedia)
{
    EXPECT_EQ(build_medium(Config::parse("")).resonance_count(), 3u);
    EXPECT_EQ(build_medium(Config::parse("medium.name = diamond_demo\n")).resonance_count(), 2u);
    const auto custom = build_medium(Config::parse("medium.name = custom\nmedium.omega0 = 2e16, 1e16\n"
                                                   "medium.chi0 = 1e32, 1e31\n"));
    EXPECT_EQ(custom.resonances().front().omega0, 1e16);
    EXPECT_THROW(build_medium(Config::parse("medium.name = custom\n")), ConfigError);
    EXPECT_THROW(build_medium(Config::parse("medium.omega0 = 1e16\nmedium.chi0 = 1, 2\n")), ConfigError);
    EXPECT_THROW(build_medium(Config::parse("medium.sellmeier.a = 1\nmedium.sellmeier.l_um = 1\nmedium.omega0 = 1\n"
                                            "medium.chi0 = 1\n")),
                 ConfigError);
    EXPECT_THROW(build_medium(Config::parse("medium.sellmeier.a = 0\nmedium.sellmeier.l_um = 1\n")),
                 InvalidCoefficient);
}

TEST(Config, BuildsPerturbations)
{
    EXPECT_FALSE(build_perturbation(Config::parse("")).has_value());
    const auto g = build_perturbation(Config::parse("perturbation.kind = time_gaussian\nperturbation.eta = 1\n"
                                                    "perturbation.a = 2\n"));
    ASSERT_TRUE(g && std::holds_alternative<TimeGaussian>(*g));
    const auto e = build_perturbation(Config::parse("perturbation.kind = time_tanh\nperturbation.eta = 1\n"
                                                    "perturbation.a = 2\nperturbation.envelope.sigma = 1e-6\n"));
    ASSERT_TRUE(e && std::holds_alternative<TimeProfileWithEnvelope>(*e));
    // Envelope transform of exp(-r^2/2 sigma^2) at k = 0 is (2 pi)^(3/2) sigma^3.
    const double s = 1e-6;
    EXPECT_NEAR(std::get<TimeProfileWithEnvelope>(*e).gamma_hat(Vec3{}) / (std::pow(2 * M_PI, 1.5) * s * s * s), 1.0,
                1e-14);
    EXPECT_THROW(build_perturbation(Config::parse("perturbation.kind = wobble\n")), ConfigError);
    EXPECT_THROW(build_perturbation(Config::parse("perturbation.kind = time_gaussian\nperturbation.eta = 1\n"
                                                  "perturbation.a = -2\n")),
                 ConfigError);
    EXPECT_THROW(build_perturbation(Config::parse("perturbation.kind = time_gaussian\nperturbation.eta = 1\n")),
                 ConfigError);
}

TEST_F(CliTest, SampledProfileFile)
{
    std::string text = "# t value\n";
    for (int i = 0; i < 8; ++i) {
        text += std::to_string(i * 0.5) + "  " + std::to_string(i * i) + "\n";
    }
    const auto s = read_sampled_profile(write("ok.txt", text));
    EXPECT_EQ(s.samples.size(), 8u);
    EXPECT_DOUBLE_EQ(s.dt, 0.5);
    EXPECT_EQ(s.samples[3].real(), 9.0);
    EXPECT_THROW(read_sampled_profile(write("short.txt", "0 1\n1 2\n2 3\n")), ConfigError);  // not 2^n
    EXPECT_THROW(read_sampled_profile(write("uneven.txt", "0 1\n1 2\n3 3\n4 4\n")), ConfigError);
    EXPECT_THROW(read_sampled_profile(write("cols.txt", "0 1 2\n1 2 3\n")), ConfigError);
    EXPECT_THROW(read_sampled_profile(dir_ / "missing.txt"), IoError);
}

//---------------------------------------------------------------------------//
// Commands
//---------------------------------------------------------------------------//

TEST_F(CliTest, DispersionDiamondHasThreeBranches)
{
    ASSERT_EQ(run("dispersion", kDiamond), kExitOk) << err_.str();
    const auto csv = read_csv(dir_ / "out" / "dispersion.csv");
    EXPECT_EQ(csv.columns,
              (std::vector<std::string>{"k_rad_per_m", "branch", "omega_rad_per_s", "n_phase", "n_group", "phi"}));
    EXPECT_EQ(csv.rows.size(), 40u * 3u);
    double third_min = INFINITY;
    for (const auto& row : csv.rows) {
        if (row[1] == "2") {
            third_min = std::min(third_min, std::strtod(row[2].c_str(), nullptr));
        }
    }
    EXPECT_GT(third_min, 4e16);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "dispersion.svg"));
    EXPECT_NE(log_.str().find("self-check pass"), std::string::npos);
    bool has_hash = false;
    for (const auto& h : csv.header) {
        has_hash = has_hash || h.rfind("config_hash: ", 0) == 0;
    }
    EXPECT_TRUE(has_hash);
}

TEST_F(CliTest, DispersionSelfCheckCatchesCorruption)
{
    ASSERT_EQ(run("dispersion", kDiamond), kExitOk);
    const auto path = dir_ / "out" / "dispersion.csv";
    const auto medium = build_medium(Config::parse(kDiamond));
    EXPECT_NO_THROW(check_dispersion_csv(path, medium));
    // Relabel the first row as branch 1.
    std::string broken = slurp(path);
    const auto row0 = broken.find("phi\n") + 4;
    const auto comma = broken.find(',', row0);
    broken.replace(comma + 1, 1, "1");
    std::ofstream(path) << broken;
    EXPECT_THROW(check_dispersion_csv(path, medium), NumericError);
}

TEST_F(CliTest, DispersionVacuumHook)
{
    const std::string cfg = "medium.name = vacuum\nmedium.omega0 = 1e16\nmedium.chi0 = 0\n"
                            "grid.k.min = 1e6\ngrid.k.max = 1e8\ngrid.k.count = 21\noutput.svg = false\n";
    ASSERT_EQ(run("dispersion", cfg), kExitOk) << err_.str();
    const auto csv = read_csv(dir_ / "out" / "dispersion.csv");
    for (std::size_t r = 0; r < csv.rows.size(); r += 2) {
        const double k = std::strtod(csv.rows[r][0].c_str(), nullptr);
        const double w0 = std::strtod(csv.rows[r][2].c_str(), nullptr);
        const double w1 = std::strtod(csv.rows[r + 1][2].c_str(), nullptr);
        EXPECT_DOUBLE_EQ(w0, std::min(kSpeedOfLight * k, 1e16));
        EXPECT_DOUBLE_EQ(w1, std::max(kSpeedOfLight * k, 1e16));
    }
    EXPECT_FALSE(fs::exists(dir_ / "out" / "dispersion.svg"));
}

TEST_F(CliTest, SpectrumZeroPerturbationIsAllZero)
{
    const std::string cfg = "medium.name = fused_silica\ngrid.omega.min = 1e15\ngrid.omega.max = 4e15\n"
                            "grid.omega.count = 5\ngrid.theta.min = 0\ngrid.theta.max = 1\ngrid.theta.count = 2\n";
    ASSERT_EQ(run("spectrum", cfg), kExitOk) << err_.str();
    for (double v : values(dir_ / "out" / "spectrum.csv")) {
        EXPECT_EQ(v, 0.0);
    }
    const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "spectrum.json"));
    EXPECT_EQ(j["total"].get<double>(), 0.0);
}

TEST_F(CliTest, SpectrumQuadraticInAmplitude)
{
    ASSERT_EQ(run("spectrum", gaussian_pulse(1e24), "a"), kExitOk) << err_.str();
    ASSERT_EQ(run("spectrum", gaussian_pulse(2e24), "b"), kExitOk) << err_.str();
    const auto a = values(dir_ / "a" / "spectrum.csv");
    const auto b = values(dir_ / "b" / "spectrum.csv");
    ASSERT_EQ(a.size(), b.size());
    int nonzero = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 0.0) {
            ++nonzero;
            EXPECT_NEAR(b[i] / a[i], 4.0, 4e-10);
        }
    }
    EXPECT_GT(nonzero, 0);
    const auto ja = nlohmann::json::parse(slurp(dir_ / "a" / "spectrum.json"));
    const auto jb = nlohmann::json::parse(slurp(dir_ / "b" / "spectrum.json"));
    EXPECT_NEAR(jb["total"].get<double>() / ja["total"].get<double>(), 4.0, 4e-10);
}

TEST_F(CliTest, SpectrumSinusoidOnlyOnResonance)
{
    ASSERT_EQ(run("spectrum", kSinusoid), kExitOk) << err_.str();
    const auto csv = read_csv(dir_ / "out" / "spectrum.csv");
    const auto lines = read_csv(dir_ / "out" / "spectrum_lines.csv");
    ASSERT_EQ(lines.rows.size(), 1u);
    const double w_line = std::strtod(lines.rows[0][3].c_str(), nullptr);
    EXPECT_LT(std::strtod(lines.rows[0][6].c_str(), nullptr), 1e-9);
    // Only the grid cell holding the line is nonzero (grid step 5e13).
    for (const auto& row : csv.rows) {
        const double w = std::strtod(row[0].c_str(), nullptr);
        const double v = std::strtod(row[2].c_str(), nullptr);
        if (std::abs(w - w_line) <= 2.5e13) {
            EXPECT_GT(v, 0.0);
        } else {
            EXPECT_EQ(v, 0.0) << "omega = " << w;
        }
    }
}

TEST_F(CliTest, SpectrumNeedsVolumeForTimeProfiles)
{
    std::string cfg = kSinusoid;
    cfg.replace(cfg.find("spectrum.volume = 1e-12\n"), 24, "");
    EXPECT_EQ(run("spectrum", cfg), kExitConfig);
    cfg = kSinusoid + "spectrum.axes = omega_omega_prime\n";
    EXPECT_EQ(run("spectrum", cfg), kExitConfig);
    EXPECT_NE(err_.str().find("back to back"), std::string::npos);
    EXPECT_EQ(run("spectrum", kSinusoid + "spectrum.axes = omega_phi\n"), kExitConfig);
}

TEST_F(CliTest, SpectrumTravellingBothLayouts)
{
    const std::string base = kTravelling + "perturbation.v = 2.9e8\n";
    ASSERT_EQ(run("spectrum", base, "theta"), kExitOk) << err_.str();
    const auto j = nlohmann::json::parse(slurp(dir_ / "theta" / "spectrum.json"));
    EXPECT_GT(j["total"].get<double>(), 0.0);
    EXPECT_EQ(j["total_unit"], "pairs/s");
    const std::string pairs = base +
                              "spectrum.axes = omega_omega_prime\ngrid.omega_prime.min = 1e15\n"
                              "grid.omega_prime.max = 4e15\ngrid.omega_prime.count = 5\n"
                              "spectrum.theta = 0.5\nspectrum.theta_prime = 1.2\n";
    ASSERT_EQ(run("spectrum", pairs, "pairs"), kExitOk) << err_.str();
    EXPECT_EQ(values(dir_ / "pairs" / "spectrum.csv").size(), 7u * 5u);
    // Frequencies in an evanescent band are rejected up front.
    std::string bad = pairs;
    bad.replace(bad.find("grid.omega_prime.min = 1e15"), 27, "grid.omega_prime.min = 2e13");
    EXPECT_EQ(run("spectrum", bad, "bad"), kExitConfig);
}

TEST_F(CliTest, RateSubluminalIsAllZero)
{
    ASSERT_EQ(run("rate", kTravelling + "perturbation.v = 1.5e8\n"), kExitOk) << err_.str();
    const auto csv = read_csv(dir_ / "out" / "rate.csv");
    ASSERT_EQ(csv.rows.size(), 7u * 4u * 4u);
    for (const auto& row : csv.rows) {
        EXPECT_EQ(row[5], "0");
        EXPECT_EQ(std::strtod(row[9].c_str(), nullptr), 0.0);
        EXPECT_EQ(row[10], "false");
    }
}

TEST_F(CliTest, RateRootCountsAndSweep)
{
    const std::string cfg = kTravelling + "perturbation.v = 2.9e8\n"
                                          "rate.v_sweep.min = 2.2e8\nrate.v_sweep.max = 2.99e8\n"
                                          "rate.v_sweep.count = 30\nrate.v_sweep.omega = 3e15\n";
    ASSERT_EQ(run("rate", cfg), kExitOk) << err_.str();
    const auto csv = read_csv(dir_ / "out" / "rate.csv");
    int with_roots = 0;
    for (const auto& row : csv.rows) {
        const long count = std::strtol(row[5].c_str(), nullptr, 10);
        if (count > 0) {
            ++with_roots;
            EXPECT_GE(std::strtol(row[6].c_str(), nullptr, 10), 1);
            EXPECT_GT(std::strtod(row[8].c_str(), nullptr), 0.0);
            EXPECT_GT(std::strtod(row[9].c_str(), nullptr), 0.0);
        }
        EXPECT_EQ(row[11], "ok");
    }
    EXPECT_GT(with_roots, 0);
    const auto sweep = read_csv(dir_ / "out" / "rate_v_sweep.csv");
    EXPECT_EQ(sweep.rows.size(), 30u);
    bool pass = false;
    for (const auto& h : sweep.header) {
        pass = pass || h == "check: rate nondecreasing in v: pass";
    }
    EXPECT_TRUE(pass);
}

TEST_F(CliTest, RateNeedsTravellingPerturbation)
{
    EXPECT_EQ(run("rate", kSinusoid), kExitConfig);
    EXPECT_EQ(run("rate", kTravelling + "perturbation.v = 2.9e8\nrate.branch = 0\n"), kExitConfig);
}

TEST_F(CliTest, ConesWritesRelationsAndSvg)
{
    const std::string cfg = "cones.v = 2.9e8\ngrid.omega.min = 5e14\ngrid.omega.max = 4e15\ngrid.omega.count = 5\n"
                            "grid.omega_prime.min = 1e10\ngrid.omega_prime.max = 4e15\ngrid.omega_prime.count = 5\n";
    ASSERT_EQ(run("cones", cfg), kExitOk) << err_.str();
    const auto csv = read_csv(dir_ / "out" / "cones.csv");
    ASSERT_EQ(csv.rows.size(), 25u);
    int degenerate = 0;
    for (const auto& row : csv.rows) {
        degenerate += row[6] == "degenerate";
        EXPECT_TRUE(row[6] == "degenerate" || row[6] == "overlap" || row[6] == "gap" || row[6] == "none" ||
                    row[6] == "no_index")
            << row[6];
    }
    EXPECT_GT(degenerate, 0);  // omega = omega' = 4e15 sits on both axes
    EXPECT_TRUE(fs::exists(dir_ / "out" / "cones.svg"));
    EXPECT_EQ(run("cones", "grid.omega.min = 1e15\ngrid.omega.max = 2e15\ngrid.omega.count = 2\n"
                           "grid.omega_prime.min = 1e15\ngrid.omega_prime.max = 2e15\ngrid.omega_prime.count = 2\n"),
              kExitConfig);
}

TEST_F(CliTest, FtCheckPassesAndFails)
{
    const std::string g = "perturbation.kind = time_gaussian\nperturbation.eta = 1e25\nperturbation.a = 1e28\n";
    ASSERT_EQ(run("ft-check", g), kExitOk) << err_.str();
    EXPECT_TRUE(fs::exists(dir_ / "out" / "ft_check.csv"));
    EXPECT_NE(log_.str().find("pass"), std::string::npos);
    EXPECT_EQ(run("ft-check", g + "ft.threshold = 1e-30\n"), kExitNumeric);
    EXPECT_EQ(run("ft-check", g + "ft.window = 1e-15\n"), kExitNumeric);
    EXPECT_NE(err_.str().find("increase ft.window"), std::string::npos);
    EXPECT_EQ(run("ft-check", "perturbation.kind = time_tanh\nperturbation.eta = 1\nperturbation.a = 1e14\n"),
              kExitOk);
    EXPECT_EQ(run("ft-check", "perturbation.kind = time_sinusoid\nperturbation.eta = 1\nperturbation.a = 3e15\n"),
              kExitOk);
    EXPECT_NE(log_.str().find("delta line at omega = 3000000000000000"), std::string::npos);
    EXPECT_EQ(run("ft-check", kTravelling + "perturbation.v = 2.9e8\n"), kExitConfig);
}

TEST_F(CliTest, ExitCodes)
{
    EXPECT_EQ(run("wobble", ""), kExitConfig);
    EXPECT_EQ(run("dispersion", "grid.k.min = 1\n"), kExitConfig);  // missing keys
    // Output path blocked by a regular file.
    write("blocker", "x");
    RunContext ctx;
    ctx.config = Config::parse(kDiamond);
    ctx.out_dir = dir_ / "blocker" / "sub";
    std::ostringstream err;
    EXPECT_EQ(run_command("dispersion", ctx, err), kExitIo);
}

TEST_F(CliTest, ThreadCountDoesNotChangeBytes)
{
    const std::string cfg = kTravelling + "perturbation.v = 2.9e8\n";
    ASSERT_EQ(run("spectrum", cfg, "t1", 1), kExitOk);
    ASSERT_EQ(run("spectrum", cfg, "t8", 8), kExitOk);
    ASSERT_EQ(run("rate", cfg, "t1", 1), kExitOk);
    ASSERT_EQ(run("rate", cfg, "t8", 8), kExitOk);
    for (const char* f : {"spectrum.csv", "spectrum.json", "rate.csv"}) {
        EXPECT_EQ(slurp(dir_ / "t1" / f), slurp(dir_ / "t8" / f)) << f;
    }
}
