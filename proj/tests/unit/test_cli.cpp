#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "warpgeo/cli.hpp"
#include "warpgeo/serialize.hpp"

using namespace warpgeo;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("warpgeo_cli_" + std::to_string(::getpid()) + "_" +
                                             std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

// Scoped WARPGEO_CONFIG override.
class ConfigEnv {
public:
    explicit ConfigEnv(const std::string& value) { ::setenv("WARPGEO_CONFIG", value.c_str(), 1); }
    ~ConfigEnv() { ::unsetenv("WARPGEO_CONFIG"); }
};

}  // namespace

TEST(CliCurvature, OneOverRIsFlat) {
    const auto r = run({"curvature", "--warp", "one_over_r", "--r-min", "1", "--r-max", "2", "--n", "3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], "r,K,K_oracle,abs_diff");
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].substr(rows[i].find(',') + 1, 2), "0,");
}

TEST(CliCurvature, IdentityAndExp) {
    const auto r = run({"curvature", "--warp", "r", "--r-min", "1", "--r-max", "3", "--n", "2"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(lines(r.out)[1].rfind("1,-2,", 0), 0u);
    const auto e = run({"curvature", "--warp", "exp", "--r-min", "0.5", "--r-max", "3", "--n", "4", "--format",
                        "json"});
    ASSERT_EQ(e.code, kExitOk);
    const json j = json::parse(e.out);
    EXPECT_EQ(j.at("warp"), "exp");
    ASSERT_EQ(j.at("rows").size(), 4u);
    for (const auto& row : j.at("rows")) EXPECT_EQ(row.at("K").get<double>(), -1.0);
}

TEST(CliCurvature, RangeOutsideDomainIsError) {
    const auto r = run({"curvature", "--warp", "flat:1,5", "--r-min", "1", "--r-max", "6", "--n", "3"});
    EXPECT_EQ(r.code, kExitError);
    EXPECT_NE(r.err.find("warpgeo: "), std::string::npos);
}

TEST(CliGeodesic, InwardRayEscapes) {
    const auto r = run({"geodesic", "--r0", "1", "--angle", "3.141592653589793", "--s-max", "5"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto summary = lines(r.out).back();
    EXPECT_EQ(summary.rfind("# escaped=true,length=0.99999", 0), 0u) << summary;
}

TEST(CliGeodesic, QuarterTurnJson) {
    const auto r = run({"geodesic", "--r0", "1", "--angle", "1.5707963267948966", "--s-max", "1", "--format",
                        "json"});
    ASSERT_EQ(r.code, kExitOk);
    const json j = json::parse(r.out);
    EXPECT_FALSE(j.at("escaped").get<bool>());
    EXPECT_NEAR(j.at("end").at("r").get<double>(), std::sqrt(2.0), 1e-8);
    EXPECT_NEAR(j.at("end").at("t").get<double>(), std::atan(1.0), 1e-8);
    EXPECT_EQ(j.at("columns").size(), 5u);
}

TEST(CliGeodesic, HorizontalRayKeepsT) {
    const auto r = run({"geodesic", "--warp", "r", "--r0", "1", "--t0", "0.25", "--s-max", "3"});
    ASSERT_EQ(r.code, kExitOk);
    const auto rows = lines(r.out);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        std::stringstream ss(rows[i]);
        std::string s, rr, t;
        std::getline(ss, s, ',');
        std::getline(ss, rr, ',');
        std::getline(ss, t, ',');
        EXPECT_EQ(std::stod(t), 0.25);
    }
}

TEST(CliConnect, ExitCodesAndResults) {
    const auto ng = run({"connect", "--p0", "1,0", "--p1", "1,3.141592653589793"});
    EXPECT_EQ(ng.code, kExitNoGeodesic);
    EXPECT_EQ(json::parse(ng.out).at("result"), "no_geodesic");

    const auto hz = run({"connect", "--p0", "1,0", "--p1", "2,0"});
    EXPECT_EQ(hz.code, kExitOk);
    const auto hres = connect_result_from_json(json::parse(hz.out));
    EXPECT_EQ(std::get<Horizontal>(hres).length, 1.0);

    const auto fd = run({"connect", "--p0", "1,0", "--p1", "1,1.5707963267948966"});
    EXPECT_EQ(fd.code, kExitOk);
    const auto fres = std::get<Found>(connect_result_from_json(json::parse(fd.out)));
    EXPECT_NEAR(fres.s, std::sqrt(2.0), 1e-9);
}

TEST(CliConnect, Ds2AndUnsupportedWarp) {
    const auto r = run({"connect", "--warp", "r", "--p0", "1,0", "--p1", "1,1"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(json::parse(r.out).at("result"), "found");
    EXPECT_EQ(run({"connect", "--warp", "exp", "--p0", "1,0", "--p1", "1,1"}).code, kExitError);
    EXPECT_EQ(run({"connect", "--p0", "1,0", "--p1", "1,0"}).code, kExitError);
    EXPECT_EQ(run({"connect", "--p0", "-1,0", "--p1", "1,0"}).code, kExitError);
    EXPECT_EQ(run({"connect", "--p0", "1", "--p1", "1,0"}).code, kExitError);
}

TEST(CliConnect, CsvFormat) {
    const auto r = run({"connect", "--format", "csv", "--p0", "1,0", "--p1", "2,0"});
    ASSERT_EQ(r.code, kExitOk);
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1], "horizontal,1,,,,0");
}

TEST(CliSweep, FlipsAtPi) {
    const auto r = run({"sweep", "--p0", "1,0", "--r1", "1:1:1", "--t1", "-3.5:3.5:29"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 30u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> cells;
        std::stringstream ss(rows[i]);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        const double t1 = std::stod(cells[3]);
        EXPECT_EQ(cells[4] == "1", std::abs(t1) < std::acos(-1.0)) << rows[i];
    }
}

TEST(CliSweep, EmptyGridAndWorkerIndependence) {
    const auto empty = run({"sweep", "--p0", "1,0", "--r1", "1:2:0", "--t1", "0:1:3"});
    ASSERT_EQ(empty.code, kExitOk);
    EXPECT_EQ(empty.out, "r0,t0,r1,t1,exists,length,iterations\n");
    const auto one = run({"sweep", "--p0", "1,0", "--r1", "0.5:2:4", "--t1", "-1:1:5", "--workers", "1"});
    const auto many = run({"sweep", "--p0", "1,0", "--r1", "0.5:2:4", "--t1", "-1:1:5", "--workers", "0"});
    ASSERT_EQ(one.code, kExitOk);
    EXPECT_EQ(one.out, many.out);
    EXPECT_EQ(run({"sweep", "--p0", "1,0", "--r1", "0:1:2", "--t1", "0:1:2"}).code, kExitError);
}

TEST(CliRiccati, Cases) {
    const auto blow = run({"riccati", "--profile", "zero", "--r0", "1", "--H0", "1", "--range", "0.5,3"});
    ASSERT_EQ(blow.code, kExitOk) << blow.err;
    const std::string summary = lines(blow.out).back();
    ASSERT_EQ(summary.rfind("# ", 0), 0u);
    const json rep = json::parse(summary.substr(2));
    EXPECT_NEAR(rep.at("blowup_location").get<double>(), 2.0, 1e-4);
    EXPECT_TRUE(rep.at("pass").get<bool>());

    const auto inv = run({"riccati", "--profile", "inv2:-2", "--r0", "1", "--H0", "1", "--range", "0.5,4",
                          "--format", "json"});
    ASSERT_EQ(inv.code, kExitOk);
    const json j = json::parse(inv.out);
    const auto r = j.at("field").at("r").get<std::vector<double>>();
    const auto H = j.at("field").at("H").get<std::vector<double>>();
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(H[i], 1.0 / r[i], 1e-8);
    EXPECT_TRUE(riccati_report_from_json(j.at("report")).pass);

    const auto fixed = run({"riccati", "--profile", "const:-1", "--r0", "1", "--H0", "1", "--range", "0.5,3",
                            "--format", "json"});
    const json fixed_json = json::parse(fixed.out);
    for (double h : fixed_json.at("field").at("H")) EXPECT_NEAR(h, 1.0, 1e-12);

    EXPECT_EQ(run({"riccati", "--profile", "quartic", "--r0", "1", "--H0", "1", "--range", "0.5,3"}).code,
              kExitError);
}

TEST(CliIsometry, Verdicts) {
    auto verdict = [](const std::vector<std::string>& args) {
        const auto r = run(args);
        EXPECT_EQ(r.code, kExitOk) << r.err;
        return isometry_report_from_json(json::parse(r.out)).verdict;
    };
    EXPECT_EQ(verdict({"isometry", "--warp", "r", "--k", "1", "--l", "2"}), Verdict::HolomorphicIsometry);
    EXPECT_EQ(verdict({"isometry", "--warp", "r", "--k", "2", "--l", "0"}), Verdict::Neither);
    EXPECT_EQ(verdict({"isometry", "--warp", "one_over_r", "--k", "1", "--l", "0"}), Verdict::HolomorphicIsometry);
    EXPECT_EQ(run({"isometry", "--k", "-1"}).code, kExitError);
    EXPECT_EQ(run({"isometry", "--k", "1", "--grid", "1,2,3"}).code, kExitError);
}

TEST(CliGlobal, UsageErrors) {
    EXPECT_EQ(run({}).code, kExitError);
    EXPECT_EQ(run({"bogus"}).code, kExitError);
    EXPECT_EQ(run({"curvature", "--r-min", "1"}).code, kExitError);
    EXPECT_EQ(run({"curvature", "--warp", "nope", "--r-min", "1", "--r-max", "2", "--n", "3"}).code, kExitError);
    EXPECT_EQ(run({"connect", "--tol", "-1", "--p0", "1,0", "--p1", "2,1"}).code, kExitError);
    EXPECT_EQ(run({"connect", "--format", "xml", "--p0", "1,0", "--p1", "2,1"}).code, kExitError);
}

TEST(CliGlobal, HelpDocumentsDefaults) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    for (const char* needle : {"--warp", "--format", "--tol", "--seed", "--out", "WARPGEO_CONFIG", "curvature",
                               "geodesic", "connect", "sweep", "riccati", "isometry", "default"}) {
        EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
    }
}

TEST(CliOutput, OutFileAndDeterminism) {
    TempDir dir;
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    const std::vector<std::string> base{"geodesic", "--warp", "neg2:1,1,1", "--r0", "1", "--angle", "0.8",
                                        "--s-max", "2", "--seed", "5"};
    auto with_out = [&](const fs::path& p) {
        auto args = base;
        args.insert(args.end(), {"--out", p.string()});
        return run(args);
    };
    const auto ra = with_out(a);
    const auto rb = with_out(b);
    ASSERT_EQ(ra.code, kExitOk) << ra.err;
    EXPECT_EQ(ra.out, rb.out);
    EXPECT_EQ(ra.out.rfind("escaped=false,length=2", 0), 0u) << ra.out;
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).rfind("s,r,t,f,g\n", 0), 0u);
}

TEST(CliOutput, IsometrySeedDeterminism) {
    const std::vector<std::string> args{"isometry", "--warp", "r", "--k", "1.3", "--seed", "42"};
    EXPECT_EQ(run(args).out, run(args).out);
    const auto other = run({"isometry", "--warp", "r", "--k", "1.3", "--seed", "43"});
    EXPECT_EQ(json::parse(other.out).at("seed").get<int>(), 43);
}

TEST(CliOutput, PlotScript) {
    TempDir dir;
    const auto data = dir / "curv.csv";
    const auto plot = dir / "curv.gp";
    const auto r = run({"curvature", "--warp", "r", "--r-min", "1", "--r-max", "2", "--n", "5", "--out",
                        data.string(), "--plot", plot.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string script = slurp(plot);
    EXPECT_NE(script.find("plot '" + data.string() + "'"), std::string::npos);
    EXPECT_EQ(run({"curvature", "--r-min", "1", "--r-max", "2", "--n", "5", "--plot", plot.string()}).code,
              kExitError);
}

TEST(CliConfig, FileViaEnvironmentAndOverride) {
    TempDir dir;
    const auto cfg = dir / "cfg.json";
    const auto out = dir / "out.json";
    {
        std::ofstream f(cfg);
        f << json{{"warp", "r"}, {"output", {{"format", "json"}, {"path", out.string()}}}, {"tol", 1e-9}}.dump();
    }
    {
        ConfigEnv env(cfg.string());
        const auto r = run({"curvature", "--r-min", "1", "--r-max", "2", "--n", "2"});
        ASSERT_EQ(r.code, kExitOk) << r.err;
        EXPECT_TRUE(r.out.empty());
        const json j = json::parse(slurp(out));
        EXPECT_EQ(j.at("warp"), "r");
        EXPECT_EQ(j.at("rows")[0].at("K").get<double>(), -2.0);

        // Command-line flags win over the file.
        const auto o = run({"curvature", "--warp", "exp", "--format", "csv", "--out", (dir / "x.csv").string(),
                            "--r-min", "1", "--r-max", "2", "--n", "2"});
        ASSERT_EQ(o.code, kExitOk);
        EXPECT_EQ(lines(slurp(dir / "x.csv"))[1].rfind("1,-1,", 0), 0u) << slurp(dir / "x.csv");
    }
    const auto explicit_cfg = run({"--config", cfg.string(), "curvature", "--r-min", "1", "--r-max", "2", "--n",
                                   "2"});
    EXPECT_EQ(explicit_cfg.code, kExitOk);
}

TEST(CliConfig, CustomWarpFromFile) {
    TempDir dir;
    const auto cfg = dir / "custom.json";
    std::vector<double> h;
    for (int i = 0; i <= 100; ++i) h.push_back(std::exp(1.0 + 2.0 * i / 100.0));
    {
        std::ofstream f(cfg);
        f << json{{"warp", {{"kind", "custom"}, {"r_min", 1.0}, {"r_max", 3.0}, {"h", h}}}}.dump();
    }
    const auto r = run({"--config", cfg.string(), "curvature", "--r-min", "1.5", "--r-max", "2.5", "--n", "3",
                        "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json parsed = json::parse(r.out);
    for (const auto& row : parsed.at("rows")) EXPECT_NEAR(row.at("K").get<double>(), -1.0, 1e-4);
}

TEST(CliConfig, BadFiles) {
    TempDir dir;
    EXPECT_EQ(run({"--config", (dir / "missing.json").string(), "curvature", "--r-min", "1", "--r-max", "2", "--n",
                   "2"})
                  .code,
              kExitError);
    const auto bad = dir / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"integrator": {"abs_tol": -1}})";
    }
    EXPECT_EQ(run({"--config", bad.string(), "curvature", "--r-min", "1", "--r-max", "2", "--n", "2"}).code,
              kExitError);
    EXPECT_THROW(load_config(bad.string()), std::invalid_argument);
    const auto good = dir / "good.json";
    {
        std::ofstream f(good);
        f << R"({"warp": "flat:1,5", "integrator": {"abs_tol": 1e-8, "max_step": 0.5}, "seed": 9})";
    }
    const RunConfig c = load_config(good.string());
    EXPECT_EQ(c.warp.kind, WarpKind::FlatFamily);
    EXPECT_EQ(*c.abs_tol, 1e-8);
    EXPECT_EQ(*c.max_step, 0.5);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_FALSE(c.format.has_value());
}

#ifdef WARPGEO_CLI_PATH
TEST(CliBinary, ExitStatuses) {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(WARPGEO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("connect --p0 1,0 --p1 1,3.141592653589793"), 2);
    EXPECT_EQ(status("connect --p0 1,0 --p1 2,0"), 0);
    EXPECT_EQ(status("connect --p0 1,0 --p1 1,1.5707963267948966"), 0);
    EXPECT_EQ(status("isometry --k -1"), 1);
    EXPECT_EQ(status("frobnicate"), 1);
    EXPECT_EQ(status("--help"), 0);
}
#endif
