#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "guichard/cli.hpp"

namespace fs = std::filesystem;
using namespace guichard;

namespace {

const std::string share = GUICHARD_SHARE_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "guichard");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string spec(const std::string& name) { return share + "/" + name; }

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("guichard_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST(CliVerify, PassingFamiliesExitZero) {
    for (const char* name : {"elliptic.json", "one_constant_a.json", "one_constant_b2.json", "dilation_a.json"}) {
        const auto r = run_cli({"verify", "--spec", spec(name)});
        EXPECT_EQ(r.code, 0) << name << "\n" << r.err << r.out;
        const auto j = io::Json::parse(r.out);
        EXPECT_TRUE(j["pass"].get<bool>());
        EXPECT_LT(j["first_order"]["entries"][0]["max_abs"].get<double>(), 1e-8);
    }
}

TEST(CliVerify, ConstantUnitCoefficientsFail) {
    const auto r = run_cli({"verify", "--spec", spec("constant_unit.json")});
    EXPECT_EQ(r.code, 2);
}

TEST(CliVerify, MissingSpecIsUsageError) {
    const auto r = run_cli({"verify", "--spec", "/nonexistent/spec.json"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("cannot open"), std::string::npos);
    EXPECT_EQ(run_cli({"verify"}).code, 1);
}

TEST(CliVerify, CsvFormat) {
    const auto r = run_cli({"verify", "--spec", spec("elliptic.json"), "--format", "csv"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.out), "system,family,max_abs,mean_abs,pass");
}

TEST(CliVerify, SingularityExitCode) {
    TempDir tmp;
    std::ofstream(tmp.file("zero.json")) << R"({"type": "constant", "l": [0, 1, 1], "box": [[0,1],[0,1],[0,1]]})";
    EXPECT_EQ(run_cli({"verify", "--spec", tmp.file("zero.json")}).code, 3);
}

TEST(CliVerify, InvalidSpecIsUsageError) {
    TempDir tmp;
    std::ofstream(tmp.file("bad.json")) << R"({"type": "translation", "alpha": [1, 1, 1], "c": [1, -1, -2],
        "lambda": -4, "l1_0": 1, "xi_range": [-0.2, 0.2]})";
    const auto r = run_cli({"verify", "--spec", tmp.file("bad.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("alpha1^2"), std::string::npos);
}

TEST(CliVerify, WritesReportFile) {
    TempDir tmp;
    const auto r = run_cli({"verify", "--spec", spec("elliptic.json"), "--out", tmp.file("report.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verify: pass"), std::string::npos);
    const auto j = io::Json::parse(slurp(tmp.file("report.json")));
    EXPECT_EQ(j["command"], "verify");
    EXPECT_EQ(j["family"], "translation");
}

TEST(CliGeometry, EllipticCsvAndVerdict) {
    const auto r = run_cli({"geometry", "--spec", spec("elliptic.json"), "--grid", "4x4x4"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "x1,x2,x3,K1,K2,K3,sum,grad_norm,H");
    EXPECT_NE(r.out.find("cyclicity: non_cyclic"), std::string::npos);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line) && line.find(',') != std::string::npos) {
        std::vector<double> v;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        ASSERT_EQ(v.size(), 9u);
        EXPECT_NEAR(v[3], 6.0, 1e-9);
        EXPECT_LT(std::abs(v[6]), 1e-10);
        ++rows;
    }
    EXPECT_EQ(rows, 64);
}

TEST(CliGeometry, OneConstantCurvaturesVanish) {
    const auto r = run_cli({"geometry", "--spec", spec("one_constant_a.json"), "--format", "json"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = io::Json::parse(r.out.substr(0, r.out.rfind("curvature sum")));
    for (const auto& p : j["points"]) {
        for (const auto& k : p["K"]) {
            EXPECT_EQ(k.get<double>(), 0.0);
        }
    }
    EXPECT_EQ(j["cyclicity"]["verdict"], "cyclic_compatible");
}

TEST(CliGeometry, GnuplotHeader) {
    TempDir tmp;
    const auto r = run_cli(
        {"geometry", "--spec", spec("elliptic.json"), "--format", "gnuplot", "--out", tmp.file("g.dat"), "--seed", "5"});
    EXPECT_EQ(r.code, 0);
    const std::string text = slurp(tmp.file("g.dat"));
    std::istringstream in(text);
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    EXPECT_EQ(l1.rfind("# ", 0), 0u);
    EXPECT_NE(l1.find("seed=5"), std::string::npos);
    EXPECT_EQ(l2, "# xi l1 l2 l3 K1 K2 K3");
    std::istringstream row(l3);
    int cols = 0;
    for (std::string cell; row >> cell;) {
        ++cols;
    }
    EXPECT_EQ(cols, 7);
}

TEST(CliGeometry, JsonReportsLevelSetsAndPhi) {
    const auto r = run_cli({"geometry", "--spec", spec("elliptic.json"), "--format", "json", "--grid", "3x3x3"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = io::Json::parse(r.out.substr(0, r.out.rfind("curvature sum")));
    ASSERT_EQ(j["level_sets"].size(), 5u);
    for (const auto& lv : j["level_sets"]) {
        ASSERT_TRUE(lv.contains("H_variance")) << lv.dump();
        EXPECT_LT(lv["H_variance"].get<double>(), 1e-18);
        EXPECT_LT(lv["grad_norm_variance"].get<double>(), 1e-18);
    }
    EXPECT_TRUE(j["phi_ode"]["pass"].get<bool>());
}

TEST(CliSymmetry, BuiltinFieldPasses) {
    const auto r = run_cli({"symmetry"});
    EXPECT_EQ(r.code, 0);
    const auto j = io::Json::parse(r.out);
    ASSERT_EQ(j["families"].size(), 6u);
    for (const auto& f : j["families"]) {
        EXPECT_TRUE(f["zero"].get<bool>()) << f["family"];
    }
}

TEST(CliSymmetry, SummaryLinesAccompanyReportFile) {
    TempDir tmp;
    const auto r = run_cli({"symmetry", "--out", tmp.file("s.json")});
    EXPECT_EQ(r.code, 0);
    for (const char* f : {"A: zero", "B: zero", "C: zero", "D: zero", "E: zero", "F: zero"}) {
        EXPECT_NE(r.out.find(f), std::string::npos) << f;
    }
}

TEST(CliSymmetry, SignFlipAnsatzFails) {
    const auto r = run_cli({"symmetry", "--ansatz", spec("sign_flip.ansatz")});
    EXPECT_EQ(r.code, 2);
    const auto j = io::Json::parse(r.out);
    EXPECT_FALSE(j["families"][3]["zero"].get<bool>());
    EXPECT_EQ(j["families"][3]["family"], "D");
}

TEST(CliSymmetry, GroupActionsOnElliptic) {
    TempDir tmp;
    const auto r = run_cli({"symmetry", "--spec", spec("elliptic.json"), "--out", tmp.file("s.json")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("action translate: pass"), std::string::npos);
    const auto j = io::Json::parse(slurp(tmp.file("s.json")));
    EXPECT_EQ(j["group_actions"].size(), 3u);
    EXPECT_EQ(j["checks"].size(), 36u);
    EXPECT_EQ(j["checks"][0]["reduced"], "0");
}

TEST(CliExport, Formats) {
    const auto csv = run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "3x3x3"});
    EXPECT_EQ(csv.code, 0);
    EXPECT_EQ(first_line(csv.out), "x1,x2,x3,l1,l2,l3");
    EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 28);
    const auto js = run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "3x3x3", "--format", "json"});
    EXPECT_EQ(io::Json::parse(js.out)["points"].size(), 27u);
    const auto gp = run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "3x3x3", "--format", "gnuplot"});
    EXPECT_EQ(first_line(gp.out).rfind("# ", 0), 0u);
}

TEST(CliExport, FloatsUseSeventeenDigits) {
    const auto r = run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "3x3x3"});
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const std::string last = line.substr(line.rfind(',') + 1);
    const double v = std::stod(last);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    EXPECT_EQ(last, buf);
}

TEST(CliOptions, GridValidation) {
    EXPECT_EQ(run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "2x3x3"}).code, 1);
    EXPECT_EQ(run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "3x3"}).code, 1);
    EXPECT_EQ(run_cli({"export", "--spec", spec("elliptic.json"), "--grid", "3x3x3x3"}).code, 1);
    EXPECT_EQ(cli::parse_grid("5x6x7"), (std::array<std::size_t, 3>{5, 6, 7}));
}

TEST(CliOptions, ToleranceValidation) {
    EXPECT_EQ(run_cli({"verify", "--spec", spec("elliptic.json"), "--tol", "first_order=-1"}).code, 1);
    EXPECT_EQ(run_cli({"verify", "--spec", spec("elliptic.json"), "--tol", "nonsense=1"}).code, 1);
    EXPECT_EQ(run_cli({"verify", "--spec", spec("elliptic.json"), "--tol", "first_order"}).code, 1);
    EXPECT_EQ(run_cli({"verify", "--spec", spec("elliptic.json"), "--tol", "first_order=1e-20"}).code, 2);
    const auto r = run_cli({"verify", "--spec", spec("elliptic.json"), "--tol", "second_order=1e-3"});
    EXPECT_EQ(io::Json::parse(r.out)["tolerances"]["second_order"].get<double>(), 1e-3);
}

TEST(CliOptions, UnknownCommandAndFormat) {
    EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
    EXPECT_EQ(run_cli({"verify", "--spec", spec("elliptic.json"), "--format", "xml"}).code, 1);
    EXPECT_EQ(run_cli({"verify", "--spec", spec("elliptic.json"), "--format", "gnuplot"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);
}

TEST(CliDeterminism, RepeatedRunsAreByteIdentical) {
    TempDir tmp;
    for (const char* cmd : {"verify", "geometry", "symmetry", "export"}) {
        const std::string a = tmp.file(std::string(cmd) + "_a");
        const std::string b = tmp.file(std::string(cmd) + "_b");
        const auto ra = run_cli({cmd, "--spec", spec("elliptic.json"), "--format", "json", "--seed", "11", "--out", a});
        const auto rb = run_cli({cmd, "--spec", spec("elliptic.json"), "--format", "json", "--seed", "11", "--out", b});
        EXPECT_EQ(ra.code, rb.code);
        EXPECT_EQ(ra.out, rb.out);
        EXPECT_EQ(slurp(a), slurp(b)) << cmd;
        EXPECT_FALSE(slurp(a).empty());
    }
}
