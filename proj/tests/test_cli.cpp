#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

// Black-box tests: drive the installed binary exactly as a user would.
// LOOPREG_CLI_PATH is injected by the build.

namespace {

const std::string cli = LOOPREG_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string out_file = "cli_test_stdout.tmp";
    const std::string cmd = cli + " " + args + " > " + out_file + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out_file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    std::remove(out_file.c_str());
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// column index in the CSV header (fixed layout)
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

TEST_CASE("exit codes signal the failure class") {
    CHECK(run("eval --scheme dimreg --d 4 --alpha 2 --m2 1").exit_code == 3);
    CHECK(run("eval --scheme nonsense --d 3 --alpha 1 --m2 1").exit_code == 2);
    CHECK(run("eval --scheme cutoff --d 3 --alpha 1 --m2 1").exit_code == 2); // K missing
    CHECK(run("series --scheme cutoff --d 3 --alpha 1 --m2 1 --K 1.02").exit_code == 4);
    CHECK(run("eval --scheme dimreg --d 3 --alpha 1 --m2 1").exit_code == 0);
}

TEST_CASE("eval prints the value and a verdict") {
    const RunResult r = run("eval --scheme cutoff --d 3 --alpha 1 --m2 1 --K 10");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "0.43207771958696201"));
    CHECK(contains(r.output, "ok"));

    const RunResult d = run("eval --scheme dimreg --d 3 --alpha 1 --m2 1");
    CHECK(d.exit_code == 0);
    CHECK(contains(d.output, "-0.079577471545947659"));
}

TEST_CASE("extract reproduces the scale-free part") {
    const RunResult c = run("extract --scheme cutoff --d 3 --alpha 1 --m2 1 --K 1e4");
    CHECK(c.exit_code == 0);
    CHECK(contains(c.output, "ok"));

    // massless double cutoff: every term carries a scale, nothing survives
    const RunResult m =
        run("extract --scheme separate_cutoff --d 3 --alpha 1 --m2 0 --K 1e3 --delta 1e-2");
    CHECK(m.exit_code == 0);
    CHECK(contains(m.output, "0"));
    CHECK(contains(m.output, "ok"));

    const RunResult w =
        run("extract --scheme two_sided --d 3 --alpha 1 --m2 1 --delta 1e-3 --xi 1e-3");
    CHECK(w.exit_code == 0);
    CHECK(contains(w.output, "-0.0795774715"));
}

TEST_CASE("verify passes on defaults and is reproducible byte for byte") {
    const RunResult a = run("verify --format json --out verify_a.json");
    CHECK(a.exit_code == 0);
    const RunResult b = run("verify --format json --out verify_b.json");
    CHECK(b.exit_code == 0);
    const std::string first = read_file("verify_a.json");
    const std::string second = read_file("verify_b.json");
    REQUIRE(!first.empty());
    CHECK(first == second);
    std::remove("verify_a.json");
    std::remove("verify_b.json");
}

TEST_CASE("verify output does not depend on the worker count") {
    const std::string env1 = "LOOPREG_THREADS=1 ";
    const std::string env4 = "LOOPREG_THREADS=4 ";
    const std::string cmd1 = env1 + cli + " verify --format json --out verify_t1.json";
    const std::string cmd4 = env4 + cli + " verify --format json --out verify_t4.json";
    REQUIRE(WEXITSTATUS(std::system(cmd1.c_str())) == 0);
    REQUIRE(WEXITSTATUS(std::system(cmd4.c_str())) == 0);
    CHECK(read_file("verify_t1.json") == read_file("verify_t4.json"));
    std::remove("verify_t1.json");
    std::remove("verify_t4.json");
}

TEST_CASE("verify fails loudly when asked for an impossible tolerance") {
    CHECK(run("verify --tol 1e-30").exit_code == 1);
}

TEST_CASE("verify summary reports no failures in CSV form") {
    const RunResult r = run("verify --format csv");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "failed=0"));
}

TEST_CASE("grid sweep shows the cutoff remainder falling like 1/K") {
    const RunResult r = run("grid --scheme cutoff --d 3 --alpha 2 --m2 1 "
                            "--sweep K:10:10000:4:log --format csv --out grid_k.csv");
    REQUIRE(r.exit_code == 0);
    const std::string text = read_file("grid_k.csv");
    std::remove("grid_k.csv");
    const std::vector<std::string> rows = lines_of(text);
    REQUIRE(rows.size() >= 5);
    const std::vector<std::string> header = split_csv(rows[0]);
    size_t res_col = 0;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == "residual_rel") res_col = i;
    REQUIRE(res_col > 0);
    std::vector<double> residuals;
    for (size_t i = 1; i < rows.size(); ++i) {
        const std::vector<std::string> cells = split_csv(rows[i]);
        if (cells.size() != header.size() || cells[0] != "cutoff") continue;
        if (cells[res_col].empty()) continue;
        residuals.push_back(std::stod(cells[res_col]));
    }
    REQUIRE(residuals.size() == 4);
    for (size_t i = 0; i + 1 < residuals.size(); ++i) {
        const double ratio = residuals[i] / residuals[i + 1];
        CHECK(ratio > 9.0);   // K grows tenfold per step; the remainder is O(1/K)
        CHECK(ratio < 11.0);
    }
}

TEST_CASE("grid sweep shows the gaussian remainder falling like sqrt(delta)") {
    const RunResult r = run("grid --scheme gaussian --d 3 --alpha 2 --m2 1 "
                            "--sweep delta:1e-6:1e-2:5:log --format csv --out grid_d.csv");
    REQUIRE(r.exit_code == 0);
    const std::string text = read_file("grid_d.csv");
    std::remove("grid_d.csv");
    const std::vector<std::string> rows = lines_of(text);
    const std::vector<std::string> header = split_csv(rows[0]);
    size_t res_col = 0;
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == "residual_rel") res_col = i;
    std::vector<double> residuals;
    for (size_t i = 1; i < rows.size(); ++i) {
        const std::vector<std::string> cells = split_csv(rows[i]);
        if (cells.size() != header.size() || cells[0] != "gaussian") continue;
        if (cells[res_col].empty()) continue;
        residuals.push_back(std::stod(cells[res_col]));
    }
    REQUIRE(residuals.size() == 5);
    // delta grows tenfold per step; residual ~ sqrt(delta) so ratios near sqrt(10)
    for (size_t i = 0; i + 1 < residuals.size(); ++i) {
        const double ratio = residuals[i + 1] / residuals[i];
        CHECK(ratio > 2.2);
        CHECK(ratio < 4.5);
    }
}

TEST_CASE("a one-point grid is a header, one row, and the summary") {
    const RunResult r = run("grid --scheme dimreg --d 3 --alpha 2 --m2 1 --format csv");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> rows = lines_of(r.output);
    // header + 1 record + blank + summary block
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] ==
          "scheme,check,d,alpha,beta,m2,M2,K,delta,xi,value,err,dimreg,oracle,residual_rel,verdict");
    CHECK(contains(rows[1], "dimreg"));
    CHECK(contains(rows[1], "convergent"));
}

TEST_CASE("config files feed defaults and flags win") {
    {
        std::ofstream cfg("cli_test.cfg");
        cfg << "scheme=cutoff\nd=3\nalpha=1\nm2=1\nK=50\n";
    }
    const RunResult file_only = run("eval --config cli_test.cfg --format csv");
    REQUIRE(file_only.exit_code == 0);
    CHECK(contains(file_only.output, ",50,"));

    const RunResult overridden = run("eval --config cli_test.cfg --K 10 --format csv");
    REQUIRE(overridden.exit_code == 0);
    CHECK(contains(overridden.output, ",10,"));
    CHECK(contains(overridden.output, "0.43207771958696201"));
    std::remove("cli_test.cfg");
}

TEST_CASE("json reports carry config, records, and summary") {
    const RunResult r = run("eval --scheme dimreg --d 3 --alpha 1 --m2 1 --format json");
    REQUIRE(r.exit_code == 0);
    REQUIRE(!r.output.empty());
    CHECK(r.output[0] == '{');
    CHECK(contains(r.output, "\"config\":"));
    CHECK(contains(r.output, "\"records\": ["));
    CHECK(contains(r.output, "\"summary\":"));
}

TEST_CASE("parallel grids produce the same bytes as serial ones") {
    const std::string sweep = " grid --scheme gaussian --d 2.6 --alpha 0.7 --m2 1.3"
                              " --sweep delta:1e-5:1e-2:4:log --sweep m2:0.5:2:3:linear"
                              " --format json --out ";
    const std::string serial = "LOOPREG_THREADS=1 " + cli + sweep + "grid_serial.json";
    const std::string parallel = "LOOPREG_THREADS=7 " + cli + sweep + "grid_parallel.json";
    REQUIRE(WEXITSTATUS(std::system(serial.c_str())) == 0);
    REQUIRE(WEXITSTATUS(std::system(parallel.c_str())) == 0);
    const std::string a = read_file("grid_serial.json");
    const std::string b = read_file("grid_parallel.json");
    REQUIRE(!a.empty());
    CHECK(a == b);
    std::remove("grid_serial.json");
    std::remove("grid_parallel.json");
}

TEST_CASE("series prints a readable expansion") {
    const RunResult r = run("series --scheme cutoff --d 3 --alpha 1 --m2 1 --K 1e4 --terms 10");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.output, "K^"));   // scale powers are spelled out
    CHECK(contains(r.output, "d=3"));  // the point is echoed
}
