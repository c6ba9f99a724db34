#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_binary;
std::filesystem::path g_work;

int run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " >> " + (g_work / "cli.log").string() +
                            " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kConfig = R"(
[region]
continuous -3 3

[model]
type glm
link logit
predictors 1 | x1

[ensemble]
sample csv thetas.csv

[algorithm]
delta 0.01
eps 1e-6
multistart 3
max_outer_iter 60

[rounding]
delta_r 0.1
grid 0.5
n 20

[output]
dir out
)";

}  // namespace

TEST_CASE("design/round/verify workflow with exit codes and determinism") {
    const auto cfg_path = g_work / "exp.cfg";
    write(cfg_path, kConfig);
    write(g_work / "thetas.csv", "b0,b1\n1.0,1.0\n0.8,1.2\n1.1,0.9\n");

    const std::string out1 = (g_work / "run1").string();
    const std::string out2 = (g_work / "run2").string();
    REQUIRE(run("design --config " + cfg_path.string() + " --seed 7 --out " + out1) == 0);
    REQUIRE(run("design --config " + cfg_path.string() + " --seed 7 --out " + out2) == 0);

    // identical config + seed => byte-identical outputs
    const std::string d1 = slurp(out1 + "/design.csv");
    CHECK(d1 == slurp(out2 + "/design.csv"));
    CHECK(!d1.empty());
    CHECK(d1.find("x1,weight") == 0);

    // audit log exists and is line-delimited json
    const std::string log = slurp(out1 + "/forlion_log.ndjson");
    CHECK(log.find("\"iteration\":1") != std::string::npos);
    CHECK(log.find("\"d_max\":") != std::string::npos);

    // verify passes on the produced design
    CHECK(run("verify --config " + cfg_path.string() + " --seed 7 --design " + out1 +
              "/design.csv --out " + out1) == 0);

    // rounding produces an exact design with the configured n
    REQUIRE(run("round --config " + cfg_path.string() + " --seed 7 --design " + out1 +
                "/design.csv --out " + out1) == 0);
    const std::string exact = slurp(out1 + "/exact_design.csv");
    CHECK(exact.find("x1,count") == 0);
    long total = 0;
    std::istringstream lines(exact);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        const auto comma = line.rfind(',');
        total += std::stol(line.substr(comma + 1));
    }
    CHECK(total == 20);
}

TEST_CASE("a deliberately unbalanced design fails verify with exit 3") {
    const auto cfg_path = g_work / "exp.cfg";
    write(cfg_path, kConfig);
    write(g_work / "thetas.csv", "b0,b1\n1.0,1.0\n0.8,1.2\n1.1,0.9\n");
    write(g_work / "bad_design.csv", "x1,weight\n-3,0.9\n3,0.1\n");
    CHECK(run("verify --config " + cfg_path.string() + " --seed 7 --design " +
              (g_work / "bad_design.csv").string() + " --out " + (g_work / "bad").string()) == 3);
}

TEST_CASE("validation failures exit with code 1 before any computation") {
    const auto bad_cfg = g_work / "bad.cfg";
    write(bad_cfg, "[region]\ncontinuous 2 -2\n");
    CHECK(run("design --config " + bad_cfg.string()) == 1);

    const auto cfg_path = g_work / "exp.cfg";
    write(cfg_path, kConfig);
    write(g_work / "thetas.csv", "b0,b1\n1.0,1.0\n");
    write(g_work / "malformed.csv", "x1,weight\n0.0,not_a_number\n");
    CHECK(run("verify --config " + cfg_path.string() + " --design " +
              (g_work / "malformed.csv").string()) == 1);
    CHECK(run("design --config " + (g_work / "missing.cfg").string()) == 1);
}

TEST_CASE("efficiency subcommand writes summary and per-theta tables") {
    const auto cfg_path = g_work / "exp.cfg";
    write(cfg_path, kConfig);
    write(g_work / "thetas.csv", "b0,b1\n1.0,1.0\n0.8,1.2\n1.1,0.9\n");
    write(g_work / "da.csv", "x1,weight\n-1.2,0.5\n1.0,0.5\n");
    write(g_work / "db.csv", "x1,weight\n-0.4,0.5\n0.4,0.5\n");
    const std::string out = (g_work / "eff").string();
    REQUIRE(run("efficiency --config " + cfg_path.string() + " --designs " +
                (g_work / "da.csv").string() + " " + (g_work / "db.csv").string() +
                " --thetas " + (g_work / "thetas.csv").string() + " --reference 0 --out " +
                out) == 0);
    const std::string summary = slurp(out + "/efficiency_summary.csv");
    CHECK(summary.find("design,min,q1,median,q3,max,mean") == 0);
    CHECK(summary.find("1.000000") != std::string::npos);  // self-reference row
    const std::string per_theta = slurp(out + "/efficiency_per_theta.csv");
    CHECK(per_theta.find("theta_index") == 0);
    CHECK(!slurp(out + "/objective_bins_0.csv").empty());
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <ewdesign-binary> [configs-dir]\n");
        return 2;
    }
    g_binary = argv[1];
    g_work = std::filesystem::temp_directory_path() / "ewd_cli_test";
    std::filesystem::remove_all(g_work);
    std::filesystem::create_directories(g_work);

    doctest::Context context;
    context.applyCommandLine(1, argv);
    const int res = context.run();
    std::filesystem::remove_all(g_work);
    return res;
}
