#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "kcoreset/cli/commands.hpp"
#include "support/instances.hpp"

using namespace kctest;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = fs::path(__FILE__).parent_path() / "data";

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("kcoreset_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    int run(const std::string& args, const std::string& stdin_file = "") const {
        std::string cmd = std::string(KCORESET_CLI_PATH) + " " + args + " 2>" + path("stderr.txt").string();
        if (!stdin_file.empty()) {
            cmd += " <" + stdin_file;
        }
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    json report(const std::string& name) const { return json::parse(read_file(path(name))); }

    std::string data(const std::string& name) const { return (kData / name).string(); }

    fs::path dir_;
};

json strip_timings(json j) {
    j.erase("timings");
    return j;
}

}  // namespace

TEST_F(Cli, TinyCoresetReloadsByteIdentically) {
    ASSERT_EQ(run("build-coreset --input " + data("tiny10.csv") + " --k 2 --seed 1 --coreset " + path("c.json").string() +
                  " --out " + path("r.json").string()),
              0);
    const std::string text = read_file(path("c.json"));
    const auto file = coreset_from_json<Coords>(json::parse(text));
    EXPECT_EQ(to_json(file).dump(1) + "\n", text);
    EXPECT_EQ(report("r.json")["results"]["coreset_fingerprint"], kcoreset::cli::detail::text_fingerprint(text));
}

TEST_F(Cli, WeightSumFieldIsInflatedCount) {
    ASSERT_EQ(run("build-coreset --input " + data("golden60.csv") + " --k 3 --eps 0.2 --seed 3 --coreset " + path("c.json").string() +
                  " --out " + path("r.json").string()),
              0);
    const auto r = report("r.json")["results"];
    const double infl = r["inflation_eps"].get<double>();
    EXPECT_NEAR(r["weight_sum"].get<double>(), (1.0 + 10.0 * infl) * 60.0, 1e-9 * 60.0);
    EXPECT_EQ(r["expected_weight_sum"].get<double>(), (1.0 + 10.0 * infl) * 60.0);
    EXPECT_TRUE(r["weight_sum_ok"].get<bool>());
}

TEST_F(Cli, SameSeedSameReport) {
    const std::string base = "build-coreset --input " + data("golden60.csv") + " --k 3 --seed 5 --coreset " + path("c.json").string();
    ASSERT_EQ(run(base + " --out " + path("a.json").string()), 0);
    const std::string first = read_file(path("c.json"));
    ASSERT_EQ(run(base + " --out " + path("b.json").string()), 0);
    EXPECT_EQ(read_file(path("c.json")), first);
    auto a = strip_timings(report("a.json"));
    auto b = strip_timings(report("b.json"));
    a["config"].erase("out");
    b["config"].erase("out");
    EXPECT_EQ(a.dump(), b.dump());
}

TEST_F(Cli, ExactCoresetVerifiesWithZeroError) {
    ASSERT_EQ(run("build-coreset --input " + data("twin.csv") + " --k 2 --seed 1 --coreset " + path("c.json").string() + " --out " +
                  path("b.json").string()),
              0);
    EXPECT_TRUE(report("b.json")["results"]["degenerate"].get<bool>());
    ASSERT_EQ(run("verify --input " + data("twin.csv") + " --k 2 --seed 1 --coreset " + path("c.json").string() + " --out " +
                  path("v.json").string()),
              0);
    EXPECT_LE(report("v.json")["results"]["max_relative_error"].get<double>(), 1e-12);
}

TEST_F(Cli, CorruptedWeightFailsWithTheQuery) {
    const std::string common = " --input " + data("golden60.csv") + " --k 3 --seed 2 --coreset " + path("c.json").string();
    ASSERT_EQ(run("build-coreset" + common), 0);
    auto file = json::parse(read_file(path("c.json")));
    file["points"][0]["weight"] = file["points"][0]["weight"].get<double>() + 40.0;
    write_file_atomic(path("c.json"), file.dump(1) + "\n");
    ASSERT_EQ(run("verify" + common + " --out " + path("v.json").string()), 0);
    const auto r = report("v.json")["results"];
    EXPECT_FALSE(r["pass"].get<bool>());
    EXPECT_GT(r["max_relative_error"].get<double>(), 0.2);
    EXPECT_EQ(r["argmax_query_centers"].size(), 3u);
    EXPECT_EQ(run("verify --strict" + common + " --out " + path("s.json").string()), 4);
}

TEST_F(Cli, GoldenMaxError) {
    const std::string common = " --input " + data("golden60.csv") + " --k 3 --seed 7 --coreset " + path("c.json").string();
    ASSERT_EQ(run("build-coreset" + common), 0);
    ASSERT_EQ(run("verify" + common + " --out " + path("v.json").string()), 0);
    const auto golden = json::parse(read_file(kData / "golden60_verify.json"));
    const auto r = report("v.json")["results"];
    EXPECT_EQ(r["max_relative_error"].dump(), golden["max_relative_error"].dump());
    EXPECT_EQ(r["argmax_query"], golden["argmax_query"]);
}

TEST_F(Cli, BenchCellEqualsBuildThenVerify) {
    const std::string data_flags = " --input " + data("golden60.csv") + " --seed 4 --k 3 --eps 0.2";
    ASSERT_EQ(run("bench" + data_flags + " --n-list 60 --out " + path("bench.json").string()), 0);
    ASSERT_EQ(run("build-coreset" + data_flags + " --coreset " + path("c.json").string() + " --out " + path("b.json").string()), 0);
    ASSERT_EQ(run("verify" + data_flags + " --coreset " + path("c.json").string() + " --out " + path("v.json").string()), 0);
    const auto cell = report("bench.json")["results"]["cells"][0];
    EXPECT_EQ(cell["build"].dump(), report("b.json")["results"].dump());
    EXPECT_EQ(cell["verify"].dump(), report("v.json")["results"].dump());
}

TEST_F(Cli, BenchGridCardinality) {
    ASSERT_EQ(run("bench --seed 1 --n-list 40,80 --k-list 2,3 --eps-list 0.2,0.3,0.4 --queries 10 --csv " + path("b.csv").string() +
                  " --out " + path("b.json").string()),
              0);
    EXPECT_EQ(report("b.json")["results"]["grid_size"].get<std::size_t>(), 12u);
    EXPECT_EQ(report("b.json")["results"]["cells"].size(), 12u);
    std::ifstream csv(path("b.csv"));
    std::size_t lines = 0;
    for (std::string line; std::getline(csv, line);) {
        ++lines;
    }
    EXPECT_EQ(lines, 13u);
}

TEST_F(Cli, ExitCodes) {
    const std::string in = " --input " + data("golden60.csv");
    EXPECT_EQ(run("build-coreset" + in + " --coreset " + path("c.json").string()), 1);  // no seed
    EXPECT_EQ(run("solve" + in + " --seed 1 --bogus"), 1);
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("solve --input " + path("missing.csv").string() + " --seed 1"), 2);
    EXPECT_EQ(run("solve" + in + " --seed 1 --eps 1.5"), 3);
    EXPECT_EQ(run("solve" + in + " --seed 1 --k 61"), 3);
    ASSERT_EQ(run("build-coreset" + in + " --seed 1 --coreset " + path("c.json").string()), 0);
    EXPECT_EQ(run("verify --input " + data("tiny10.csv") + " --seed 1 --coreset " + path("c.json").string()), 3);
    write_file_atomic(path("bad.csv"), "0,1\n1,0,2\n");
    EXPECT_EQ(run("solve --input " + path("bad.csv").string() + " --seed 1"), 2);
    write_file_atomic(path("m.csv"), "0,1,5\n1,0,1\n5,1,0\n");
    EXPECT_EQ(run("solve --metric-matrix " + path("m.csv").string() + " --k 1 --seed 1"), 3);
    EXPECT_FALSE(fs::exists(path("out.json")));
    EXPECT_EQ(run("solve" + in + " --seed 1 --eps 2 --out " + path("out.json").string()), 3);
    EXPECT_FALSE(fs::exists(path("out.json")));
}

TEST_F(Cli, ReplayReproducesEveryCommand) {
    const std::string in = " --input " + data("golden60.csv");
    const std::vector<std::string> commands = {
        "build-coreset" + in + " --seed 3 --coreset " + path("c.json").string(),
        "build-coreset" + in + " --seed 3 --type threshold --coreset " + path("t.json").string(),
        "bicriteria" + in + " --seed 3",
        "solve" + in + " --seed 3 --method coreset",
        "solve" + in + " --seed 3 --method local",
        "verify" + in + " --seed 3 --coreset " + path("c.json").string(),
        "bench --seed 3 --n-list 50 --queries 20",
        "stream --seed 3 --k 2 --block-size 16" + in,
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto out = path("r" + std::to_string(i) + ".json").string();
        ASSERT_EQ(run(commands[i] + " --out " + out), 0) << commands[i];
        EXPECT_EQ(run("replay --report " + out + " --out " + path("replay.json").string()), 0) << commands[i];
        EXPECT_TRUE(report("replay.json")["results"]["identical"].get<bool>()) << commands[i];
    }
    auto tampered = report("r2.json");
    tampered["results"]["total_cost"] = 1.0;
    write_file_atomic(path("tampered.json"), tampered.dump());
    EXPECT_EQ(run("replay --report " + path("tampered.json").string() + " --out " + path("replay.json").string()), 4);
    EXPECT_EQ(report("replay.json")["results"]["differences"], json::array({"total_cost"}));
}

TEST_F(Cli, StreamFromStdinWithCheckpoints) {
    std::ofstream q(path("q.jsonl"));
    q << "{\"centers\": [[0,0],[6,0]]}\n{\"centers\": [[0,6]]}\n";
    q.close();
    ASSERT_EQ(run("stream --seed 2 --k 2 --block-size 8 --checkpoint-every 20 --query-file " + path("q.jsonl").string() + " --out " +
                      path("s.json").string(),
                  data("golden60.csv")),
              0);
    const auto r = report("s.json")["results"];
    EXPECT_EQ(r["points_seen"].get<std::size_t>(), 60u);
    EXPECT_EQ(r["checkpoints"].size(), 3u);
    EXPECT_EQ(r["checkpoints"][0]["points_seen"].get<std::size_t>(), 20u);
    EXPECT_EQ(r["bucket_levels"], json::array({0, 1, 2}));  // 60 / 8 = 7 blocks
    EXPECT_EQ(r["query_costs"].size(), 2u);
    EXPECT_TRUE(r["space_ok"].get<bool>());
}

TEST_F(Cli, MetricMatrixMode) {
    const auto pts = uniform_box(25, 2, 5.0, Seed{1});
    const auto M = MatrixSpace::from_points(pts);
    std::ostringstream csv;
    csv << std::setprecision(17);
    for (std::size_t i = 0; i < 25; ++i) {
        for (std::size_t j = 0; j < 25; ++j) {
            csv << (j ? "," : "") << M.distance(i, j);
        }
        csv << "\n";
    }
    write_file_atomic(path("m.csv"), csv.str());
    const std::string in = " --metric-matrix " + path("m.csv").string() + " --k 2 --seed 1";
    ASSERT_EQ(run("build-coreset" + in + " --coreset " + path("c.json").string()), 0);
    ASSERT_EQ(run("verify" + in + " --coreset " + path("c.json").string() + " --out " + path("v.json").string()), 0);
    EXPECT_TRUE(report("v.json")["results"]["optimum_exact"].get<bool>());
    ASSERT_EQ(run("bicriteria" + in + " --out " + path("b.json").string()), 0);
    EXPECT_TRUE(report("b.json")["results"]["partition_ok"].get<bool>());
    EXPECT_TRUE(report("b.json")["results"].contains("opt_lower_bound"));
}
