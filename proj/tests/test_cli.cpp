// Drives the ssanet binary end to end through the shell.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssanet/pipeline/dataset.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path root = fs::temp_directory_path() / "ssanet_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(SSANET_BIN) + " --quiet " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

/// Document text with the wall-clock line removed.
std::string without_timing(const fs::path& p) {
    std::istringstream is(slurp(p));
    std::string line, out;
    while (std::getline(is, line))
        if (line.find("\"wall_clock_seconds\"") == std::string::npos) out += line + "\n";
    return out;
}

fs::path fresh(const std::string& name) {
    const fs::path p = root / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

const char* small_run =
    "generator.n_samples = 60\n"
    "generator.frames = 8\n"
    "ssa.pop_size = 10\n"
    "ssa.iter_max = 12\n";

}  // namespace

TEST(CliUsage, ExitCodes) {
    const fs::path dir = fresh("usage");
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("--no-such-flag generate"), 2);
    EXPECT_EQ(run("--config " + (dir / "absent.cfg").string() + " generate"), 3);
    EXPECT_EQ(run("--config " + write_config(dir, "ssa.bogus = 1\n").string() + " generate --out " + dir.string()), 2);
    EXPECT_EQ(run("--config " + write_config(dir, "split.test = 0.9\n").string() + " generate --out " + dir.string()),
              2);
    EXPECT_EQ(run("--config-reference"), 0);
}

TEST(CliOptimize, WritesNonIncreasingHistory) {
    const fs::path dir = fresh("optimize");
    ASSERT_EQ(run("optimize --objective sphere --dim 10 --seed 0 --out " + dir.string()), 0);
    const Json doc = Json::parse(slurp(dir / "results.json"));
    const auto h = doc.at("history").get<std::vector<double>>();
    ASSERT_FALSE(h.empty());
    for (std::size_t t = 1; t < h.size(); ++t) EXPECT_LE(h[t], h[t - 1]);
    EXPECT_EQ(doc.at("seed").get<int>(), 0);
    EXPECT_EQ(doc.at("config").at("optimize.objective"), "sphere");
    EXPECT_TRUE(doc.contains("artifact_version"));
    EXPECT_TRUE(fs::exists(dir / "history.csv"));
}

TEST(CliOptimize, UnknownObjectiveIsUsageError) {
    EXPECT_EQ(run("optimize --objective ackley --out " + fresh("unknown").string()), 2);
}

TEST(CliOptimize, RepeatableAcrossRunsAndThreads) {
    const fs::path a = fresh("opt_a"), b = fresh("opt_b");
    ASSERT_EQ(run("optimize --objective rastrigin --dim 5 --seed 4 --out " + a.string()), 0);
    const std::string first = without_timing(a / "results.json");
    ASSERT_EQ(run("--threads 4 optimize --objective rastrigin --dim 5 --seed 4 --out " + a.string()), 0);
    EXPECT_EQ(without_timing(a / "results.json"), first);
    ASSERT_EQ(run("optimize --objective rastrigin --dim 5 --seed 5 --out " + b.string()), 0);
    EXPECT_NE(Json::parse(slurp(b / "results.json"))["history"], Json::parse(slurp(a / "results.json"))["history"]);
}

TEST(CliPipeline, GenerateTrainEvaluateReport) {
    const fs::path dir = fresh("pipeline");
    const std::string cfg = "--config " + write_config(dir, small_run).string() + " ";
    EXPECT_EQ(run(cfg + "train --out " + dir.string()), 3);
    EXPECT_EQ(run(cfg + "evaluate --out " + dir.string()), 3);

    ASSERT_EQ(run(cfg + "generate --out " + dir.string()), 0);
    EXPECT_NO_THROW(ssanet::load_csv((dir / "dataset.csv").string(), 8, 8));
    ASSERT_EQ(run(cfg + "train --out " + dir.string()), 0);
    ASSERT_TRUE(fs::exists(dir / "params.txt"));
    const Json train = Json::parse(slurp(dir / "results.json"));
    const auto h = train.at("history").get<std::vector<double>>();
    EXPECT_EQ(h.size(), 13u);
    for (std::size_t t = 1; t < h.size(); ++t) EXPECT_LE(h[t], h[t - 1]);
    for (const char* k : {"accuracy", "auc", "mae", "mape", "rmse", "mse"}) EXPECT_TRUE(train["metrics"].contains(k)) << k;
    EXPECT_EQ(train["config"]["generator.n_samples"], "60");

    // replay from the embedded config and from the config file
    ASSERT_EQ(run("evaluate --out " + dir.string()), 0);
    const Json ev = Json::parse(slurp(dir / "metrics.json"));
    EXPECT_NEAR(ev["metrics"]["auc"].get<double>(), train["metrics"]["auc"].get<double>(), 1e-12);
    EXPECT_EQ(ev["metrics"]["accuracy"], train["metrics"]["accuracy"]);
    ASSERT_EQ(run(cfg + "evaluate --out " + dir.string()), 0);
    EXPECT_NEAR(Json::parse(slurp(dir / "metrics.json"))["metrics"]["auc"].get<double>(),
                train["metrics"]["auc"].get<double>(), 1e-12);

    // params written for a different architecture
    const std::string other = "--config " + write_config(dir, std::string(small_run) + "network.gru_hidden = 5\n").string();
    EXPECT_EQ(run(other + " evaluate --out " + dir.string()), 4);

    const fs::path rep = fresh("pipeline_report");
    ASSERT_EQ(run("report " + (dir / "results.json").string() + " " + (dir / "metrics.json").string() + " --out " +
                  rep.string()),
              0);
    std::istringstream csv(slurp(rep / "report.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "run,MAE,MAPE,RMSE,MSE,Accuracy,AUC");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 2);
    EXPECT_EQ(run("report " + (dir / "nothing.json").string() + " --out " + rep.string()), 3);
}

TEST(CliPipeline, TrainIsThreadIndependent) {
    const fs::path dir = fresh("threads");
    const std::string cfg = "--config " + write_config(dir, small_run).string() + " --out " + dir.string() + " ";
    ASSERT_EQ(run(cfg + "generate"), 0);
    ASSERT_EQ(run(cfg + "--threads 1 train"), 0);
    const std::string one = without_timing(dir / "results.json"), p1 = slurp(dir / "params.txt");
    ASSERT_EQ(run(cfg + "--threads 4 train"), 0);
    EXPECT_EQ(without_timing(dir / "results.json"), one);
    EXPECT_EQ(slurp(dir / "params.txt"), p1);
}

TEST(CliPipeline, CorruptParamsIsConsistencyError) {
    const fs::path dir = fresh("corrupt");
    const std::string cfg = "--config " + write_config(dir, small_run).string() + " --out " + dir.string() + " ";
    ASSERT_EQ(run(cfg + "generate"), 0);
    ASSERT_EQ(run(cfg + "train"), 0);
    std::ofstream(dir / "params.txt", std::ios::app) << "1.0\n";
    EXPECT_EQ(run(cfg + "evaluate"), 4);
    fs::remove(dir / "params.txt");
    EXPECT_EQ(run(cfg + "evaluate"), 3);
}
