// End-to-end tests that drive the installed binary as a subprocess.
#include "descforge/dataset.hpp"
#include "descforge/report.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace descforge;
using nlohmann::json;
using testutil::run_cli;

namespace {

// One synthetic dataset on disk, shared by the pipeline tests.
struct CliFixture {
    std::filesystem::path dir;
    std::filesystem::path csv;

    CliFixture() {
        dir = testutil::fresh_dir("cli");
        csv = dir / "synthetic.csv";
        const auto r = run_cli("synth --rows 100 --cols 50 --informative 3,7,11 "
                               "--coefficients 2,3,-1 --noise 0.05 --seed 424242 --out-dir " +
                               dir.string());
        REQUIRE(r.exit_code == 0);
        REQUIRE(std::filesystem::exists(csv));
    }
};

json strip_wall_time(json doc) {
    doc.erase("wall_time_seconds");
    return doc;
}

}  // namespace

TEST_CASE("synth writes a loadable dataset with a truth sidecar") {
    const CliFixture fx;
    const auto [table, activity] = load_csv(fx.csv, "activity");
    CHECK(table.rows() == 100);
    CHECK(table.cols() == 50);
    const json truth = read_json_file(fx.dir / "synthetic.truth.json");
    CHECK(truth["informative_indices"] == json({3, 7, 11}));
    CHECK(truth["coefficients"] == json({2.0, 3.0, -1.0}));
    CHECK(truth["seed"] == 424242);

    // Same seed, same bytes.
    const auto dir2 = testutil::fresh_dir("cli2");
    REQUIRE(run_cli("synth --rows 100 --cols 50 --informative 3,7,11 --coefficients 2,3,-1 "
                    "--noise 0.05 --seed 424242 --out-dir " + dir2.string())
                .exit_code == 0);
    CHECK(testutil::read_file(fx.csv) == testutil::read_file(dir2 / "synthetic.csv"));
}

TEST_CASE("select strs emits every artifact and both schemas hold") {
    const CliFixture fx;
    const auto out = testutil::fresh_dir("sel");
    const auto r = run_cli("select strs " + fx.csv.string() +
                           " --runs 40 --nlv 3 --seed 7 --out-dir " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);

    for (const char* name : {"report.json", "selection.json", "traces.csv",
                             "coefficient_paths.csv", "predictions.csv", "model.json"})
        CHECK_MESSAGE(std::filesystem::exists(out / name), name);

    const json report = read_json_file(out / "report.json");
    auto errors = testutil::schema_errors(report, testutil::load_schema("eval_report.schema.json"));
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
    CHECK(report["method"] == "strs");
    CHECK(report["train_size"] == 75);
    CHECK(report["test_size"] == 25);

    const json selection = read_json_file(out / "selection.json");
    errors = testutil::schema_errors(selection,
                                     testutil::load_schema("selection_result.schema.json"));
    for (const auto& e : errors) MESSAGE(e);
    CHECK(errors.empty());
    CHECK(selection["traces"].size() == 40);

    // The saved model reproduces the reported held-out error.
    const LoadedModel loaded = model_from_json(read_json_file(out / "model.json"));
    CHECK(static_cast<Index>(loaded.descriptor_names.size()) ==
          report["n_selected"].get<Index>());
}

TEST_CASE("select mcuve writes a stability table instead of paths") {
    const CliFixture fx;
    const auto out = testutil::fresh_dir("selm");
    const auto r = run_cli("select mcuve " + fx.csv.string() +
                           " --iterations 80 --nlv 3 --seed 7 --out-dir " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(std::filesystem::exists(out / "stability.csv"));
    CHECK(!std::filesystem::exists(out / "coefficient_paths.csv"));
    const json selection = read_json_file(out / "selection.json");
    CHECK(selection["method"] == "mcuve");
    const auto errors = testutil::schema_errors(
        selection, testutil::load_schema("selection_result.schema.json"));
    CHECK(errors.empty());
}

TEST_CASE("selection beats the all-descriptor baseline on planted data") {
    const CliFixture fx;
    const auto sel_dir = testutil::fresh_dir("beats_sel");
    const auto base_dir = testutil::fresh_dir("beats_base");
    REQUIRE(run_cli("select strs " + fx.csv.string() + " --runs 40 --nlv 3 --seed 11 --out-dir " +
                    sel_dir.string())
                .exit_code == 0);
    REQUIRE(run_cli("evaluate " + fx.csv.string() + " --nlv 10 --seed 11 --out-dir " +
                    base_dir.string())
                .exit_code == 0);
    const double rmsep_selected =
        read_json_file(sel_dir / "report.json")["rmsep"].get<double>();
    const double rmsep_full = read_json_file(base_dir / "report.json")["rmsep"].get<double>();
    CHECK(rmsep_selected < rmsep_full);
}

TEST_CASE("fit and predict round trip through a model file") {
    const CliFixture fx;
    const auto out = testutil::fresh_dir("fitpred");
    REQUIRE_MESSAGE(run_cli("fit " + fx.csv.string() + " --nlv 10 --out-dir " + out.string())
                        .exit_code == 0,
                    "fit failed");
    const auto r = run_cli("predict " + fx.csv.string() + " --model " +
                           (out / "model.json").string() + " --out-dir " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);

    std::ifstream in(out / "predictions.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "sample_id,predicted,observed");
    double sq_sum = 0.0;
    int n = 0;
    for (std::string line; std::getline(in, line);) {
        const auto c1 = line.find(','), c2 = line.rfind(',');
        REQUIRE(c1 != std::string::npos);
        REQUIRE(c2 > c1);
        const double predicted = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        const double observed = std::stod(line.substr(c2 + 1));
        sq_sum += (predicted - observed) * (predicted - observed);
        ++n;
    }
    CHECK(n == 100);
    CHECK(std::sqrt(sq_sum / n) < 0.1);  // whole-data fit sits at the noise level
}

TEST_CASE("the cli is deterministic across thread counts") {
    const CliFixture fx;
    const auto a = testutil::fresh_dir("thr1");
    const auto b = testutil::fresh_dir("thr4");
    REQUIRE(run_cli("select strs " + fx.csv.string() + " --runs 15 --nlv 3 --seed 3 --threads 1 "
                    "--out-dir " + a.string()).exit_code == 0);
    REQUIRE(run_cli("select strs " + fx.csv.string() + " --runs 15 --nlv 3 --seed 3 --threads 4 "
                    "--out-dir " + b.string()).exit_code == 0);
    CHECK(testutil::read_file(a / "selection.json") == testutil::read_file(b / "selection.json"));
    CHECK(strip_wall_time(read_json_file(a / "report.json")) ==
          strip_wall_time(read_json_file(b / "report.json")));
}

TEST_CASE("the seed can come from the environment") {
    const CliFixture fx;
    const auto a = testutil::fresh_dir("envseed");
    const auto b = testutil::fresh_dir("flagseed");
    REQUIRE(run_cli("select strs " + fx.csv.string() + " --runs 12 --nlv 3 --out-dir " + a.string(),
                    {{"DESCFORGE_SEED", "9001"}})
                .exit_code == 0);
    REQUIRE(run_cli("select strs " + fx.csv.string() + " --runs 12 --nlv 3 --seed 9001 --out-dir " +
                    b.string())
                .exit_code == 0);
    CHECK(testutil::read_file(a / "selection.json") == testutil::read_file(b / "selection.json"));
}

TEST_CASE("options can come from a config file") {
    const CliFixture fx;
    const auto out = testutil::fresh_dir("cfg");
    const auto cfg_path = out / "run.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[select]\nfolds=5\nruns=10\nnlv=3\n";
    }
    const auto r = run_cli("--config " + cfg_path.string() + " select strs " + fx.csv.string() +
                           " --seed 4 --out-dir " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    const json selection = read_json_file(out / "selection.json");
    CHECK(selection["config"]["cv_folds"] == 5);
    CHECK(selection["config"]["n_runs"] == 10);
}

TEST_CASE("sweep-runs writes one row per replicate") {
    const CliFixture fx;
    const auto out = testutil::fresh_dir("sweep");
    const auto r = run_cli("sweep-runs " + fx.csv.string() +
                           " --runs-list 10,20 --replicates 2 --nlv 3 --out-dir " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    std::ifstream in(out / "sweep.csv");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "n_runs,replicate,rmsecv");
    CHECK(lines[1].rfind("10,1,", 0) == 0);
    CHECK(lines[4].rfind("20,2,", 0) == 0);
    CHECK(r.out.find("median rmsecv") != std::string::npos);
}

TEST_CASE("nlv-curve scans the component counts") {
    const CliFixture fx;
    const auto out = testutil::fresh_dir("curve");
    const auto r = run_cli("nlv-curve " + fx.csv.string() + " --max-lv 6 --out-dir " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    std::ifstream in(out / "nlv_curve.csv");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "nlv,rmsecv,rmsep");
    CHECK(lines[1].rfind("1,", 0) == 0);
    CHECK(r.out.find("chose n_latent=") != std::string::npos);
}

TEST_CASE("usage errors exit with 2, runtime failures with 1") {
    const CliFixture fx;
    const auto bogus = run_cli("select neither " + fx.csv.string());
    CHECK(bogus.exit_code == 2);

    const auto missing = run_cli("select strs /nonexistent/data.csv");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.rfind("error:", 0) == 0);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);  // single line

    const auto no_sub = run_cli("");
    CHECK(no_sub.exit_code == 2);

    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("synth") != std::string::npos);

    // Unknown activity column is a runtime failure with a useful message.
    const auto wrong_col = run_cli("select strs " + fx.csv.string() + " --activity-col nope");
    CHECK(wrong_col.exit_code == 1);
    CHECK(wrong_col.err.find("nope") != std::string::npos);
}

TEST_CASE("constant descriptors are refused unless dropped") {
    const auto dir = testutil::fresh_dir("constcol");
    const auto path = dir / "flat.csv";
    {
        const SyntheticDataset data = synthesize(40, 6, {1, 2}, {1.0, -1.0}, 0.05, 77);
        DescriptorTable table = data.table;
        table.values.col(4).setConstant(3.0);
        write_csv(path, table, data.activity, "activity");
    }
    const auto refused = run_cli("select strs " + path.string() + " --runs 10 --nlv 2");
    CHECK(refused.exit_code == 1);
    CHECK(refused.err.find("x4") != std::string::npos);

    const auto out = testutil::fresh_dir("constok");
    const auto dropped = run_cli("select strs " + path.string() +
                                 " --runs 10 --nlv 2 --drop-constant --out-dir " + out.string());
    REQUIRE_MESSAGE(dropped.exit_code == 0, dropped.err);
    CHECK(dropped.err.find("dropped zero-variance") != std::string::npos);
}
