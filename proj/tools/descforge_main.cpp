// descforge - descriptor selection workbench for PLS activity models.
//
// Subcommands: synth, fit, predict, select, sweep-runs, nlv-curve, evaluate.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include "descforge/dataset.hpp"
#include "descforge/mcuve.hpp"
#include "descforge/parallel.hpp"
#include "descforge/pls.hpp"
#include "descforge/report.hpp"
#include "descforge/strs.hpp"
#include "descforge/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace descforge;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string activity_col = "activity";
    std::uint64_t seed = 42;
    std::string out_dir = ".";
    int threads = 1;
    bool drop_constant = false;
    std::string scaling = "autoscale";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_scaling = true) {
    cmd->add_option("--activity-col", opts.activity_col, "Name of the activity column")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Master RNG seed")
        ->envname("DESCFORGE_SEED")
        ->capture_default_str();
    cmd->add_option("--out-dir", opts.out_dir, "Directory for output files")
        ->capture_default_str();
    cmd->add_option("--threads", opts.threads, "Worker threads (results are identical at any count)")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();
    cmd->add_flag("--drop-constant", opts.drop_constant,
                  "Drop zero-variance descriptors instead of failing");
    if (with_scaling)
        cmd->add_option("--scaling", opts.scaling, "Descriptor scaling: autoscale or center")
            ->check(CLI::IsMember({"autoscale", "center"}))
            ->capture_default_str();
}

fs::path prepare_out_dir(const CommonOpts& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

DescriptorTable keep_columns(const DescriptorTable& table, const std::vector<Index>& keep) {
    DescriptorTable out;
    out.values = table.values(Eigen::all, keep);
    out.sample_ids = table.sample_ids;
    out.descriptor_names.reserve(keep.size());
    for (Index j : keep) out.descriptor_names.push_back(table.descriptor_names[static_cast<std::size_t>(j)]);
    return out;
}

// Rejects (or, with --drop-constant, removes) columns that are constant over
// the given rows; constant columns cannot be autoscaled and carry no signal.
DescriptorTable handle_constant_columns(const DescriptorTable& table,
                                        const std::vector<Index>& rows, const CommonOpts& opts) {
    const Matrix view = table.values(rows, Eigen::all);
    const std::vector<Index> constant = zero_variance_columns(view);
    if (constant.empty()) return table;
    std::string names;
    for (std::size_t i = 0; i < constant.size(); ++i) {
        if (i) names += ", ";
        names += table.descriptor_names[static_cast<std::size_t>(constant[i])];
    }
    if (!opts.drop_constant)
        throw data_error("zero-variance descriptor(s) on the training rows: " + names +
                         " (pass --drop-constant to remove them)");
    std::vector<Index> keep;
    for (Index j = 0; j < table.cols(); ++j)
        if (std::find(constant.begin(), constant.end(), j) == constant.end()) keep.push_back(j);
    if (keep.size() < 2) throw data_error("fewer than 2 descriptors remain after dropping: " + names);
    std::cerr << "note: dropped zero-variance descriptor(s): " << names << "\n";
    return keep_columns(table, keep);
}

std::vector<std::string> gather_names(const std::vector<std::string>& names,
                                      const std::vector<Index>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (Index j : idx) out.push_back(names[static_cast<std::size_t>(j)]);
    return out;
}

std::vector<std::string> gather_ids(const std::vector<std::string>& ids,
                                    const std::vector<Index>& idx) {
    return gather_names(ids, idx);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
    CommonOpts common;
    std::string out = "synthetic.csv";
    Index rows = 100;
    Index cols = 50;
    std::vector<Index> informative = {3, 7, 11};
    std::vector<double> coefficients = {2.0, 3.0, -1.0};
    double noise = 0.05;
};

int cmd_synth(const SynthOpts& opts) {
    const SyntheticDataset data = synthesize(opts.rows, opts.cols, opts.informative,
                                             opts.coefficients, opts.noise, opts.common.seed);
    const fs::path dir = prepare_out_dir(opts.common);
    const fs::path csv_path = dir / opts.out;
    write_csv(csv_path, data.table, data.activity, opts.common.activity_col);
    fs::path truth_path = csv_path;
    truth_path.replace_extension(".truth.json");
    write_json_file(truth_path, json{{"rows", opts.rows},
                                     {"cols", opts.cols},
                                     {"informative_indices", data.truth.informative_indices},
                                     {"coefficients", data.truth.coefficients},
                                     {"noise_sd", data.truth.noise_sd},
                                     {"seed", data.truth.seed},
                                     {"activity_column", opts.common.activity_col}});
    std::cout << "wrote " << csv_path.string() << " (" << opts.rows << "x" << opts.cols
              << ") and " << truth_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// fit / predict

struct FitOpts {
    CommonOpts common;
    std::string data;
    std::string out = "model.json";
    int nlv = 0;  // 0: choose by cross-validated F-test
    int max_lv = 15;
    int folds = 10;
    double alpha = 0.05;
};

int cmd_fit(const FitOpts& opts) {
    auto [table, activity] = load_csv(opts.data, opts.common.activity_col);
    table = handle_constant_columns(table, iota_indices(table.rows()), opts.common);
    const ScalingMode mode = scaling_mode_from_string(opts.common.scaling);

    int nlv = opts.nlv;
    if (nlv == 0) {
        const ScalingParams params = fit_scaling(table.values, mode, &table.descriptor_names);
        const Matrix scaled = apply_scaling(table.values, params);
        const Index largest_fold = table.rows() / opts.folds + 1;
        const int cap = static_cast<int>(
            std::min<Index>({static_cast<Index>(opts.max_lv), table.cols(),
                             table.rows() - largest_fold - 1}));
        if (cap < 1) throw config_error("dataset too small to choose n_latent by cross-validation");
        const std::uint64_t fold_seed = derived_seed(opts.common.seed, kFoldSeedSalt);
        const int threads = opts.common.threads;
        const int folds = opts.folds;
        nlv = select_n_latent(
            scaled, activity, cap,
            [&, fold_seed, folds, threads](const Matrix& mx, const Vector& my, int l) {
                return kfold_rmsecv(mx, my, l, folds, fold_seed, ScalingMode::center, threads);
            },
            opts.alpha);
        std::cout << "chose n_latent=" << nlv << " by " << folds << "-fold cross-validation\n";
    }

    const PlsModel model = fit_pls(table.values, activity, nlv, mode);
    const fs::path out_path = prepare_out_dir(opts.common) / opts.out;
    write_json_file(out_path, model_to_json(model, table.descriptor_names));
    const Vector fitted = predict(model, table.values);
    std::cout << "fit " << table.rows() << "x" << table.cols() << " with n_latent="
              << model.n_latent << ", training rmse=" << format_double(rmsep(activity, fitted))
              << "; wrote " << out_path.string() << "\n";
    return 0;
}

struct PredictOpts {
    CommonOpts common;
    std::string data;
    std::string model;
    std::string out = "predictions.csv";
};

int cmd_predict(const PredictOpts& opts) {
    const LoadedModel loaded = model_from_json(read_json_file(opts.model));
    LoadedTable input = load_csv_optional_activity(opts.data, opts.common.activity_col);

    // Project the input onto the model's fitted columns by name.
    std::vector<Index> projection;
    projection.reserve(loaded.descriptor_names.size());
    for (const auto& name : loaded.descriptor_names) {
        const auto it = std::find(input.table.descriptor_names.begin(),
                                  input.table.descriptor_names.end(), name);
        if (it == input.table.descriptor_names.end())
            throw data_error("input is missing model descriptor '" + name + "'");
        projection.push_back(it - input.table.descriptor_names.begin());
    }
    const Vector predicted = predict(loaded.model, input.table.values(Eigen::all, projection));

    const fs::path out_path = prepare_out_dir(opts.common) / opts.out;
    std::ofstream out(out_path);
    if (!out) throw io_error("cannot write '" + out_path.string() + "'");
    out << "sample_id,predicted" << (input.activity ? ",observed" : "") << "\n";
    for (Index i = 0; i < predicted.size(); ++i) {
        out << input.table.sample_ids[static_cast<std::size_t>(i)] << ','
            << format_double(predicted(i));
        if (input.activity) out << ',' << format_double((*input.activity)(i));
        out << '\n';
    }
    if (!out) throw io_error("failed while writing '" + out_path.string() + "'");
    std::cout << "wrote " << out_path.string() << " (" << predicted.size() << " rows)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// select / evaluate

struct SelectOpts {
    CommonOpts common;
    std::string method;
    std::string data;
    double test_fraction = 0.25;
    int folds = 10;
    int runs = 100;        // strs sampling runs
    int iterations = 500;  // mcuve resampled fits
    double sample_ratio = 0.8;
    int nlv = 0;  // 0: method default (strs 10, mcuve 2)
    int min_subset = 2;
    Index max_selected = 0;  // mcuve; 0: ceil(p/2)
    int stride = 1;
};

struct PreparedSplit {
    DescriptorTable table;
    Vector activity;
    Split split;
    Matrix x_train_raw, x_test_raw;
    Vector y_train, y_test;
    Matrix x_train_scaled;
    ScalingMode mode = ScalingMode::autoscale;
};

PreparedSplit prepare_split(const std::string& data, double test_fraction,
                            const CommonOpts& common) {
    PreparedSplit prep;
    auto [table, activity] = load_csv(data, common.activity_col);
    prep.split = split_random(table.rows(), test_fraction, common.seed);
    table = handle_constant_columns(table, prep.split.train_indices, common);
    prep.mode = scaling_mode_from_string(common.scaling);
    prep.x_train_raw = table.values(prep.split.train_indices, Eigen::all);
    prep.x_test_raw = table.values(prep.split.test_indices, Eigen::all);
    prep.y_train = activity(prep.split.train_indices);
    prep.y_test = activity(prep.split.test_indices);
    // Scaling is fitted on the training rows only; the selectors then center
    // their own resampled blocks internally, keeping errors in raw y units.
    const ScalingParams params =
        fit_scaling(prep.x_train_raw, prep.mode, &table.descriptor_names);
    prep.x_train_scaled = apply_scaling(prep.x_train_raw, params);
    prep.table = std::move(table);
    prep.activity = std::move(activity);
    return prep;
}

void write_eval_outputs(const fs::path& dir, const EvalReport& report, const PreparedSplit& prep,
                        const Vector& pred_train, const Vector& pred_test) {
    write_json_file(dir / "report.json", to_json(report));
    std::vector<std::string> ids = gather_ids(prep.table.sample_ids, prep.split.train_indices);
    std::vector<std::string> labels(ids.size(), "train");
    const std::vector<std::string> test_ids =
        gather_ids(prep.table.sample_ids, prep.split.test_indices);
    ids.insert(ids.end(), test_ids.begin(), test_ids.end());
    labels.insert(labels.end(), test_ids.size(), "test");
    Vector observed(prep.y_train.size() + prep.y_test.size());
    observed << prep.y_train, prep.y_test;
    Vector predicted(pred_train.size() + pred_test.size());
    predicted << pred_train, pred_test;
    write_predictions_csv(dir / "predictions.csv", ids, labels, observed, predicted);
}

int cmd_select(const SelectOpts& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const PreparedSplit prep = prepare_split(opts.data, opts.test_fraction, opts.common);

    SelectionResult result;
    Vector stability;
    if (opts.method == "strs") {
        StrsConfig cfg;
        cfg.n_runs = opts.runs;
        cfg.sample_ratio = opts.sample_ratio;
        cfg.n_latent = opts.nlv > 0 ? opts.nlv : 10;
        cfg.cv_folds = opts.folds;
        cfg.min_subset = opts.min_subset;
        cfg.seed = opts.common.seed;
        result = run_strs(prep.x_train_scaled, prep.y_train, cfg, opts.common.threads);
    } else {
        McuveConfig cfg;
        cfg.n_iterations = opts.iterations;
        cfg.sample_ratio = opts.sample_ratio;
        cfg.n_latent = opts.nlv > 0 ? opts.nlv : 2;
        cfg.cv_folds = opts.folds;
        cfg.max_selected = opts.max_selected;
        cfg.scan_stride = opts.stride;
        cfg.seed = opts.common.seed;
        result = run_mcuve(prep.x_train_scaled, prep.y_train, cfg, opts.common.threads, &stability);
    }

    // Refit the winning subset on raw units so the saved model stands alone.
    const std::vector<Index>& subset = result.best_subset;
    const int nlv_refit = static_cast<int>(std::min<Index>(
        {static_cast<Index>(opts.nlv > 0 ? opts.nlv : (opts.method == "strs" ? 10 : 2)),
         static_cast<Index>(subset.size()), prep.x_train_raw.rows() - 1}));
    const PlsModel model =
        fit_pls(prep.x_train_raw(Eigen::all, subset), prep.y_train, nlv_refit, prep.mode);
    const Vector pred_train = predict(model, prep.x_train_raw(Eigen::all, subset));
    const Vector pred_test = predict(model, prep.x_test_raw(Eigen::all, subset));

    EvalReport report;
    report.method = opts.method;
    report.n_selected = static_cast<Index>(subset.size());
    report.n_latent = model.n_latent;
    report.rmsecv = result.best_rmsecv;
    report.rmsep = rmsep(prep.y_test, pred_test);
    report.r_squared = r_squared(prep.y_test, pred_test);
    report.train_size = static_cast<Index>(prep.split.train_indices.size());
    report.test_size = static_cast<Index>(prep.split.test_indices.size());
    report.seed = opts.common.seed;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = prepare_out_dir(opts.common);
    write_json_file(dir / "selection.json", to_json(result, prep.table.descriptor_names));
    write_trace_csv(dir / "traces.csv", result);
    if (opts.method == "strs")
        write_coefficient_paths_csv(dir / "coefficient_paths.csv", result,
                                    prep.table.descriptor_names);
    else
        write_stability_csv(dir / "stability.csv", prep.table.descriptor_names, stability);
    write_json_file(dir / "model.json",
                    model_to_json(model, gather_names(prep.table.descriptor_names, subset)));
    write_eval_outputs(dir, report, prep, pred_train, pred_test);

    std::cout << opts.method << " selected " << subset.size() << " of " << prep.table.cols()
              << " descriptors (best run " << result.best_run_index
              << ", rmsecv=" << format_double(result.best_rmsecv)
              << ", rmsep=" << format_double(report.rmsep)
              << ", r2=" << format_double(report.r_squared) << "); outputs in " << dir.string()
              << "\n";
    return 0;
}

struct EvaluateOpts {
    CommonOpts common;
    std::string data;
    double test_fraction = 0.25;
    int folds = 10;
    int nlv = 0;  // 0: choose by cross-validated F-test
    int max_lv = 15;
    double alpha = 0.05;
};

int cmd_evaluate(const EvaluateOpts& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const PreparedSplit prep = prepare_split(opts.data, opts.test_fraction, opts.common);
    const Index m_train = prep.x_train_raw.rows();
    const std::uint64_t fold_seed = derived_seed(opts.common.seed, kFoldSeedSalt);

    const auto engine = [&](const Matrix& mx, const Vector& my, int l) {
        return kfold_rmsecv(mx, my, l, opts.folds, fold_seed, ScalingMode::center,
                            opts.common.threads);
    };

    int nlv = opts.nlv;
    if (nlv == 0) {
        const Index largest_fold = m_train / opts.folds + 1;
        const int cap = static_cast<int>(std::min<Index>(
            {static_cast<Index>(opts.max_lv), prep.table.cols(), m_train - largest_fold - 1}));
        if (cap < 1) throw config_error("dataset too small to choose n_latent by cross-validation");
        nlv = select_n_latent(prep.x_train_scaled, prep.y_train, cap, engine, opts.alpha);
    }

    const CvResult cv = engine(prep.x_train_scaled, prep.y_train, nlv);
    const PlsModel model = fit_pls(prep.x_train_raw, prep.y_train, nlv, prep.mode);
    const Vector pred_train = predict(model, prep.x_train_raw);
    const Vector pred_test = predict(model, prep.x_test_raw);

    EvalReport report;
    report.method = "pls";
    report.n_selected = prep.table.cols();
    report.n_latent = model.n_latent;
    report.rmsecv = cv.rmsecv;
    report.rmsep = rmsep(prep.y_test, pred_test);
    report.r_squared = r_squared(prep.y_test, pred_test);
    report.train_size = m_train;
    report.test_size = static_cast<Index>(prep.split.test_indices.size());
    report.seed = opts.common.seed;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = prepare_out_dir(opts.common);
    write_json_file(dir / "model.json", model_to_json(model, prep.table.descriptor_names));
    write_eval_outputs(dir, report, prep, pred_train, pred_test);
    std::cout << "pls on all " << prep.table.cols() << " descriptors: n_latent=" << model.n_latent
              << ", rmsecv=" << format_double(cv.rmsecv)
              << ", rmsep=" << format_double(report.rmsep)
              << ", r2=" << format_double(report.r_squared) << "; outputs in " << dir.string()
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep-runs / nlv-curve

struct SweepOpts {
    CommonOpts common;
    std::string data;
    std::vector<int> runs_list = {50, 100, 200, 500};
    int replicates = 50;
    double sample_ratio = 0.8;
    int nlv = 10;
    int folds = 10;
    int min_subset = 2;
};

int cmd_sweep_runs(const SweepOpts& opts) {
    auto [table, activity] = load_csv(opts.data, opts.common.activity_col);
    table = handle_constant_columns(table, iota_indices(table.rows()), opts.common);
    const ScalingMode mode = scaling_mode_from_string(opts.common.scaling);
    const ScalingParams params = fit_scaling(table.values, mode, &table.descriptor_names);
    const Matrix x = apply_scaling(table.values, params);

    if (opts.replicates < 1) throw config_error("need at least 1 replicate");
    if (opts.runs_list.empty()) throw config_error("need at least one run count");

    struct Task {
        int n_runs;
        int replicate;  // 1-based
        double rmsecv;
    };
    std::vector<Task> tasks;
    for (int n_runs : opts.runs_list)
        for (int r = 1; r <= opts.replicates; ++r) tasks.push_back({n_runs, r, 0.0});

    std::atomic<int> done{0};
    const int total = static_cast<int>(tasks.size());
    parallel_for(static_cast<Index>(tasks.size()), opts.common.threads, [&](Index i) {
        Task& task = tasks[static_cast<std::size_t>(i)];
        StrsConfig cfg;
        cfg.n_runs = task.n_runs;
        cfg.sample_ratio = opts.sample_ratio;
        cfg.n_latent = opts.nlv;
        cfg.cv_folds = opts.folds;
        cfg.min_subset = opts.min_subset;
        // Distinct stream per (run count, replicate) pair.
        cfg.seed = derived_seed(
            derived_seed(opts.common.seed, static_cast<std::uint64_t>(task.n_runs) * 1000003ull),
            static_cast<std::uint64_t>(task.replicate));
        task.rmsecv = run_strs(x, activity, cfg, 1).best_rmsecv;
        std::cerr << "sweep " << done.fetch_add(1) + 1 << "/" << total << "\r" << std::flush;
    });
    std::cerr << "\n";

    const fs::path dir = prepare_out_dir(opts.common);
    const fs::path csv_path = dir / "sweep.csv";
    std::ofstream out(csv_path);
    if (!out) throw io_error("cannot write '" + csv_path.string() + "'");
    out << "n_runs,replicate,rmsecv\n";
    for (const auto& task : tasks)
        out << task.n_runs << ',' << task.replicate << ',' << format_double(task.rmsecv) << '\n';
    if (!out) throw io_error("failed while writing '" + csv_path.string() + "'");

    for (int n_runs : opts.runs_list) {
        std::vector<double> values;
        for (const auto& task : tasks)
            if (task.n_runs == n_runs) values.push_back(task.rmsecv);
        std::cout << "n_runs=" << n_runs << ": median rmsecv=" << format_double(median(values))
                  << " over " << values.size() << " replicates\n";
    }
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
}

struct NlvCurveOpts {
    CommonOpts common;
    std::string data;
    double test_fraction = 0.25;
    int folds = 10;
    int max_lv = 15;
    double alpha = 0.05;
};

int cmd_nlv_curve(const NlvCurveOpts& opts) {
    const PreparedSplit prep = prepare_split(opts.data, opts.test_fraction, opts.common);
    const Index m_train = prep.x_train_raw.rows();
    const Index largest_fold = m_train / opts.folds + 1;
    const int max_lv = static_cast<int>(std::min<Index>(
        {static_cast<Index>(opts.max_lv), prep.table.cols(), m_train - largest_fold - 1}));
    if (max_lv < 1) throw config_error("dataset too small for the requested fold count");

    const std::uint64_t fold_seed = derived_seed(opts.common.seed, kFoldSeedSalt);
    const NlvSelection sel = select_n_latent_curve(
        prep.x_train_scaled, prep.y_train, max_lv,
        [&](const Matrix& mx, const Vector& my, int l) {
            return kfold_rmsecv(mx, my, l, opts.folds, fold_seed, ScalingMode::center,
                                opts.common.threads);
        },
        opts.alpha);

    std::vector<double> rmseps(static_cast<std::size_t>(max_lv));
    parallel_for(max_lv, opts.common.threads, [&](Index l) {
        const PlsModel model =
            fit_pls(prep.x_train_raw, prep.y_train, static_cast<int>(l) + 1, prep.mode);
        rmseps[static_cast<std::size_t>(l)] = rmsep(prep.y_test, predict(model, prep.x_test_raw));
    });

    const fs::path dir = prepare_out_dir(opts.common);
    const fs::path csv_path = dir / "nlv_curve.csv";
    std::ofstream out(csv_path);
    if (!out) throw io_error("cannot write '" + csv_path.string() + "'");
    out << "nlv,rmsecv,rmsep\n";
    for (int l = 1; l <= max_lv; ++l)
        out << l << ',' << format_double(sel.per_nlv[static_cast<std::size_t>(l - 1)].rmsecv)
            << ',' << format_double(rmseps[static_cast<std::size_t>(l - 1)]) << '\n';
    if (!out) throw io_error("failed while writing '" + csv_path.string() + "'");
    std::cout << "chose n_latent=" << sel.chosen << " (F-test, alpha=" << opts.alpha << "); wrote "
              << csv_path.string() << "\n";
    return 0;
}

std::string single_line(std::string msg) {
    for (char& c : msg)
        if (c == '\n' || c == '\r') c = ';';
    return msg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"descriptor selection workbench for PLS activity models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI file ([subcommand] sections)");

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-truth synthetic dataset");
    synth_cmd->add_option("--out", synth.out, "Output CSV name")->capture_default_str();
    synth_cmd->add_option("--rows", synth.rows, "Samples")->check(CLI::Range(Index{2}, Index{1000000}))->capture_default_str();
    synth_cmd->add_option("--cols", synth.cols, "Descriptors")->check(CLI::Range(Index{2}, Index{1000000}))->capture_default_str();
    synth_cmd->add_option("--informative", synth.informative, "Informative column indices")
        ->delimiter(',')->capture_default_str();
    synth_cmd->add_option("--coefficients", synth.coefficients, "True coefficients")
        ->delimiter(',')->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "Noise standard deviation")->capture_default_str();
    add_common(synth_cmd, synth.common, false);

    FitOpts fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a PLS model on a whole dataset");
    fit_cmd->add_option("data", fit.data, "Dataset CSV")->required();
    fit_cmd->add_option("--out", fit.out, "Model file name")->capture_default_str();
    fit_cmd->add_option("--nlv", fit.nlv, "Latent variables (0: choose by F-test)")->capture_default_str();
    fit_cmd->add_option("--max-lv", fit.max_lv, "Largest nLV considered")->capture_default_str();
    fit_cmd->add_option("--folds", fit.folds, "CV folds for nLV choice")->capture_default_str();
    fit_cmd->add_option("--alpha", fit.alpha, "F-test level")->capture_default_str();
    add_common(fit_cmd, fit.common);

    PredictOpts predict_opts;
    auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model to a dataset");
    predict_cmd->add_option("data", predict_opts.data, "Dataset CSV")->required();
    predict_cmd->add_option("--model", predict_opts.model, "Model file")->required();
    predict_cmd->add_option("--out", predict_opts.out, "Output CSV name")->capture_default_str();
    add_common(predict_cmd, predict_opts.common, false);

    SelectOpts select;
    auto* select_cmd =
        app.add_subcommand("select", "Select descriptors, refit, and evaluate on a held-out split");
    select_cmd->add_option("method", select.method, "Selector: strs or mcuve")
        ->required()
        ->check(CLI::IsMember({"strs", "mcuve"}));
    select_cmd->add_option("data", select.data, "Dataset CSV")->required();
    select_cmd->add_option("--test-fraction", select.test_fraction, "Held-out fraction")->capture_default_str();
    select_cmd->add_option("--folds", select.folds, "CV folds")->capture_default_str();
    select_cmd->add_option("--runs", select.runs, "Sampling runs (strs)")->capture_default_str();
    select_cmd->add_option("--iterations", select.iterations, "Resampled fits (mcuve)")->capture_default_str();
    select_cmd->add_option("--sample-ratio", select.sample_ratio, "Row fraction per resample")->capture_default_str();
    select_cmd->add_option("--nlv", select.nlv, "Latent variables (0: strs 10, mcuve 2)")->capture_default_str();
    select_cmd->add_option("--min-subset", select.min_subset, "Smallest subset size (strs)")->capture_default_str();
    select_cmd->add_option("--max-selected", select.max_selected, "Largest scanned cut (mcuve, 0: p/2)")->capture_default_str();
    select_cmd->add_option("--stride", select.stride, "Cut scan stride (mcuve)")->capture_default_str();
    add_common(select_cmd, select.common);

    EvaluateOpts evaluate;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Fit on the train split with all descriptors, score the test split");
    evaluate_cmd->add_option("data", evaluate.data, "Dataset CSV")->required();
    evaluate_cmd->add_option("--test-fraction", evaluate.test_fraction, "Held-out fraction")->capture_default_str();
    evaluate_cmd->add_option("--folds", evaluate.folds, "CV folds")->capture_default_str();
    evaluate_cmd->add_option("--nlv", evaluate.nlv, "Latent variables (0: choose by F-test)")->capture_default_str();
    evaluate_cmd->add_option("--max-lv", evaluate.max_lv, "Largest nLV considered")->capture_default_str();
    evaluate_cmd->add_option("--alpha", evaluate.alpha, "F-test level")->capture_default_str();
    add_common(evaluate_cmd, evaluate.common);

    SweepOpts sweep;
    auto* sweep_cmd = app.add_subcommand("sweep-runs", "Replicate selection across run-count settings");
    sweep_cmd->add_option("data", sweep.data, "Dataset CSV")->required();
    sweep_cmd->add_option("--runs-list", sweep.runs_list, "Run counts to sweep")
        ->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--replicates", sweep.replicates, "Replicates per run count")->capture_default_str();
    sweep_cmd->add_option("--sample-ratio", sweep.sample_ratio, "Row fraction per resample")->capture_default_str();
    sweep_cmd->add_option("--nlv", sweep.nlv, "Latent variables")->capture_default_str();
    sweep_cmd->add_option("--folds", sweep.folds, "CV folds")->capture_default_str();
    sweep_cmd->add_option("--min-subset", sweep.min_subset, "Smallest subset size")->capture_default_str();
    add_common(sweep_cmd, sweep.common);

    NlvCurveOpts curve;
    auto* curve_cmd = app.add_subcommand("nlv-curve", "RMSECV/RMSEP as a function of nLV");
    curve_cmd->add_option("data", curve.data, "Dataset CSV")->required();
    curve_cmd->add_option("--test-fraction", curve.test_fraction, "Held-out fraction")->capture_default_str();
    curve_cmd->add_option("--folds", curve.folds, "CV folds")->capture_default_str();
    curve_cmd->add_option("--max-lv", curve.max_lv, "Largest nLV scanned")->capture_default_str();
    curve_cmd->add_option("--alpha", curve.alpha, "F-test level")->capture_default_str();
    add_common(curve_cmd, curve.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth);
        if (fit_cmd->parsed()) return cmd_fit(fit);
        if (predict_cmd->parsed()) return cmd_predict(predict_opts);
        if (select_cmd->parsed()) return cmd_select(select);
        if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate);
        if (sweep_cmd->parsed()) return cmd_sweep_runs(sweep);
        if (curve_cmd->parsed()) return cmd_nlv_curve(curve);
        std::cerr << "error: no subcommand given\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << single_line(e.what()) << "\n";
        return 1;
    }
}
