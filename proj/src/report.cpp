#include "descforge/report.hpp"

#include <cmath>
#include <fstream>

namespace descforge {

namespace {

using nlohmann::json;

// Non-finite scores (failed runs) have no JSON number representation.
json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
    return json{{"method", report.method},
                {"n_selected", report.n_selected},
                {"n_latent", report.n_latent},
                {"rmsecv", report.rmsecv},
                {"rmsep", report.rmsep},
                {"r_squared", report.r_squared},
                {"train_size", report.train_size},
                {"test_size", report.test_size},
                {"seed", report.seed},
                {"wall_time_seconds", report.wall_time_seconds}};
}

nlohmann::json to_json(const SelectionResult& result,
                       const std::vector<std::string>& descriptor_names) {
    json best_names = json::array();
    for (Index j : result.best_subset) {
        if (j < 0 || j >= static_cast<Index>(descriptor_names.size()))
            throw data_error("selection result references descriptor index " + std::to_string(j) +
                             " outside the name table");
        best_names.push_back(descriptor_names[static_cast<std::size_t>(j)]);
    }
    json traces = json::array();
    for (const auto& t : result.traces) {
        json entry{{"run", t.run_index},
                   {"retention_ratio", t.retention_ratio},
                   {"enforced_count", t.enforced_count},
                   {"selected_count", static_cast<Index>(t.selected_indices.size())},
                   {"selected_indices", t.selected_indices},
                   {"rmsecv", number_or_null(t.rmsecv)},
                   {"degenerate", t.degenerate}};
        if (t.coefficient_vector.size() > 0)
            entry["coefficients"] = to_std(t.coefficient_vector);
        traces.push_back(std::move(entry));
    }
    return json{{"method", result.method},
                {"seed", result.seed},
                {"config", result.config},
                {"best",
                 json{{"run_index", result.best_run_index},
                      {"rmsecv", number_or_null(result.best_rmsecv)},
                      {"indices", result.best_subset},
                      {"names", std::move(best_names)}}},
                {"traces", std::move(traces)}};
}

nlohmann::json model_to_json(const PlsModel& model,
                             const std::vector<std::string>& descriptor_names) {
    if (descriptor_names.size() != model.column_map.size())
        throw data_error("model serialization needs one name per fitted column");
    json weights = json::array();
    for (int h = 0; h < model.n_latent; ++h) weights.push_back(to_std(model.x_weights.col(h)));
    return json{{"format", "descforge-pls-model"},
                {"version", 1},
                {"n_latent", model.n_latent},
                {"scaling_mode", to_string(model.x_scaling.mode)},
                {"x_means", to_std(model.x_scaling.means)},
                {"x_stds", to_std(model.x_scaling.stds)},
                {"y_mean", model.y_scaling.means(0)},
                {"y_std", model.y_scaling.stds(0)},
                {"coefficients", to_std(model.coefficients)},
                {"inner_coefficients", to_std(model.inner_coefficients)},
                {"x_weights", std::move(weights)},
                {"column_map", model.column_map},
                {"descriptor_names", descriptor_names},
                {"degenerate", model.degenerate}};
}

LoadedModel model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "descforge-pls-model")
        throw data_error("not a model document (missing format tag)");
    LoadedModel out;
    PlsModel& model = out.model;
    model.n_latent = doc.at("n_latent").get<int>();
    model.degenerate = doc.value("degenerate", false);

    const auto coeffs = doc.at("coefficients").get<std::vector<double>>();
    const Index p = static_cast<Index>(coeffs.size());
    model.coefficients = Eigen::Map<const Vector>(coeffs.data(), p);

    const auto means = doc.at("x_means").get<std::vector<double>>();
    const auto stds = doc.at("x_stds").get<std::vector<double>>();
    if (static_cast<Index>(means.size()) != p || static_cast<Index>(stds.size()) != p)
        throw data_error("model document: scaling length does not match coefficients");
    model.x_scaling.mode = scaling_mode_from_string(doc.at("scaling_mode").get<std::string>());
    model.x_scaling.means = Eigen::Map<const Vector>(means.data(), p);
    model.x_scaling.stds = Eigen::Map<const Vector>(stds.data(), p);
    model.y_scaling.mode = model.x_scaling.mode;
    model.y_scaling.means = Vector::Constant(1, doc.at("y_mean").get<double>());
    model.y_scaling.stds = Vector::Constant(1, doc.at("y_std").get<double>());

    const auto inner = doc.at("inner_coefficients").get<std::vector<double>>();
    if (static_cast<int>(inner.size()) != model.n_latent)
        throw data_error("model document: inner coefficient count does not match n_latent");
    model.inner_coefficients = Eigen::Map<const Vector>(inner.data(), model.n_latent);

    model.x_weights.resize(p, model.n_latent);
    const auto& weights = doc.at("x_weights");
    if (static_cast<int>(weights.size()) != model.n_latent)
        throw data_error("model document: weight column count does not match n_latent");
    for (int h = 0; h < model.n_latent; ++h) {
        const auto col = weights[static_cast<std::size_t>(h)].get<std::vector<double>>();
        if (static_cast<Index>(col.size()) != p)
            throw data_error("model document: weight column length does not match coefficients");
        model.x_weights.col(h) = Eigen::Map<const Vector>(col.data(), p);
    }

    model.column_map = doc.at("column_map").get<std::vector<Index>>();
    if (static_cast<Index>(model.column_map.size()) != p)
        throw data_error("model document: column map length does not match coefficients");
    out.descriptor_names = doc.at("descriptor_names").get<std::vector<std::string>>();
    if (static_cast<Index>(out.descriptor_names.size()) != p)
        throw data_error("model document: descriptor name count does not match coefficients");
    return out;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw data_error("'" + path.string() + "': " + e.what());
    }
    return doc;
}

void write_trace_csv(const std::filesystem::path& path, const SelectionResult& result) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << "run,ratio,enforced_count,selected_count,rmsecv\n";
    for (const auto& t : result.traces) {
        out << t.run_index << ',' << format_double(t.retention_ratio) << ',' << t.enforced_count
            << ',' << t.selected_indices.size() << ',' << format_double(t.rmsecv) << '\n';
    }
    if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

void write_coefficient_paths_csv(const std::filesystem::path& path, const SelectionResult& result,
                                 const std::vector<std::string>& descriptor_names) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << "run";
    for (const auto& name : descriptor_names) out << ',' << name;
    out << '\n';
    for (const auto& t : result.traces) {
        if (t.coefficient_vector.size() != static_cast<Index>(descriptor_names.size()))
            throw data_error("trace " + std::to_string(t.run_index) +
                             " has no full-width coefficient vector");
        out << t.run_index;
        for (Index j = 0; j < t.coefficient_vector.size(); ++j)
            out << ',' << format_double(t.coefficient_vector(j));
        out << '\n';
    }
    if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& sample_ids,
                           const std::vector<std::string>& split_labels, const Vector& observed,
                           const Vector& predicted) {
    const std::size_t n = sample_ids.size();
    if (split_labels.size() != n || observed.size() != static_cast<Index>(n) ||
        predicted.size() != static_cast<Index>(n))
        throw data_error("prediction table columns have mismatched lengths");
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << "sample_id,split,observed,predicted\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << sample_ids[i] << ',' << split_labels[i] << ','
            << format_double(observed(static_cast<Index>(i))) << ','
            << format_double(predicted(static_cast<Index>(i))) << '\n';
    }
    if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

void write_stability_csv(const std::filesystem::path& path,
                         const std::vector<std::string>& descriptor_names,
                         const Vector& stability) {
    if (stability.size() != static_cast<Index>(descriptor_names.size()))
        throw data_error("stability length does not match descriptor count");
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << "descriptor,stability\n";
    for (Index j = 0; j < stability.size(); ++j)
        out << descriptor_names[static_cast<std::size_t>(j)] << ',' << format_double(stability(j))
            << '\n';
    if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

}  // namespace descforge
