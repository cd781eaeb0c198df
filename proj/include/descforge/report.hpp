#pragma once

#include "descforge/common.hpp"
#include "descforge/pls.hpp"
#include "descforge/strs.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace descforge {

// Flat evaluation summary emitted by the CLI pipelines.
struct EvalReport {
    std::string method;
    Index n_selected = 0;
    int n_latent = 0;
    double rmsecv = 0.0;
    double rmsep = 0.0;
    double r_squared = 0.0;
    Index train_size = 0;
    Index test_size = 0;
    std::uint64_t seed = 0;
    double wall_time_seconds = 0.0;
};

nlohmann::json to_json(const EvalReport& report);

// Selection result with the best subset spelled out by descriptor name as
// well as index.  Non-finite trace scores serialize as null.
nlohmann::json to_json(const SelectionResult& result,
                       const std::vector<std::string>& descriptor_names);

// Model document for the fit/predict round trip: coefficients, scaling,
// column map, latent structure, and the fitted columns' names.
nlohmann::json model_to_json(const PlsModel& model,
                             const std::vector<std::string>& descriptor_names);

struct LoadedModel {
    PlsModel model;
    std::vector<std::string> descriptor_names;
};
LoadedModel model_from_json(const nlohmann::json& doc);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

// run,ratio,enforced_count,selected_count,rmsecv - one row per trace.
void write_trace_csv(const std::filesystem::path& path, const SelectionResult& result);

// run x descriptor coefficient matrix; cells outside a run's subset are "0".
// Only written for results whose traces carry coefficient vectors.
void write_coefficient_paths_csv(const std::filesystem::path& path,
                                 const SelectionResult& result,
                                 const std::vector<std::string>& descriptor_names);

// sample_id,split,observed,predicted
void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& sample_ids,
                           const std::vector<std::string>& split_labels,
                           const Vector& observed, const Vector& predicted);

// descriptor,stability
void write_stability_csv(const std::filesystem::path& path,
                         const std::vector<std::string>& descriptor_names,
                         const Vector& stability);

}  // namespace descforge
