#pragma once

#include "descforge/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace descforge {

enum class ScalingMode { center, autoscale };

std::string to_string(ScalingMode mode);
ScalingMode scaling_mode_from_string(const std::string& name);

// Numeric descriptor matrix (samples x descriptors) with column names and row ids.
struct DescriptorTable {
    Matrix values;                              // m x p, all finite
    std::vector<std::string> descriptor_names;  // p, unique
    std::vector<std::string> sample_ids;        // m, unique

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    // Enforces the shape contract: m >= 2, p >= 2, finite cells, unique labels.
    void validate() const;
};

using ActivityVector = Vector;  // length m, finite

// Per-column location/spread fitted on training data; stds are all 1 in
// center mode so apply/undo share one code path.
struct ScalingParams {
    Vector means;
    Vector stds;
    ScalingMode mode = ScalingMode::center;
};

// Column scaling fitted jointly for a table and its activity.
struct TableScaling {
    ScalingParams x;
    ScalingParams y;
};

struct Split {
    std::vector<Index> train_indices;  // sorted
    std::vector<Index> test_indices;   // sorted
};

// Planted generating model of a synthetic dataset.
struct GroundTruth {
    std::vector<Index> informative_indices;
    std::vector<double> coefficients;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

struct SyntheticDataset {
    DescriptorTable table;
    ActivityVector activity;
    GroundTruth truth;
};

// column_names, when given, are used in error messages for zero-variance columns.
ScalingParams fit_scaling(const Matrix& values, ScalingMode mode,
                          const std::vector<std::string>* column_names = nullptr);
Matrix apply_scaling(const Matrix& values, const ScalingParams& params);
Matrix undo_scaling(const Matrix& values, const ScalingParams& params);

TableScaling fit_scaling(const DescriptorTable& table, const ActivityVector& activity,
                         ScalingMode mode);
std::pair<DescriptorTable, ActivityVector> apply_scaling(const DescriptorTable& table,
                                                         const ActivityVector& activity,
                                                         const TableScaling& scaling);

// Indices of columns whose values are all identical.
std::vector<Index> zero_variance_columns(const Matrix& values);

// Seeded uniform partition; test size is llround(m * test_fraction) and both
// sides must keep at least 2 samples.
Split split_random(Index m, double test_fraction, std::uint64_t seed);

// X is i.i.d. standard normal (drawn sample-major), y = sum coefficient_j *
// X[:, informative_j] + N(0, noise_sd^2); the noise vector is drawn after X.
SyntheticDataset synthesize(Index m, Index p, const std::vector<Index>& informative_indices,
                            const std::vector<double>& coefficients, double noise_sd,
                            std::uint64_t seed);

// Strict numeric CSV: UTF-8, comma-separated, header row, decimal points only.
// An optional leading id column is detected by the exact header name "id"; the
// activity column is located by name anywhere in the header.  All remaining
// columns are descriptors.  Errors name the offending row/column.
std::pair<DescriptorTable, ActivityVector> load_csv(const std::filesystem::path& path,
                                                    const std::string& activity_column);

// Variant for prediction inputs where the activity column may be absent.
struct LoadedTable {
    DescriptorTable table;
    std::optional<ActivityVector> activity;
};
LoadedTable load_csv_optional_activity(const std::filesystem::path& path,
                                       const std::string& activity_column);

// Writes id + descriptors + activity in load_csv-compatible form; values are
// rendered shortest-round-trip so a reload reproduces identical doubles.
void write_csv(const std::filesystem::path& path, const DescriptorTable& table,
               const ActivityVector& activity, const std::string& activity_column);

}  // namespace descforge
