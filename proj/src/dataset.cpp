#include "descforge/dataset.hpp"

#include "descforge/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace descforge {

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

// Sample standard deviation (n-1 denominator) of one column given its mean.
double column_std(const Eigen::Ref<const Vector>& col, double mean) {
    const Index n = col.size();
    return std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1));
}

}  // namespace

std::string to_string(ScalingMode mode) {
    return mode == ScalingMode::center ? "center" : "autoscale";
}

ScalingMode scaling_mode_from_string(const std::string& name) {
    if (name == "center") return ScalingMode::center;
    if (name == "autoscale") return ScalingMode::autoscale;
    throw config_error("unknown scaling mode '" + name + "' (expected center or autoscale)");
}

void DescriptorTable::validate() const {
    const Index m = rows();
    const Index p = cols();
    if (m < 2) throw data_error("descriptor table needs at least 2 samples, got " + std::to_string(m));
    if (p < 2) throw data_error("descriptor table needs at least 2 descriptors, got " + std::to_string(p));
    if (static_cast<Index>(descriptor_names.size()) != p)
        throw data_error("descriptor name count does not match column count");
    if (static_cast<Index>(sample_ids.size()) != m)
        throw data_error("sample id count does not match row count");
    if (!values.allFinite()) throw data_error("descriptor table contains non-finite values");
    std::unordered_set<std::string> seen;
    for (const auto& name : descriptor_names) {
        if (!seen.insert(name).second) throw data_error("duplicate descriptor name '" + name + "'");
    }
    seen.clear();
    for (const auto& id : sample_ids) {
        if (!seen.insert(id).second) throw data_error("duplicate sample id '" + id + "'");
    }
}

ScalingParams fit_scaling(const Matrix& values, ScalingMode mode,
                          const std::vector<std::string>* column_names) {
    const Index n = values.rows();
    const Index p = values.cols();
    if (n < 2) throw data_error("scaling needs at least 2 rows, got " + std::to_string(n));
    ScalingParams params;
    params.mode = mode;
    params.means = values.colwise().mean();
    params.stds = Vector::Ones(p);
    if (mode == ScalingMode::autoscale) {
        std::vector<std::string> constant;
        for (Index j = 0; j < p; ++j) {
            const double sd = column_std(values.col(j), params.means(j));
            if (sd == 0.0) {
                constant.push_back(column_names ? (*column_names)[static_cast<std::size_t>(j)]
                                                : "column " + std::to_string(j));
            }
            params.stds(j) = sd;
        }
        if (!constant.empty())
            throw data_error("zero-variance descriptor(s) cannot be autoscaled: " +
                             join_names(constant));
    }
    return params;
}

Matrix apply_scaling(const Matrix& values, const ScalingParams& params) {
    if (values.cols() != params.means.size())
        throw data_error("scaling params fitted for " + std::to_string(params.means.size()) +
                         " columns, data has " + std::to_string(values.cols()));
    return (values.rowwise() - params.means.transpose()).array().rowwise() /
           params.stds.transpose().array();
}

Matrix undo_scaling(const Matrix& values, const ScalingParams& params) {
    if (values.cols() != params.means.size())
        throw data_error("scaling params fitted for " + std::to_string(params.means.size()) +
                         " columns, data has " + std::to_string(values.cols()));
    return (values.array().rowwise() * params.stds.transpose().array()).rowwise() +
           params.means.transpose().array();
}

TableScaling fit_scaling(const DescriptorTable& table, const ActivityVector& activity,
                         ScalingMode mode) {
    if (activity.size() != table.rows())
        throw data_error("activity length does not match sample count");
    TableScaling scaling;
    scaling.x = fit_scaling(table.values, mode, &table.descriptor_names);
    if (mode == ScalingMode::autoscale && column_std(activity, activity.mean()) == 0.0)
        throw data_error("activity has zero variance and cannot be autoscaled");
    scaling.y = fit_scaling(Matrix(activity), mode);
    return scaling;
}

std::pair<DescriptorTable, ActivityVector> apply_scaling(const DescriptorTable& table,
                                                         const ActivityVector& activity,
                                                         const TableScaling& scaling) {
    DescriptorTable scaled = table;
    scaled.values = apply_scaling(table.values, scaling.x);
    ActivityVector y = apply_scaling(Matrix(activity), scaling.y).col(0);
    return {std::move(scaled), std::move(y)};
}

std::vector<Index> zero_variance_columns(const Matrix& values) {
    std::vector<Index> out;
    for (Index j = 0; j < values.cols(); ++j) {
        if (values.rows() == 0) continue;
        if ((values.col(j).array() == values(0, j)).all()) out.push_back(j);
    }
    return out;
}

Split split_random(Index m, double test_fraction, std::uint64_t seed) {
    if (m < 4) throw data_error("split needs at least 4 samples, got " + std::to_string(m));
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw config_error("test fraction must lie in (0, 1), got " + format_double(test_fraction));
    const Index n_test = static_cast<Index>(std::llround(test_fraction * static_cast<double>(m)));
    const Index n_train = m - n_test;
    if (n_test < 2 || n_train < 2)
        throw data_error("split of " + std::to_string(m) + " samples at fraction " +
                         format_double(test_fraction) + " leaves train=" + std::to_string(n_train) +
                         ", test=" + std::to_string(n_test) + " (both sides need >= 2)");
    std::vector<Index> order = iota_indices(m);
    Rng rng(seed);
    rng.shuffle(order);
    Split split;
    split.test_indices.assign(order.begin(), order.begin() + n_test);
    split.train_indices.assign(order.begin() + n_test, order.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    std::sort(split.train_indices.begin(), split.train_indices.end());
    return split;
}

SyntheticDataset synthesize(Index m, Index p, const std::vector<Index>& informative_indices,
                            const std::vector<double>& coefficients, double noise_sd,
                            std::uint64_t seed) {
    if (m < 2 || p < 2) throw config_error("synthetic dataset needs m >= 2 and p >= 2");
    if (informative_indices.size() != coefficients.size())
        throw config_error("informative index count (" + std::to_string(informative_indices.size()) +
                           ") does not match coefficient count (" +
                           std::to_string(coefficients.size()) + ")");
    if (informative_indices.empty()) throw config_error("need at least one informative descriptor");
    if (noise_sd < 0.0) throw config_error("noise standard deviation must be non-negative");
    std::unordered_set<Index> seen;
    for (Index j : informative_indices) {
        if (j < 0 || j >= p)
            throw config_error("informative index " + std::to_string(j) + " outside [0, " +
                               std::to_string(p) + ")");
        if (!seen.insert(j).second)
            throw config_error("duplicate informative index " + std::to_string(j));
    }

    SyntheticDataset data;
    data.table.values.resize(m, p);
    Rng rng(seed);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < p; ++j) data.table.values(i, j) = rng.normal();

    data.activity = Vector::Zero(m);
    for (std::size_t t = 0; t < informative_indices.size(); ++t)
        data.activity += coefficients[t] * data.table.values.col(informative_indices[t]);
    for (Index i = 0; i < m; ++i) data.activity(i) += noise_sd * rng.normal();

    data.table.descriptor_names.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) data.table.descriptor_names.push_back("x" + std::to_string(j));
    data.table.sample_ids.reserve(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) data.table.sample_ids.push_back("s" + std::to_string(i + 1));
    data.table.validate();

    data.truth.informative_indices = informative_indices;
    data.truth.coefficients = coefficients;
    data.truth.noise_sd = noise_sd;
    data.truth.seed = seed;
    return data;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

double parse_cell(const std::string& raw, std::size_t row_number, const std::string& column) {
    const std::string cell = trim(raw);
    const auto fail = [&](const std::string& why) -> double {
        throw data_error("row " + std::to_string(row_number) + ", column '" + column + "': " + why +
                         " ('" + cell + "')");
    };
    if (cell.empty()) return fail("empty cell");
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) return fail("not a number");
    if (!std::isfinite(value)) return fail("non-finite value");
    return value;
}

}  // namespace

LoadedTable load_csv_optional_activity(const std::filesystem::path& path,
                                       const std::string& activity_column) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;  // tolerate trailing blank lines
        lines.push_back(line);
    }
    if (lines.size() < 2) throw data_error("'" + path.string() + "': need a header row and data rows");

    std::vector<std::string> header = split_line(lines[0]);
    for (auto& h : header) h = trim(h);
    const bool has_id = !header.empty() && header[0] == "id";
    const std::size_t first_value_col = has_id ? 1 : 0;

    std::size_t activity_pos = header.size();
    std::unordered_set<std::string> seen;
    for (std::size_t j = first_value_col; j < header.size(); ++j) {
        if (header[j].empty()) throw data_error("'" + path.string() + "': empty header cell");
        if (!seen.insert(header[j]).second)
            throw data_error("'" + path.string() + "': duplicate column '" + header[j] + "'");
        if (header[j] == activity_column) activity_pos = j;
    }

    LoadedTable out;
    std::vector<std::string> names;
    for (std::size_t j = first_value_col; j < header.size(); ++j)
        if (j != activity_pos) names.push_back(header[j]);
    const std::size_t p = names.size();
    const std::size_t m = lines.size() - 1;
    if (p < 2) throw data_error("'" + path.string() + "': need at least 2 descriptor columns");

    out.table.values.resize(static_cast<Index>(m), static_cast<Index>(p));
    Vector activity(static_cast<Index>(m));
    out.table.descriptor_names = names;
    out.table.sample_ids.reserve(m);

    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t row_number = r + 2;  // 1-based, header is row 1
        std::vector<std::string> cells = split_line(lines[r + 1]);
        if (cells.size() != header.size())
            throw data_error("row " + std::to_string(row_number) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        out.table.sample_ids.push_back(has_id ? trim(cells[0]) : "s" + std::to_string(r + 1));
        std::size_t dest = 0;
        for (std::size_t j = first_value_col; j < header.size(); ++j) {
            const double v = parse_cell(cells[j], row_number, header[j]);
            if (j == activity_pos)
                activity(static_cast<Index>(r)) = v;
            else
                out.table.values(static_cast<Index>(r), static_cast<Index>(dest++)) = v;
        }
    }
    out.table.validate();
    if (activity_pos != header.size()) out.activity = std::move(activity);
    return out;
}

std::pair<DescriptorTable, ActivityVector> load_csv(const std::filesystem::path& path,
                                                    const std::string& activity_column) {
    LoadedTable loaded = load_csv_optional_activity(path, activity_column);
    if (!loaded.activity)
        throw data_error("'" + path.string() + "': activity column '" + activity_column +
                         "' not found");
    return {std::move(loaded.table), std::move(*loaded.activity)};
}

void write_csv(const std::filesystem::path& path, const DescriptorTable& table,
               const ActivityVector& activity, const std::string& activity_column) {
    table.validate();
    if (activity.size() != table.rows())
        throw data_error("activity length does not match sample count");
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out << "id";
    for (const auto& name : table.descriptor_names) out << ',' << name;
    out << ',' << activity_column << '\n';
    for (Index i = 0; i < table.rows(); ++i) {
        out << table.sample_ids[static_cast<std::size_t>(i)];
        for (Index j = 0; j < table.cols(); ++j) out << ',' << format_double(table.values(i, j));
        out << ',' << format_double(activity(i)) << '\n';
    }
    if (!out) throw io_error("failed while writing '" + path.string() + "'");
}

}  // namespace descforge
