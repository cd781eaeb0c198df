#pragma once

#include "descforge/common.hpp"
#include "descforge/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace descforge {

// Smallest subset the selector is allowed to shrink to, and the salt that
// derives the fold-assignment seed shared by every run's CV scoring.
inline constexpr std::uint64_t kFoldSeedSalt = 0x666f6c64ull;  // "fold"

struct StrsConfig {
    int n_runs = 100;           // Monte-Carlo sampling runs
    double sample_ratio = 0.8;  // fraction of samples drawn per run
    int n_latent = 10;
    int cv_folds = 10;
    int min_subset = 2;
    std::uint64_t seed = 42;
};

// Exponential retention schedule r(i) = a * exp(-k * i) pinned to r(1) = 1 and
// r(n_runs) = 2/p, which gives k = ln(p/2)/(n_runs - 1) and a = e^k.
struct RdfConstants {
    double a = 0.0;
    double k = 0.0;
};

RdfConstants rdf_constants(Index p, int n_runs);

// Retention ratio of 1-based run i; evaluated as exp(k*(1-i)) so the first run
// is exactly 1 and the schedule is strictly decreasing.
double rdf_ratio(int run_index, const RdfConstants& constants);

// Indices of the `count` largest strictly-positive weights (ties favor the
// lower index), ascending.  If fewer than `count` weights are positive, all
// positive ones are returned.
std::vector<Index> enforced_selection(const Vector& weights, Index count);

// n_draws independent draws with replacement, each picking index j with
// probability weights[j]/sum(weights); returns the distinct drawn indices,
// ascending.  Zero-weight entries are never drawn.
std::vector<Index> tuned_reweighted_sampling(const Vector& weights, Index n_draws, Rng& rng);

// One sampling run's record.  coefficient_vector is the run's fitted PLS
// coefficient vector scattered to full length, exactly 0 outside
// selected_indices.
struct StrsRunTrace {
    int run_index = 0;            // 1-based
    double retention_ratio = 0.0;
    Index enforced_count = 0;
    std::vector<Index> selected_indices;  // ascending
    Vector coefficient_vector;            // empty for selectors that do not record it
    double rmsecv = 0.0;
    bool degenerate = false;
};

// Shared output shape of the descriptor selectors.
struct SelectionResult {
    std::string method;
    std::uint64_t seed = 0;
    nlohmann::json config;        // echo of the run configuration
    std::vector<Index> best_subset;
    double best_rmsecv = 0.0;
    int best_run_index = 0;
    std::vector<StrsRunTrace> traces;
};

// Self-tuned reweighted sampling selection.  Each run draws a Monte-Carlo
// sample of the training rows, fits PLS on the live descriptor set, converts
// |coefficients| to normalized weights, keeps the schedule-enforced top
// weights, resamples that pool weight-proportionally with replacement, scores
// the surviving subset by k-fold RMSECV on the full training set, and passes
// it to the next run as the live set.  The subset with the lowest RMSECV wins.
SelectionResult run_strs(const Matrix& x, const Vector& y, const StrsConfig& config,
                         int threads = 1);

}  // namespace descforge
