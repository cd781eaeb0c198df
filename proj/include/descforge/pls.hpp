#pragma once

#include "descforge/common.hpp"
#include "descforge/dataset.hpp"

#include <vector>

namespace descforge {

// Inner-loop convergence tolerance and safety cap. A single-response fit
// converges in one pass per component; the cap only guards pathological input.
inline constexpr double kNipalsTol = 1e-12;
inline constexpr int kNipalsMaxIter = 500;

// A residual X whose Frobenius norm drops below this fraction of the initial
// norm counts as exhausted and stops component extraction early.
inline constexpr double kResidualExhaustionTol = 1e-12;

// Single-response PLS regression model. x_weights holds the composite weight
// matrix W(P'W)^-1, so scores are T = X_scaled * x_weights directly on the
// undeflated data and coefficients = x_weights * inner_coefficients.
struct PlsModel {
    int n_latent = 0;            // components actually extracted
    Matrix x_weights;            // p_subset x n_latent, composite
    Vector inner_coefficients;   // n_latent
    Vector coefficients;         // p_subset, in scaled space
    ScalingParams x_scaling;     // fitted on the training block passed to fit_pls
    ScalingParams y_scaling;     // single entry
    std::vector<Index> column_map;  // positions in the originating descriptor set
    bool degenerate = false;     // no usable component / all-zero coefficients
};

// Fits scaling on (x, y) and runs NIPALS for up to n_latent components.
// Requires 1 <= n_latent <= min(p, m-1); extraction stops early (without
// error) once the X residual is numerically exhausted, and n_latent on the
// returned model records the count actually extracted.
PlsModel fit_pls(const Matrix& x, const Vector& y, int n_latent,
                 ScalingMode mode = ScalingMode::center,
                 std::vector<Index> column_map = {});

// Applies the stored scaling, computes X*b, and un-scales the response.
// x_new must already be projected to the model's fitted columns.
Vector predict(const PlsModel& model, const Matrix& x_new);

// Same prediction through the latent route (scores times inner coefficients);
// agrees with predict() to within accumulation error.
Vector predict_scores_path(const PlsModel& model, const Matrix& x_new);

// Normalized importance weights |b_i| / sum |b_i| scattered to full_p entries
// via column_map; positions outside the fitted subset are exactly 0.  An
// all-zero coefficient vector falls back to uniform weights over the subset
// with the degenerate flag set.
struct DescriptorWeights {
    Vector weights;
    bool degenerate = false;
};
DescriptorWeights descriptor_weights(const PlsModel& model, Index full_p);

}  // namespace descforge
