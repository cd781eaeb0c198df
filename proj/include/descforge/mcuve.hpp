#pragma once

#include "descforge/common.hpp"
#include "descforge/strs.hpp"

#include <cstdint>

namespace descforge {

// Denominator guard for stability ratios; keeps zero-spread coefficients from
// dividing by zero while leaving their magnitude enormous.
inline constexpr double kStabilityEpsilon = 1e-12;

struct McuveConfig {
    int n_iterations = 500;
    double sample_ratio = 0.8;
    int n_latent = 2;
    int cv_folds = 10;
    Index max_selected = 0;  // 0: defaults to ceil(p/2)
    int scan_stride = 1;
    std::uint64_t seed = 42;
};

// Per-descriptor stability mean(b_j) / (std(b_j) + eps) over n_iterations
// resampled PLS fits (sample std, n-1 denominator).  Aborts if more than 10%
// of the fits fail, reporting the counts.
Vector compute_stability(const Matrix& x, const Vector& y, const McuveConfig& config,
                         int threads = 1);

// Ranks descriptors by |stability| (ties favor the lower index) and scans head
// subsets of sizes 1, 1+stride, ... up to max_selected by k-fold RMSECV; the
// cut with the lowest RMSECV wins.  Traces record the scan: one entry per cut
// size with its subset and score.  stability_out, when non-null, receives the
// stability vector.
SelectionResult run_mcuve(const Matrix& x, const Vector& y, const McuveConfig& config,
                          int threads = 1, Vector* stability_out = nullptr);

}  // namespace descforge
