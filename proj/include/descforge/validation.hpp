#pragma once

#include "descforge/common.hpp"
#include "descforge/dataset.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace descforge {

// Cross-validation summary. rmsecv pools squared residuals over every held-out
// sample, so it can be recomputed exactly from per_fold_errors and fold_sizes.
struct CvResult {
    double rmsecv = 0.0;
    std::vector<double> per_fold_errors;  // per-fold (or per-iteration) RMS error
    std::vector<Index> fold_sizes;        // held-out counts, aligned with per_fold_errors
    int n_latent = 0;
    std::uint64_t fold_assignment_seed = 0;

    Index pooled_count() const;
};

// k-fold CV with a seed-shuffled assignment; the first (m mod k) folds take one
// extra sample.  Scaling is refit inside each fold (fit_pls centers its own
// training block), so no information leaks from held-out rows.  Folds are
// independent and may run on several threads without changing the result.
CvResult kfold_rmsecv(const Matrix& x, const Vector& y, int n_latent, int k,
                      std::uint64_t seed, ScalingMode mode = ScalingMode::center,
                      int threads = 1);

// Repeated random train/held-out splits (train_fraction per iteration), errors
// pooled across iterations.  Iteration i draws from derived_seed(seed, i), so
// the result is independent of execution order.
CvResult monte_carlo_cv(const Matrix& x, const Vector& y, int n_latent, int n_iterations,
                        double train_fraction, std::uint64_t seed,
                        ScalingMode mode = ScalingMode::center, int threads = 1);

using CvEngine = std::function<CvResult(const Matrix&, const Vector&, int)>;

struct NlvSelection {
    int chosen = 1;
    std::vector<CvResult> per_nlv;  // index l-1 holds the result for l components
};

// Scans nLV = 1..max_lv with the given CV engine and returns the smallest nLV
// whose pooled MSE is not significantly worse than the global minimum under a
// one-sided F-test at level alpha (df = pooled residual counts).  If no
// candidate passes (alpha near 1), falls back to the argmin itself.
NlvSelection select_n_latent_curve(const Matrix& x, const Vector& y, int max_lv,
                                   const CvEngine& engine, double alpha);
int select_n_latent(const Matrix& x, const Vector& y, int max_lv, const CvEngine& engine,
                    double alpha);

// Root mean squared prediction error over equal-length, non-empty vectors.
double rmsep(const Vector& y_true, const Vector& y_pred);

// 1 - SS_res/SS_tot; requires >= 2 samples and non-constant y_true.
double r_squared(const Vector& y_true, const Vector& y_pred);

}  // namespace descforge
