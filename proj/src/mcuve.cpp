#include "descforge/mcuve.hpp"

#include "descforge/parallel.hpp"
#include "descforge/pls.hpp"
#include "descforge/rng.hpp"
#include "descforge/validation.hpp"

#include <algorithm>
#include <cmath>

namespace descforge {

namespace {

void validate_config(const Matrix& x, const Vector& y, const McuveConfig& cfg, Index n_sample) {
    if (y.size() != x.rows()) throw data_error("stability: activity length does not match sample count");
    if (cfg.n_iterations < 2) throw config_error("stability needs at least 2 iterations");
    if (!(cfg.sample_ratio > 0.0 && cfg.sample_ratio <= 1.0))
        throw config_error("sample ratio must lie in (0, 1]");
    if (n_sample < 2)
        throw config_error("sample ratio " + format_double(cfg.sample_ratio) + " of " +
                           std::to_string(x.rows()) + " samples draws fewer than 2 rows");
    if (cfg.n_latent < 1 || static_cast<Index>(cfg.n_latent) > std::min<Index>(x.cols(), n_sample - 1))
        throw config_error("n_latent=" + std::to_string(cfg.n_latent) +
                           " too large for resampled fits of " + std::to_string(n_sample) + "x" +
                           std::to_string(x.cols()));
}

}  // namespace

Vector compute_stability(const Matrix& x, const Vector& y, const McuveConfig& cfg, int threads) {
    const Index m = x.rows();
    const Index p = x.cols();
    const Index n_sample =
        static_cast<Index>(std::llround(cfg.sample_ratio * static_cast<double>(m)));
    validate_config(x, y, cfg, n_sample);

    const Index iters = cfg.n_iterations;
    Matrix coefficient_draws(iters, p);
    std::vector<char> ok(static_cast<std::size_t>(iters), 0);
    parallel_for(iters, threads, [&](Index it) {
        Rng rng(derived_seed(cfg.seed, static_cast<std::uint64_t>(it) + 1));
        const std::vector<Index> rows = sample_without_replacement(m, n_sample, rng);
        try {
            const PlsModel model =
                fit_pls(x(rows, Eigen::all), y(rows), cfg.n_latent, ScalingMode::center);
            coefficient_draws.row(it) = model.coefficients.transpose();
            ok[static_cast<std::size_t>(it)] = 1;
        } catch (const std::exception&) {
            // counted below; a high failure rate aborts with the tally
        }
    });

    Index n_ok = 0;
    for (char flag : ok) n_ok += flag;
    const Index n_failed = iters - n_ok;
    if (n_failed * 10 > iters || n_ok < 2)
        throw data_error("stability aborted: " + std::to_string(n_failed) + " of " +
                         std::to_string(iters) + " resampled fits failed");

    Vector stability(p);
    for (Index j = 0; j < p; ++j) {
        double sum = 0.0;
        for (Index it = 0; it < iters; ++it)
            if (ok[static_cast<std::size_t>(it)]) sum += coefficient_draws(it, j);
        const double mean = sum / static_cast<double>(n_ok);
        double sq = 0.0;
        for (Index it = 0; it < iters; ++it)
            if (ok[static_cast<std::size_t>(it)]) {
                const double d = coefficient_draws(it, j) - mean;
                sq += d * d;
            }
        const double sd = std::sqrt(sq / static_cast<double>(n_ok - 1));
        stability(j) = mean / (sd + kStabilityEpsilon);
    }
    return stability;
}

SelectionResult run_mcuve(const Matrix& x, const Vector& y, const McuveConfig& cfg, int threads,
                          Vector* stability_out) {
    const Index p = x.cols();
    if (p < 2) throw config_error("selection needs at least 2 descriptors");
    if (cfg.cv_folds < 2 || static_cast<Index>(cfg.cv_folds) > x.rows())
        throw config_error("cv folds outside [2, m]");
    if (cfg.scan_stride < 1) throw config_error("scan stride must be >= 1");
    const Index max_selected =
        cfg.max_selected > 0 ? std::min<Index>(cfg.max_selected, p) : (p + 1) / 2;

    const Vector stability = compute_stability(x, y, cfg, threads);
    if (stability_out) *stability_out = stability;

    // |stability| ranking, ties toward the lower index.
    std::vector<Index> ranked = iota_indices(p);
    std::sort(ranked.begin(), ranked.end(), [&](Index a, Index b) {
        const double sa = std::abs(stability(a));
        const double sb = std::abs(stability(b));
        if (sa != sb) return sa > sb;
        return a < b;
    });

    std::vector<Index> cuts;
    for (Index cut = 1; cut <= max_selected; cut += cfg.scan_stride) cuts.push_back(cut);

    const std::uint64_t fold_seed = derived_seed(cfg.seed, kFoldSeedSalt);
    std::vector<StrsRunTrace> traces(cuts.size());
    parallel_for(static_cast<Index>(cuts.size()), threads, [&](Index c) {
        const Index cut = cuts[static_cast<std::size_t>(c)];
        std::vector<Index> subset(ranked.begin(), ranked.begin() + cut);
        std::sort(subset.begin(), subset.end());
        const int nlv = static_cast<int>(std::min<Index>(static_cast<Index>(cfg.n_latent), cut));
        StrsRunTrace trace;
        trace.run_index = static_cast<int>(c) + 1;
        trace.retention_ratio = static_cast<double>(cut) / static_cast<double>(p);
        trace.enforced_count = cut;
        trace.selected_indices = std::move(subset);
        trace.rmsecv = kfold_rmsecv(x(Eigen::all, trace.selected_indices), y, nlv, cfg.cv_folds,
                                    fold_seed, ScalingMode::center, 1)
                           .rmsecv;
        traces[static_cast<std::size_t>(c)] = std::move(trace);
    });

    SelectionResult result;
    result.method = "mcuve";
    result.seed = cfg.seed;
    result.config = nlohmann::json{{"n_iterations", cfg.n_iterations},
                                   {"sample_ratio", cfg.sample_ratio},
                                   {"n_latent", cfg.n_latent},
                                   {"cv_folds", cfg.cv_folds},
                                   {"max_selected", max_selected},
                                   {"scan_stride", cfg.scan_stride},
                                   {"seed", cfg.seed}};
    result.traces = std::move(traces);

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.traces.size(); ++i)
        if (result.traces[i].rmsecv < result.traces[best].rmsecv) best = i;
    result.best_run_index = result.traces[best].run_index;
    result.best_rmsecv = result.traces[best].rmsecv;
    result.best_subset = result.traces[best].selected_indices;
    return result;
}

}  // namespace descforge
