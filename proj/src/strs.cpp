#include "descforge/strs.hpp"

#include "descforge/pls.hpp"
#include "descforge/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace descforge {

RdfConstants rdf_constants(Index p, int n_runs) {
    if (p <= 2)
        throw config_error("retention schedule needs p > 2 so the terminal ratio 2/p is below 1");
    if (n_runs < 2) throw config_error("retention schedule needs at least 2 runs");
    RdfConstants c;
    c.k = std::log(static_cast<double>(p) / 2.0) / static_cast<double>(n_runs - 1);
    c.a = std::exp(c.k);
    return c;
}

double rdf_ratio(int run_index, const RdfConstants& constants) {
    if (run_index < 1) throw config_error("run index is 1-based");
    // a * exp(-k*i) with a = e^k, arranged so run 1 gives exactly exp(0) = 1.
    return std::exp(constants.k * (1.0 - static_cast<double>(run_index)));
}

std::vector<Index> enforced_selection(const Vector& weights, Index count) {
    if (count < 1) throw config_error("enforced selection needs count >= 1");
    for (Index i = 0; i < weights.size(); ++i)
        if (!(weights(i) >= 0.0) || !std::isfinite(weights(i)))
            throw data_error("enforced selection: weights must be finite and non-negative");

    std::vector<Index> positive;
    for (Index i = 0; i < weights.size(); ++i)
        if (weights(i) > 0.0) positive.push_back(i);
    if (static_cast<Index>(positive.size()) <= count) return positive;  // already ascending

    std::sort(positive.begin(), positive.end(), [&](Index a, Index b) {
        if (weights(a) != weights(b)) return weights(a) > weights(b);
        return a < b;  // ties keep the lower index
    });
    positive.resize(static_cast<std::size_t>(count));
    std::sort(positive.begin(), positive.end());
    return positive;
}

std::vector<Index> tuned_reweighted_sampling(const Vector& weights, Index n_draws, Rng& rng) {
    if (n_draws < 1) throw config_error("reweighted sampling needs n_draws >= 1");
    const Index p = weights.size();
    std::vector<double> cumulative(static_cast<std::size_t>(p));
    double total = 0.0;
    for (Index i = 0; i < p; ++i) {
        const double w = weights(i);
        if (!(w >= 0.0) || !std::isfinite(w))
            throw data_error("reweighted sampling: weights must be finite and non-negative");
        total += w;
        cumulative[static_cast<std::size_t>(i)] = total;
    }
    if (!(total > 0.0)) throw data_error("reweighted sampling: all weights are zero");

    std::vector<char> drawn(static_cast<std::size_t>(p), 0);
    for (Index d = 0; d < n_draws; ++d) {
        const double u = rng.uniform01() * total;
        // First strictly-greater cumulative bin; zero-width (zero-weight) bins
        // can never satisfy the strict inequality.
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        Index j = static_cast<Index>(it - cumulative.begin());
        if (j >= p) j = p - 1;  // u == total can only occur through rounding
        drawn[static_cast<std::size_t>(j)] = 1;
    }
    std::vector<Index> out;
    for (Index i = 0; i < p; ++i)
        if (drawn[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

namespace {

nlohmann::json config_echo(const StrsConfig& cfg) {
    return nlohmann::json{{"n_runs", cfg.n_runs},
                          {"sample_ratio", cfg.sample_ratio},
                          {"n_latent", cfg.n_latent},
                          {"cv_folds", cfg.cv_folds},
                          {"min_subset", cfg.min_subset},
                          {"seed", cfg.seed}};
}

}  // namespace

SelectionResult run_strs(const Matrix& x, const Vector& y, const StrsConfig& cfg, int threads) {
    const Index m = x.rows();
    const Index p = x.cols();
    if (y.size() != m) throw data_error("selection: activity length does not match sample count");
    if (p < 3) throw config_error("selection needs at least 3 descriptors");
    if (cfg.n_runs < 2) throw config_error("selection needs at least 2 runs");
    if (!(cfg.sample_ratio > 0.0 && cfg.sample_ratio <= 1.0))
        throw config_error("sample ratio must lie in (0, 1]");
    if (cfg.n_latent < 1) throw config_error("n_latent must be >= 1");
    if (cfg.min_subset < 2 || static_cast<Index>(cfg.min_subset) > p)
        throw config_error("min_subset must lie in [2, p]");
    const Index n_sample =
        static_cast<Index>(std::llround(cfg.sample_ratio * static_cast<double>(m)));
    if (n_sample < 2)
        throw config_error("sample ratio " + format_double(cfg.sample_ratio) + " of " +
                           std::to_string(m) + " samples draws fewer than 2 rows");
    if (cfg.cv_folds < 2 || static_cast<Index>(cfg.cv_folds) > m)
        throw config_error("cv folds outside [2, m]");

    const RdfConstants schedule = rdf_constants(p, cfg.n_runs);
    // One fold assignment for every run: candidate subsets are compared on
    // identical held-out blocks.
    const std::uint64_t fold_seed = derived_seed(cfg.seed, kFoldSeedSalt);

    SelectionResult result;
    result.method = "strs";
    result.seed = cfg.seed;
    result.config = config_echo(cfg);
    result.traces.reserve(static_cast<std::size_t>(cfg.n_runs));

    std::vector<Index> live = iota_indices(p);
    for (int run = 1; run <= cfg.n_runs; ++run) {
        Rng run_rng(derived_seed(cfg.seed, static_cast<std::uint64_t>(run)));

        StrsRunTrace trace;
        trace.run_index = run;
        trace.retention_ratio = rdf_ratio(run, schedule);
        const Index scheduled = static_cast<Index>(
            std::llround(static_cast<double>(p) * trace.retention_ratio));
        // Schedule uses the original p; the live set caps what is available.
        trace.enforced_count =
            std::min<Index>(std::clamp<Index>(scheduled, cfg.min_subset, p),
                            static_cast<Index>(live.size()));

        try {
            // (1) Monte-Carlo sample of the training rows.
            const std::vector<Index> rows = sample_without_replacement(m, n_sample, run_rng);

            // (2) PLS on the sampled rows, live descriptors only.
            const int nlv = static_cast<int>(std::min<Index>(
                {static_cast<Index>(cfg.n_latent), static_cast<Index>(live.size()), n_sample - 1}));
            const PlsModel model =
                fit_pls(x(rows, live), y(rows), nlv, ScalingMode::center, live);

            // (3) Normalized |b| weights, scattered to the full width.
            const DescriptorWeights weights = descriptor_weights(model, p);
            trace.degenerate = weights.degenerate;

            // (4) Schedule-enforced hard cut.
            const std::vector<Index> enforced =
                enforced_selection(weights.weights, trace.enforced_count);

            // (5) Weight-proportional resampling of the enforced pool.
            Vector pool_weights(static_cast<Index>(enforced.size()));
            for (std::size_t j = 0; j < enforced.size(); ++j)
                pool_weights(static_cast<Index>(j)) = weights.weights(enforced[j]);
            const std::vector<Index> drawn_local = tuned_reweighted_sampling(
                pool_weights, static_cast<Index>(enforced.size()), run_rng);
            std::vector<Index> selected;
            selected.reserve(drawn_local.size());
            for (Index j : drawn_local) selected.push_back(enforced[static_cast<std::size_t>(j)]);

            // Top up to min_subset from the unselected enforced pool, best first.
            if (static_cast<Index>(selected.size()) < cfg.min_subset) {
                std::vector<Index> rest;
                for (Index g : enforced)
                    if (std::find(selected.begin(), selected.end(), g) == selected.end())
                        rest.push_back(g);
                std::sort(rest.begin(), rest.end(), [&](Index a, Index b) {
                    if (weights.weights(a) != weights.weights(b))
                        return weights.weights(a) > weights.weights(b);
                    return a < b;
                });
                for (Index g : rest) {
                    if (static_cast<Index>(selected.size()) >= cfg.min_subset) break;
                    selected.push_back(g);
                }
            }
            std::sort(selected.begin(), selected.end());
            trace.selected_indices = selected;

            // Coefficients of the surviving descriptors from this run's fit;
            // everything eliminated stays exactly 0.
            trace.coefficient_vector = Vector::Zero(p);
            std::size_t pos_in_live = 0;
            for (Index g : selected) {
                while (live[pos_in_live] != g) ++pos_in_live;
                trace.coefficient_vector(g) = model.coefficients(static_cast<Index>(pos_in_live));
            }

            // (6) Score the subset on the full training set, shared folds.
            const int nlv_cv = static_cast<int>(
                std::min<Index>(static_cast<Index>(cfg.n_latent),
                                static_cast<Index>(selected.size())));
            trace.rmsecv = kfold_rmsecv(x(Eigen::all, selected), y, nlv_cv, cfg.cv_folds,
                                        fold_seed, ScalingMode::center, threads)
                               .rmsecv;

            // (7) Survivors become the next run's live set.
            live = selected;
        } catch (const std::exception&) {
            // Defensive: validated configs should never land here. Keep the
            // run in the record, score it out of contention, carry the live
            // set forward truncated to the schedule.
            trace.degenerate = true;
            trace.rmsecv = std::numeric_limits<double>::infinity();
            trace.selected_indices.assign(
                live.begin(), live.begin() + std::min<Index>(trace.enforced_count,
                                                             static_cast<Index>(live.size())));
            trace.coefficient_vector = Vector::Zero(p);
            live = trace.selected_indices;
        }
        result.traces.push_back(std::move(trace));
    }

    int best = -1;
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
        if (!std::isfinite(result.traces[i].rmsecv)) continue;
        if (best < 0 || result.traces[i].rmsecv < result.traces[static_cast<std::size_t>(best)].rmsecv)
            best = static_cast<int>(i);
    }
    if (best < 0) throw data_error("selection failed: no run produced a finite score");
    result.best_run_index = result.traces[static_cast<std::size_t>(best)].run_index;
    result.best_rmsecv = result.traces[static_cast<std::size_t>(best)].rmsecv;
    result.best_subset = result.traces[static_cast<std::size_t>(best)].selected_indices;
    return result;
}

}  // namespace descforge
