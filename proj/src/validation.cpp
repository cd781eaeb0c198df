#include "descforge/validation.hpp"

#include "descforge/parallel.hpp"
#include "descforge/pls.hpp"
#include "descforge/rng.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace descforge {

Index CvResult::pooled_count() const {
    return std::accumulate(fold_sizes.begin(), fold_sizes.end(), Index{0});
}

namespace {

struct HeldOutScore {
    double sq_sum = 0.0;
    Index count = 0;
};

// Fit on the train rows, score the held-out rows; all scaling happens inside
// fit_pls on the training block only.
HeldOutScore score_split(const Matrix& x, const Vector& y, const std::vector<Index>& train,
                         const std::vector<Index>& held_out, int n_latent, ScalingMode mode) {
    const Matrix x_train = x(train, Eigen::all);
    const Vector y_train = y(train);
    const PlsModel model = fit_pls(x_train, y_train, n_latent, mode);
    const Vector pred = predict(model, x(held_out, Eigen::all));
    const Vector truth = y(held_out);
    HeldOutScore score;
    score.sq_sum = (pred - truth).squaredNorm();
    score.count = static_cast<Index>(held_out.size());
    return score;
}

CvResult pool_scores(const std::vector<HeldOutScore>& scores, int n_latent, std::uint64_t seed) {
    CvResult result;
    result.n_latent = n_latent;
    result.fold_assignment_seed = seed;
    double total_sq = 0.0;
    Index total_n = 0;
    for (const auto& s : scores) {
        result.per_fold_errors.push_back(std::sqrt(s.sq_sum / static_cast<double>(s.count)));
        result.fold_sizes.push_back(s.count);
        total_sq += s.sq_sum;
        total_n += s.count;
    }
    result.rmsecv = std::sqrt(total_sq / static_cast<double>(total_n));
    return result;
}

}  // namespace

CvResult kfold_rmsecv(const Matrix& x, const Vector& y, int n_latent, int k, std::uint64_t seed,
                      ScalingMode mode, int threads) {
    const Index m = x.rows();
    if (y.size() != m) throw data_error("cv: activity length does not match sample count");
    if (k < 2 || k > m)
        throw config_error("cv: fold count " + std::to_string(k) + " outside [2, " +
                           std::to_string(m) + "]");
    const Index largest_fold = m / k + (m % k != 0 ? 1 : 0);
    const Index smallest_train = m - largest_fold;
    if (n_latent < 1 || n_latent > std::min<Index>(x.cols(), smallest_train - 1))
        throw config_error("cv: fold too small for n_latent=" + std::to_string(n_latent) +
                           " (train side has " + std::to_string(smallest_train) + " samples, p=" +
                           std::to_string(x.cols()) + ")");

    std::vector<Index> order = iota_indices(m);
    Rng rng(seed);
    rng.shuffle(order);

    // Contiguous slices of the shuffled order; first m%k folds take the extra sample.
    std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
    Index cursor = 0;
    for (int f = 0; f < k; ++f) {
        const Index size = m / k + (f < static_cast<int>(m % k) ? 1 : 0);
        auto& fold = folds[static_cast<std::size_t>(f)];
        fold.assign(order.begin() + cursor, order.begin() + cursor + size);
        std::sort(fold.begin(), fold.end());
        cursor += size;
    }

    std::vector<HeldOutScore> scores(static_cast<std::size_t>(k));
    parallel_for(k, threads, [&](Index f) {
        const auto& held_out = folds[static_cast<std::size_t>(f)];
        std::vector<Index> train;
        train.reserve(static_cast<std::size_t>(m - static_cast<Index>(held_out.size())));
        std::size_t cut = 0;
        for (Index i = 0; i < m; ++i) {
            if (cut < held_out.size() && held_out[cut] == i) {
                ++cut;
                continue;
            }
            train.push_back(i);
        }
        scores[static_cast<std::size_t>(f)] = score_split(x, y, train, held_out, n_latent, mode);
    });
    return pool_scores(scores, n_latent, seed);
}

CvResult monte_carlo_cv(const Matrix& x, const Vector& y, int n_latent, int n_iterations,
                        double train_fraction, std::uint64_t seed, ScalingMode mode, int threads) {
    const Index m = x.rows();
    if (y.size() != m) throw data_error("cv: activity length does not match sample count");
    if (n_iterations < 1) throw config_error("cv: need at least 1 iteration");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw config_error("cv: train fraction must lie in (0, 1)");
    const Index n_train =
        static_cast<Index>(std::llround(train_fraction * static_cast<double>(m)));
    if (n_train < 2 || n_train >= m)
        throw config_error("cv: train fraction " + format_double(train_fraction) + " of " +
                           std::to_string(m) + " samples leaves no usable split");
    if (n_latent < 1 || n_latent > std::min<Index>(x.cols(), n_train - 1))
        throw config_error("cv: train side too small for n_latent=" + std::to_string(n_latent));

    std::vector<HeldOutScore> scores(static_cast<std::size_t>(n_iterations));
    parallel_for(n_iterations, threads, [&](Index it) {
        // 1-based iteration id keeps streams disjoint from the assignment seed.
        Rng rng(derived_seed(seed, static_cast<std::uint64_t>(it) + 1));
        std::vector<Index> order = iota_indices(m);
        rng.shuffle(order);
        std::vector<Index> train(order.begin(), order.begin() + n_train);
        std::vector<Index> held_out(order.begin() + n_train, order.end());
        std::sort(train.begin(), train.end());
        std::sort(held_out.begin(), held_out.end());
        scores[static_cast<std::size_t>(it)] = score_split(x, y, train, held_out, n_latent, mode);
    });
    return pool_scores(scores, n_latent, seed);
}

namespace {

double f_critical(double alpha, double df1, double df2) {
    if (alpha <= 0.0) return std::numeric_limits<double>::infinity();
    if (alpha >= 1.0) return 0.0;
    const boost::math::fisher_f dist(df1, df2);
    return boost::math::quantile(dist, 1.0 - alpha);
}

}  // namespace

NlvSelection select_n_latent_curve(const Matrix& x, const Vector& y, int max_lv,
                                   const CvEngine& engine, double alpha) {
    if (max_lv < 1) throw config_error("nLV selection: max_lv must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw config_error("nLV selection: alpha outside [0, 1]");

    NlvSelection sel;
    sel.per_nlv.reserve(static_cast<std::size_t>(max_lv));
    for (int l = 1; l <= max_lv; ++l) sel.per_nlv.push_back(engine(x, y, l));

    std::size_t best = 0;
    for (std::size_t i = 1; i < sel.per_nlv.size(); ++i)
        if (sel.per_nlv[i].rmsecv < sel.per_nlv[best].rmsecv) best = i;

    const double best_mse = sel.per_nlv[best].rmsecv * sel.per_nlv[best].rmsecv;
    const double best_df = static_cast<double>(sel.per_nlv[best].pooled_count());
    for (std::size_t i = 0; i < sel.per_nlv.size(); ++i) {
        const double mse = sel.per_nlv[i].rmsecv * sel.per_nlv[i].rmsecv;
        bool acceptable;
        if (best_mse == 0.0) {
            acceptable = mse == 0.0;
        } else {
            const double f = mse / best_mse;
            const double df = static_cast<double>(sel.per_nlv[i].pooled_count());
            acceptable = f <= f_critical(alpha, df, best_df);
        }
        if (acceptable) {
            sel.chosen = static_cast<int>(i) + 1;
            return sel;
        }
    }
    // alpha close to 1 rejects even the minimum against itself; keep the argmin.
    sel.chosen = static_cast<int>(best) + 1;
    return sel;
}

int select_n_latent(const Matrix& x, const Vector& y, int max_lv, const CvEngine& engine,
                    double alpha) {
    return select_n_latent_curve(x, y, max_lv, engine, alpha).chosen;
}

double rmsep(const Vector& y_true, const Vector& y_pred) {
    if (y_true.size() == 0) throw data_error("rmsep: empty input");
    if (y_true.size() != y_pred.size()) throw data_error("rmsep: length mismatch");
    return std::sqrt((y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size()));
}

double r_squared(const Vector& y_true, const Vector& y_pred) {
    if (y_true.size() < 2) throw data_error("r_squared: need at least 2 samples");
    if (y_true.size() != y_pred.size()) throw data_error("r_squared: length mismatch");
    const double ss_res = (y_true - y_pred).squaredNorm();
    const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
    if (ss_tot == 0.0) throw data_error("r_squared: observed values are constant");
    return 1.0 - ss_res / ss_tot;
}

}  // namespace descforge
