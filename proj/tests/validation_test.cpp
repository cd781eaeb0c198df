#include "descforge/validation.hpp"

#include "descforge/rng.hpp"
#include "testutil.hpp"

#include <doctest.h>

#include <cmath>

using namespace descforge;

namespace {

CvEngine kfold_engine(int k, std::uint64_t seed, int threads = 1) {
    return [k, seed, threads](const Matrix& x, const Vector& y, int nlv) {
        return kfold_rmsecv(x, y, nlv, k, seed, ScalingMode::center, threads);
    };
}

}  // namespace

TEST_CASE("noiseless data cross-validates to zero error") {
    // Full component count makes each fold's fit exact least squares, which
    // recovers the planted coefficients and thus the held-out rows exactly.
    const SyntheticDataset data = synthesize(30, 5, {0, 2}, {1.0, -2.0}, 0.0, 21);
    const CvResult cv = kfold_rmsecv(data.table.values, data.activity, 5, 5, 99);
    CHECK(cv.rmsecv < 1e-8);
}

TEST_CASE("kfold is seed-deterministic") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const CvResult a = kfold_rmsecv(data.table.values, data.activity, 3, 10, 7);
    const CvResult b = kfold_rmsecv(data.table.values, data.activity, 3, 10, 7);
    CHECK(a.rmsecv == b.rmsecv);
    CHECK(a.per_fold_errors == b.per_fold_errors);
    const CvResult c = kfold_rmsecv(data.table.values, data.activity, 3, 10, 8);
    CHECK(a.rmsecv != c.rmsecv);  // different assignment, different pooled error
}

TEST_CASE("kfold runs identically on one or many threads") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const CvResult serial = kfold_rmsecv(data.table.values, data.activity, 3, 10, 7,
                                         ScalingMode::center, 1);
    const CvResult parallel = kfold_rmsecv(data.table.values, data.activity, 3, 10, 7,
                                           ScalingMode::center, 8);
    CHECK(serial.rmsecv == parallel.rmsecv);
    CHECK(serial.per_fold_errors == parallel.per_fold_errors);
}

TEST_CASE("pooled rmsecv decomposes over folds") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const CvResult cv = kfold_rmsecv(data.table.values, data.activity, 3, 7, 13);
    double pooled_sq = 0.0;
    Index count = 0;
    for (std::size_t f = 0; f < cv.per_fold_errors.size(); ++f) {
        pooled_sq += cv.per_fold_errors[f] * cv.per_fold_errors[f] *
                     static_cast<double>(cv.fold_sizes[f]);
        count += cv.fold_sizes[f];
    }
    CHECK(count == data.table.rows());
    CHECK(cv.pooled_count() == count);
    CHECK(cv.rmsecv == doctest::Approx(std::sqrt(pooled_sq / static_cast<double>(count)))
                           .epsilon(1e-12));
}

TEST_CASE("fold sizes differ by at most one, larger folds first") {
    const SyntheticDataset data = synthesize(23, 4, {1}, {1.0}, 0.1, 3);
    const CvResult cv = kfold_rmsecv(data.table.values, data.activity, 2, 5, 1);
    CHECK(cv.fold_sizes == std::vector<Index>{5, 5, 5, 4, 4});
}

TEST_CASE("leave-one-out is seed-independent") {
    const SyntheticDataset data = synthesize(18, 4, {0, 3}, {1.0, 1.0}, 0.1, 29);
    const CvResult a = kfold_rmsecv(data.table.values, data.activity, 2, 18, 1);
    const CvResult b = kfold_rmsecv(data.table.values, data.activity, 2, 18, 2);
    // Same singleton folds either way; only their order (and thus the fp
    // summation order) can differ.
    CHECK(a.rmsecv == doctest::Approx(b.rmsecv).epsilon(1e-12));
}

TEST_CASE("the planted subset cross-validates better than the full table") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const std::vector<Index> planted = {3, 7, 11};
    const Matrix x_true = data.table.values(Eigen::all, planted);
    const CvResult cv_true = kfold_rmsecv(x_true, data.activity, 3, 10, 7);
    const CvResult cv_full = kfold_rmsecv(data.table.values, data.activity, 10, 10, 7);
    CHECK(cv_true.rmsecv < cv_full.rmsecv);
    CHECK(cv_true.rmsecv < 0.10);  // close to the planted noise level 0.05
}

TEST_CASE("kfold validates its inputs") {
    const SyntheticDataset data = synthesize(10, 3, {0}, {1.0}, 0.1, 1);
    CHECK_THROWS_AS(kfold_rmsecv(data.table.values, data.activity, 1, 1, 1), config_error);
    CHECK_THROWS_AS(kfold_rmsecv(data.table.values, data.activity, 1, 11, 1), config_error);
    // smallest training block has 5 rows: 4 components is the ceiling there
    CHECK_THROWS_AS(kfold_rmsecv(data.table.values, data.activity, 5, 2, 1), config_error);
}

TEST_CASE("monte carlo cv with one iteration is a single split") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const CvResult cv = monte_carlo_cv(data.table.values, data.activity, 3, 1, 0.8, 5);
    REQUIRE(cv.per_fold_errors.size() == 1);
    CHECK(cv.fold_sizes == std::vector<Index>{20});  // 100 - llround(80)
    CHECK(cv.rmsecv == doctest::Approx(cv.per_fold_errors[0]).epsilon(1e-12));
}

TEST_CASE("monte carlo cv is deterministic and seed-sensitive but stable") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const CvResult a = monte_carlo_cv(data.table.values, data.activity, 3, 40, 0.8, 5);
    const CvResult b = monte_carlo_cv(data.table.values, data.activity, 3, 40, 0.8, 5);
    const CvResult c = monte_carlo_cv(data.table.values, data.activity, 3, 40, 0.8, 6);
    CHECK(a.rmsecv == b.rmsecv);
    CHECK(a.per_fold_errors == b.per_fold_errors);
    // Different seeds see different splits, but 40 iterations average the
    // difference down to well under a factor of 1.5.
    CHECK(a.rmsecv != c.rmsecv);
    CHECK(a.rmsecv / c.rmsecv > 1.0 / 1.5);
    CHECK(a.rmsecv / c.rmsecv < 1.5);
}

TEST_CASE("monte carlo cv matches kfold on threads") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const CvResult serial =
        monte_carlo_cv(data.table.values, data.activity, 3, 16, 0.8, 5, ScalingMode::center, 1);
    const CvResult parallel =
        monte_carlo_cv(data.table.values, data.activity, 3, 16, 0.8, 5, ScalingMode::center, 4);
    CHECK(serial.rmsecv == parallel.rmsecv);
}

TEST_CASE("component choice stops at one for single-direction data") {
    // Descriptors are one latent direction observed five ways; the response is
    // that direction itself, so extra components cannot help.
    Rng rng(31);
    const Index m = 40;
    Vector t(m);
    for (Index i = 0; i < m; ++i) t(i) = rng.normal();
    Vector loadings(5);
    loadings << 1.0, -0.5, 2.0, 0.25, -1.5;
    const Matrix x = t * loadings.transpose();
    const NlvSelection sel = select_n_latent_curve(x, t, 4, kfold_engine(5, 17), 0.05);
    CHECK(sel.chosen == 1);
    CHECK(sel.per_nlv.size() == 4);
    CHECK(sel.per_nlv[0].rmsecv < 1e-10);
}

TEST_CASE("component choice never exceeds the error minimum") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const NlvSelection sel =
        select_n_latent_curve(data.table.values, data.activity, 8, kfold_engine(5, 23), 0.05);
    int argmin = 1;
    for (std::size_t l = 1; l < sel.per_nlv.size(); ++l)
        if (sel.per_nlv[l].rmsecv < sel.per_nlv[static_cast<std::size_t>(argmin - 1)].rmsecv)
            argmin = static_cast<int>(l + 1);
    CHECK(sel.chosen <= argmin);
    CHECK(sel.chosen >= 1);
}

TEST_CASE("significance level steers the component choice at its limits") {
    const SyntheticDataset& data = testutil::reference_dataset();
    // Accept-everything limit: every candidate passes, so the smallest wins.
    const int loosest =
        select_n_latent(data.table.values, data.activity, 8, kfold_engine(5, 23), 0.0);
    CHECK(loosest == 1);
    // Accept-nothing limit: the scan falls back to the argmin itself.
    const NlvSelection strict =
        select_n_latent_curve(data.table.values, data.activity, 8, kfold_engine(5, 23), 1.0);
    int argmin = 1;
    for (std::size_t l = 1; l < strict.per_nlv.size(); ++l)
        if (strict.per_nlv[l].rmsecv < strict.per_nlv[static_cast<std::size_t>(argmin - 1)].rmsecv)
            argmin = static_cast<int>(l + 1);
    CHECK(strict.chosen == argmin);
}

TEST_CASE("prediction metrics on a worked example") {
    Vector y_true(3), y_pred(3);
    y_true << 1, 2, 3;
    y_pred << 2, 3, 4;
    CHECK(rmsep(y_true, y_pred) == doctest::Approx(1.0).epsilon(1e-15));
    // SS_res = 3, SS_tot = 2: explained variance is negative here.
    CHECK(r_squared(y_true, y_pred) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(r_squared(y_true, y_true) == doctest::Approx(1.0));
}

TEST_CASE("a constant shift moves rmsep by its magnitude") {
    const SyntheticDataset& data = testutil::reference_dataset();
    const Vector shifted = data.activity.array() + 0.75;
    CHECK(rmsep(data.activity, shifted) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rmsep(data.activity, data.activity) == 0.0);
}

TEST_CASE("metrics reject degenerate inputs") {
    Vector a(3), b(2);
    a << 1, 2, 3;
    b << 1, 2;
    CHECK_THROWS_AS(rmsep(a, b), data_error);
    CHECK_THROWS_AS(rmsep(Vector(), Vector()), data_error);
    CHECK_THROWS_AS(r_squared(Vector::Constant(3, 1.0), a), data_error);
    CHECK_THROWS_AS(r_squared(a.head(1), a.head(1)), data_error);
}
