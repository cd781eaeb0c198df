#include "descforge/pls.hpp"

#include <cmath>

namespace descforge {

PlsModel fit_pls(const Matrix& x, const Vector& y, int n_latent, ScalingMode mode,
                 std::vector<Index> column_map) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n < 2) throw data_error("pls fit needs at least 2 samples, got " + std::to_string(n));
    if (p < 1) throw data_error("pls fit needs at least 1 descriptor");
    if (y.size() != n) throw data_error("pls fit: activity length does not match sample count");
    if (!x.allFinite() || !y.allFinite()) throw data_error("pls fit: non-finite input");
    const int max_lv = static_cast<int>(std::min<Index>(p, n - 1));
    if (n_latent < 1 || n_latent > max_lv)
        throw data_error("n_latent=" + std::to_string(n_latent) + " outside [1, " +
                         std::to_string(max_lv) + "] for a " + std::to_string(n) + "x" +
                         std::to_string(p) + " fit");
    if (!column_map.empty() && static_cast<Index>(column_map.size()) != p)
        throw data_error("column map length does not match descriptor count");

    PlsModel model;
    model.x_scaling = fit_scaling(x, mode);
    model.y_scaling = fit_scaling(Matrix(y), mode);
    model.column_map = column_map.empty() ? iota_indices(p) : std::move(column_map);

    Matrix xr = apply_scaling(x, model.x_scaling);
    Vector yr = apply_scaling(Matrix(y), model.y_scaling).col(0);
    const double x0_norm = xr.norm();

    Matrix W(p, n_latent);
    Matrix P(p, n_latent);
    Vector c(n_latent);
    int extracted = 0;

    for (int h = 0; h < n_latent; ++h) {
        // Stop once the deflated X carries no usable signal.
        if (xr.norm() < kResidualExhaustionTol * x0_norm) break;

        // Weight direction. With a single response the update is stationary
        // after one pass; the loop re-derives it until stable as a guard.
        Vector w = Vector::Zero(p);
        Vector t(n);
        double tt = 0.0;
        bool usable = false;
        for (int iter = 0; iter < kNipalsMaxIter; ++iter) {
            Vector w_next = xr.transpose() * yr;
            const double wn = w_next.norm();
            if (!(wn > 0.0) || !std::isfinite(wn)) break;  // response orthogonal to residual X
            w_next /= wn;
            t.noalias() = xr * w_next;
            tt = t.squaredNorm();
            if (!(tt > 0.0)) break;
            usable = true;
            const bool converged = iter > 0 && (w_next - w).norm() <= kNipalsTol;
            w = std::move(w_next);
            if (converged) break;
        }
        if (!usable) break;

        const double ch = t.dot(yr) / tt;
        Vector ph = (xr.transpose() * t) / tt;
        xr.noalias() -= t * ph.transpose();
        yr.noalias() -= ch * t;

        W.col(extracted) = w;
        P.col(extracted) = ph;
        c(extracted) = ch;
        ++extracted;
    }

    model.n_latent = extracted;
    if (extracted == 0) {
        // Nothing extractable (e.g. constant response): predict the mean.
        model.x_weights.resize(p, 0);
        model.inner_coefficients.resize(0);
        model.coefficients = Vector::Zero(p);
        model.degenerate = true;
        return model;
    }

    // Composite weights: W(P'W)^-1 maps the *undeflated* scaled X straight to
    // scores, which is what makes coefficients = W* c a valid regression vector.
    const Matrix pw = P.leftCols(extracted).transpose() * W.leftCols(extracted);
    const Matrix wstar =
        W.leftCols(extracted) * pw.partialPivLu().solve(Matrix::Identity(extracted, extracted));
    model.x_weights = wstar;
    model.inner_coefficients = c.head(extracted);
    model.coefficients = wstar * model.inner_coefficients;
    model.degenerate = (model.coefficients.array() == 0.0).all();
    return model;
}

namespace {

Vector unscale_response(const Vector& scaled, const ScalingParams& y_scaling) {
    return (scaled.array() * y_scaling.stds(0) + y_scaling.means(0)).matrix();
}

void check_prediction_input(const PlsModel& model, const Matrix& x_new) {
    if (x_new.cols() != model.coefficients.size())
        throw data_error("prediction input has " + std::to_string(x_new.cols()) +
                         " columns, model was fitted on " +
                         std::to_string(model.coefficients.size()));
    if (!x_new.allFinite()) throw data_error("prediction input contains non-finite values");
}

}  // namespace

Vector predict(const PlsModel& model, const Matrix& x_new) {
    check_prediction_input(model, x_new);
    const Matrix xs = apply_scaling(x_new, model.x_scaling);
    return unscale_response(xs * model.coefficients, model.y_scaling);
}

Vector predict_scores_path(const PlsModel& model, const Matrix& x_new) {
    check_prediction_input(model, x_new);
    if (model.n_latent == 0) return unscale_response(Vector::Zero(x_new.rows()), model.y_scaling);
    const Matrix scores = apply_scaling(x_new, model.x_scaling) * model.x_weights;
    return unscale_response(scores * model.inner_coefficients, model.y_scaling);
}

DescriptorWeights descriptor_weights(const PlsModel& model, Index full_p) {
    const Index p_sub = model.coefficients.size();
    if (static_cast<Index>(model.column_map.size()) != p_sub)
        throw data_error("model column map is inconsistent with its coefficients");
    DescriptorWeights out;
    out.weights = Vector::Zero(full_p);
    const Vector magnitude = model.coefficients.cwiseAbs();
    const double total = magnitude.sum();
    for (Index j = 0; j < p_sub; ++j) {
        const Index target = model.column_map[static_cast<std::size_t>(j)];
        if (target < 0 || target >= full_p)
            throw data_error("model column map entry " + std::to_string(target) +
                             " outside [0, " + std::to_string(full_p) + ")");
        // All-zero coefficients carry no ranking information: fall back to
        // uniform weight over the fitted subset and flag it.
        out.weights(target) = total > 0.0 ? magnitude(j) / total
                                          : 1.0 / static_cast<double>(p_sub);
    }
    out.degenerate = !(total > 0.0);
    return out;
}

}  // namespace descforge
