#include "nbdkal/kalman_ref.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "nbdkal/counts.hpp"

namespace nbdkal {

namespace {

Matrix symmetrized(const Matrix& m) { return ((m + m.transpose()) * 0.5).eval(); }

Matrix spd_inverse_dense(const Matrix& m, const char* context) {
    Eigen::LDLT<Matrix> ldlt(m);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 1e-14 * relative_scale(m))
        throw Error(std::string(context) + ": matrix is singular or not positive definite");
    return symmetrized(ldlt.solve(Matrix::Identity(m.rows(), m.cols())));
}

} // namespace

KalmanState kf_predict(const KalmanState& state, const StateSpaceModel& model, Index i,
                       MultCounter* counter) {
    const Matrix& phi = model.transition(i);
    if (state.x.size() != model.state_dim())
        throw DimensionError("kf_predict: state dimension mismatch");
    KalmanState out;
    out.x = phi * state.x;
    out.p = symmetrized(phi * state.p * phi.transpose() + model.q_gamma(i));
    if (counter) counter->add(dense_sym_product_count(model.state_dim()));
    return out;
}

KalmanUpdateResult kf_update(const KalmanState& state, const StateSpaceModel& model, Index i,
                             const Vector& y, MultCounter* counter) {
    if (y.size() != model.meas_dim()) throw DimensionError("kf_update: measurement size");
    const Index n = model.state_dim();

    Matrix p_pred_inv = spd_inverse_dense(state.p, "kf_update: P(i|i-1)");
    Matrix s = p_pred_inv + model.info(i);
    Eigen::LDLT<Matrix> s_ldlt(s);
    if (s_ldlt.info() != Eigen::Success ||
        s_ldlt.vectorD().minCoeff() <= 1e-14 * relative_scale(s))
        throw Error("kf_update: information matrix not invertible");
    Matrix p_filt = symmetrized(s_ldlt.solve(Matrix::Identity(n, n)));
    if (counter) {
        counter->add(dense_spd_inverse_count(n));
        counter->add(dense_spd_inverse_count(n) + static_cast<double>(n) * n);
    }

    // Both gain expressions of the gain identity.
    Matrix k_solve = s_ldlt.solve(model.ht_rinv(i));
    Matrix k_mult = p_filt * model.ht_rinv(i);
    double gain_err = (k_solve - k_mult).norm();
    if (gain_err > 1e-10 * std::max(1.0, k_mult.norm()))
        throw InvariantViolation("kf_update: Kalman gain expressions disagree");

    Vector innovation = y - model.meas_h(i) * state.x;
    KalmanUpdateResult out;
    out.state.x = state.x + k_mult * innovation;
    out.state.p = std::move(p_filt);
    out.innovation = std::move(innovation);
    return out;
}

FilterTrajectory run_kalman_filter(const StateSpaceModel& model,
                                   const std::vector<Vector>& measurements) {
    if (static_cast<Index>(measurements.size()) != model.steps())
        throw DimensionError("run_kalman_filter: need one measurement per step");
    FilterTrajectory traj;
    traj.x0 = model.x0();
    traj.p0 = model.p0();
    MultCounter counter;
    KalmanState state{model.x0(), model.p0()};
    for (Index i = 1; i <= model.steps(); ++i) {
        KalmanState pred = kf_predict(state, model, i - 1, &counter);
        KalmanUpdateResult upd =
            kf_update(pred, model, i, measurements[static_cast<std::size_t>(i - 1)], &counter);
        FilterStep step;
        step.x_pred = pred.x;
        step.p_pred = pred.p;
        step.x_filt = upd.state.x;
        step.p_filt = upd.state.p;
        step.innovation = upd.innovation;
        traj.steps.push_back(std::move(step));
        state = upd.state;
    }
    traj.cov_mults = counter.mults;
    return traj;
}

SmootherTrajectory rts_smooth(const FilterTrajectory& filter, const StateSpaceModel& model) {
    const Index nf = filter.final_time();
    SmootherTrajectory out;
    out.method = "rts";
    out.x_smooth.assign(static_cast<std::size_t>(nf + 1), Vector());
    out.p_smooth.assign(static_cast<std::size_t>(nf + 1), Matrix());
    out.x_smooth[static_cast<std::size_t>(nf)] = filter.x_filt(nf);
    out.p_smooth[static_cast<std::size_t>(nf)] = filter.p_filt(nf);
    for (Index i = nf - 1; i >= 0; --i) {
        const Matrix& p_pred = filter.p_pred(i + 1);
        Matrix p_pred_inv = spd_inverse_dense(p_pred, "rts_smooth: P(i+1|i)");
        Matrix gain = filter.p_filt(i) * model.transition(i).transpose() * p_pred_inv;
        out.x_smooth[static_cast<std::size_t>(i)] =
            filter.x_filt(i) +
            gain * (out.x_smooth[static_cast<std::size_t>(i + 1)] - filter.x_pred(i + 1));
        Matrix dp = out.p_smooth[static_cast<std::size_t>(i + 1)] - p_pred;
        out.p_smooth[static_cast<std::size_t>(i)] =
            symmetrized(filter.p_filt(i) + gain * dp * gain.transpose());
    }
    return out;
}

SmootherTrajectory info_rts_smooth(const FilterTrajectory& filter,
                                   const StateSpaceModel& model) {
    const Index nf = filter.final_time();
    SmootherTrajectory out;
    out.method = "info-rts";
    out.x_smooth.assign(static_cast<std::size_t>(nf + 1), Vector());
    out.p_smooth.assign(static_cast<std::size_t>(nf + 1), Matrix());
    out.fallback.assign(static_cast<std::size_t>(nf + 1), 0);
    out.x_smooth[static_cast<std::size_t>(nf)] = filter.x_filt(nf);
    out.p_smooth[static_cast<std::size_t>(nf)] = filter.p_filt(nf);
    for (Index i = nf - 1; i >= 0; --i) {
        const Matrix& p_pred = filter.p_pred(i + 1);
        Matrix p_pred_inv = spd_inverse_dense(p_pred, "info_rts_smooth: P(i+1|i)");
        const Matrix& p_next = out.p_smooth[static_cast<std::size_t>(i + 1)];

        // State correction shared with the covariance form.
        Matrix gain = filter.p_filt(i) * model.transition(i).transpose() * p_pred_inv;
        out.x_smooth[static_cast<std::size_t>(i)] =
            filter.x_filt(i) +
            gain * (out.x_smooth[static_cast<std::size_t>(i + 1)] - filter.x_pred(i + 1));

        Matrix delta = symmetrized(spd_inverse_dense(p_next, "info_rts_smooth: P(i+1|N)") -
                                   p_pred_inv);
        Eigen::SelfAdjointEigenSolver<Matrix> es(delta);
        double dmax = es.eigenvalues().cwiseAbs().maxCoeff();
        double dmin = es.eigenvalues().cwiseAbs().minCoeff();
        if (dmax <= 0.0 || dmin <= 1e-10 * dmax) {
            // No-update step: the smoothing increment carries no information.
            Matrix dp = p_next - p_pred;
            out.p_smooth[static_cast<std::size_t>(i)] =
                symmetrized(filter.p_filt(i) + gain * dp * gain.transpose());
            out.fallback[static_cast<std::size_t>(i)] = 1;
            continue;
        }
        Matrix delta_inv =
            es.eigenvectors() *
            es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
        Matrix inner = spd_inverse_dense(
            symmetrized(delta_inv + model.q_gamma(i)), "info_rts_smooth: inner");
        Matrix w = spd_inverse_dense(filter.p_filt(i), "info_rts_smooth: P(i|i)") +
                   model.transition(i).transpose() * inner * model.transition(i);
        out.p_smooth[static_cast<std::size_t>(i)] =
            spd_inverse_dense(symmetrized(w), "info_rts_smooth: P(i|N)");
    }
    return out;
}

SmootherTrajectory bf_smooth(const FilterTrajectory& filter, const StateSpaceModel& model) {
    const Index nf = filter.final_time();
    const Index n = model.state_dim();
    SmootherTrajectory out;
    out.method = "bryson-frazier";
    out.x_smooth.assign(static_cast<std::size_t>(nf + 1), Vector());
    out.p_smooth.assign(static_cast<std::size_t>(nf + 1), Matrix());

    std::vector<Vector> lambda(static_cast<std::size_t>(nf + 1), Vector::Zero(n));
    std::vector<Matrix> lambda_mat(static_cast<std::size_t>(nf + 1), Matrix::Zero(n, n));
    for (Index i = nf; i >= 1; --i) {
        const Matrix& p = filter.p_filt(i);
        const Matrix& j = model.info(i);
        Matrix e = Matrix::Identity(n, n) - j * p; // (I - P J)^T
        Vector t = -model.ht_rinv(i) * filter.innovation(i);
        Matrix lm = Matrix::Zero(n, n);
        if (i < nf) {
            const Matrix& phi = model.transition(i);
            t += phi.transpose() * lambda[static_cast<std::size_t>(i)];
            lm = phi.transpose() * lambda_mat[static_cast<std::size_t>(i)] * phi;
        }
        lambda[static_cast<std::size_t>(i - 1)] = e * t;
        lambda_mat[static_cast<std::size_t>(i - 1)] =
            symmetrized(e * lm * e.transpose() + j - j * p * j);
    }

    for (Index i = 0; i <= nf; ++i) {
        if (i == nf) {
            out.x_smooth[static_cast<std::size_t>(i)] = filter.x_filt(i);
            out.p_smooth[static_cast<std::size_t>(i)] = filter.p_filt(i);
            continue;
        }
        const Matrix& p = filter.p_filt(i);
        const Matrix& phi = model.transition(i);
        out.x_smooth[static_cast<std::size_t>(i)] =
            filter.x_filt(i) - p * phi.transpose() * lambda[static_cast<std::size_t>(i)];
        out.p_smooth[static_cast<std::size_t>(i)] = symmetrized(
            p - p * phi.transpose() * lambda_mat[static_cast<std::size_t>(i)] * phi * p);
    }
    return out;
}

SmootherTrajectory fixed_lag_smooth(const FilterTrajectory& filter,
                                    const StateSpaceModel& model, Index lag) {
    const Index nf = filter.final_time();
    if (lag < 0 || lag > nf) throw Error("fixed_lag_smooth: lag out of range");
    const Index n = model.state_dim();
    SmootherTrajectory out;
    out.method = "fixed-lag";
    out.lag = lag;
    out.x_smooth.assign(static_cast<std::size_t>(nf + 1), Vector());
    out.p_smooth.assign(static_cast<std::size_t>(nf + 1), Matrix());

    auto info_at = [&](Index t) -> Matrix {
        return t == 0 ? Matrix::Zero(n, n) : Matrix(model.info(t));
    };

    for (Index i = 0; i <= nf; ++i) {
        const Index depth = std::min(lag, nf - i);
        Vector e_sum = Vector::Zero(n);
        for (Index l = 1; l <= depth; ++l) {
            const Index tip = i + l;
            Vector e = model.ht_rinv(tip) * filter.innovation(tip);
            e -= model.info(tip) * (filter.p_filt(tip) * e);
            for (Index j = 1; j <= l; ++j) {
                const Index t = tip - j;
                Vector v = model.transition(t).transpose() * e;
                if (t > 0) v -= model.info(t) * (filter.p_filt(t) * v);
                e = std::move(v);
            }
            e_sum += e;
        }
        out.x_smooth[static_cast<std::size_t>(i)] = filter.x_filt(i) + filter.p_pred(i) * e_sum;

        Matrix p = filter.p_filt(i);
        Matrix chain = filter.p_pred(i); // P^(l) chains, extended one factor per lag
        for (Index l = 1; l <= depth; ++l) {
            const Index t = i + l - 1;
            Matrix factor =
                (Matrix::Identity(n, n) - info_at(t) * filter.p_filt(t)) *
                model.transition(t).transpose();
            chain = chain * factor;
            const Matrix& jt = model.info(i + l);
            Matrix mid = jt - jt * filter.p_filt(i + l) * jt;
            p -= chain * mid * chain.transpose();
        }
        out.p_smooth[static_cast<std::size_t>(i)] = symmetrized(p);
    }
    return out;
}

} // namespace nbdkal
