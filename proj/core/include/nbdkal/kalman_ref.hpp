#pragma once

#include "nbdkal/state_space.hpp"

namespace nbdkal {

/// Exact dense Kalman filter and the four smoother formulations. This is
/// the correctness oracle the N.B.D. approximations are measured against.

struct KalmanState {
    Vector x;
    Matrix p;
};

/// Time evolution update: x(i+1|i) = Phi x(i|i),
/// P(i+1|i) = Phi P(i|i) Phi^T + Gamma Q Gamma^T. Output symmetrized.
KalmanState kf_predict(const KalmanState& state, const StateSpaceModel& model, Index i,
                       MultCounter* counter = nullptr);

struct KalmanUpdateResult {
    KalmanState state;
    Vector innovation;
};

/// Measurement update in information form:
/// P(i|i) = (P(i|i-1)^{-1} + J_i)^{-1}, K_i = P(i|i) H^T R^{-1}.
/// Both gain expressions of the gain identity are evaluated and must agree
/// to 1e-10 relative (throws InvariantViolation otherwise).
KalmanUpdateResult kf_update(const KalmanState& state, const StateSpaceModel& model, Index i,
                             const Vector& y, MultCounter* counter = nullptr);

FilterTrajectory run_kalman_filter(const StateSpaceModel& model,
                                   const std::vector<Vector>& measurements);

/// Rauch-Tung-Striebel backward pass.
SmootherTrajectory rts_smooth(const FilterTrajectory& filter, const StateSpaceModel& model);

/// Information form of the R.T.S. covariance recursion. Steps where the
/// inner inverse is singular (no smoothing information) fall back to the
/// covariance-form correction and are flagged.
SmootherTrajectory info_rts_smooth(const FilterTrajectory& filter,
                                   const StateSpaceModel& model);

/// Bryson-Frazier adjoint formulation; requires no inversion of Phi.
SmootherTrajectory bf_smooth(const FilterTrajectory& filter, const StateSpaceModel& model);

/// Fixed lag smoother: x(i|i+n), P(i|i+n) for lag n (sums truncate at the
/// final measurement time, so lag N_f - i reproduces the fixed interval
/// smoother at step i).
SmootherTrajectory fixed_lag_smooth(const FilterTrajectory& filter,
                                    const StateSpaceModel& model, Index lag);

} // namespace nbdkal
