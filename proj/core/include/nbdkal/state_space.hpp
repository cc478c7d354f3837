#pragma once

#include <vector>

#include "nbdkal/types.hpp"

namespace nbdkal {

/// Discrete linear state space model
///   x_{i+1} = Phi(i+1,i) x_i + Gamma_i w_i,   w_i ~ N(0, Q_i)
///   y_i     = H_i x_i + v_i,                  v_i ~ N(0, R_i)
/// with x(0|0) estimate and P(0|0) given. Sequences hold either one entry
/// (time invariant, broadcast over steps) or one entry per step.
/// Measurements arrive at times 1..steps; transition(i) maps time i to i+1.
class StateSpaceModel {
public:
    StateSpaceModel(Index steps, std::vector<Matrix> phi, std::vector<Matrix> gamma,
                    std::vector<Matrix> q, std::vector<Matrix> h, std::vector<Matrix> rcov,
                    Vector x0, Matrix p0);

    Index state_dim() const { return state_dim_; }
    Index meas_dim() const { return meas_dim_; }
    Index noise_dim() const { return noise_dim_; }
    Index steps() const { return steps_; }

    /// Phi(i+1, i) for i in [0, steps).
    const Matrix& transition(Index i) const { return at(phi_, i); }
    /// Gamma_i, Q_i for i in [0, steps).
    const Matrix& gamma(Index i) const { return at(gamma_, i); }
    const Matrix& q(Index i) const { return at(q_, i); }
    /// Gamma_i Q_i Gamma_i^T.
    const Matrix& q_gamma(Index i) const { return at(q_gamma_, i); }
    /// H_i, R_i for measurement times i in [1, steps].
    const Matrix& meas_h(Index i) const { return at(h_, i - 1); }
    const Matrix& meas_r(Index i) const { return at(rcov_, i - 1); }
    /// J_i = H_i^T R_i^{-1} H_i.
    const Matrix& info(Index i) const { return at(j_, i - 1); }
    /// H_i^T R_i^{-1}.
    const Matrix& ht_rinv(Index i) const { return at(ht_rinv_, i - 1); }

    const Vector& x0() const { return x0_; }
    const Matrix& p0() const { return p0_; }

    const std::vector<Matrix>& phi_seq() const { return phi_; }
    const std::vector<Matrix>& gamma_seq() const { return gamma_; }
    const std::vector<Matrix>& q_seq() const { return q_; }
    const std::vector<Matrix>& h_seq() const { return h_; }
    const std::vector<Matrix>& r_seq() const { return rcov_; }

private:
    static const Matrix& at(const std::vector<Matrix>& seq, Index i) {
        return seq.size() == 1 ? seq.front() : seq.at(static_cast<std::size_t>(i));
    }
    void validate() const;

    Index steps_;
    Index state_dim_ = 0, meas_dim_ = 0, noise_dim_ = 0;
    std::vector<Matrix> phi_, gamma_, q_, h_, rcov_;
    std::vector<Matrix> q_gamma_, j_, ht_rinv_; // derived, same broadcast shape
    Vector x0_;
    Matrix p0_;
};

/// Forward filter output. Index 0 holds the initial state; steps 1..N_f hold
/// predicted and filtered quantities plus the innovation driving the update.
struct FilterStep {
    Vector x_pred, x_filt;
    Matrix p_pred, p_filt;
    Vector innovation;
};

struct FilterTrajectory {
    Vector x0;
    Matrix p0;
    std::vector<FilterStep> steps;
    double cov_mults = 0; // dense covariance-path multiplies (see counts.hpp)

    Index final_time() const { return static_cast<Index>(steps.size()); }
    const Vector& x_filt(Index i) const { return i == 0 ? x0 : step(i).x_filt; }
    const Matrix& p_filt(Index i) const { return i == 0 ? p0 : step(i).p_filt; }
    const Vector& x_pred(Index i) const { return i == 0 ? x0 : step(i).x_pred; }
    /// p_pred(0) is the prior P(0|0): there is no measurement at time 0.
    const Matrix& p_pred(Index i) const { return i == 0 ? p0 : step(i).p_pred; }
    const Vector& innovation(Index i) const { return step(i).innovation; }
    const FilterStep& step(Index i) const { return steps.at(static_cast<std::size_t>(i - 1)); }
};

/// Fixed interval / fixed lag smoother output over times 0..N_f.
struct SmootherTrajectory {
    std::vector<Vector> x_smooth;
    std::vector<Matrix> p_smooth;
    std::string method;
    Index lag = -1;                     // fixed-lag only
    std::vector<std::uint8_t> fallback; // info form: steps where Eq-(4.2) path was used
};

} // namespace nbdkal
