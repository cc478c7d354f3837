#include "nbdkal/state_space.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace nbdkal {

StateSpaceModel::StateSpaceModel(Index steps, std::vector<Matrix> phi,
                                 std::vector<Matrix> gamma, std::vector<Matrix> q,
                                 std::vector<Matrix> h, std::vector<Matrix> rcov, Vector x0,
                                 Matrix p0)
    : steps_(steps),
      phi_(std::move(phi)),
      gamma_(std::move(gamma)),
      q_(std::move(q)),
      h_(std::move(h)),
      rcov_(std::move(rcov)),
      x0_(std::move(x0)),
      p0_(std::move(p0)) {
    if (phi_.empty() || gamma_.empty() || q_.empty() || h_.empty() || rcov_.empty())
        throw DimensionError("StateSpaceModel: all sequences must be nonempty");
    state_dim_ = phi_.front().rows();
    noise_dim_ = gamma_.front().cols();
    meas_dim_ = h_.front().rows();
    validate();

    auto out_len = [&](const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
        return (a.size() == 1 && b.size() == 1) ? std::size_t{1}
                                                : static_cast<std::size_t>(steps_);
    };
    // Gamma Q Gamma^T
    q_gamma_.resize(out_len(gamma_, q_));
    for (std::size_t i = 0; i < q_gamma_.size(); ++i) {
        const Matrix& g = at(gamma_, static_cast<Index>(i));
        const Matrix& qq = at(q_, static_cast<Index>(i));
        Matrix qg = g * qq * g.transpose();
        q_gamma_[i] = ((qg + qg.transpose()) * 0.5).eval();
    }
    // H^T R^-1 and J = H^T R^-1 H
    ht_rinv_.resize(out_len(h_, rcov_));
    j_.resize(ht_rinv_.size());
    for (std::size_t i = 0; i < ht_rinv_.size(); ++i) {
        const Matrix& hh = at(h_, static_cast<Index>(i));
        const Matrix& rr = at(rcov_, static_cast<Index>(i));
        Eigen::LLT<Matrix> llt(rr);
        if (llt.info() != Eigen::Success)
            throw Error("StateSpaceModel: R is not positive definite at step " +
                        std::to_string(i + 1));
        ht_rinv_[i] = llt.solve(hh).transpose();
        Matrix j = ht_rinv_[i] * hh;
        j_[i] = ((j + j.transpose()) * 0.5).eval();
    }
}

void StateSpaceModel::validate() const {
    auto check_len = [&](const std::vector<Matrix>& seq, const char* name) {
        if (seq.size() != 1 && static_cast<Index>(seq.size()) != steps_)
            throw DimensionError(std::string("StateSpaceModel: ") + name +
                                 " must have length 1 (broadcast) or steps");
    };
    check_len(phi_, "phi");
    check_len(gamma_, "gamma");
    check_len(q_, "q");
    check_len(h_, "h");
    check_len(rcov_, "r");

    for (const Matrix& m : phi_) {
        if (m.rows() != state_dim_ || m.cols() != state_dim_)
            throw DimensionError("StateSpaceModel: phi shape");
        Eigen::FullPivLU<Matrix> lu(m);
        if (!lu.isInvertible()) throw Error("StateSpaceModel: singular transition matrix");
    }
    for (const Matrix& m : gamma_)
        if (m.rows() != state_dim_ || m.cols() != noise_dim_)
            throw DimensionError("StateSpaceModel: gamma shape");
    for (const Matrix& m : q_) {
        if (m.rows() != noise_dim_ || m.cols() != noise_dim_)
            throw DimensionError("StateSpaceModel: q shape");
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        if (es.eigenvalues().minCoeff() < -1e-10 * relative_scale(m))
            throw Error("StateSpaceModel: Q must be positive semidefinite");
    }
    for (const Matrix& m : h_)
        if (m.rows() != meas_dim_ || m.cols() != state_dim_)
            throw DimensionError("StateSpaceModel: h shape");
    for (const Matrix& m : rcov_)
        if (m.rows() != meas_dim_ || m.cols() != meas_dim_)
            throw DimensionError("StateSpaceModel: r shape");
    if (x0_.size() != state_dim_) throw DimensionError("StateSpaceModel: x0 size");
    if (p0_.rows() != state_dim_ || p0_.cols() != state_dim_)
        throw DimensionError("StateSpaceModel: p0 shape");
    Eigen::SelfAdjointEigenSolver<Matrix> es(p0_);
    if (es.eigenvalues().minCoeff() < -1e-10 * relative_scale(p0_))
        throw Error("StateSpaceModel: P(0|0) must be positive semidefinite");
}

} // namespace nbdkal
