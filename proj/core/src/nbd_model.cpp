#include "nbdkal/nbd_model.hpp"

#include <Eigen/LU>

namespace nbdkal {

namespace {

std::vector<Matrix> split_diag(const BlockStructure& s, const Matrix& m) {
    return s.extract_diagonal_blocks(m);
}

Matrix split_coupling(const BlockStructure& s, const Matrix& m, double eps,
                      const char* what) {
    Matrix off = s.off_block_part(m);
    if (eps > 0.0) return off / eps;
    if (off.norm() > 1e-12 * relative_scale(m))
        throw Error(std::string("NbdModel: eps = 0 but ") + what +
                    " has off-block coupling");
    return Matrix::Zero(s.dim(), s.dim());
}

} // namespace

NbdModel::NbdModel(BlockStructure structure, double eps, StateSpaceModel dense,
                   std::vector<std::vector<Matrix>> lambda, std::vector<Matrix> phi1,
                   std::vector<std::vector<Matrix>> qg0, std::vector<Matrix> qg1,
                   std::vector<std::vector<Matrix>> j0, std::vector<Matrix> j1, NbdMatrix p00)
    : structure_(std::move(structure)),
      eps_(eps),
      dense_(std::move(dense)),
      lambda_(std::move(lambda)),
      phi1_(std::move(phi1)),
      qg0_(std::move(qg0)),
      qg1_(std::move(qg1)),
      j0_(std::move(j0)),
      j1_(std::move(j1)),
      p00_(std::move(p00)) {
    if (dense_.state_dim() != structure_.dim())
        throw DimensionError("NbdModel: state dimension does not match block structure");
    validate();
}

NbdModel NbdModel::from_dense(BlockStructure structure, double eps, StateSpaceModel dense) {
    const BlockStructure& s = structure;
    auto split_seq_diag = [&](auto getter, std::size_t len) {
        std::vector<std::vector<Matrix>> out;
        out.reserve(len);
        for (std::size_t i = 0; i < len; ++i)
            out.push_back(split_diag(s, getter(static_cast<Index>(i))));
        return out;
    };
    std::size_t phi_len = dense.phi_seq().size();
    std::size_t qg_len = std::max(dense.gamma_seq().size(), dense.q_seq().size()) > 1
                             ? static_cast<std::size_t>(dense.steps())
                             : 1;
    std::size_t j_len = std::max(dense.h_seq().size(), dense.r_seq().size()) > 1
                            ? static_cast<std::size_t>(dense.steps())
                            : 1;

    std::vector<std::vector<Matrix>> lambda =
        split_seq_diag([&](Index i) { return dense.transition(i); }, phi_len);
    std::vector<Matrix> phi1;
    for (std::size_t i = 0; i < phi_len; ++i)
        phi1.push_back(split_coupling(s, dense.transition(static_cast<Index>(i)), eps, "phi"));

    std::vector<std::vector<Matrix>> qg0 =
        split_seq_diag([&](Index i) { return dense.q_gamma(i); }, qg_len);
    std::vector<Matrix> qg1;
    for (std::size_t i = 0; i < qg_len; ++i)
        qg1.push_back(
            split_coupling(s, dense.q_gamma(static_cast<Index>(i)), eps, "Gamma Q Gamma^T"));

    std::vector<std::vector<Matrix>> j0 =
        split_seq_diag([&](Index i) { return dense.info(i + 1); }, j_len);
    std::vector<Matrix> j1;
    for (std::size_t i = 0; i < j_len; ++i)
        j1.push_back(split_coupling(s, dense.info(static_cast<Index>(i) + 1), eps, "J"));

    NbdMatrix p00 = NbdMatrix::split_dense(s, dense.p0(), eps, true);
    return NbdModel(std::move(structure), eps, std::move(dense), std::move(lambda),
                    std::move(phi1), std::move(qg0), std::move(qg1), std::move(j0),
                    std::move(j1), std::move(p00));
}

NbdMatrix NbdModel::qg_nbd(Index i) const {
    return NbdMatrix(structure_, eps_, qg0(i), qg1(i), std::nullopt, true);
}

NbdMatrix NbdModel::j_nbd(Index i) const {
    return NbdMatrix(structure_, eps_, j0(i), j1(i), std::nullopt, true);
}

NbdMatrix NbdModel::phi_t_nbd(Index i) const {
    std::vector<Matrix> blocks;
    blocks.reserve(lambda(i).size());
    for (const Matrix& b : lambda(i)) blocks.push_back(b.transpose());
    return NbdMatrix(structure_, eps_, std::move(blocks), phi1(i).transpose());
}

void NbdModel::validate() const {
    const double tol = 1e-10;
    auto check_split = [&](const Matrix& dense_m, const std::vector<Matrix>& zeroth,
                           const Matrix& coupling, const char* what) {
        Matrix rebuilt = structure_.assemble_block_diagonal(zeroth) + eps_ * coupling;
        if ((rebuilt - dense_m).norm() > tol * relative_scale(dense_m))
            throw Error(std::string("NbdModel: ") + what +
                        " split does not reproduce the dense model");
    };

    for (Index i = 0; i < dense_.steps(); ++i) {
        check_split(dense_.transition(i), lambda(i), phi1(i), "phi");
        check_split(dense_.q_gamma(i), qg0(i), qg1(i), "Gamma Q Gamma^T");
        check_split(dense_.info(i + 1), j0(i + 1), j1(i + 1), "J");
        // coupling first order diagonal blocks stay zero
        for (Index k = 0; k < structure_.block_count(); ++k) {
            if (!structure_.block(phi1(i), k, k).isZero(0.0))
                throw Error("NbdModel: phi1 must have zero diagonal blocks");
            if (!structure_.block(qg1(i), k, k).isZero(0.0))
                throw Error("NbdModel: qg1 must have zero diagonal blocks");
            if (!structure_.block(j1(i + 1), k, k).isZero(0.0))
                throw Error("NbdModel: j1 must have zero diagonal blocks");
        }
        for (Index k = 0; k < structure_.block_count(); ++k) {
            const Matrix& lam = lambda(i)[static_cast<std::size_t>(k)];
            Eigen::FullPivLU<Matrix> lu(lam);
            if (!lu.isInvertible())
                throw Error("NbdModel: Lambda block " + std::to_string(k) +
                            " is singular at step " + std::to_string(i));
            // normality of the leading order transition
            Matrix comm = lam.transpose() * lam - lam * lam.transpose();
            if (comm.norm() > tol * std::max(1.0, lam.squaredNorm()))
                throw Error("NbdModel: Lambda block " + std::to_string(k) +
                            " is not normal at step " + std::to_string(i));
        }
        if (lambda_.size() == 1 && phi1_.size() == 1 && qg0_.size() == 1 && qg1_.size() == 1 &&
            j0_.size() == 1 && j1_.size() == 1)
            break; // time invariant: one pass suffices
    }

    if ((p00_.densify() - dense_.p0()).norm() > tol * relative_scale(dense_.p0()))
        throw Error("NbdModel: initial covariance split mismatch");
    if (p00_.eps() != eps_) throw Error("NbdModel: initial covariance eps mismatch");
}

} // namespace nbdkal
