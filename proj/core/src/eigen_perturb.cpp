#include "nbdkal/eigen_perturb.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace nbdkal {

EigenPerturbation perturb_eigen(const BlockStructure& s, const std::vector<Matrix>& s0_blocks,
                                const Matrix& s1, double eps) {
    (void)eps; // corrections are per unit eps; eps enters at assembly time
    if (static_cast<Index>(s0_blocks.size()) != s.block_count())
        throw DimensionError("perturb_eigen: wrong number of S0 blocks");
    s.require_conformable(s1, "perturb_eigen S1");
    const Index n = s.dim();

    EigenPerturbation out;
    out.lambda0.resize(n);
    out.vectors0 = Matrix::Zero(n, n);
    for (Index k = 0; k < s.block_count(); ++k) {
        const Matrix& blk = s0_blocks[static_cast<std::size_t>(k)];
        if (blk.rows() != s.size(k) || blk.cols() != s.size(k))
            throw DimensionError("perturb_eigen: S0 block " + std::to_string(k) +
                                 " has wrong shape");
        Eigen::SelfAdjointEigenSolver<Matrix> es(blk);
        if (es.info() != Eigen::Success) throw Error("perturb_eigen: eigensolver failed");
        out.lambda0.segment(s.offset(k), s.size(k)) = es.eigenvalues();
        out.vectors0.block(s.offset(k), s.offset(k), s.size(k), s.size(k)) = es.eigenvectors();
    }

    // lambda1_k = e_k^T S1 e_k; projections through the zeroth order basis.
    Matrix s1ev = s1 * out.vectors0;          // S1 e_j columns
    Matrix proj = out.vectors0.transpose() * s1ev; // proj(j,k) = e_j^T S1 e_k
    out.lambda1 = proj.diagonal();

    out.vectors1 = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        double gap_max = 0.0;
        for (Index j = 0; j < n; ++j)
            gap_max = std::max(gap_max, std::abs(out.lambda0(j) - out.lambda0(k)));
        const double tol = out.pinv_tolerance * gap_max;
        bool flagged = false;
        Vector c = Vector::Zero(n);
        for (Index j = 0; j < n; ++j) {
            if (j == k) continue;
            double gap = out.lambda0(j) - out.lambda0(k);
            if (std::abs(gap) <= tol) {
                flagged = true;
                continue; // pseudoinverse drops this direction
            }
            c -= out.vectors0.col(j) * (proj(j, k) / gap);
        }
        out.vectors1.col(k) = c;
        if (flagged) out.degenerate.push_back(k);
    }
    return out;
}

Matrix spectral_first_order(const EigenPerturbation& ep, double eps) {
    Matrix vecs = ep.vectors0 + eps * ep.vectors1;
    Vector lam = ep.lambda0 + eps * ep.lambda1;
    Matrix out = vecs * lam.asDiagonal() * vecs.transpose();
    return ((out + out.transpose()) * 0.5).eval();
}

Matrix spectral_first_order(const BlockStructure& s, const std::vector<Matrix>& s0_blocks,
                            const Matrix& s1, double eps) {
    return spectral_first_order(perturb_eigen(s, s0_blocks, s1, eps), eps);
}

} // namespace nbdkal
