#pragma once

#include <vector>

#include "nbdkal/block_structure.hpp"

namespace nbdkal {

/// First order perturbative eigendecomposition of S = S0 + eps S1 with
/// block diagonal S0:
///   lambda_k = lambda_k^(0) + eps e_k^(0)T S1 e_k^(0)
///   e_k      = e_k^(0) - eps (S0 - lambda_k^(0) I)^+ (S1 - lambda_k^(1) I) e_k^(0)
/// The Moore-Penrose pseudoinverse drops directions whose eigenvalue gap is
/// below pinv_tolerance (relative, recorded here). Indices whose zeroth
/// order eigenvalue is nearly degenerate with another are flagged; the
/// nondegenerate first order theory does not resolve those corrections.
struct EigenPerturbation {
    Vector lambda0;
    Vector lambda1;
    Matrix vectors0; // orthonormal columns e_k^(0)
    Matrix vectors1; // correction columns c_k, e_k ~ e_k^(0) + eps c_k
    std::vector<Index> degenerate;
    double pinv_tolerance = 1e-8;

    Vector eigenvalues(double eps) const { return lambda0 + eps * lambda1; }
};

EigenPerturbation perturb_eigen(const BlockStructure& s, const std::vector<Matrix>& s0_blocks,
                                const Matrix& s1, double eps);

/// Assembles sum_k (lambda_k^(0) + eps lambda_k^(1)) (e_k^(0) + eps e_k^(1)) (...)^T.
Matrix spectral_first_order(const EigenPerturbation& ep, double eps);
Matrix spectral_first_order(const BlockStructure& s, const std::vector<Matrix>& s0_blocks,
                            const Matrix& s1, double eps);

} // namespace nbdkal
