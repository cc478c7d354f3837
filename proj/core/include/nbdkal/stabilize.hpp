#pragma once

#include "nbdkal/nbd_matrix.hpp"

namespace nbdkal {

/// L D^{-1} L^T representation of a stabilized covariance T[P].
/// D = P^(0) (positive definite per block), L is block lower triangular:
///   order 1 (T1): L = P^(0) + eps P_L^(1)
///   order 2 (T2): L = P^(0) + eps P_L^(1) + eps^2 (P_L^(2) - G_L^(2))
///   order 2 (Tb): L = P^(0) + eps P_L^(1) + eps^2 P_L^(2)
/// with G^(2) = P_L^(1) P^(0)-1 P_L^(1)T. The dense value is PSD by
/// construction; it is evaluated only on demand and never propagated.
class StabilizedFactor {
public:
    StabilizedFactor(BlockStructure structure, double eps, int order, std::vector<Matrix> d,
                     std::vector<Matrix> d_inv, Matrix l, double build_mults);

    const BlockStructure& structure() const { return structure_; }
    double eps() const { return eps_; }
    int order() const { return order_; }
    const std::vector<Matrix>& d() const { return d_; }
    const std::vector<Matrix>& d_inv() const { return d_inv_; }
    const Matrix& l() const { return l_; }
    double build_mults() const { return build_mults_; }

    /// L D^{-1} L^T, densified exactly.
    Matrix value() const;
    /// L D^{-1} L^T v without densification.
    Vector apply(const Vector& v) const;
    /// Exact inverse (L^{-T} D L^{-1}) of the stabilized value.
    Matrix value_inverse() const;

    /// Re-decomposition used for the T[T[P]] = T[P] identity: p0 = D,
    /// p1 = (C + C^T)/eps with C = L - D, p2 = (value - D - eps p1)/eps^2.
    /// For T1 this is the (P_L^(1) + P_L^(1)T, residual at second order)
    /// convention; stated this way it makes T2 idempotent as well.
    NbdMatrix redecompose() const;

    /// Checks D D^{-1} = I per block to rel_tol.
    void validate(double rel_tol = 1e-12) const;

private:
    BlockStructure structure_;
    double eps_;
    int order_;
    std::vector<Matrix> d_;
    std::vector<Matrix> d_inv_;
    Matrix l_;
    double build_mults_;
};

/// D^{-1} L' D^{-1} L'^T D^{-1} representation of the stabilized approximate
/// inverse Inv[P], with L' = P^(0) - eps P_L^(1).
class InverseFactor {
public:
    InverseFactor(BlockStructure structure, double eps, int order, std::vector<Matrix> d,
                  std::vector<Matrix> d_inv, Matrix l_prime, double build_mults);

    const BlockStructure& structure() const { return structure_; }
    double eps() const { return eps_; }
    int order() const { return order_; }
    const std::vector<Matrix>& d() const { return d_; }
    const std::vector<Matrix>& d_inv() const { return d_inv_; }
    const Matrix& l_prime() const { return l_prime_; }
    double build_mults() const { return build_mults_; }

    Matrix value() const;
    Vector apply(const Vector& v) const;

private:
    BlockStructure structure_;
    double eps_;
    int order_;
    std::vector<Matrix> d_;
    std::vector<Matrix> d_inv_;
    Matrix l_prime_;
    double build_mults_;
};

/// First order stabilization (Eq. T1). Requires symmetric P with per-block
/// positive definite P^(0). Charges 1/2 sum n_k^3 for the block inversions.
StabilizedFactor t1_stabilize(const NbdMatrix& p, MultCounter& counter);
/// Second order stabilization (T2). Requires p2 (possibly zero).
StabilizedFactor t2_stabilize(const NbdMatrix& p, MultCounter& counter);
/// Second order upper bound (Tb): value - truncation is PSD exactly.
StabilizedFactor tb_stabilize(const NbdMatrix& p, MultCounter& counter);

/// Stabilized factored approximate inverse Inv[P] = T[P^(eps)-1].
InverseFactor inv_first_order(const NbdMatrix& p, MultCounter& counter);

/// Inv applied to an already stabilized factor: L' = 2D - L. No storage
/// growth, no multiplications. Applying to_inverse twice returns the
/// original factor (Inv is an involution at the representation level).
InverseFactor to_inverse(const StabilizedFactor& f);
StabilizedFactor from_inverse(const InverseFactor& f);

enum class SpectralMode { Exact, FirstOrder };

/// Eigenvalue clipping. Exact mode decomposes the dense truncation, zeroes
/// negative eigenvalues and reassembles (the nearest PSD matrix in Frobenius
/// norm). First order mode assembles the perturbative decomposition and
/// clip-tests only eigenpairs with lambda_k^(0) below the screening
/// threshold 4 eps ||P^(1)||_F.
Matrix spectral_stabilize(const NbdMatrix& p, SpectralMode mode);

} // namespace nbdkal
