#pragma once

#include "nbdkal/nbd_matrix.hpp"

namespace nbdkal {

/// Symmetric-factorization positive-definiteness test: fails when any pivot
/// is <= rel_tol * ||block||_F. Returns the block inverse on success.
/// Charges nothing to any counter; callers charge per their own convention.
Matrix spd_block_inverse(const Matrix& block, Index block_index, const char* context,
                         double rel_tol = 1e-12);
void require_spd_block(const Matrix& block, Index block_index, const char* context,
                       double rel_tol = 1e-12);

/// R = P Q to first order: R^(0) = P^(0) Q^(0),
/// R^(1) = P^(0) Q^(1) + P^(1) Q^(0). Structurally zero blocks are skipped
/// and not counted. Nearest-neighbor inputs yield a nearest-neighbor result.
NbdMatrix mul_first_order(const NbdMatrix& p, const NbdMatrix& q, MultCounter& counter);

/// S = R Q R^T to first order, Q symmetric:
/// S^(0) = R^(0) Q^(0) R^(0)T,
/// S^(1) = R^(0) Q^(1) R^(0)T + R^(1) Q^(0) R^(0)T + R^(0) Q^(0) R^(1)T.
NbdMatrix sym_product_first_order(const NbdMatrix& r, const NbdMatrix& q,
                                  MultCounter& counter);

/// First order inverse as a plain decomposition:
/// (P^(0))^{-1} - eps (P^(0))^{-1} P^(1) (P^(0))^{-1}. Used where the
/// covariance algebra consumes an inverse order by order; the stabilized
/// factored inverse lives in stabilize.hpp.
NbdMatrix inverse_nbd_first_order(const NbdMatrix& p, MultCounter& counter);

struct InverseUpdateResult {
    NbdMatrix value;
    bool used_conditioned_form = false; // the small-J variant was selected
    double mults_zeroth = 0.0;          // block inversions and recoveries
    double mults_first = 0.0;           // the first order sandwich stages
};

/// P defined by P^{-1} = M^{-1} + J. P^(0) is computed exactly per block;
/// P^(1) through the sandwich
///     P^(1) = P^(0) M^(0)-1 M^(1) M^(0)-1 P^(0) - P^(0) J^(1) P^(0),
/// rewritten as [I - P^(0)J^(0)] M^(1) [I - J^(0)P^(0)] - P^(0) J^(1) P^(0)
/// when ||J^(0)||_2 < 0.1 ||M^(0)-1||_2 (the better conditioned route for
/// small incremental information; both agree in exact arithmetic).
InverseUpdateResult inverse_update(const NbdMatrix& m, const NbdMatrix& j,
                                   MultCounter& counter);

} // namespace nbdkal
