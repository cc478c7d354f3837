#pragma once

#include "nbdkal/nbd_matrix.hpp"

namespace nbdkal {

/// Closed-form scalar-multiplication counts for the first order block
/// operations, and the storage formulas for N.B.D. matrices.
///
/// The blockwise forms below are the per-block sums the operation counting
/// is derived from; instrumented counters reproduce them exactly on any
/// block structure (couplings must be off-block only, i.e. the first order
/// diagonal blocks absorbed into P^(0), which is the convention the counts
/// assume). The moment forms in terms of N, N_2, N_3 are listed separately:
/// for the first order multiply the moment form is exact for every
/// structure, while for the symmetric product and the inverse update it
/// relies on the symmetric half-stage costing exactly half of the full
/// stage, which holds when all blocks are equal.

/// R = PQ to first order: sum n_k^3 for R^(0), plus the R^(1) stages.
/// General: sum n_k^3 + 2 sum_k n_k^2 (N - n_k).
/// Nearest-neighbor: sum n_k^3 + 2 sum_k n_k^2 (n_{k+1} + n_{k-1}).
double mul_first_order_count(const BlockStructure& s,
                             BandProfile profile = BandProfile::General);
/// Moment form 2 N N_2^2 / N_b - N_3^3 / N_b^2 (exact for all structures).
double mul_first_order_count_moments(const BlockStructure& s);
/// Equal-block nearest-neighbor total 5 N^3/N_b^2 - 4 N^3/N_b^3.
double mul_first_order_count_nearest_equal(const BlockStructure& s);

/// S = R Q R^T to first order, Q symmetric. Blockwise sum of three stages
/// (band-restricted sums for nearest-neighbor structure):
///   A_k = R^(0)_k Q^(0)_k, S^(0)_k lower half, C = A R^(1)T:
///       sum_k [ 3/2 n_k^3 + 1/2 n_k^2 + sum_{l != k} n_k^2 n_l ]
///   B = Q^(1) R^(0)T (full):   sum_{k != l} n_k n_l^2
///   R^(0) B, lower blocks:     sum_{k > l} n_k^2 n_l
double sym_product_count(const BlockStructure& s, BandProfile profile = BandProfile::General);
/// Moment form (5N+1) N_2^2 / (2 N_b) - N_3^3 / N_b^2 (equal blocks).
double sym_product_count_moments(const BlockStructure& s);
/// Nearest-neighbor form 1/2 sum n_k^2 (3 n_k + 1 + 5(n_{k-1} + n_{k+1}))
/// (equal blocks; blockwise form is exact in general).
double sym_product_count_nearest(const BlockStructure& s);

/// P with P^{-1} = M^{-1} + J, first order part via Eq-(A1)-style sandwiches.
/// Blockwise: sum n_k^3 + 2 [sum_{l != k} n_k n_l^2 + sum_{k > l} n_k^2 n_l].
double inverse_update_count(const BlockStructure& s);
/// sum n_k^2 (3N - 2 n_k) (equal blocks; see header comment).
double inverse_update_count_moments(const BlockStructure& s);

/// L D^{-1} L^T factorization: 1/2 sum n_k^3 to form P^(0)-inverse.
double ld_factor_count(const BlockStructure& s);

/// Recovering the SPD zeroth order matrix from its stored inverse:
/// sum n_k^3/2 + n_k^2.
double block_recover_count(const BlockStructure& s);

/// Dense symmetric product R Q R^T for an ordinary N x N matrix:
/// 3/2 N^3 + 1/2 N^2. Used when instrumenting the dense reference filter.
double dense_sym_product_count(Index n);
/// Dense SPD inverse under the same convention: N^3 / 2.
double dense_spd_inverse_count(Index n);

/// Where the first order block-diagonal terms live for storage purposes.
/// Absorbed: diagonal blocks of P^(1) folded into P^(0) (the convention the
/// storage formulas assume). Split: P^(0) and the P^(1) diagonal blocks are
/// stored separately.
enum class FirstOrderDiagonal { Absorbed, Split };

/// Storage requirement in scalars.
/// General: N^2 (N(N+1)/2 symmetric). Nearest-neighbor:
/// sum n_k^2 + 2 n_k n_{k+1} (arbitrary), sum n_k(n_k+1)/2 + n_k n_{k+1}
/// (symmetric), with n_{N_b+1} = 0. Split adds the separate first order
/// diagonal blocks.
long storage_count(const BlockStructure& s, BandProfile profile, bool symmetric,
                   FirstOrderDiagonal convention = FirstOrderDiagonal::Absorbed);

} // namespace nbdkal
