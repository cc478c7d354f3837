#pragma once

#include <optional>
#include <vector>

#include "nbdkal/block_structure.hpp"

namespace nbdkal {

/// Sparsity class of the coupling orders.
///   general:                  no structure in P^(1), P^(2)
///   nearest-neighbor:         P^(1) nonzero only on blocks (k,k), (k,k+-1)
///   strongly nearest-neighbor: additionally P^(2) nonzero only on
///                             (k,k), (k,k+-1), (k,k+-2)
enum class BandProfile { General, NearestNeighbor, StronglyNearestNeighbor };

/// Order-tagged decomposition P^(0) + eps P^(1) [+ eps^2 P^(2)] over a fixed
/// block structure. P^(0) is stored as dense diagonal blocks; the coupling
/// orders as full matrices. Structurally zero blocks are flagged at
/// construction so block algebra can skip them (and not count them).
class NbdMatrix {
public:
    NbdMatrix(BlockStructure structure, double eps, std::vector<Matrix> p0, Matrix p1,
              std::optional<Matrix> p2 = std::nullopt, bool symmetric = false,
              BandProfile profile = BandProfile::General);

    static NbdMatrix zero(const BlockStructure& s, double eps, bool symmetric = false,
                          bool with_p2 = false);
    static NbdMatrix identity(const BlockStructure& s, double eps);
    /// Splits a dense matrix: p0 = diagonal blocks, p1 = off-block part / eps.
    /// For eps = 0 the off-block part must vanish.
    static NbdMatrix split_dense(const BlockStructure& s, const Matrix& dense, double eps,
                                 bool symmetric);

    const BlockStructure& structure() const { return structure_; }
    double eps() const { return eps_; }
    bool symmetric() const { return symmetric_; }
    BandProfile profile() const { return profile_; }

    const std::vector<Matrix>& p0() const { return p0_; }
    const Matrix& p0_block(Index k) const { return p0_[static_cast<std::size_t>(k)]; }
    const Matrix& p1() const { return p1_; }
    bool has_p2() const { return p2_.has_value(); }
    const Matrix& p2() const;

    bool p0_block_zero(Index k) const { return p0_zero_[static_cast<std::size_t>(k)] != 0; }
    bool p1_block_zero(Index k, Index l) const;
    bool p2_block_zero(Index k, Index l) const;

    Matrix p0_dense() const { return structure_.assemble_block_diagonal(p0_); }
    /// p0 + eps p1 (the first order truncation).
    Matrix truncation_first_order() const;
    /// p0 + eps p1 + eps^2 p2 when p2 is present, else the first order
    /// truncation. Densification is exact.
    Matrix densify() const;

    /// (p0 + eps p1 [+ eps^2 p2]) v, evaluated without densifying.
    Vector apply(const Vector& v) const;

    NbdMatrix transpose() const;
    /// Orderwise sum/difference. Structures and eps must match.
    NbdMatrix operator+(const NbdMatrix& other) const;
    NbdMatrix operator-(const NbdMatrix& other) const;

    /// Same decomposition with the symmetric flag forced on (symmetrizes).
    NbdMatrix symmetrized() const;

private:
    void validate_band_profile() const;
    void refresh_zero_flags();

    BlockStructure structure_;
    double eps_;
    std::vector<Matrix> p0_;
    Matrix p1_;
    std::optional<Matrix> p2_;
    bool symmetric_;
    BandProfile profile_;
    std::vector<std::uint8_t> p0_zero_;
    std::vector<std::uint8_t> p1_zero_; // row-major N_b x N_b
    std::vector<std::uint8_t> p2_zero_;
};

/// P_L: strict block-lower part of P plus half of its block diagonal part.
/// For symmetric P, P_L + P_L^T = P.
Matrix lower_block_part(const Matrix& p, const BlockStructure& s);

} // namespace nbdkal
