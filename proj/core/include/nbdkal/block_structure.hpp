#pragma once

#include <vector>

#include "nbdkal/types.hpp"

namespace nbdkal {

/// The fixed partition n_1..n_{N_b} shared by every matrix in a problem.
/// All nearly-block-diagonal objects are defined relative to one of these.
class BlockStructure {
public:
    explicit BlockStructure(std::vector<Index> sizes);

    Index block_count() const { return static_cast<Index>(sizes_.size()); }
    Index dim() const { return dim_; }
    Index size(Index k) const { return sizes_.at(static_cast<std::size_t>(k)); }
    Index offset(Index k) const { return offsets_.at(static_cast<std::size_t>(k)); }
    const std::vector<Index>& sizes() const { return sizes_; }

    bool equal_blocks() const;

    /// N_2 = (N_b sum n_k^2)^(1/2). Equals N when all blocks are equal.
    double moment_n2() const;
    /// N_3 = (N_b^2 sum n_k^3)^(1/3). Equals N when all blocks are equal.
    double moment_n3() const;

    double sum_sizes_squared() const;
    double sum_sizes_cubed() const;

    bool operator==(const BlockStructure& other) const { return sizes_ == other.sizes_; }
    bool operator!=(const BlockStructure& other) const { return !(*this == other); }

    /// (k, l) block view of a conformable dense matrix.
    Eigen::Block<const Matrix> block(const Matrix& m, Index k, Index l) const;
    Eigen::Block<Matrix> block(Matrix& m, Index k, Index l) const;

    /// Segment view of a conformable vector.
    Eigen::VectorBlock<const Vector> segment(const Vector& v, Index k) const;
    Eigen::VectorBlock<Vector> segment(Vector& v, Index k) const;

    void require_conformable(const Matrix& m, const char* what) const;

    /// Assembles a dense matrix from per-block diagonal entries.
    Matrix assemble_block_diagonal(const std::vector<Matrix>& blocks) const;
    /// Extracts the diagonal blocks of a dense matrix.
    std::vector<Matrix> extract_diagonal_blocks(const Matrix& m) const;
    /// Zeroes the diagonal blocks, keeping the off-block coupling part.
    Matrix off_block_part(const Matrix& m) const;

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_;
    Index dim_ = 0;
};

} // namespace nbdkal
