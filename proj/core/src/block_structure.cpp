#include "nbdkal/block_structure.hpp"

#include <algorithm>
#include <cmath>

namespace nbdkal {

BlockStructure::BlockStructure(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty())
        throw DimensionError("BlockStructure: at least one block required");
    offsets_.reserve(sizes_.size());
    for (Index n : sizes_) {
        if (n < 1)
            throw DimensionError("BlockStructure: block sizes must be >= 1");
        offsets_.push_back(dim_);
        dim_ += n;
    }
}

bool BlockStructure::equal_blocks() const {
    return std::all_of(sizes_.begin(), sizes_.end(),
                       [&](Index n) { return n == sizes_.front(); });
}

double BlockStructure::sum_sizes_squared() const {
    double s = 0;
    for (Index n : sizes_) s += static_cast<double>(n) * n;
    return s;
}

double BlockStructure::sum_sizes_cubed() const {
    double s = 0;
    for (Index n : sizes_) s += static_cast<double>(n) * n * n;
    return s;
}

double BlockStructure::moment_n2() const {
    return std::sqrt(static_cast<double>(block_count()) * sum_sizes_squared());
}

double BlockStructure::moment_n3() const {
    double nb = static_cast<double>(block_count());
    return std::cbrt(nb * nb * sum_sizes_cubed());
}

Eigen::Block<const Matrix> BlockStructure::block(const Matrix& m, Index k, Index l) const {
    return m.block(offset(k), offset(l), size(k), size(l));
}

Eigen::Block<Matrix> BlockStructure::block(Matrix& m, Index k, Index l) const {
    return m.block(offset(k), offset(l), size(k), size(l));
}

Eigen::VectorBlock<const Vector> BlockStructure::segment(const Vector& v, Index k) const {
    return v.segment(offset(k), size(k));
}

Eigen::VectorBlock<Vector> BlockStructure::segment(Vector& v, Index k) const {
    return v.segment(offset(k), size(k));
}

void BlockStructure::require_conformable(const Matrix& m, const char* what) const {
    if (m.rows() != dim_ || m.cols() != dim_)
        throw DimensionError(std::string(what) + ": expected " + std::to_string(dim_) +
                             "x" + std::to_string(dim_) + ", got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

Matrix BlockStructure::assemble_block_diagonal(const std::vector<Matrix>& blocks) const {
    if (static_cast<Index>(blocks.size()) != block_count())
        throw DimensionError("assemble_block_diagonal: wrong number of blocks");
    Matrix out = Matrix::Zero(dim_, dim_);
    for (Index k = 0; k < block_count(); ++k) {
        const Matrix& b = blocks[static_cast<std::size_t>(k)];
        if (b.rows() != size(k) || b.cols() != size(k))
            throw DimensionError("assemble_block_diagonal: block " + std::to_string(k) +
                                 " has wrong shape");
        block(out, k, k) = b;
    }
    return out;
}

std::vector<Matrix> BlockStructure::extract_diagonal_blocks(const Matrix& m) const {
    require_conformable(m, "extract_diagonal_blocks");
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(block_count()));
    for (Index k = 0; k < block_count(); ++k) blocks.emplace_back(block(m, k, k));
    return blocks;
}

Matrix BlockStructure::off_block_part(const Matrix& m) const {
    require_conformable(m, "off_block_part");
    Matrix out = m;
    for (Index k = 0; k < block_count(); ++k) block(out, k, k).setZero();
    return out;
}

} // namespace nbdkal
