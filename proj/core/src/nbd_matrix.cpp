#include "nbdkal/nbd_matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace nbdkal {

namespace {

void symmetrize_in_place(Matrix& m) { m = ((m + m.transpose()) * 0.5).eval(); }

} // namespace

NbdMatrix::NbdMatrix(BlockStructure structure, double eps, std::vector<Matrix> p0, Matrix p1,
                     std::optional<Matrix> p2, bool symmetric, BandProfile profile)
    : structure_(std::move(structure)),
      eps_(eps),
      p0_(std::move(p0)),
      p1_(std::move(p1)),
      p2_(std::move(p2)),
      symmetric_(symmetric),
      profile_(profile) {
    if (eps_ < 0.0) throw Error("NbdMatrix: eps must be >= 0");
    if (static_cast<Index>(p0_.size()) != structure_.block_count())
        throw DimensionError("NbdMatrix: wrong number of p0 blocks");
    for (Index k = 0; k < structure_.block_count(); ++k) {
        const Matrix& b = p0_[static_cast<std::size_t>(k)];
        if (b.rows() != structure_.size(k) || b.cols() != structure_.size(k))
            throw DimensionError("NbdMatrix: p0 block " + std::to_string(k) +
                                 " has wrong shape");
    }
    structure_.require_conformable(p1_, "NbdMatrix p1");
    if (p2_) structure_.require_conformable(*p2_, "NbdMatrix p2");

    if (symmetric_) {
        for (auto& b : p0_) symmetrize_in_place(b);
        symmetrize_in_place(p1_);
        if (p2_) symmetrize_in_place(*p2_);
    }
    validate_band_profile();
    refresh_zero_flags();
}

NbdMatrix NbdMatrix::zero(const BlockStructure& s, double eps, bool symmetric, bool with_p2) {
    std::vector<Matrix> p0;
    p0.reserve(static_cast<std::size_t>(s.block_count()));
    for (Index k = 0; k < s.block_count(); ++k)
        p0.push_back(Matrix::Zero(s.size(k), s.size(k)));
    std::optional<Matrix> p2;
    if (with_p2) p2 = Matrix::Zero(s.dim(), s.dim());
    return NbdMatrix(s, eps, std::move(p0), Matrix::Zero(s.dim(), s.dim()), std::move(p2),
                     symmetric);
}

NbdMatrix NbdMatrix::identity(const BlockStructure& s, double eps) {
    std::vector<Matrix> p0;
    p0.reserve(static_cast<std::size_t>(s.block_count()));
    for (Index k = 0; k < s.block_count(); ++k)
        p0.push_back(Matrix::Identity(s.size(k), s.size(k)));
    return NbdMatrix(s, eps, std::move(p0), Matrix::Zero(s.dim(), s.dim()), std::nullopt, true);
}

NbdMatrix NbdMatrix::split_dense(const BlockStructure& s, const Matrix& dense, double eps,
                                 bool symmetric) {
    s.require_conformable(dense, "split_dense");
    Matrix off = s.off_block_part(dense);
    Matrix p1;
    if (eps > 0.0) {
        p1 = off / eps;
    } else {
        if (off.norm() > 1e-12 * relative_scale(dense))
            throw Error("split_dense: eps = 0 but the matrix has off-block coupling");
        p1 = Matrix::Zero(s.dim(), s.dim());
    }
    return NbdMatrix(s, eps, s.extract_diagonal_blocks(dense), std::move(p1), std::nullopt,
                     symmetric);
}

const Matrix& NbdMatrix::p2() const {
    if (!p2_) throw Error("NbdMatrix: p2 requested but not present");
    return *p2_;
}

bool NbdMatrix::p1_block_zero(Index k, Index l) const {
    return p1_zero_[static_cast<std::size_t>(k * structure_.block_count() + l)] != 0;
}

bool NbdMatrix::p2_block_zero(Index k, Index l) const {
    if (!p2_) return true;
    return p2_zero_[static_cast<std::size_t>(k * structure_.block_count() + l)] != 0;
}

Matrix NbdMatrix::truncation_first_order() const {
    Matrix out = p0_dense();
    out += eps_ * p1_;
    return out;
}

Matrix NbdMatrix::densify() const {
    Matrix out = truncation_first_order();
    if (p2_) out += (eps_ * eps_) * (*p2_);
    return out;
}

Vector NbdMatrix::apply(const Vector& v) const {
    if (v.size() != structure_.dim()) throw DimensionError("NbdMatrix::apply: bad vector size");
    Vector out = Vector::Zero(structure_.dim());
    for (Index k = 0; k < structure_.block_count(); ++k)
        structure_.segment(out, k) = p0_[static_cast<std::size_t>(k)] * structure_.segment(v, k);
    out += eps_ * (p1_ * v);
    if (p2_) out += (eps_ * eps_) * (*p2_ * v);
    return out;
}

NbdMatrix NbdMatrix::transpose() const {
    std::vector<Matrix> p0t;
    p0t.reserve(p0_.size());
    for (const auto& b : p0_) p0t.push_back(b.transpose());
    std::optional<Matrix> p2t;
    if (p2_) p2t = p2_->transpose();
    return NbdMatrix(structure_, eps_, std::move(p0t), p1_.transpose(), std::move(p2t),
                     symmetric_, profile_);
}

NbdMatrix NbdMatrix::operator+(const NbdMatrix& other) const {
    if (structure_ != other.structure_) throw DimensionError("NbdMatrix+: structure mismatch");
    if (eps_ != other.eps_) throw Error("NbdMatrix+: eps mismatch");
    std::vector<Matrix> p0;
    p0.reserve(p0_.size());
    for (std::size_t k = 0; k < p0_.size(); ++k) p0.push_back(p0_[k] + other.p0_[k]);
    std::optional<Matrix> p2;
    if (p2_ && other.p2_)
        p2 = *p2_ + *other.p2_;
    else if (p2_)
        p2 = *p2_;
    else if (other.p2_)
        p2 = *other.p2_;
    return NbdMatrix(structure_, eps_, std::move(p0), p1_ + other.p1_, std::move(p2),
                     symmetric_ && other.symmetric_);
}

NbdMatrix NbdMatrix::operator-(const NbdMatrix& other) const {
    if (structure_ != other.structure_) throw DimensionError("NbdMatrix-: structure mismatch");
    if (eps_ != other.eps_) throw Error("NbdMatrix-: eps mismatch");
    std::vector<Matrix> p0;
    p0.reserve(p0_.size());
    for (std::size_t k = 0; k < p0_.size(); ++k) p0.push_back(p0_[k] - other.p0_[k]);
    std::optional<Matrix> p2;
    if (p2_ && other.p2_)
        p2 = *p2_ - *other.p2_;
    else if (p2_)
        p2 = *p2_;
    else if (other.p2_)
        p2 = -*other.p2_;
    return NbdMatrix(structure_, eps_, std::move(p0), p1_ - other.p1_, std::move(p2),
                     symmetric_ && other.symmetric_);
}

NbdMatrix NbdMatrix::symmetrized() const {
    return NbdMatrix(structure_, eps_, p0_, p1_, p2_, true, profile_);
}

void NbdMatrix::validate_band_profile() const {
    if (profile_ == BandProfile::General) return;
    const Index nb = structure_.block_count();
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l < nb; ++l) {
            if (std::abs(k - l) > 1 && !structure_.block(p1_, k, l).isZero(0.0))
                throw Error("NbdMatrix: p1 violates nearest-neighbor profile at block (" +
                            std::to_string(k) + "," + std::to_string(l) + ")");
            if (profile_ == BandProfile::StronglyNearestNeighbor && p2_ &&
                std::abs(k - l) > 2 && !structure_.block(*p2_, k, l).isZero(0.0))
                throw Error("NbdMatrix: p2 violates strongly-nearest-neighbor profile");
        }
    }
}

void NbdMatrix::refresh_zero_flags() {
    const Index nb = structure_.block_count();
    p0_zero_.assign(static_cast<std::size_t>(nb), 0);
    for (Index k = 0; k < nb; ++k)
        p0_zero_[static_cast<std::size_t>(k)] = p0_[static_cast<std::size_t>(k)].isZero(0.0);
    p1_zero_.assign(static_cast<std::size_t>(nb * nb), 0);
    p2_zero_.assign(static_cast<std::size_t>(nb * nb), 0);
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l < nb; ++l) {
            p1_zero_[static_cast<std::size_t>(k * nb + l)] =
                structure_.block(p1_, k, l).isZero(0.0);
            if (p2_)
                p2_zero_[static_cast<std::size_t>(k * nb + l)] =
                    structure_.block(*p2_, k, l).isZero(0.0);
        }
    }
}

Matrix lower_block_part(const Matrix& p, const BlockStructure& s) {
    s.require_conformable(p, "lower_block_part");
    Matrix out = Matrix::Zero(p.rows(), p.cols());
    for (Index k = 0; k < s.block_count(); ++k) {
        for (Index l = 0; l < k; ++l) s.block(out, k, l) = s.block(p, k, l);
        s.block(out, k, k) = 0.5 * s.block(p, k, k);
    }
    return out;
}

} // namespace nbdkal
