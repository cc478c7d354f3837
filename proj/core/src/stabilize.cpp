#include "nbdkal/stabilize.hpp"

#include <Eigen/Eigenvalues>

#include "nbdkal/block_ops.hpp"
#include "nbdkal/eigen_perturb.hpp"

namespace nbdkal {

namespace {

double cube(Index n) {
    double d = static_cast<double>(n);
    return d * d * d;
}

/// Per-block inverses of P^(0); the L D^{-1} L^T accounting: 1/2 sum n_k^3.
std::vector<Matrix> invert_p0(const NbdMatrix& p, const char* context, MultCounter& counter) {
    std::vector<Matrix> d_inv;
    const BlockStructure& s = p.structure();
    d_inv.reserve(static_cast<std::size_t>(s.block_count()));
    for (Index k = 0; k < s.block_count(); ++k) {
        d_inv.push_back(spd_block_inverse(p.p0_block(k), k, context));
        counter.add(0.5 * cube(s.size(k)));
    }
    return d_inv;
}

void require_symmetric(const NbdMatrix& p, const char* context) {
    if (!p.symmetric()) throw Error(std::string(context) + ": input must be symmetric");
}

/// G^(2) = P_L^(1) P^(0)-1 P_L^(1)T, blockwise over the lower-form factors.
Matrix t1_cross_term(const NbdMatrix& p, const Matrix& pl1, const std::vector<Matrix>& d_inv,
                     MultCounter& counter) {
    const BlockStructure& s = p.structure();
    const Index nb = s.block_count();
    Matrix y = Matrix::Zero(s.dim(), s.dim()); // Y = P_L^(1) P^(0)-1
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l <= k; ++l) {
            auto blk = s.block(pl1, k, l);
            if (blk.isZero(0.0)) continue;
            s.block(y, k, l).noalias() = blk * d_inv[static_cast<std::size_t>(l)];
            counter.add(static_cast<double>(s.size(k)) * s.size(l) * s.size(l));
        }
    }
    Matrix g = Matrix::Zero(s.dim(), s.dim());
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l <= k; ++l) {
            Matrix acc = Matrix::Zero(s.size(k), s.size(l));
            for (Index j = 0; j <= std::min(k, l); ++j) {
                auto yb = s.block(y, k, j);
                auto cb = s.block(pl1, l, j);
                if (yb.isZero(0.0) || cb.isZero(0.0)) continue;
                acc.noalias() += yb * cb.transpose();
                counter.add(static_cast<double>(s.size(k)) * s.size(j) * s.size(l));
            }
            s.block(g, k, l) = acc;
            if (k != l) s.block(g, l, k) = acc.transpose();
        }
    }
    g = ((g + g.transpose()) * 0.5).eval();
    return g;
}

} // namespace

StabilizedFactor::StabilizedFactor(BlockStructure structure, double eps, int order,
                                   std::vector<Matrix> d, std::vector<Matrix> d_inv, Matrix l,
                                   double build_mults)
    : structure_(std::move(structure)),
      eps_(eps),
      order_(order),
      d_(std::move(d)),
      d_inv_(std::move(d_inv)),
      l_(std::move(l)),
      build_mults_(build_mults) {}

Matrix StabilizedFactor::value() const {
    // Y = D^{-1} L^T assembled by block rows, then L Y.
    Matrix y(structure_.dim(), structure_.dim());
    for (Index k = 0; k < structure_.block_count(); ++k)
        y.middleRows(structure_.offset(k), structure_.size(k)).noalias() =
            d_inv_[static_cast<std::size_t>(k)] *
            l_.middleCols(structure_.offset(k), structure_.size(k)).transpose();
    Matrix v = l_ * y;
    return ((v + v.transpose()) * 0.5).eval();
}

Vector StabilizedFactor::apply(const Vector& v) const {
    Vector w = l_.transpose() * v;
    for (Index k = 0; k < structure_.block_count(); ++k)
        structure_.segment(w, k) =
            (d_inv_[static_cast<std::size_t>(k)] * structure_.segment(w, k)).eval();
    return l_ * w;
}

Matrix StabilizedFactor::value_inverse() const {
    // (L D^{-1} L^T)^{-1} = L^{-T} D L^{-1}; L is block lower triangular with
    // full diagonal blocks, so use a dense solve at this scale.
    Eigen::PartialPivLU<Matrix> lu(l_);
    Matrix linv = lu.solve(Matrix::Identity(structure_.dim(), structure_.dim()));
    Matrix dv = structure_.assemble_block_diagonal(d_);
    Matrix out = linv.transpose() * dv * linv;
    return ((out + out.transpose()) * 0.5).eval();
}

NbdMatrix StabilizedFactor::redecompose() const {
    Matrix d_dense = structure_.assemble_block_diagonal(d_);
    if (eps_ == 0.0)
        return NbdMatrix(structure_, eps_, d_, Matrix::Zero(structure_.dim(), structure_.dim()),
                         Matrix::Zero(structure_.dim(), structure_.dim()), true);
    Matrix c = l_ - d_dense;
    Matrix p1 = (c + c.transpose()) / eps_;
    Matrix p2 = (value() - d_dense - eps_ * p1) / (eps_ * eps_);
    return NbdMatrix(structure_, eps_, d_, std::move(p1), std::move(p2), true);
}

void StabilizedFactor::validate(double rel_tol) const {
    for (Index k = 0; k < structure_.block_count(); ++k) {
        const Matrix& dk = d_[static_cast<std::size_t>(k)];
        const Matrix& ik = d_inv_[static_cast<std::size_t>(k)];
        double err = (dk * ik - Matrix::Identity(dk.rows(), dk.cols())).norm();
        if (err > rel_tol * relative_scale(dk))
            throw InvariantViolation("StabilizedFactor: D D^-1 != I at block " +
                                     std::to_string(k));
    }
}

InverseFactor::InverseFactor(BlockStructure structure, double eps, int order,
                             std::vector<Matrix> d, std::vector<Matrix> d_inv, Matrix l_prime,
                             double build_mults)
    : structure_(std::move(structure)),
      eps_(eps),
      order_(order),
      d_(std::move(d)),
      d_inv_(std::move(d_inv)),
      l_prime_(std::move(l_prime)),
      build_mults_(build_mults) {}

Matrix InverseFactor::value() const {
    Matrix dinv = structure_.assemble_block_diagonal(d_inv_);
    Matrix half = dinv * l_prime_ * dinv;
    Matrix v = half * l_prime_.transpose() * dinv;
    return ((v + v.transpose()) * 0.5).eval();
}

Vector InverseFactor::apply(const Vector& v) const {
    auto dinv_apply = [&](Vector x) {
        for (Index k = 0; k < structure_.block_count(); ++k)
            structure_.segment(x, k) =
                (d_inv_[static_cast<std::size_t>(k)] * structure_.segment(x, k)).eval();
        return x;
    };
    Vector a = dinv_apply(v);
    Vector b = l_prime_.transpose() * a;
    Vector c = dinv_apply(b);
    Vector e = l_prime_ * c;
    return dinv_apply(e);
}

StabilizedFactor t1_stabilize(const NbdMatrix& p, MultCounter& counter) {
    require_symmetric(p, "t1_stabilize");
    MultCounter local;
    std::vector<Matrix> d_inv = invert_p0(p, "t1_stabilize", local);
    Matrix l = p.structure().assemble_block_diagonal(p.p0());
    if (p.eps() != 0.0) l += p.eps() * lower_block_part(p.p1(), p.structure());
    counter.add(local);
    return StabilizedFactor(p.structure(), p.eps(), 1, p.p0(), std::move(d_inv), std::move(l),
                            local.mults);
}

StabilizedFactor t2_stabilize(const NbdMatrix& p, MultCounter& counter) {
    require_symmetric(p, "t2_stabilize");
    if (!p.has_p2()) throw Error("t2_stabilize: second order part p2 is required");
    MultCounter local;
    std::vector<Matrix> d_inv = invert_p0(p, "t2_stabilize", local);
    const BlockStructure& s = p.structure();
    Matrix pl1 = lower_block_part(p.p1(), s);
    Matrix g = t1_cross_term(p, pl1, d_inv, local);
    Matrix l = s.assemble_block_diagonal(p.p0());
    if (p.eps() != 0.0) {
        l += p.eps() * pl1;
        l += (p.eps() * p.eps()) * (lower_block_part(p.p2(), s) - lower_block_part(g, s));
    }
    counter.add(local);
    return StabilizedFactor(s, p.eps(), 2, p.p0(), std::move(d_inv), std::move(l), local.mults);
}

StabilizedFactor tb_stabilize(const NbdMatrix& p, MultCounter& counter) {
    require_symmetric(p, "tb_stabilize");
    if (!p.has_p2()) throw Error("tb_stabilize: second order part p2 is required");
    MultCounter local;
    std::vector<Matrix> d_inv = invert_p0(p, "tb_stabilize", local);
    const BlockStructure& s = p.structure();
    Matrix l = s.assemble_block_diagonal(p.p0());
    if (p.eps() != 0.0) {
        l += p.eps() * lower_block_part(p.p1(), s);
        l += (p.eps() * p.eps()) * lower_block_part(p.p2(), s);
    }
    counter.add(local);
    return StabilizedFactor(s, p.eps(), 2, p.p0(), std::move(d_inv), std::move(l), local.mults);
}

InverseFactor inv_first_order(const NbdMatrix& p, MultCounter& counter) {
    require_symmetric(p, "inv_first_order");
    MultCounter local;
    std::vector<Matrix> d_inv = invert_p0(p, "inv_first_order", local);
    Matrix lp = p.structure().assemble_block_diagonal(p.p0());
    if (p.eps() != 0.0) lp -= p.eps() * lower_block_part(p.p1(), p.structure());
    counter.add(local);
    return InverseFactor(p.structure(), p.eps(), 1, p.p0(), std::move(d_inv), std::move(lp),
                         local.mults);
}

InverseFactor to_inverse(const StabilizedFactor& f) {
    Matrix d_dense = f.structure().assemble_block_diagonal(f.d());
    return InverseFactor(f.structure(), f.eps(), f.order(), f.d(), f.d_inv(),
                         2.0 * d_dense - f.l(), 0.0);
}

StabilizedFactor from_inverse(const InverseFactor& f) {
    Matrix d_dense = f.structure().assemble_block_diagonal(f.d());
    return StabilizedFactor(f.structure(), f.eps(), f.order(), f.d(), f.d_inv(),
                            2.0 * d_dense - f.l_prime(), 0.0);
}

Matrix spectral_stabilize(const NbdMatrix& p, SpectralMode mode) {
    require_symmetric(p, "spectral_stabilize");
    if (mode == SpectralMode::Exact) {
        Matrix t = p.densify();
        Eigen::SelfAdjointEigenSolver<Matrix> es(t);
        Vector lam = es.eigenvalues().cwiseMax(0.0);
        Matrix out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
        return ((out + out.transpose()) * 0.5).eval();
    }
    EigenPerturbation ep = perturb_eigen(p.structure(), p.p0(), p.p1(), p.eps());
    // Only eigenpairs with small lambda^(0) are clip-tested.
    const double screen = 4.0 * p.eps() * p.p1().norm();
    Vector lam = ep.lambda0 + p.eps() * ep.lambda1;
    for (Index k = 0; k < lam.size(); ++k)
        if (ep.lambda0(k) <= screen && lam(k) < 0.0) lam(k) = 0.0;
    Matrix vecs = ep.vectors0 + p.eps() * ep.vectors1;
    Matrix out = vecs * lam.asDiagonal() * vecs.transpose();
    return ((out + out.transpose()) * 0.5).eval();
}

} // namespace nbdkal
