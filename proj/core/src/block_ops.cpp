#include "nbdkal/block_ops.hpp"

#include <Eigen/Cholesky>

namespace nbdkal {

namespace {

double nkd(const BlockStructure& s, Index k) { return static_cast<double>(s.size(k)); }

/// C = A * B, counted as a*b*c scalar multiplies.
template <typename Dst, typename LhsT, typename RhsT>
void counted_product(Dst&& c, const LhsT& a, const RhsT& b, MultCounter& counter) {
    c.noalias() = a * b;
    counter.add(static_cast<double>(a.rows()) * static_cast<double>(a.cols()) *
                static_cast<double>(b.cols()));
}

/// Symmetric n x n result of A * B filled through its lower triangle and
/// mirrored; counted as n * n(n+1)/2. Caller guarantees A*B is symmetric.
template <typename LhsT, typename RhsT>
Matrix counted_symmetric_product(const LhsT& a, const RhsT& b, MultCounter& counter) {
    const Index n = a.rows();
    Matrix out(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
            double acc = 0;
            for (Index t = 0; t < a.cols(); ++t) acc += a(i, t) * b(t, j);
            out(i, j) = acc;
            out(j, i) = acc;
        }
    }
    counter.add(static_cast<double>(a.cols()) * static_cast<double>(n) *
                static_cast<double>(n + 1) / 2.0);
    return out;
}

BandProfile combined_profile(const NbdMatrix& p, const NbdMatrix& q) {
    if (p.profile() != BandProfile::General && q.profile() != BandProfile::General)
        return BandProfile::NearestNeighbor;
    return BandProfile::General;
}

void require_compatible(const NbdMatrix& p, const NbdMatrix& q, const char* what) {
    if (p.structure() != q.structure())
        throw DimensionError(std::string(what) + ": block structure mismatch");
    if (p.eps() != q.eps()) throw Error(std::string(what) + ": eps mismatch");
}

} // namespace

void require_spd_block(const Matrix& block, Index block_index, const char* context,
                       double rel_tol) {
    Eigen::LDLT<Matrix> ldlt(block);
    double scale = block.norm();
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= rel_tol * (scale > 0 ? scale : 1.0))
        throw NotPositiveDefiniteError(block_index, context);
}

Matrix spd_block_inverse(const Matrix& block, Index block_index, const char* context,
                         double rel_tol) {
    Eigen::LDLT<Matrix> ldlt(block);
    double scale = block.norm();
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= rel_tol * (scale > 0 ? scale : 1.0))
        throw NotPositiveDefiniteError(block_index, context);
    Matrix inv = ldlt.solve(Matrix::Identity(block.rows(), block.cols()));
    inv = ((inv + inv.transpose()) * 0.5).eval();
    return inv;
}

NbdMatrix mul_first_order(const NbdMatrix& p, const NbdMatrix& q, MultCounter& counter) {
    require_compatible(p, q, "mul_first_order");
    const BlockStructure& s = p.structure();
    const Index nb = s.block_count();

    std::vector<Matrix> r0;
    r0.reserve(static_cast<std::size_t>(nb));
    for (Index k = 0; k < nb; ++k) {
        if (p.p0_block_zero(k) || q.p0_block_zero(k)) {
            r0.push_back(Matrix::Zero(s.size(k), s.size(k)));
        } else {
            Matrix b(s.size(k), s.size(k));
            counted_product(b, p.p0_block(k), q.p0_block(k), counter);
            r0.push_back(std::move(b));
        }
    }

    Matrix r1 = Matrix::Zero(s.dim(), s.dim());
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l < nb; ++l) {
            if (!p.p0_block_zero(k) && !q.p1_block_zero(k, l)) {
                Matrix t(s.size(k), s.size(l));
                counted_product(t, p.p0_block(k), s.block(q.p1(), k, l), counter);
                s.block(r1, k, l) += t;
            }
            if (!p.p1_block_zero(k, l) && !q.p0_block_zero(l)) {
                Matrix t(s.size(k), s.size(l));
                counted_product(t, s.block(p.p1(), k, l), q.p0_block(l), counter);
                s.block(r1, k, l) += t;
            }
        }
    }

    return NbdMatrix(s, p.eps(), std::move(r0), std::move(r1), std::nullopt, false,
                     combined_profile(p, q));
}

NbdMatrix sym_product_first_order(const NbdMatrix& r, const NbdMatrix& q,
                                  MultCounter& counter) {
    require_compatible(r, q, "sym_product_first_order");
    if (!q.symmetric()) throw Error("sym_product_first_order: Q must be symmetric");
    const BlockStructure& s = r.structure();
    const Index nb = s.block_count();

    // A_k = R0_k Q0_k, then S0_k = A_k R0_k^T (symmetric, lower half).
    std::vector<Matrix> a(static_cast<std::size_t>(nb));
    std::vector<Matrix> s0;
    s0.reserve(static_cast<std::size_t>(nb));
    for (Index k = 0; k < nb; ++k) {
        if (r.p0_block_zero(k) || q.p0_block_zero(k)) {
            a[static_cast<std::size_t>(k)] = Matrix::Zero(s.size(k), s.size(k));
            s0.push_back(Matrix::Zero(s.size(k), s.size(k)));
            continue;
        }
        Matrix& ak = a[static_cast<std::size_t>(k)];
        ak.resize(s.size(k), s.size(k));
        counted_product(ak, r.p0_block(k), q.p0_block(k), counter);
        s0.push_back(counted_symmetric_product(ak, r.p0_block(k).transpose(), counter));
    }

    Matrix s1 = Matrix::Zero(s.dim(), s.dim());

    // C = A R1^T contributes C + C^T (covers R0 Q0 R1^T and R1 Q0 R0^T).
    for (Index k = 0; k < nb; ++k) {
        if (a[static_cast<std::size_t>(k)].isZero(0.0)) continue;
        for (Index l = 0; l < nb; ++l) {
            if (r.p1_block_zero(l, k)) continue;
            if (k == l) {
                Matrix t(s.size(k), s.size(k));
                counted_product(t, a[static_cast<std::size_t>(k)],
                                s.block(r.p1(), k, k).transpose(), counter);
                s.block(s1, k, k) += t + t.transpose();
            } else {
                Matrix t(s.size(k), s.size(l));
                counted_product(t, a[static_cast<std::size_t>(k)],
                                s.block(r.p1(), l, k).transpose(), counter);
                s.block(s1, k, l) += t;
                s.block(s1, l, k) += t.transpose();
            }
        }
    }

    // R0 Q1 R0^T: full first stage B = Q1 R0^T, lower-triangle second stage.
    Matrix b = Matrix::Zero(s.dim(), s.dim());
    std::vector<std::uint8_t> b_zero(static_cast<std::size_t>(nb * nb), 1);
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l < nb; ++l) {
            if (q.p1_block_zero(k, l) || r.p0_block_zero(l)) continue;
            counted_product(s.block(b, k, l), s.block(q.p1(), k, l),
                            r.p0_block(l).transpose(), counter);
            b_zero[static_cast<std::size_t>(k * nb + l)] = 0;
        }
    }
    for (Index k = 0; k < nb; ++k) {
        if (r.p0_block_zero(k)) continue;
        for (Index l = 0; l <= k; ++l) {
            if (b_zero[static_cast<std::size_t>(k * nb + l)]) continue;
            if (k == l) {
                s.block(s1, k, k) +=
                    counted_symmetric_product(r.p0_block(k), s.block(b, k, k), counter);
            } else {
                Matrix t(s.size(k), s.size(l));
                counted_product(t, r.p0_block(k), s.block(b, k, l), counter);
                s.block(s1, k, l) += t;
                s.block(s1, l, k) += t.transpose();
            }
        }
    }

    return NbdMatrix(s, r.eps(), std::move(s0), std::move(s1), std::nullopt, true,
                     combined_profile(r, q));
}

NbdMatrix inverse_nbd_first_order(const NbdMatrix& p, MultCounter& counter) {
    if (!p.symmetric()) throw Error("inverse_nbd_first_order: input must be symmetric");
    const BlockStructure& s = p.structure();
    const Index nb = s.block_count();

    std::vector<Matrix> inv0;
    inv0.reserve(static_cast<std::size_t>(nb));
    for (Index k = 0; k < nb; ++k) {
        inv0.push_back(spd_block_inverse(p.p0_block(k), k, "inverse_nbd_first_order"));
        counter.add(0.5 * nkd(s, k) * nkd(s, k) * nkd(s, k));
    }

    // -(P0)^-1 P1 (P0)^-1, symmetric: full first stage, lower second stage.
    Matrix y = Matrix::Zero(s.dim(), s.dim());
    std::vector<std::uint8_t> y_zero(static_cast<std::size_t>(nb * nb), 1);
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l < nb; ++l) {
            if (p.p1_block_zero(k, l)) continue;
            counted_product(s.block(y, k, l), s.block(p.p1(), k, l),
                            inv0[static_cast<std::size_t>(l)], counter);
            y_zero[static_cast<std::size_t>(k * nb + l)] = 0;
        }
    }
    Matrix p1 = Matrix::Zero(s.dim(), s.dim());
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l <= k; ++l) {
            if (y_zero[static_cast<std::size_t>(k * nb + l)]) continue;
            if (k == l) {
                s.block(p1, k, k) = -counted_symmetric_product(
                    inv0[static_cast<std::size_t>(k)], s.block(y, k, k), counter);
            } else {
                Matrix t(s.size(k), s.size(l));
                counted_product(t, inv0[static_cast<std::size_t>(k)], s.block(y, k, l),
                                counter);
                s.block(p1, k, l) = -t;
                s.block(p1, l, k) = -t.transpose();
            }
        }
    }

    return NbdMatrix(s, p.eps(), std::move(inv0), std::move(p1), std::nullopt, true,
                     p.profile());
}

namespace {

/// X = T M1 T'^T stage pair used by the inverse update: full first stage
/// Y = M1 * T'^T, then lower-triangle second stage X = T * Y with the upper
/// half mirrored. T and T' are block diagonal (given per block).
Matrix sandwich_first_order(const BlockStructure& s, const std::vector<Matrix>& left,
                            const std::vector<Matrix>& right_t, const NbdMatrix& mid,
                            MultCounter& counter) {
    const Index nb = s.block_count();
    Matrix y = Matrix::Zero(s.dim(), s.dim());
    std::vector<std::uint8_t> y_zero(static_cast<std::size_t>(nb * nb), 1);
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l < nb; ++l) {
            if (mid.p1_block_zero(k, l)) continue;
            counted_product(s.block(y, k, l), s.block(mid.p1(), k, l),
                            right_t[static_cast<std::size_t>(l)].transpose(), counter);
            y_zero[static_cast<std::size_t>(k * nb + l)] = 0;
        }
    }
    Matrix x = Matrix::Zero(s.dim(), s.dim());
    for (Index k = 0; k < nb; ++k) {
        for (Index l = 0; l <= k; ++l) {
            if (y_zero[static_cast<std::size_t>(k * nb + l)]) continue;
            if (k == l) {
                s.block(x, k, k) = counted_symmetric_product(
                    left[static_cast<std::size_t>(k)], s.block(y, k, k), counter);
            } else {
                Matrix t(s.size(k), s.size(l));
                counted_product(t, left[static_cast<std::size_t>(k)], s.block(y, k, l),
                                counter);
                s.block(x, k, l) = t;
                s.block(x, l, k) = t.transpose();
            }
        }
    }
    return x;
}

} // namespace

InverseUpdateResult inverse_update(const NbdMatrix& m, const NbdMatrix& j,
                                   MultCounter& counter) {
    require_compatible(m, j, "inverse_update");
    if (!m.symmetric() || !j.symmetric())
        throw Error("inverse_update: M and J must be symmetric");
    const BlockStructure& s = m.structure();
    const Index nb = s.block_count();

    MultCounter zeroth;
    std::vector<Matrix> m0inv;
    m0inv.reserve(static_cast<std::size_t>(nb));
    for (Index k = 0; k < nb; ++k) {
        m0inv.push_back(spd_block_inverse(m.p0_block(k), k, "inverse_update: M^(0)"));
        zeroth.add(0.5 * nkd(s, k) * nkd(s, k) * nkd(s, k));
    }
    std::vector<Matrix> p0;
    p0.reserve(static_cast<std::size_t>(nb));
    for (Index k = 0; k < nb; ++k) {
        Matrix sum = m0inv[static_cast<std::size_t>(k)] + j.p0_block(k);
        p0.push_back(spd_block_inverse(sum, k, "inverse_update: M^(0)-1 + J^(0)"));
        zeroth.add(0.5 * nkd(s, k) * nkd(s, k) * nkd(s, k) + nkd(s, k) * nkd(s, k));
    }

    // Conditioning heuristic: block diagonal 2-norms.
    double j0_norm = 0, m0inv_norm = 0;
    for (Index k = 0; k < nb; ++k) {
        j0_norm = std::max(j0_norm, j.p0_block(k).operatorNorm());
        m0inv_norm = std::max(m0inv_norm, m0inv[static_cast<std::size_t>(k)].operatorNorm());
    }
    const bool use_conditioned = j0_norm < 0.1 * m0inv_norm;

    MultCounter first;
    Matrix p1;
    if (use_conditioned) {
        // [I - P0 J0] M1 [I - J0 P0] - P0 J1 P0
        std::vector<Matrix> g;
        g.reserve(static_cast<std::size_t>(nb));
        for (Index k = 0; k < nb; ++k) {
            Matrix prod(s.size(k), s.size(k));
            counted_product(prod, p0[static_cast<std::size_t>(k)], j.p0_block(k), first);
            g.push_back(Matrix::Identity(s.size(k), s.size(k)) - prod);
        }
        // note [I - J0 P0] = [I - P0 J0]^T for symmetric blocks
        p1 = sandwich_first_order(s, g, g, m, first);
    } else {
        // W = M0^-1 P0;  P1 = W^T M1 W - P0 J1 P0
        std::vector<Matrix> w;
        std::vector<Matrix> wt;
        w.reserve(static_cast<std::size_t>(nb));
        wt.reserve(static_cast<std::size_t>(nb));
        for (Index k = 0; k < nb; ++k) {
            Matrix prod(s.size(k), s.size(k));
            counted_product(prod, m0inv[static_cast<std::size_t>(k)],
                            p0[static_cast<std::size_t>(k)], first);
            wt.push_back(prod.transpose());
            w.push_back(std::move(prod));
        }
        p1 = sandwich_first_order(s, wt, wt, m, first);
    }
    p1 -= sandwich_first_order(s, p0, p0, j, first);

    counter.add(zeroth);
    counter.add(first);
    InverseUpdateResult out{
        NbdMatrix(s, m.eps(), std::move(p0), std::move(p1), std::nullopt, true),
        use_conditioned, zeroth.mults, first.mults};
    return out;
}

} // namespace nbdkal
