#pragma once

#include "nbdkal/nbd_matrix.hpp"
#include "nbdkal/state_space.hpp"

namespace nbdkal {

/// State space model plus its nearly-block-diagonal decompositions:
/// Lambda_i = Phi^(0)(i+1,i) block diagonal, Phi^(1) coupling,
/// (Gamma Q Gamma^T) and J = H^T R^-1 H split the same way, and the initial
/// covariance as an NbdMatrix. The dense model and the splits must agree
/// exactly; the dense side drives all state-vector (exact) arithmetic.
///
/// The splits keep their first order diagonal blocks at zero (couplings are
/// off-block); the zeroth order parts carry the full diagonal blocks.
class NbdModel {
public:
    NbdModel(BlockStructure structure, double eps, StateSpaceModel dense,
             std::vector<std::vector<Matrix>> lambda, std::vector<Matrix> phi1,
             std::vector<std::vector<Matrix>> qg0, std::vector<Matrix> qg1,
             std::vector<std::vector<Matrix>> j0, std::vector<Matrix> j1, NbdMatrix p00);

    /// Derives all splits from a dense model: zeroth order = diagonal
    /// blocks, coupling = off-block part / eps (for eps = 0 the dense model
    /// must be exactly block decoupled).
    static NbdModel from_dense(BlockStructure structure, double eps, StateSpaceModel dense);

    const BlockStructure& structure() const { return structure_; }
    double eps() const { return eps_; }
    const StateSpaceModel& dense() const { return dense_; }
    const NbdMatrix& p00() const { return p00_; }

    /// Lambda_i blocks (transition time index i in [0, steps)).
    const std::vector<Matrix>& lambda(Index i) const { return at(lambda_, i); }
    const Matrix& phi1(Index i) const { return at(phi1_, i); }
    const std::vector<Matrix>& qg0(Index i) const { return at(qg0_, i); }
    const Matrix& qg1(Index i) const { return at(qg1_, i); }
    /// Information splits (measurement time index i in [1, steps]).
    const std::vector<Matrix>& j0(Index i) const { return at(j0_, i - 1); }
    const Matrix& j1(Index i) const { return at(j1_, i - 1); }

    NbdMatrix qg_nbd(Index i) const;
    NbdMatrix j_nbd(Index i) const;
    /// Phi(i+1,i)^T as an N.B.D. matrix (Lambda^T blocks, Phi^(1)T coupling).
    NbdMatrix phi_t_nbd(Index i) const;

    /// Checks split consistency against the dense model, per-block
    /// nonsingularity of Lambda, and the normality assumption on the leading
    /// order transition (per block, to 1e-10 relative).
    void validate() const;

private:
    template <typename T>
    static const T& at(const std::vector<T>& seq, Index i) {
        return seq.size() == 1 ? seq.front() : seq.at(static_cast<std::size_t>(i));
    }

    BlockStructure structure_;
    double eps_;
    StateSpaceModel dense_;
    std::vector<std::vector<Matrix>> lambda_;
    std::vector<Matrix> phi1_;
    std::vector<std::vector<Matrix>> qg0_;
    std::vector<Matrix> qg1_;
    std::vector<std::vector<Matrix>> j0_;
    std::vector<Matrix> j1_;
    NbdMatrix p00_;
};

} // namespace nbdkal
