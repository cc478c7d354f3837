#pragma once

#include <optional>

#include "nbdkal/nbd_model.hpp"
#include "nbdkal/stabilize.hpp"

namespace nbdkal {

enum class StabilizerKind { T1, T2, Tb, SpectralExact, SpectralFirstOrder };

/// Stabilized covariance emitted by the filter: an L D^{-1} L^T factor for
/// T1/T2/Tb, a dense PSD matrix for the spectral modes.
class StabilizedCov {
public:
    static StabilizedCov from_factor(StabilizedFactor f);
    static StabilizedCov from_dense(Matrix m);

    bool factored() const { return factor_.has_value(); }
    const StabilizedFactor& factor() const;
    Vector apply(const Vector& v) const;
    Matrix value() const;

private:
    std::optional<StabilizedFactor> factor_;
    std::optional<Matrix> dense_;
};

/// Applies the configured stabilizing transformation. T2/Tb operate on the
/// order-1 filter covariance with a zero second order part.
StabilizedCov stabilize_covariance(const NbdMatrix& p, StabilizerKind kind,
                                   MultCounter& counter);

struct NbdFilterOptions {
    StabilizerKind stabilizer = StabilizerKind::T1;
    /// Off: the state update uses the raw truncation instead of T[P]. The
    /// propagated (P^(0), P^(1)) recursion is identical either way; the
    /// stabilizing terms are recomputed at every assimilation and never
    /// propagated.
    bool stabilize = true;
};

struct NbdFilterState {
    Vector x;
    NbdMatrix p;
    std::optional<StabilizedCov> p_stab; // rebuilt at each assimilation
};

/// Time evolution update: the state with the full transition (exact), the
/// covariance orders blockwise (zeroth exactly per block, first order with
/// all four coupling terms).
NbdFilterState nbd_predict(const NbdFilterState& state, const NbdModel& model, Index i,
                           MultCounter& counter);

/// Measurement update: exact zeroth order block solve, first order
/// correction through the inverse-update sandwich, stabilization, then the
/// exact state assimilation through the factored covariance.
NbdFilterState nbd_update(const NbdFilterState& state, const NbdModel& model, Index i,
                          const Vector& y, MultCounter& counter,
                          const NbdFilterOptions& options = {});

struct NbdStep {
    Vector x_pred, x_filt;
    NbdMatrix p_pred, p_filt;
    Vector innovation;
    std::optional<StabilizedCov> stab_filt;
    double cov_mults = 0;
};

struct NbdTrajectory {
    Vector x0;
    NbdMatrix p00;
    std::vector<NbdStep> steps;
    NbdFilterOptions options;
    double cov_mults = 0;

    Index final_time() const { return static_cast<Index>(steps.size()); }
    const NbdStep& step(Index i) const { return steps.at(static_cast<std::size_t>(i - 1)); }
    const Vector& x_filt(Index i) const { return i == 0 ? x0 : step(i).x_filt; }
    const Vector& x_pred(Index i) const { return i == 0 ? x0 : step(i).x_pred; }
    const NbdMatrix& p_filt(Index i) const { return i == 0 ? p00 : step(i).p_filt; }
    /// p_pred(0) is the prior (no measurement at time 0).
    const NbdMatrix& p_pred(Index i) const { return i == 0 ? p00 : step(i).p_pred; }
    const Vector& innovation(Index i) const { return step(i).innovation; }
};

NbdTrajectory run_nbd_filter(const NbdModel& model, const std::vector<Vector>& measurements,
                             const NbdFilterOptions& options = {});

} // namespace nbdkal
