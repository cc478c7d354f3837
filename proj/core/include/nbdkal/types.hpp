#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace nbdkal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A diagonal block failed the positive-definiteness pivot test.
/// Carries the offending block index so callers can report it.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(Index block, const std::string& context)
        : Error(context + ": diagonal block " + std::to_string(block) +
                " is not positive definite"),
          block_(block) {}
    Index block() const { return block_; }

private:
    Index block_;
};

/// Pixel measurement layouts that cannot distinguish the diagonal blocks.
class AliasingError : public Error {
public:
    using Error::Error;
};

/// A numerical invariant that the pipeline promises (PSD emission,
/// cross-form gain agreement, ...) was violated at run time.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Scalar-multiplication tally. Owned by the caller of each operation;
/// never global, so concurrent pipelines stay independent.
///
/// Counting conventions (the ones the closed forms in counts.hpp assume):
///   - block product (a x b)(b x c): a*b*c
///   - product filling only the lower triangle of a symmetric n x n result,
///     with an n x n left factor: n*n*(n+1)/2
///   - SPD block inverse via factorization: n^3/2
///   - recovering an SPD block from its stored inverse: n^3/2 + n^2
///   - additions, transposes and scalar rescalings: free
/// Stored as double; all values of interest are exactly representable.
struct MultCounter {
    double mults = 0.0;
    void add(double m) { mults += m; }
    void add(const MultCounter& other) { mults += other.mults; }
    void reset() { mults = 0.0; }
};

inline double relative_scale(const Matrix& m) {
    double n = m.norm();
    return n > 0.0 ? n : 1.0;
}

} // namespace nbdkal
