#pragma once

#include "wds/data_matrix.hpp"

#include <Eigen/Dense>

namespace wds {

/// Mean-centered PCA model. Basis rows are unit-norm, mutually orthogonal
/// eigendirections ordered by descending explained variance. Each row is
/// sign-normalized: its largest-magnitude entry is positive (ties broken by
/// lowest index), which makes fitted models byte-deterministic.
struct PcaModel {
    Eigen::VectorXd mean;       // length D
    Eigen::VectorXd variances;  // length k, descending, all positive
    Eigen::MatrixXd basis;      // k x D, orthonormal rows

    Eigen::Index dim() const { return mean.size(); }
    Eigen::Index n_components() const { return variances.size(); }
};

/// Components whose variance does not exceed this fraction of the leading
/// variance are discarded at fit time.
inline constexpr double kRankCutRatio = 1e-12;

/// Fit a PCA model to row-vector subjects. The decomposition is computed via
/// the N x N Gram matrix of the centered data (never the D x D covariance):
/// Gram eigenvectors v map to basis rows u = vᵀ·Xc / ‖vᵀ·Xc‖ with identical
/// spectrum. Variances carry the 1/(N-1) covariance normalization. At most
/// N-1 components are retained.
///
/// Throws DegenerateData (fewer than 2 rows, or zero total variance) and
/// NonFinite (NaN/Inf in the input).
PcaModel fit(const DataMatrix& data);

/// Project rows onto the model basis: Y = (X - mean) · basisᵀ. Applies to
/// training and held-out data alike. Throws DimensionMismatch.
WeightMatrix transform(const PcaModel& model, const DataMatrix& data);

/// Keep the first m weight columns, zero the rest. m = 0 zeroes everything.
/// Throws RangeError if m is outside [0, k].
WeightMatrix truncate(const WeightMatrix& weights, Eigen::Index m);

/// Invert the projection: X̃ = Y · basis + mean. Throws DimensionMismatch.
DataMatrix reconstruct(const PcaModel& model, const WeightMatrix& weights);

/// Cumulative percentage of total variance retained by the first m
/// components. cpv(0) = 0, cpv(k) = 100 exactly, non-decreasing in m.
/// Throws RangeError.
double cpv(const PcaModel& model, Eigen::Index m);

/// Smallest m with cpv(model, m) >= threshold, threshold in (0, 100].
/// Throws RangeError.
Eigen::Index components_for_cpv(const PcaModel& model, double threshold);

} // namespace wds
