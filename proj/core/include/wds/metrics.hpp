#pragma once

#include "wds/data_matrix.hpp"
#include "wds/pca.hpp"

#include <Eigen/Dense>

#include <vector>

namespace wds {

/// Reconstruction error as a function of the retained-component count.
/// Units are dB² for PRTF data and mm² for shapes.
struct ErrorCurve {
    std::vector<Eigen::Index> m_values; // strictly increasing
    std::vector<double> errors;
};

/// Mean of squared entry-wise differences between two equal-shaped matrices.
/// Throws DimensionMismatch (shape mismatch) and RangeError (empty operands).
double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Residual of the identity linking retained variance to reconstruction
/// error on the training set:
///   |cpv(m)/100 - (1 - mse(X̃⁽ᵐ⁾, X) / mse(X̄, X))|
/// For a model fitted on `data` this is below 1e-8 for every m.
double cpv_mse_check(const PcaModel& model, const DataMatrix& data, Eigen::Index m);

/// Truncate-reconstruct-mse against `data` for each m. On training data the
/// curve is non-increasing in m.
ErrorCurve error_curve(const PcaModel& model, const DataMatrix& data,
                       const std::vector<Eigen::Index>& m_values);

} // namespace wds
