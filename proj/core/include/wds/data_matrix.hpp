#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wds {

/// N x D matrix of row-vector subjects: flattened point clouds (millimeters)
/// or flattened log-magnitude PRTF sets (dB). Subject labels are optional;
/// when present there is exactly one per row.
struct DataMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> subject_ids;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

/// Principal-component weights, one row per subject, one column per retained
/// component of the model that produced it.
struct WeightMatrix {
    Eigen::MatrixXd values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index components() const { return values.cols(); }
};

bool all_finite(const Eigen::MatrixXd& m);

} // namespace wds
