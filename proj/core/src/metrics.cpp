#include "wds/metrics.hpp"

#include "wds/error.hpp"

#include <cmath>
#include <string>

namespace wds {

double mse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("mse: shapes " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()) + " differ");
    }
    if (a.size() == 0) {
        throw RangeError("mse: empty operands");
    }
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double cpv_mse_check(const PcaModel& model, const DataMatrix& data, Eigen::Index m) {
    const WeightMatrix weights = transform(model, data);
    const DataMatrix approx = reconstruct(model, truncate(weights, m));

    Eigen::MatrixXd mean_stack(data.rows(), data.cols());
    mean_stack.rowwise() = model.mean.transpose();

    const double baseline = mse(mean_stack, data.values);
    const double residual = mse(approx.values, data.values);

    const double lhs = cpv(model, m) / 100.0;
    const double rhs = 1.0 - residual / baseline;
    return std::abs(lhs - rhs);
}

ErrorCurve error_curve(const PcaModel& model, const DataMatrix& data,
                       const std::vector<Eigen::Index>& m_values) {
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (m_values[i] < 0 || m_values[i] > model.n_components()) {
            throw RangeError("error_curve: m = " + std::to_string(m_values[i]) +
                             " outside [0, " + std::to_string(model.n_components()) + "]");
        }
        if (i > 0 && m_values[i] <= m_values[i - 1]) {
            throw RangeError("error_curve: m values must be strictly increasing");
        }
    }
    const WeightMatrix weights = transform(model, data);
    ErrorCurve curve;
    curve.m_values = m_values;
    curve.errors.reserve(m_values.size());
    for (const Eigen::Index m : m_values) {
        const DataMatrix approx = reconstruct(model, truncate(weights, m));
        curve.errors.push_back(mse(approx.values, data.values));
    }
    return curve;
}

} // namespace wds
