#include "wds/pca.hpp"

#include "wds/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace wds {

namespace {

// Flip a basis row so its largest-magnitude entry is positive; ties keep the
// lowest index.
void sign_normalize_row(Eigen::MatrixXd& m, Eigen::Index row) {
    Eigen::Index arg = 0;
    double best = std::abs(m(row, 0));
    for (Eigen::Index i = 1; i < m.cols(); ++i) {
        const double a = std::abs(m(row, i));
        if (a > best) {
            best = a;
            arg = i;
        }
    }
    if (m(row, arg) < 0.0) {
        m.row(row) = -m.row(row);
    }
}

// Two passes of modified Gram-Schmidt over the rows, in place. Only invoked
// when the retained spectrum is so spread that the Gram-mapped rows may have
// lost orthogonality beyond the 1e-10 contract.
void reorthonormalize_rows(Eigen::MatrixXd& basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < basis.rows(); ++j) {
            for (Eigen::Index p = 0; p < j; ++p) {
                basis.row(j) -= basis.row(j).dot(basis.row(p)) * basis.row(p);
            }
            basis.row(j) /= basis.row(j).norm();
        }
    }
}

} // namespace

PcaModel fit(const DataMatrix& data) {
    const Eigen::Index n = data.rows();
    const Eigen::Index d = data.cols();
    if (n < 2 || d < 1) {
        throw DegenerateData("fit: need at least 2 rows and 1 column");
    }
    if (!all_finite(data.values)) {
        throw NonFinite("fit: input contains NaN or Inf");
    }

    bool identical = true;
    for (Eigen::Index i = 1; i < n && identical; ++i) {
        identical = (data.values.row(i).array() == data.values.row(0).array()).all();
    }
    if (identical) {
        throw DegenerateData("fit: all rows identical (zero total variance)");
    }

    PcaModel model;
    model.mean = data.values.colwise().mean().transpose();

    Eigen::MatrixXd centered = data.values.rowwise() - model.mean.transpose();
    Eigen::MatrixXd gram = (centered * centered.transpose()) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw Error("fit: eigendecomposition did not converge");
    }
    const Eigen::VectorXd& eigvals = solver.eigenvalues();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return eigvals(a) > eigvals(b);
    });

    const double lambda_max = eigvals(order.front());
    if (!(lambda_max > 0.0)) {
        throw DegenerateData("fit: zero total variance");
    }
    const double cutoff = kRankCutRatio * lambda_max;

    Eigen::Index k = 0;
    const Eigen::Index k_max = std::min<Eigen::Index>(n - 1, d);
    while (k < k_max && eigvals(order[static_cast<std::size_t>(k)]) > cutoff) {
        ++k;
    }

    model.variances.resize(k);
    Eigen::MatrixXd selected(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        model.variances(j) = eigvals(order[static_cast<std::size_t>(j)]);
        selected.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
    }

    model.basis = selected.transpose() * centered;
    for (Eigen::Index j = 0; j < k; ++j) {
        model.basis.row(j) /= model.basis.row(j).norm();
    }

    // Mapped rows can lose orthogonality when the retained spectrum spans many
    // orders of magnitude; clean up only then so the common path stays a pure
    // Gram mapping.
    if (k > 1 && model.variances(k - 1) < 1e-5 * model.variances(0)) {
        reorthonormalize_rows(model.basis);
    }

    for (Eigen::Index j = 0; j < k; ++j) {
        sign_normalize_row(model.basis, j);
    }
    return model;
}

WeightMatrix transform(const PcaModel& model, const DataMatrix& data) {
    if (data.cols() != model.dim()) {
        throw DimensionMismatch("transform: data has " + std::to_string(data.cols()) +
                                " columns, model expects " + std::to_string(model.dim()));
    }
    WeightMatrix weights;
    weights.values = (data.values.rowwise() - model.mean.transpose()) * model.basis.transpose();
    return weights;
}

WeightMatrix truncate(const WeightMatrix& weights, Eigen::Index m) {
    const Eigen::Index k = weights.components();
    if (m < 0 || m > k) {
        throw RangeError("truncate: m = " + std::to_string(m) + " outside [0, " +
                         std::to_string(k) + "]");
    }
    WeightMatrix out;
    out.values = weights.values;
    out.values.rightCols(k - m).setZero();
    return out;
}

DataMatrix reconstruct(const PcaModel& model, const WeightMatrix& weights) {
    if (weights.components() != model.n_components()) {
        throw DimensionMismatch("reconstruct: weights have " +
                                std::to_string(weights.components()) +
                                " components, model has " +
                                std::to_string(model.n_components()));
    }
    DataMatrix out;
    out.values = weights.values * model.basis;
    out.values.rowwise() += model.mean.transpose();
    return out;
}

double cpv(const PcaModel& model, Eigen::Index m) {
    const Eigen::Index k = model.n_components();
    if (m < 0 || m > k) {
        throw RangeError("cpv: m = " + std::to_string(m) + " outside [0, " +
                         std::to_string(k) + "]");
    }
    // One running sum serves both numerator and denominator, so cpv(k) is
    // exactly 100 and cpv is non-decreasing in m.
    double acc = 0.0;
    double partial = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        acc += model.variances(j);
        if (j + 1 == m) {
            partial = acc;
        }
    }
    if (!(acc > 0.0)) {
        throw DegenerateData("cpv: model has zero total variance");
    }
    return 100.0 * partial / acc;
}

Eigen::Index components_for_cpv(const PcaModel& model, double threshold) {
    if (!(threshold > 0.0 && threshold <= 100.0)) {
        throw RangeError("components_for_cpv: threshold must lie in (0, 100]");
    }
    const Eigen::Index k = model.n_components();
    for (Eigen::Index m = 0; m <= k; ++m) {
        if (cpv(model, m) >= threshold) {
            return m;
        }
    }
    return k; // unreachable: cpv(k) == 100
}

} // namespace wds
