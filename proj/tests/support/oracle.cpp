#include "support/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace wds::testing {

void jacobi_symmetric(Eigen::MatrixXd a, Eigen::VectorXd& eigenvalues,
                      Eigen::MatrixXd& eigenvectors) {
    const Eigen::Index n = a.rows();
    eigenvectors = Eigen::MatrixXd::Identity(n, n);
    const double scale = a.norm();

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off <= 1e-34 * scale * scale) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index i = 0; i < n; ++i) { // A <- A J
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) { // A <- Jᵀ A
                    const double api = a(p, i);
                    const double aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (Eigen::Index i = 0; i < n; ++i) { // V <- V J
                    const double vip = eigenvectors(i, p);
                    const double viq = eigenvectors(i, q);
                    eigenvectors(i, p) = c * vip - s * viq;
                    eigenvectors(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    eigenvalues.resize(n);
    Eigen::MatrixXd sorted(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        eigenvalues(j) = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
        sorted.col(j) = eigenvectors.col(order[static_cast<std::size_t>(j)]);
    }
    eigenvectors = sorted;
}

ReferencePca reference_pca(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();

    ReferencePca ref;
    ref.mean = x.colwise().mean().transpose();
    Eigen::MatrixXd centered = x.rowwise() - ref.mean.transpose();
    Eigen::MatrixXd covariance =
        (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    jacobi_symmetric(covariance, eigenvalues, eigenvectors);

    const double cutoff = 1e-12 * eigenvalues(0);
    Eigen::Index k = 0;
    const Eigen::Index cap = std::min<Eigen::Index>(n - 1, d);
    while (k < cap && eigenvalues(k) > cutoff) {
        ++k;
    }
    ref.variances = eigenvalues.head(k);
    ref.basis = eigenvectors.leftCols(k).transpose();
    return ref;
}

} // namespace wds::testing
