#include "wds/metrics.hpp"

#include "support/testutil.hpp"
#include "wds/error.hpp"
#include "wds/pca.hpp"

#include <doctest.h>

#include <cmath>

using wds::testing::random_data;
using wds::testing::random_matrix;

TEST_CASE("mse: identity, direct arithmetic, shape checks") {
    const Eigen::MatrixXd a = random_matrix(3, 4, 1);
    CHECK(wds::mse(a, a) == 0.0);

    Eigen::MatrixXd p(2, 2);
    Eigen::MatrixXd q(2, 2);
    p << 2.0, 0.0, 0.0, 2.0;
    q.setZero();
    CHECK(wds::mse(p, q) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(wds::mse(a, Eigen::MatrixXd::Zero(4, 3)), wds::DimensionMismatch);
    CHECK_THROWS_AS(wds::mse(Eigen::MatrixXd(), Eigen::MatrixXd()), wds::RangeError);
}

TEST_CASE("mse of the stacked mean against the 2-point training set") {
    wds::DataMatrix data;
    data.values.resize(2, 2);
    data.values << 1.0, 1.0, 3.0, 3.0;
    const wds::PcaModel model = wds::fit(data);

    Eigen::MatrixXd mean_stack(2, 2);
    mean_stack.rowwise() = model.mean.transpose();
    // Deviations are ±1 in every entry: (1+1+1+1)/4.
    CHECK(wds::mse(mean_stack, data.values) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mse symmetry, definiteness and quadratic scaling") {
    const Eigen::MatrixXd a = random_matrix(5, 7, 2);
    const Eigen::MatrixXd b = random_matrix(5, 7, 3);
    CHECK(wds::mse(a, b) == wds::mse(b, a));
    CHECK(wds::mse(a, b) > 0.0);
    CHECK(wds::mse(a, a) == 0.0);

    for (const double c : {2.0, -3.5, 0.25}) {
        CHECK(wds::mse(c * a, c * b) ==
              doctest::Approx(c * c * wds::mse(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("cpv_mse_check endpoints are exact") {
    const wds::DataMatrix data = random_data(8, 5, 4);
    const wds::PcaModel model = wds::fit(data);
    CHECK(wds::cpv_mse_check(model, data, 0) < 1e-10);
    CHECK(wds::cpv_mse_check(model, data, model.n_components()) < 1e-10);
}

TEST_CASE("cpv_mse_check residual below 1e-8 for every m") {
    const wds::DataMatrix data = random_data(10, 6, 5);
    const wds::PcaModel model = wds::fit(data);
    for (Eigen::Index m = 0; m <= model.n_components(); ++m) {
        CHECK(wds::cpv_mse_check(model, data, m) < 1e-8);
    }
}

TEST_CASE("error_curve: endpoints and strict decrease on training data") {
    const wds::DataMatrix data = random_data(9, 6, 6);
    const wds::PcaModel model = wds::fit(data);
    const Eigen::Index k = model.n_components();

    Eigen::MatrixXd mean_stack(data.rows(), data.cols());
    mean_stack.rowwise() = model.mean.transpose();

    const wds::ErrorCurve at_zero = wds::error_curve(model, data, {0});
    CHECK(at_zero.errors[0] == doctest::Approx(wds::mse(mean_stack, data.values)));
    const double total_variance = model.variances.sum();
    const double expected_baseline = total_variance * static_cast<double>(data.rows() - 1) /
                                     static_cast<double>(data.rows() * data.cols());
    CHECK(at_zero.errors[0] == doctest::Approx(expected_baseline).epsilon(1e-12));

    const wds::ErrorCurve at_k = wds::error_curve(model, data, {k});
    CHECK(at_k.errors[0] < 1e-12 * model.variances(0));

    std::vector<Eigen::Index> all_m;
    for (Eigen::Index m = 0; m <= k; ++m) {
        all_m.push_back(m);
    }
    const wds::ErrorCurve curve = wds::error_curve(model, data, all_m);
    for (std::size_t i = 1; i < curve.errors.size(); ++i) {
        CHECK(curve.errors[i] < curve.errors[i - 1]);
    }
}

TEST_CASE("error_curve rejects bad m lists") {
    const wds::DataMatrix data = random_data(6, 4, 7);
    const wds::PcaModel model = wds::fit(data);
    CHECK_THROWS_AS(wds::error_curve(model, data, {model.n_components() + 1}),
                    wds::RangeError);
    CHECK_THROWS_AS(wds::error_curve(model, data, {2, 1}), wds::RangeError);
    CHECK_THROWS_AS(wds::error_curve(model, data, {1, 1}), wds::RangeError);
}

TEST_CASE("training error curve is non-increasing across random datasets") {
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const wds::DataMatrix data = random_data(8, 11, seed);
        const wds::PcaModel model = wds::fit(data);
        std::vector<Eigen::Index> all_m;
        for (Eigen::Index m = 0; m <= model.n_components(); ++m) {
            all_m.push_back(m);
        }
        const wds::ErrorCurve curve = wds::error_curve(model, data, all_m);
        for (std::size_t i = 1; i < curve.errors.size(); ++i) {
            CHECK(curve.errors[i] <= curve.errors[i - 1]);
        }
    }
}
