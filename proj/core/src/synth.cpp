#include "wds/synth.hpp"

#include "wds/error.hpp"
#include "wds/rng.hpp"

#include <cmath>
#include <string>

namespace wds {

namespace {

void validate(const SynthSpec& spec) {
    if (spec.n_rows < 2 || spec.n_cols < 1) {
        throw RangeError("synth: need n_rows >= 2 and n_cols >= 1");
    }
    if (spec.rank < 0 || spec.rank > std::min(spec.n_rows - 1, spec.n_cols)) {
        throw RangeError("synth: rank must lie in [0, min(n_rows - 1, n_cols)]");
    }
    if (static_cast<Eigen::Index>(spec.singular_spectrum.size()) != spec.rank) {
        throw RangeError("synth: spectrum has " + std::to_string(spec.singular_spectrum.size()) +
                         " entries, rank is " + std::to_string(spec.rank));
    }
    for (std::size_t i = 0; i < spec.singular_spectrum.size(); ++i) {
        if (!(spec.singular_spectrum[i] > 0.0)) {
            throw RangeError("synth: spectrum entries must be positive");
        }
        if (i > 0 && spec.singular_spectrum[i] > spec.singular_spectrum[i - 1]) {
            throw RangeError("synth: spectrum must be descending");
        }
    }
    if (spec.noise_std < 0.0) {
        throw RangeError("synth: noise_std must be non-negative");
    }
}

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

} // namespace

SynthResult generate(const SynthSpec& spec) {
    validate(spec);
    const Eigen::Index n = spec.n_rows;
    const Eigen::Index d = spec.n_cols;
    const Eigen::Index r = spec.rank;

    SplitMix64 rng(spec.seed);

    SynthResult out;
    out.ground_truth.mean.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out.ground_truth.mean(i) = rng.next_gaussian();
    }

    // Seeded orthonormal basis: Gaussian rows, two Gram-Schmidt passes.
    Eigen::MatrixXd basis(r, d);
    for (Eigen::Index j = 0; j < r; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            basis(j, i) = rng.next_gaussian();
        }
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < r; ++j) {
            for (Eigen::Index p = 0; p < j; ++p) {
                basis.row(j) -= basis.row(j).dot(basis.row(p)) * basis.row(p);
            }
            const double norm = basis.row(j).norm();
            if (!(norm > 0.0)) {
                throw Error("synth: degenerate random basis");
            }
            basis.row(j) /= norm;
        }
    }
    for (Eigen::Index j = 0; j < r; ++j) {
        sign_normalize_row(basis, j);
    }
    out.ground_truth.basis = basis;
    out.ground_truth.variances.resize(r);
    for (Eigen::Index j = 0; j < r; ++j) {
        out.ground_truth.variances(j) =
            spec.singular_spectrum[static_cast<std::size_t>(j)] *
            spec.singular_spectrum[static_cast<std::size_t>(j)];
    }

    Eigen::MatrixXd weights(n, r);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
            weights(j, i) = rng.next_gaussian() *
                            spec.singular_spectrum[static_cast<std::size_t>(i)];
        }
    }

    out.data.values = weights * basis;
    out.data.values.rowwise() += out.ground_truth.mean.transpose();
    if (spec.noise_std > 0.0) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < d; ++i) {
                out.data.values(j, i) += spec.noise_std * rng.next_gaussian();
            }
        }
    }
    return out;
}

} // namespace wds
