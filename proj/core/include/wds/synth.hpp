#pragma once

#include "wds/data_matrix.hpp"
#include "wds/pca.hpp"

#include <cstdint>
#include <vector>

namespace wds {

/// Recipe for a synthetic dataset with a known generating model: mean plus a
/// rank-r term with the given singular spectrum, plus i.i.d. Gaussian noise.
struct SynthSpec {
    Eigen::Index n_rows = 0;
    Eigen::Index n_cols = 0;
    Eigen::Index rank = 0;
    std::vector<double> singular_spectrum; // length rank, positive descending
    double noise_std = 0.0;
    std::uint64_t seed = 0;
};

struct SynthResult {
    DataMatrix data;
    PcaModel ground_truth; // exact generating mean, basis, variances s_i²
};

/// Generate data X[j] = mean + Σ_i w[j,i]·s_i·u_i + noise, with a seeded
/// orthonormal basis u and unit Gaussian weights w. Deterministic given the
/// seed. Throws RangeError on invalid specs.
SynthResult generate(const SynthSpec& spec);

} // namespace wds
