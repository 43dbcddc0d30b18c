#pragma once

#include "wds/data_matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace wds {

enum class PrtfScale : std::uint8_t {
    Linear = 0, // |PRTF| magnitudes, all >= 0
    Db = 1,     // 20·log10 magnitudes
};

/// Per-subject n_f x n_d PRTF spectra with their frequency and direction
/// grids. Values are stored subject-major, then direction-major, then
/// frequency, the same layout the .wdst container uses, so a subject's
/// flattened row is one contiguous block. Subject labels live only in
/// memory; the container does not carry them.
struct PrtfTensor {
    PrtfScale scale = PrtfScale::Linear;
    Eigen::Index n_subjects = 0;
    Eigen::Index n_freqs = 0;
    Eigen::Index n_dirs = 0;
    Eigen::VectorXd freqs_hz;                       // n_f, strictly increasing
    Eigen::Matrix<double, Eigen::Dynamic, 2> directions; // n_d x (azimuth°, elevation°)
    std::vector<double> values;                     // index ((s*n_d)+d)*n_f + f
    std::vector<std::string> subject_ids;           // empty or one per subject

    double value(Eigen::Index subject, Eigen::Index freq, Eigen::Index dir) const {
        return values[static_cast<std::size_t>(((subject * n_dirs) + dir) * n_freqs + freq)];
    }
    double& value(Eigen::Index subject, Eigen::Index freq, Eigen::Index dir) {
        return values[static_cast<std::size_t>(((subject * n_dirs) + dir) * n_freqs + freq)];
    }
};

/// Linear magnitudes below this floor are clamped before taking the log, so
/// a zero magnitude maps to -200 dB instead of -inf.
inline constexpr double kMagnitudeFloor = 1e-10;

/// Entry-wise 20·log10(max(value, floor)). Input must be linear-scale with
/// non-negative values. Throws AlreadyLogScale and NegativeMagnitude.
PrtfTensor log_magnitude(const PrtfTensor& t);

/// Flatten one subject's n_f x n_d spectra to a row of length n_f·n_d,
/// direction-major: element d·n_f + f. Requires dB scale.
/// Throws ScaleError and IndexOutOfRange.
Eigen::RowVectorXd flatten_prtf(const PrtfTensor& t, Eigen::Index subject);

/// Invert flatten_prtf: row of length n_f·n_d back to an n_f x n_d matrix
/// indexed (frequency, direction). Throws DimensionMismatch.
Eigen::MatrixXd unflatten_prtf(const Eigen::RowVectorXd& row, Eigen::Index n_freqs,
                               Eigen::Index n_dirs);

/// Stack all subjects' flattened rows into an N x (n_f·n_d) matrix, subject
/// order and labels preserved. Requires dB scale. Throws ScaleError.
DataMatrix to_data_matrix(const PrtfTensor& t);

} // namespace wds
