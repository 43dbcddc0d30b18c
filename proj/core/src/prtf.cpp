#include "wds/prtf.hpp"

#include "wds/error.hpp"

#include <cmath>
#include <string>

namespace wds {

PrtfTensor log_magnitude(const PrtfTensor& t) {
    if (t.scale == PrtfScale::Db) {
        throw AlreadyLogScale("log_magnitude: tensor is already in dB");
    }
    for (const double v : t.values) {
        if (v < 0.0) {
            throw NegativeMagnitude("log_magnitude: negative linear magnitude");
        }
    }
    PrtfTensor out = t;
    out.scale = PrtfScale::Db;
    for (double& v : out.values) {
        v = 20.0 * std::log10(std::max(v, kMagnitudeFloor));
    }
    return out;
}

Eigen::RowVectorXd flatten_prtf(const PrtfTensor& t, Eigen::Index subject) {
    if (t.scale != PrtfScale::Db) {
        throw ScaleError("flatten_prtf: tensor must be in dB");
    }
    if (subject < 0 || subject >= t.n_subjects) {
        throw IndexOutOfRange("flatten_prtf: subject " + std::to_string(subject) +
                              " outside [0, " + std::to_string(t.n_subjects) + ")");
    }
    const Eigen::Index len = t.n_freqs * t.n_dirs;
    // The in-memory layout is already direction-major per subject.
    return Eigen::Map<const Eigen::RowVectorXd>(
        t.values.data() + static_cast<std::ptrdiff_t>(subject * len), len);
}

Eigen::MatrixXd unflatten_prtf(const Eigen::RowVectorXd& row, Eigen::Index n_freqs,
                               Eigen::Index n_dirs) {
    if (n_freqs < 1 || n_dirs < 1 || row.size() != n_freqs * n_dirs) {
        throw DimensionMismatch("unflatten_prtf: row length " + std::to_string(row.size()) +
                                " does not equal n_freqs*n_dirs");
    }
    Eigen::MatrixXd spectra(n_freqs, n_dirs);
    for (Eigen::Index d = 0; d < n_dirs; ++d) {
        spectra.col(d) = row.segment(d * n_freqs, n_freqs).transpose();
    }
    return spectra;
}

DataMatrix to_data_matrix(const PrtfTensor& t) {
    if (t.scale != PrtfScale::Db) {
        throw ScaleError("to_data_matrix: tensor must be in dB");
    }
    DataMatrix out;
    out.values.resize(t.n_subjects, t.n_freqs * t.n_dirs);
    for (Eigen::Index s = 0; s < t.n_subjects; ++s) {
        out.values.row(s) = flatten_prtf(t, s);
    }
    out.subject_ids = t.subject_ids;
    return out;
}

} // namespace wds
