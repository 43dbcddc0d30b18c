#pragma once

#include "wds/crossval.hpp"
#include "wds/data_matrix.hpp"
#include "wds/metrics.hpp"
#include "wds/pca.hpp"
#include "wds/prtf.hpp"

#include <filesystem>
#include <string>

namespace wds {

// Binary container formats (see FORMATS.md for the byte layouts). All fields
// are little-endian; float64 payloads round-trip bit-exactly, signed zeros
// included. Readers fail closed: wrong magic, wrong version, size mismatch
// or trailing bytes raise FormatError without partially populating anything.

/// `.wdsm` matrix container with optional subject-ID block.
void write_matrix(const DataMatrix& m, const std::filesystem::path& path);
DataMatrix read_matrix(const std::filesystem::path& path);
std::string matrix_to_bytes(const DataMatrix& m);
DataMatrix matrix_from_bytes(const std::string& bytes);

/// `.wdsp` PCA model container.
void write_model(const PcaModel& model, const std::filesystem::path& path);
PcaModel read_model(const std::filesystem::path& path);
std::string model_to_bytes(const PcaModel& model);
PcaModel model_from_bytes(const std::string& bytes);

/// `.wdst` PRTF tensor container (scale flag, grids, values).
void write_tensor(const PrtfTensor& t, const std::filesystem::path& path);
PrtfTensor read_tensor(const std::filesystem::path& path);
std::string tensor_to_bytes(const PrtfTensor& t);
PrtfTensor tensor_from_bytes(const std::string& bytes);

/// Fold partition as CSV subject_index,fold. The seed is not part of the
/// file; a read-back partition carries seed 0.
void write_partition(const FoldPartition& part, const std::filesystem::path& path);
FoldPartition read_partition(const std::filesystem::path& path);

/// Rectangular numeric CSV, optional header row, rows = subjects.
/// Throws ParseError with the offending row/column.
DataMatrix read_csv_matrix(const std::filesystem::path& path);

/// Error curve as CSV m,mse with 17 significant digits.
void write_error_curve(const ErrorCurve& curve, const std::filesystem::path& path);

/// Shortest decimal text that round-trips a float64 (printf %.17g).
std::string format_g17(double v);

/// Write bytes to a temporary file in the target directory, then rename onto
/// `path`. The destination never holds a partial file. Throws IoError.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

/// Whole-file read. Throws IoError.
std::string read_file(const std::filesystem::path& path);

} // namespace wds
