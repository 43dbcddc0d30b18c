#pragma once

#include "wds/data_matrix.hpp"
#include "wds/pca.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace wds {

/// Registered ear point cloud, coordinates in millimeters. Row-major, so the
/// storage already is the interleaved [x1, y1, z1, x2, ...] flattening.
struct PointCloud {
    Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> coords; // n_v x (x, y, z)

    Eigen::Index n_vertices() const { return coords.rows(); }
};

/// Triangular faces shared by every registered cloud, stored 0-based.
struct MeshTopology {
    std::vector<std::array<std::int64_t, 3>> faces;
};

/// A batch of synthetic subjects: the drawn weights, the reconstructed
/// flattened clouds, and the seed that reproduces both byte-for-byte.
struct ShapeSampleBatch {
    WeightMatrix weights;
    DataMatrix shapes;
    std::uint64_t seed = 0;
};

/// Flatten to [x1, y1, z1, x2, y2, z2, ...] (interleaved per vertex).
/// Throws NonFinite.
Eigen::RowVectorXd flatten_cloud(const PointCloud& cloud);

/// Exact inverse of flatten_cloud. Throws DimensionMismatch if the length is
/// not a multiple of 3.
PointCloud unflatten_cloud(const Eigen::RowVectorXd& row);

/// Draw an n x k weight matrix, entry (j, i) from the zero-mean Gaussian with
/// variance model.variances[i]. Entry (j, i) is derived from the counter
/// (seed, j, i) alone, so any sub-rectangle and any parallel schedule
/// reproduce identical bytes. threads = 0 means auto.
WeightMatrix draw_weights(const PcaModel& model, Eigen::Index n, std::uint64_t seed,
                          unsigned threads = 1);

/// Reconstruct flattened clouds from weights: Y · basis + mean.
/// Throws DimensionMismatch.
DataMatrix synthesize_shapes(const PcaModel& model, const WeightMatrix& weights);

/// Convenience: draw_weights followed by synthesize_shapes.
ShapeSampleBatch sample_shapes(const PcaModel& model, Eigen::Index n, std::uint64_t seed,
                               unsigned threads = 1);

/// Per-vertex Euclidean distance (mm) between a flattened shape and the
/// model mean. Throws DimensionMismatch.
Eigen::VectorXd distance_to_mean(const PcaModel& model, const Eigen::RowVectorXd& shape);

/// Write a Wavefront OBJ ("v x y z" lines, then 1-based "f i j k" lines).
/// Optional per-vertex scalars go to the sidecar CSV "<path>.scalars.csv"
/// with header vertex_index,value. Coordinates are printed with 17
/// significant digits, so an import round-trip is bit-exact.
/// Throws IndexOutOfRange, FormatError (degenerate face), DimensionMismatch
/// and IoError.
void export_mesh(const PointCloud& cloud, const MeshTopology& topology,
                 const std::optional<Eigen::VectorXd>& scalars,
                 const std::filesystem::path& path);

/// Read back an OBJ written by export_mesh. Throws ParseError, IoError and
/// IndexOutOfRange.
PointCloud import_mesh(const std::filesystem::path& path, MeshTopology* topology = nullptr);

/// Topology interchange: CSV with header i,j,k and one 0-based triple per row.
void write_topology_csv(const MeshTopology& topology, const std::filesystem::path& path);
MeshTopology read_topology_csv(const std::filesystem::path& path);

} // namespace wds
