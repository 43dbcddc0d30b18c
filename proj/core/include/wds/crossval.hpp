#pragma once

#include "wds/data_matrix.hpp"
#include "wds/pca.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wds {

enum class FoldScheme {
    Shuffled,   // seeded uniform shuffle, dealt round-robin
    Contiguous, // consecutive index blocks, for reproduction attempts
};

/// Disjoint fold assignment covering all N subjects. Fold sizes differ by at
/// most one; the first (N mod K) folds hold the extra subject.
struct FoldPartition {
    Eigen::Index n_subjects = 0;
    Eigen::Index k_folds = 0;
    std::vector<std::int32_t> assignments; // length N, values in [0, K)
    std::uint64_t seed = 0;
};

/// Build a partition of n subjects into k folds. Throws RangeError unless
/// 2 <= k <= n.
FoldPartition partition(Eigen::Index n, Eigen::Index k, std::uint64_t seed,
                        FoldScheme scheme = FoldScheme::Shuffled);

/// Check the FoldPartition invariants; throws on violation.
void validate_partition(const FoldPartition& part);

/// Per-fold training and validation MSE, parallel to the m list they were
/// computed for.
struct FoldErrors {
    std::vector<double> train_mse;
    std::vector<double> val_mse;
};

/// Largest admissible retained-component count for a sweep over all folds:
/// min over folds of (training size - 1).
Eigen::Index max_retained(const FoldPartition& part);

/// Fit a PCA model on the training rows of one fold. Validation rows never
/// enter the fit. Throws RangeError, DimensionMismatch, DegenerateData.
PcaModel fit_fold(const DataMatrix& data, const FoldPartition& part, Eigen::Index fold);

/// One fold: fit on the training rows, project training and validation rows
/// with the training mean and basis, reconstruct with m retained components,
/// and compare each reconstruction to its own source matrix. m may reach
/// train_size - 1; above the fitted rank it reconstructs at full rank.
FoldErrors run_fold(const DataMatrix& data, const FoldPartition& part, Eigen::Index fold,
                    const std::vector<Eigen::Index>& m_values);

/// All folds plus the fold-averaged error curves. Deterministic given
/// (data, k_folds, seed) regardless of fold execution order.
struct CrossValReport {
    FoldPartition partition;
    std::vector<Eigen::Index> m_values;
    std::vector<FoldErrors> folds;  // size K, fold-index order
    std::vector<double> avg_train;  // arithmetic mean across folds, per m
    std::vector<double> avg_val;
};

/// Run the full K-fold cross-validation. Folds are independent and run on up
/// to `threads` workers (0 = auto); the report is assembled in fold order.
/// An empty m list yields an empty report (the CLI generates the full sweep).
CrossValReport run_crossval(const DataMatrix& data, Eigen::Index k_folds, std::uint64_t seed,
                            const std::vector<Eigen::Index>& m_values, unsigned threads = 1,
                            FoldScheme scheme = FoldScheme::Shuffled);

/// CSV with header fold,m,train_mse,val_mse; per-fold rows first, then the
/// fold averages as fold = -1 rows. Floats carry 17 significant digits.
void emit_report(const CrossValReport& report, const std::filesystem::path& path);

} // namespace wds
