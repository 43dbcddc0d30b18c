#include "wds/crossval.hpp"

#include "wds/error.hpp"
#include "wds/io.hpp"
#include "wds/metrics.hpp"
#include "wds/rng.hpp"
#include "wds/threads.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace wds {

FoldPartition partition(Eigen::Index n, Eigen::Index k, std::uint64_t seed, FoldScheme scheme) {
    if (k < 2 || k > n) {
        throw RangeError("partition: need 2 <= k <= n (got k = " + std::to_string(k) +
                         ", n = " + std::to_string(n) + ")");
    }
    FoldPartition part;
    part.n_subjects = n;
    part.k_folds = k;
    part.seed = seed;
    part.assignments.resize(static_cast<std::size_t>(n));

    if (scheme == FoldScheme::Shuffled) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        SplitMix64 rng(seed);
        for (Eigen::Index i = n - 1; i > 0; --i) {
            const auto j = static_cast<Eigen::Index>(
                rng.next_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        // Deal round-robin: the first (n mod k) folds get the extra subject.
        for (Eigen::Index i = 0; i < n; ++i) {
            part.assignments[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
                static_cast<std::int32_t>(i % k);
        }
    } else {
        const Eigen::Index base = n / k;
        const Eigen::Index extra = n % k;
        Eigen::Index next = 0;
        for (Eigen::Index f = 0; f < k; ++f) {
            const Eigen::Index size = base + (f < extra ? 1 : 0);
            for (Eigen::Index i = 0; i < size; ++i) {
                part.assignments[static_cast<std::size_t>(next++)] =
                    static_cast<std::int32_t>(f);
            }
        }
    }
    return part;
}

void validate_partition(const FoldPartition& part) {
    if (part.k_folds < 2 || part.k_folds > part.n_subjects) {
        throw RangeError("partition: need 2 <= k <= n");
    }
    if (part.assignments.size() != static_cast<std::size_t>(part.n_subjects)) {
        throw DimensionMismatch("partition: assignment length does not match subject count");
    }
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(part.k_folds), 0);
    for (const std::int32_t f : part.assignments) {
        if (f < 0 || f >= part.k_folds) {
            throw RangeError("partition: fold index " + std::to_string(f) + " outside [0, " +
                             std::to_string(part.k_folds) + ")");
        }
        ++sizes[static_cast<std::size_t>(f)];
    }
    const auto [min_it, max_it] = std::minmax_element(sizes.begin(), sizes.end());
    if (*min_it == 0) {
        throw RangeError("partition: empty fold");
    }
    if (*max_it - *min_it > 1) {
        throw RangeError("partition: fold sizes differ by more than 1");
    }
}

namespace {

std::vector<Eigen::Index> fold_sizes(const FoldPartition& part) {
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(part.k_folds), 0);
    for (const std::int32_t f : part.assignments) {
        ++sizes[static_cast<std::size_t>(f)];
    }
    return sizes;
}

DataMatrix select_rows(const DataMatrix& data, const std::vector<Eigen::Index>& rows) {
    DataMatrix out;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.values.row(static_cast<Eigen::Index>(i)) = data.values.row(rows[i]);
    }
    if (!data.subject_ids.empty()) {
        out.subject_ids.reserve(rows.size());
        for (const Eigen::Index r : rows) {
            out.subject_ids.push_back(data.subject_ids[static_cast<std::size_t>(r)]);
        }
    }
    return out;
}

void check_fold_args(const DataMatrix& data, const FoldPartition& part, Eigen::Index fold) {
    if (part.n_subjects != data.rows()) {
        throw DimensionMismatch("fold: partition covers " + std::to_string(part.n_subjects) +
                                " subjects, data has " + std::to_string(data.rows()) + " rows");
    }
    if (fold < 0 || fold >= part.k_folds) {
        throw RangeError("fold index " + std::to_string(fold) + " outside [0, " +
                         std::to_string(part.k_folds) + ")");
    }
}

} // namespace

Eigen::Index max_retained(const FoldPartition& part) {
    const auto sizes = fold_sizes(part);
    const Eigen::Index largest_val = *std::max_element(sizes.begin(), sizes.end());
    return part.n_subjects - largest_val - 1; // smallest training size minus one
}

PcaModel fit_fold(const DataMatrix& data, const FoldPartition& part, Eigen::Index fold) {
    check_fold_args(data, part, fold);
    std::vector<Eigen::Index> train_rows;
    train_rows.reserve(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (part.assignments[static_cast<std::size_t>(i)] != fold) {
            train_rows.push_back(i);
        }
    }
    return fit(select_rows(data, train_rows));
}

FoldErrors run_fold(const DataMatrix& data, const FoldPartition& part, Eigen::Index fold,
                    const std::vector<Eigen::Index>& m_values) {
    check_fold_args(data, part, fold);
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> val_rows;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (part.assignments[static_cast<std::size_t>(i)] == fold) {
            val_rows.push_back(i);
        } else {
            train_rows.push_back(i);
        }
    }
    const auto train_size = static_cast<Eigen::Index>(train_rows.size());
    for (const Eigen::Index m : m_values) {
        if (m < 0 || m >= train_size) {
            throw RangeError("run_fold: m = " + std::to_string(m) +
                             " outside [0, train_size) with train_size = " +
                             std::to_string(train_size));
        }
    }

    const DataMatrix train = select_rows(data, train_rows);
    const DataMatrix val = select_rows(data, val_rows);

    const PcaModel model = fit(train);
    const WeightMatrix train_weights = transform(model, train);
    const WeightMatrix val_weights = transform(model, val);

    FoldErrors errors;
    errors.train_mse.reserve(m_values.size());
    errors.val_mse.reserve(m_values.size());
    for (const Eigen::Index m : m_values) {
        // The rank cut can leave fewer than train_size - 1 components; above
        // that rank the reconstruction is already full.
        const Eigen::Index effective = std::min(m, model.n_components());
        const DataMatrix train_rec = reconstruct(model, truncate(train_weights, effective));
        const DataMatrix val_rec = reconstruct(model, truncate(val_weights, effective));
        errors.train_mse.push_back(mse(train_rec.values, train.values));
        errors.val_mse.push_back(mse(val_rec.values, val.values));
    }
    return errors;
}

CrossValReport run_crossval(const DataMatrix& data, Eigen::Index k_folds, std::uint64_t seed,
                            const std::vector<Eigen::Index>& m_values, unsigned threads,
                            FoldScheme scheme) {
    CrossValReport report;
    report.partition = partition(data.rows(), k_folds, seed, scheme);
    report.m_values = m_values;

    const Eigen::Index m_cap = max_retained(report.partition);
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (m_values[i] < 0 || m_values[i] > m_cap) {
            throw RangeError("run_crossval: m = " + std::to_string(m_values[i]) +
                             " outside [0, " + std::to_string(m_cap) + "]");
        }
        if (i > 0 && m_values[i] <= m_values[i - 1]) {
            throw RangeError("run_crossval: m values must be strictly increasing");
        }
    }

    report.folds.resize(static_cast<std::size_t>(k_folds));
    const unsigned workers =
        std::min<unsigned>(effective_threads(threads), static_cast<unsigned>(k_folds));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto run_range = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index f = begin; f < end; ++f) {
            try {
                report.folds[static_cast<std::size_t>(f)] =
                    run_fold(data, report.partition, f, m_values);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };

    if (workers <= 1) {
        run_range(0, k_folds);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const Eigen::Index chunk = (k_folds + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const Eigen::Index begin = static_cast<Eigen::Index>(w) * chunk;
            const Eigen::Index end = std::min<Eigen::Index>(begin + chunk, k_folds);
            if (begin >= end) {
                break;
            }
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    // Fold-averaged curves, accumulated in fold-index order so the result is
    // independent of the execution schedule.
    report.avg_train.assign(m_values.size(), 0.0);
    report.avg_val.assign(m_values.size(), 0.0);
    for (const FoldErrors& fold : report.folds) {
        for (std::size_t i = 0; i < m_values.size(); ++i) {
            report.avg_train[i] += fold.train_mse[i];
            report.avg_val[i] += fold.val_mse[i];
        }
    }
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        report.avg_train[i] /= static_cast<double>(k_folds);
        report.avg_val[i] /= static_cast<double>(k_folds);
    }
    return report;
}

void emit_report(const CrossValReport& report, const std::filesystem::path& path) {
    std::string out = "fold,m,train_mse,val_mse\n";
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        for (std::size_t i = 0; i < report.m_values.size(); ++i) {
            out += std::to_string(f);
            out += ',';
            out += std::to_string(report.m_values[i]);
            out += ',';
            out += format_g17(report.folds[f].train_mse[i]);
            out += ',';
            out += format_g17(report.folds[f].val_mse[i]);
            out += '\n';
        }
    }
    for (std::size_t i = 0; i < report.m_values.size(); ++i) {
        out += "-1,";
        out += std::to_string(report.m_values[i]);
        out += ',';
        out += format_g17(report.avg_train[i]);
        out += ',';
        out += format_g17(report.avg_val[i]);
        out += '\n';
    }
    atomic_write(path, out);
}

} // namespace wds
