// wds: snapshot-PCA toolkit for wide registered datasets (flattened point
// clouds and log-magnitude PRTF spectra). Every subcommand delegates to one
// core operation; outputs are written atomically (temp file + rename).

#include "wds/crossval.hpp"
#include "wds/data_matrix.hpp"
#include "wds/error.hpp"
#include "wds/io.hpp"
#include "wds/metrics.hpp"
#include "wds/pca.hpp"
#include "wds/prtf.hpp"
#include "wds/shape.hpp"
#include "wds/synth.hpp"
#include "wds/threads.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

unsigned threads_from_env() {
    const char* env = std::getenv("WDS_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0; // auto
    }
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
        return 0;
    }
    return static_cast<unsigned>(v);
}

// Accept either a .wdsm container or a numeric CSV, decided by the magic.
wds::DataMatrix load_matrix_auto(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw wds::IoError("cannot open " + path);
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::string(magic, 4) == "WDSM") {
        return wds::read_matrix(path);
    }
    return wds::read_csv_matrix(path);
}

std::vector<double> parse_spectrum(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) {
            comma = text.size();
        }
        const std::string token = text.substr(start, comma - start);
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
            throw CLI::ValidationError("--spectrum", "bad entry \"" + token + "\"");
        }
        values.push_back(v);
        if (comma == text.size()) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

void cmd_fit(const std::string& input, const std::string& out) {
    const wds::DataMatrix data = load_matrix_auto(input);
    const wds::PcaModel model = wds::fit(data);
    wds::write_model(model, out);
    std::cerr << "fitted " << data.rows() << "x" << data.cols() << " -> k = "
              << model.n_components() << ", wrote " << out << "\n";
}

void cmd_cpv(const std::string& model_path, const std::string& out,
             std::optional<double> threshold) {
    const wds::PcaModel model = wds::read_model(model_path);
    std::string csv = "m,cpv\n";
    for (Eigen::Index m = 0; m <= model.n_components(); ++m) {
        csv += std::to_string(m);
        csv += ',';
        csv += wds::format_g17(wds::cpv(model, m));
        csv += '\n';
    }
    wds::atomic_write(out, csv);
    std::cerr << "wrote " << out << "\n";
    if (threshold) {
        std::cout << wds::components_for_cpv(model, *threshold) << "\n";
    }
}

void cmd_reduce(const std::string& model_path, const std::string& input, long long m,
                const std::string& out) {
    const wds::PcaModel model = wds::read_model(model_path);
    const wds::DataMatrix data = load_matrix_auto(input);
    const wds::WeightMatrix weights = wds::transform(model, data);
    wds::DataMatrix reduced =
        wds::reconstruct(model, wds::truncate(weights, static_cast<Eigen::Index>(m)));
    reduced.subject_ids = data.subject_ids;
    wds::write_matrix(reduced, out);
    std::cout << "mse=" << wds::format_g17(wds::mse(reduced.values, data.values)) << "\n";
}

void cmd_sample(const std::string& model_path, long long count, std::uint64_t seed,
                const std::string& out_shapes, const std::string& out_weights) {
    const wds::PcaModel model = wds::read_model(model_path);
    const wds::ShapeSampleBatch batch = wds::sample_shapes(
        model, static_cast<Eigen::Index>(count), seed, threads_from_env());
    wds::write_matrix(batch.shapes, out_shapes);
    if (!out_weights.empty()) {
        wds::DataMatrix weights;
        weights.values = batch.weights.values;
        wds::write_matrix(weights, out_weights);
    }
    std::cerr << "sampled " << count << " shapes (seed " << seed << "), wrote "
              << out_shapes << "\n";
}

void cmd_export_mesh(const std::string& shapes_path, long long row,
                     const std::string& topology_path, const std::string& out,
                     bool with_distance, const std::string& model_path) {
    const wds::DataMatrix shapes = wds::read_matrix(shapes_path);
    if (row < 0 || row >= shapes.rows()) {
        throw wds::IndexOutOfRange("row " + std::to_string(row) + " outside [0, " +
                                   std::to_string(shapes.rows()) + ")");
    }
    const Eigen::RowVectorXd flat = shapes.values.row(static_cast<Eigen::Index>(row));
    const wds::PointCloud cloud = wds::unflatten_cloud(flat);
    const wds::MeshTopology topology = wds::read_topology_csv(topology_path);

    std::optional<Eigen::VectorXd> scalars;
    if (with_distance) {
        const wds::PcaModel model = wds::read_model(model_path);
        scalars = wds::distance_to_mean(model, flat);
    }
    wds::export_mesh(cloud, topology, scalars, out);
    std::cerr << "wrote " << out << (with_distance ? " (+ scalar sidecar)" : "") << "\n";
}

void cmd_crossval(const std::string& input, long long folds, std::uint64_t seed,
                  long long m_step, const std::string& out, bool contiguous) {
    const wds::DataMatrix data = load_matrix_auto(input);
    const wds::FoldScheme scheme =
        contiguous ? wds::FoldScheme::Contiguous : wds::FoldScheme::Shuffled;

    // Probe the partition to size the m sweep: 0, step, 2*step, ..., and
    // always the full rank.
    const wds::FoldPartition part =
        wds::partition(data.rows(), static_cast<Eigen::Index>(folds), seed, scheme);
    const Eigen::Index m_cap = wds::max_retained(part);
    std::vector<Eigen::Index> m_values;
    for (Eigen::Index m = 0; m <= m_cap; m += static_cast<Eigen::Index>(m_step)) {
        m_values.push_back(m);
    }
    if (m_values.back() != m_cap) {
        m_values.push_back(m_cap);
    }

    const wds::CrossValReport report =
        wds::run_crossval(data, static_cast<Eigen::Index>(folds), seed, m_values,
                          threads_from_env(), scheme);
    wds::emit_report(report, out);
    std::cerr << "wrote " << out << "\n";
    std::cout << "max_m=" << m_cap
              << " full_rank_avg_val_mse=" << wds::format_g17(report.avg_val.back())
              << "\n";
}

void cmd_synth(long long rows, long long cols, long long rank, const std::string& spectrum,
               double noise, std::uint64_t seed, const std::string& out,
               const std::string& out_truth) {
    wds::SynthSpec spec;
    spec.n_rows = static_cast<Eigen::Index>(rows);
    spec.n_cols = static_cast<Eigen::Index>(cols);
    spec.rank = static_cast<Eigen::Index>(rank);
    spec.singular_spectrum = spectrum.empty() ? std::vector<double>{} : parse_spectrum(spectrum);
    if (static_cast<long long>(spec.singular_spectrum.size()) != rank) {
        throw CLI::ValidationError("--spectrum", "expected " + std::to_string(rank) +
                                                     " entries for --rank " +
                                                     std::to_string(rank));
    }
    spec.noise_std = noise;
    spec.seed = seed;
    const wds::SynthResult result = wds::generate(spec);
    wds::write_matrix(result.data, out);
    wds::write_model(result.ground_truth, out_truth);
    std::cerr << "wrote " << out << " and " << out_truth << "\n";
}

void cmd_prtf_flatten(const std::string& tensor_path, const std::string& out) {
    wds::PrtfTensor tensor = wds::read_tensor(tensor_path);
    if (tensor.scale == wds::PrtfScale::Linear) {
        tensor = wds::log_magnitude(tensor);
    }
    const wds::DataMatrix matrix = wds::to_data_matrix(tensor);
    wds::write_matrix(matrix, out);
    std::cerr << "wrote " << out << " (" << matrix.rows() << "x" << matrix.cols() << ")\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCA toolkit for wide registered datasets (shapes and PRTF spectra)"};
    app.require_subcommand(1);

    // fit
    std::string fit_input;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "Fit a PCA model to a data matrix");
    fit->add_option("--input", fit_input, ".wdsm or CSV data matrix")->required();
    fit->add_option("--out", fit_out, "output .wdsp model")->required();
    fit->callback([&] { cmd_fit(fit_input, fit_out); });

    // cpv
    std::string cpv_model;
    std::string cpv_out;
    double cpv_threshold = 0.0;
    auto* cpv = app.add_subcommand("cpv", "Emit the cumulative-variance curve");
    cpv->add_option("--model", cpv_model, ".wdsp model")->required();
    cpv->add_option("--out", cpv_out, "output CSV m,cpv")->required();
    auto* cpv_thr_opt =
        cpv->add_option("--threshold", cpv_threshold,
                        "print the smallest m whose CPV reaches this percentage");
    cpv->callback([&] {
        std::optional<double> threshold;
        if (cpv_thr_opt->count() > 0) {
            if (!(cpv_threshold > 0.0 && cpv_threshold <= 100.0)) {
                throw CLI::ValidationError("--threshold", "must lie in (0, 100]");
            }
            threshold = cpv_threshold;
        }
        cmd_cpv(cpv_model, cpv_out, threshold);
    });

    // reduce
    std::string red_model;
    std::string red_input;
    std::string red_out;
    long long red_m = 0;
    auto* reduce = app.add_subcommand(
        "reduce", "Project, truncate to m components and reconstruct");
    reduce->add_option("--model", red_model, ".wdsp model")->required();
    reduce->add_option("--input", red_input, ".wdsm or CSV data matrix")->required();
    reduce->add_option("--m", red_m, "retained components")
        ->required()
        ->check(CLI::NonNegativeNumber);
    reduce->add_option("--out", red_out, "output .wdsm")->required();
    reduce->callback([&] { cmd_reduce(red_model, red_input, red_m, red_out); });

    // sample
    std::string smp_model;
    std::string smp_shapes;
    std::string smp_weights;
    long long smp_count = 0;
    std::uint64_t smp_seed = 0;
    auto* sample = app.add_subcommand("sample", "Draw synthetic subjects from a model");
    sample->add_option("--model", smp_model, ".wdsp model")->required();
    sample->add_option("--count", smp_count, "number of subjects")
        ->required()
        ->check(CLI::NonNegativeNumber);
    sample->add_option("--seed", smp_seed, "RNG seed (default 0)");
    sample->add_option("--out-shapes", smp_shapes, "output .wdsm of flattened shapes")
        ->required();
    sample->add_option("--out-weights", smp_weights, "optional output .wdsm of weights");
    sample->callback(
        [&] { cmd_sample(smp_model, smp_count, smp_seed, smp_shapes, smp_weights); });

    // export-mesh
    std::string exm_shapes;
    std::string exm_topology;
    std::string exm_out;
    std::string exm_model;
    long long exm_row = 0;
    bool exm_distance = false;
    auto* exm = app.add_subcommand("export-mesh", "Write one shape row as an OBJ mesh");
    exm->add_option("--shapes", exm_shapes, ".wdsm of flattened shapes")->required();
    exm->add_option("--row", exm_row, "subject row index")->required();
    exm->add_option("--topology", exm_topology, "CSV i,j,k of 0-based faces")->required();
    exm->add_option("--out", exm_out, "output OBJ path")->required();
    auto* exm_model_opt = exm->add_option("--model", exm_model, ".wdsp model for distances");
    exm->add_flag("--distance-to-mean", exm_distance,
                  "write per-vertex distance to the model mean as a sidecar CSV")
        ->needs(exm_model_opt);
    exm->callback([&] {
        cmd_export_mesh(exm_shapes, exm_row, exm_topology, exm_out, exm_distance, exm_model);
    });

    // crossval
    std::string cv_input;
    std::string cv_out;
    long long cv_folds = 20;
    long long cv_step = 1;
    std::uint64_t cv_seed = 0;
    bool cv_contiguous = false;
    auto* cv = app.add_subcommand("crossval", "K-fold cross-validation error curves");
    cv->add_option("--input", cv_input, ".wdsm or CSV data matrix")->required();
    cv->add_option("--folds", cv_folds, "fold count K (default 20)")
        ->check(CLI::Range(2LL, 1000000000LL));
    cv->add_option("--seed", cv_seed, "partition seed (default 0)");
    cv->add_option("--m-step", cv_step, "stride of the m sweep (default 1)")
        ->check(CLI::PositiveNumber);
    cv->add_option("--out", cv_out, "output CSV fold,m,train_mse,val_mse")->required();
    cv->add_flag("--contiguous", cv_contiguous,
                 "fold by contiguous index blocks instead of a seeded shuffle");
    cv->callback(
        [&] { cmd_crossval(cv_input, cv_folds, cv_seed, cv_step, cv_out, cv_contiguous); });

    // synth
    std::string syn_spectrum;
    std::string syn_out;
    std::string syn_truth;
    long long syn_rows = 0;
    long long syn_cols = 0;
    long long syn_rank = 0;
    double syn_noise = 0.0;
    std::uint64_t syn_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate a low-rank synthetic dataset");
    synth->add_option("--rows", syn_rows, "subject count")->required();
    synth->add_option("--cols", syn_cols, "ambient dimension")->required();
    synth->add_option("--rank", syn_rank, "generating rank")->required();
    synth->add_option("--spectrum", syn_spectrum,
                      "comma-separated singular values, descending");
    synth->add_option("--noise", syn_noise, "i.i.d. Gaussian noise std (default 0)");
    synth->add_option("--seed", syn_seed, "RNG seed (default 0)");
    synth->add_option("--out", syn_out, "output .wdsm dataset")->required();
    synth->add_option("--out-truth", syn_truth, "output .wdsp generating model")->required();
    synth->callback([&] {
        cmd_synth(syn_rows, syn_cols, syn_rank, syn_spectrum, syn_noise, syn_seed, syn_out,
                  syn_truth);
    });

    // prtf-flatten
    std::string pf_tensor;
    std::string pf_out;
    auto* pf = app.add_subcommand(
        "prtf-flatten", "Flatten a PRTF tensor to a data matrix (dB conversion included)");
    pf->add_option("--tensor", pf_tensor, "input .wdst tensor")->required();
    pf->add_option("--out", pf_out, "output .wdsm matrix")->required();
    pf->callback([&] { cmd_prtf_flatten(pf_tensor, pf_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage error
    } catch (const wds::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
