#include "wds/shape.hpp"

#include "wds/error.hpp"
#include "wds/io.hpp"
#include "wds/rng.hpp"
#include "wds/threads.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace wds {

Eigen::RowVectorXd flatten_cloud(const PointCloud& cloud) {
    if (!cloud.coords.allFinite()) {
        throw NonFinite("flatten_cloud: non-finite coordinate");
    }
    return Eigen::Map<const Eigen::RowVectorXd>(cloud.coords.data(),
                                                cloud.coords.size());
}

PointCloud unflatten_cloud(const Eigen::RowVectorXd& row) {
    if (row.size() % 3 != 0) {
        throw DimensionMismatch("unflatten_cloud: length " + std::to_string(row.size()) +
                                " is not a multiple of 3");
    }
    PointCloud cloud;
    cloud.coords = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>>(
        row.data(), row.size() / 3, 3);
    return cloud;
}

WeightMatrix draw_weights(const PcaModel& model, Eigen::Index n, std::uint64_t seed,
                          unsigned threads) {
    if (n < 0) {
        throw RangeError("draw_weights: n must be non-negative");
    }
    const Eigen::Index k = model.n_components();
    WeightMatrix weights;
    weights.values.resize(n, k);
    if (n == 0 || k == 0) {
        return weights;
    }

    Eigen::VectorXd stddev(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        stddev(i) = std::sqrt(model.variances(i));
    }

    const auto fill_rows = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index j = begin; j < end; ++j) {
            for (Eigen::Index i = 0; i < k; ++i) {
                weights.values(j, i) =
                    counter_gaussian(seed, static_cast<std::uint64_t>(j),
                                     static_cast<std::uint64_t>(i)) *
                    stddev(i);
            }
        }
    };

    const unsigned workers =
        std::min<unsigned>(effective_threads(threads), static_cast<unsigned>(n));
    if (workers <= 1) {
        fill_rows(0, n);
        return weights;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const Eigen::Index chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const Eigen::Index begin = static_cast<Eigen::Index>(w) * chunk;
        const Eigen::Index end = std::min<Eigen::Index>(begin + chunk, n);
        if (begin >= end) {
            break;
        }
        pool.emplace_back(fill_rows, begin, end);
    }
    for (auto& t : pool) {
        t.join();
    }
    return weights;
}

DataMatrix synthesize_shapes(const PcaModel& model, const WeightMatrix& weights) {
    return reconstruct(model, weights);
}

ShapeSampleBatch sample_shapes(const PcaModel& model, Eigen::Index n, std::uint64_t seed,
                               unsigned threads) {
    ShapeSampleBatch batch;
    batch.seed = seed;
    batch.weights = draw_weights(model, n, seed, threads);
    batch.shapes = synthesize_shapes(model, batch.weights);
    return batch;
}

Eigen::VectorXd distance_to_mean(const PcaModel& model, const Eigen::RowVectorXd& shape) {
    if (model.dim() % 3 != 0) {
        throw DimensionMismatch("distance_to_mean: model dimension is not a multiple of 3");
    }
    if (shape.size() != model.dim()) {
        throw DimensionMismatch("distance_to_mean: shape length " + std::to_string(shape.size()) +
                                " does not match model dimension " + std::to_string(model.dim()));
    }
    const Eigen::Index n_vertices = model.dim() / 3;
    Eigen::VectorXd distances(n_vertices);
    for (Eigen::Index v = 0; v < n_vertices; ++v) {
        const double dx = shape(3 * v) - model.mean(3 * v);
        const double dy = shape(3 * v + 1) - model.mean(3 * v + 1);
        const double dz = shape(3 * v + 2) - model.mean(3 * v + 2);
        distances(v) = std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    return distances;
}

namespace {

void validate_topology(const MeshTopology& topology, Eigen::Index n_vertices) {
    for (std::size_t f = 0; f < topology.faces.size(); ++f) {
        const auto& face = topology.faces[f];
        for (const std::int64_t idx : face) {
            if (idx < 0 || idx >= n_vertices) {
                throw IndexOutOfRange("face " + std::to_string(f) + " references vertex " +
                                      std::to_string(idx) + " of a " +
                                      std::to_string(n_vertices) + "-vertex cloud");
            }
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw FormatError("face " + std::to_string(f) + " repeats a vertex");
        }
    }
}

} // namespace

void export_mesh(const PointCloud& cloud, const MeshTopology& topology,
                 const std::optional<Eigen::VectorXd>& scalars,
                 const std::filesystem::path& path) {
    validate_topology(topology, cloud.n_vertices());
    if (scalars && scalars->size() != cloud.n_vertices()) {
        throw DimensionMismatch("export_mesh: " + std::to_string(scalars->size()) +
                                " scalars for " + std::to_string(cloud.n_vertices()) +
                                " vertices");
    }
    std::string obj;
    obj.reserve(static_cast<std::size_t>(cloud.n_vertices()) * 60 +
                topology.faces.size() * 24);
    for (Eigen::Index v = 0; v < cloud.n_vertices(); ++v) {
        obj += "v ";
        obj += format_g17(cloud.coords(v, 0));
        obj += ' ';
        obj += format_g17(cloud.coords(v, 1));
        obj += ' ';
        obj += format_g17(cloud.coords(v, 2));
        obj += '\n';
    }
    for (const auto& face : topology.faces) {
        // OBJ face indices are 1-based.
        obj += "f ";
        obj += std::to_string(face[0] + 1);
        obj += ' ';
        obj += std::to_string(face[1] + 1);
        obj += ' ';
        obj += std::to_string(face[2] + 1);
        obj += '\n';
    }
    atomic_write(path, obj);

    if (scalars) {
        std::string csv = "vertex_index,value\n";
        for (Eigen::Index v = 0; v < scalars->size(); ++v) {
            csv += std::to_string(v);
            csv += ',';
            csv += format_g17((*scalars)(v));
            csv += '\n';
        }
        std::filesystem::path sidecar = path;
        sidecar += ".scalars.csv";
        atomic_write(sidecar, csv);
    }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

double parse_obj_double(const std::string& token, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw ParseError("obj line " + std::to_string(line_no) + ": bad coordinate \"" + token +
                         "\"");
    }
    return v;
}

std::int64_t parse_obj_index(const std::string& token, std::size_t line_no) {
    // Accept "i", "i/t" and "i/t/n"; only the vertex index matters here.
    const std::string head = token.substr(0, token.find('/'));
    char* end = nullptr;
    const long long v = std::strtoll(head.c_str(), &end, 10);
    if (end == head.c_str() || *end != '\0') {
        throw ParseError("obj line " + std::to_string(line_no) + ": bad face index \"" + token +
                         "\"");
    }
    return v;
}

} // namespace

PointCloud import_mesh(const std::filesystem::path& path, MeshTopology* topology) {
    const std::string text = read_file(path);
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<std::int64_t, 3>> faces;

    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            nl = text.size();
        }
        const std::string line = text.substr(start, nl - start);
        ++line_no;
        start = nl + 1;
        if (nl == text.size() && line.empty()) {
            break;
        }
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0] == "#") {
            continue;
        }
        if (tokens[0] == "v") {
            if (tokens.size() < 4) {
                throw ParseError("obj line " + std::to_string(line_no) +
                                 ": vertex needs 3 coordinates");
            }
            vertices.emplace_back(parse_obj_double(tokens[1], line_no),
                                  parse_obj_double(tokens[2], line_no),
                                  parse_obj_double(tokens[3], line_no));
        } else if (tokens[0] == "f") {
            if (tokens.size() != 4) {
                throw ParseError("obj line " + std::to_string(line_no) +
                                 ": only triangular faces are supported");
            }
            faces.push_back({parse_obj_index(tokens[1], line_no) - 1,
                             parse_obj_index(tokens[2], line_no) - 1,
                             parse_obj_index(tokens[3], line_no) - 1});
        }
        // Ignore normals, texture coordinates, groups and other directives.
    }

    PointCloud cloud;
    cloud.coords.resize(static_cast<Eigen::Index>(vertices.size()), 3);
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        cloud.coords.row(static_cast<Eigen::Index>(v)) = vertices[v].transpose();
    }
    MeshTopology topo{std::move(faces)};
    validate_topology(topo, cloud.n_vertices());
    if (topology) {
        *topology = std::move(topo);
    }
    return cloud;
}

void write_topology_csv(const MeshTopology& topology, const std::filesystem::path& path) {
    std::string out = "i,j,k\n";
    for (const auto& face : topology.faces) {
        out += std::to_string(face[0]);
        out += ',';
        out += std::to_string(face[1]);
        out += ',';
        out += std::to_string(face[2]);
        out += '\n';
    }
    atomic_write(path, out);
}

MeshTopology read_topology_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    MeshTopology topo;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            nl = text.size();
        }
        std::string line = text.substr(start, nl - start);
        ++line_no;
        start = nl + 1;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line_no == 1 && line.find_first_not_of("ijk, \t") == std::string::npos) {
            continue; // header
        }
        std::array<std::int64_t, 3> face{};
        int field = 0;
        std::size_t pos = 0;
        while (field < 3) {
            auto comma = line.find(',', pos);
            const std::string token =
                line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            char* end = nullptr;
            const long long v = std::strtoll(token.c_str(), &end, 10);
            if (end == token.c_str() || *end != '\0' || v < 0) {
                throw ParseError("topology row " + std::to_string(line_no) +
                                 ": bad vertex index \"" + token + "\"");
            }
            face[static_cast<std::size_t>(field)] = v;
            ++field;
            if (comma == std::string::npos) {
                break;
            }
            pos = comma + 1;
        }
        if (field != 3) {
            throw ParseError("topology row " + std::to_string(line_no) +
                             ": expected three indices");
        }
        topo.faces.push_back(face);
    }
    return topo;
}

} // namespace wds
