#include "wds/io.hpp"

#include "wds/error.hpp"

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string_view>
#include <vector>

namespace wds {

namespace {

constexpr std::uint32_t kFormatVersion = 1;

void put_u8(std::string& out, std::uint8_t v) {
    out.push_back(static_cast<char>(v));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
public:
    ByteReader(const std::string& buf, std::string what) : buf_(buf), what_(std::move(what)) {}

    void require(std::size_t n) const {
        if (buf_.size() - pos_ < n) {
            throw FormatError(what_ + ": truncated (need " + std::to_string(n) +
                              " bytes at offset " + std::to_string(pos_) + ")");
        }
    }

    std::uint8_t u8() {
        require(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }

    std::uint32_t u32() {
        require(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf_[pos_++])) << (8 * i);
        }
        return v;
    }

    std::uint64_t u64() {
        require(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf_[pos_++])) << (8 * i);
        }
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string bytes(std::size_t n) {
        require(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    void expect_magic(std::string_view magic) {
        require(magic.size());
        if (std::string_view(buf_).substr(pos_, magic.size()) != magic) {
            throw FormatError(what_ + ": bad magic (expected " + std::string(magic) + ")");
        }
        pos_ += magic.size();
    }

    void expect_version() {
        const std::uint32_t v = u32();
        if (v != kFormatVersion) {
            throw FormatError(what_ + ": unsupported format version " + std::to_string(v));
        }
    }

    // Declared count must fit in memory and in the remaining payload.
    Eigen::Index count(std::uint64_t v, const char* field) const {
        if (v > static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max() / 8)) {
            throw FormatError(what_ + ": declared " + field + " is implausibly large");
        }
        return static_cast<Eigen::Index>(v);
    }

    void expect_end() const {
        if (pos_ != buf_.size()) {
            throw FormatError(what_ + ": " + std::to_string(buf_.size() - pos_) +
                              " trailing bytes");
        }
    }

private:
    const std::string& buf_;
    std::string what_;
    std::size_t pos_ = 0;
};

// Guard r*c*8 against overflow before any allocation.
void check_payload(Eigen::Index r, Eigen::Index c, const ByteReader& reader) {
    if (r > 0 && c > std::numeric_limits<Eigen::Index>::max() / 8 / r) {
        throw FormatError("declared matrix payload overflows");
    }
    reader.require(static_cast<std::size_t>(r) * static_cast<std::size_t>(c) * 8);
}

double parse_double(const std::string& token, Eigen::Index row, Eigen::Index col) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse \"" + token + "\" as a number");
    }
    return v;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string::npos) {
            nl = text.size();
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

bool is_numeric_row(const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
        const char* begin = t.c_str();
        char* end = nullptr;
        std::strtod(begin, &end);
        if (end == begin || *end != '\0') {
            return false;
        }
    }
    return !tokens.empty();
}

} // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    static std::atomic<std::uint64_t> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ec2;
        std::filesystem::remove(tmp, ec2);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                      ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failure on " + path.string());
    }
    return bytes;
}

// ---------------------------------------------------------------------------
// .wdsm matrix container

std::string matrix_to_bytes(const DataMatrix& m) {
    if (!m.subject_ids.empty() &&
        m.subject_ids.size() != static_cast<std::size_t>(m.rows())) {
        throw DimensionMismatch("matrix_to_bytes: " + std::to_string(m.subject_ids.size()) +
                                " subject ids for " + std::to_string(m.rows()) + " rows");
    }
    std::string out;
    out.reserve(29 + static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()) * 8);
    out += "WDSM";
    put_u32(out, kFormatVersion);
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_f64(out, m.values(r, c));
        }
    }
    if (m.subject_ids.empty()) {
        put_u8(out, 0);
    } else {
        put_u8(out, 1);
        for (const auto& id : m.subject_ids) {
            put_u64(out, id.size());
            out += id;
        }
    }
    return out;
}

DataMatrix matrix_from_bytes(const std::string& bytes) {
    ByteReader reader(bytes, "matrix");
    reader.expect_magic("WDSM");
    reader.expect_version();
    const Eigen::Index rows = reader.count(reader.u64(), "row count");
    const Eigen::Index cols = reader.count(reader.u64(), "column count");
    check_payload(rows, cols, reader);

    DataMatrix m;
    m.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m.values(r, c) = reader.f64();
        }
    }
    const std::uint8_t flag = reader.u8();
    if (flag == 1) {
        m.subject_ids.reserve(static_cast<std::size_t>(rows));
        for (Eigen::Index r = 0; r < rows; ++r) {
            const std::uint64_t len = reader.u64();
            m.subject_ids.push_back(reader.bytes(reader.count(len, "id length")));
        }
    } else if (flag != 0) {
        throw FormatError("matrix: subject-id flag must be 0 or 1");
    }
    reader.expect_end();
    return m;
}

void write_matrix(const DataMatrix& m, const std::filesystem::path& path) {
    atomic_write(path, matrix_to_bytes(m));
}

DataMatrix read_matrix(const std::filesystem::path& path) {
    return matrix_from_bytes(read_file(path));
}

// ---------------------------------------------------------------------------
// .wdsp model container

std::string model_to_bytes(const PcaModel& model) {
    const Eigen::Index d = model.dim();
    const Eigen::Index k = model.n_components();
    if (model.basis.rows() != k || model.basis.cols() != d) {
        throw DimensionMismatch("model_to_bytes: basis is " + std::to_string(model.basis.rows()) +
                                "x" + std::to_string(model.basis.cols()) + ", expected " +
                                std::to_string(k) + "x" + std::to_string(d));
    }
    std::string out;
    out.reserve(24 + static_cast<std::size_t>((k + 1) * d + k) * 8);
    out += "WDSP";
    put_u32(out, kFormatVersion);
    put_u64(out, static_cast<std::uint64_t>(d));
    put_u64(out, static_cast<std::uint64_t>(k));
    for (Eigen::Index i = 0; i < d; ++i) {
        put_f64(out, model.mean(i));
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        put_f64(out, model.variances(j));
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            put_f64(out, model.basis(j, i));
        }
    }
    return out;
}

PcaModel model_from_bytes(const std::string& bytes) {
    ByteReader reader(bytes, "model");
    reader.expect_magic("WDSP");
    reader.expect_version();
    const Eigen::Index d = reader.count(reader.u64(), "dimension");
    const Eigen::Index k = reader.count(reader.u64(), "component count");
    check_payload(k + 1, d, reader);

    PcaModel model;
    model.mean.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        model.mean(i) = reader.f64();
    }
    model.variances.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        model.variances(j) = reader.f64();
    }
    model.basis.resize(k, d);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            model.basis(j, i) = reader.f64();
        }
    }
    reader.expect_end();
    return model;
}

void write_model(const PcaModel& model, const std::filesystem::path& path) {
    atomic_write(path, model_to_bytes(model));
}

PcaModel read_model(const std::filesystem::path& path) {
    return model_from_bytes(read_file(path));
}

// ---------------------------------------------------------------------------
// .wdst tensor container

std::string tensor_to_bytes(const PrtfTensor& t) {
    if (t.freqs_hz.size() != t.n_freqs || t.directions.rows() != t.n_dirs ||
        t.values.size() !=
            static_cast<std::size_t>(t.n_subjects * t.n_freqs * t.n_dirs)) {
        throw DimensionMismatch("tensor_to_bytes: inconsistent grid/value sizes");
    }
    std::string out;
    out.reserve(33 + t.values.size() * 8);
    out += "WDST";
    put_u32(out, kFormatVersion);
    put_u8(out, static_cast<std::uint8_t>(t.scale));
    put_u64(out, static_cast<std::uint64_t>(t.n_subjects));
    put_u64(out, static_cast<std::uint64_t>(t.n_freqs));
    put_u64(out, static_cast<std::uint64_t>(t.n_dirs));
    for (Eigen::Index f = 0; f < t.n_freqs; ++f) {
        put_f64(out, t.freqs_hz(f));
    }
    for (Eigen::Index d = 0; d < t.n_dirs; ++d) {
        put_f64(out, t.directions(d, 0));
        put_f64(out, t.directions(d, 1));
    }
    for (const double v : t.values) {
        put_f64(out, v);
    }
    return out;
}

PrtfTensor tensor_from_bytes(const std::string& bytes) {
    ByteReader reader(bytes, "tensor");
    reader.expect_magic("WDST");
    reader.expect_version();
    const std::uint8_t scale = reader.u8();
    if (scale > 1) {
        throw FormatError("tensor: scale flag must be 0 (linear) or 1 (dB)");
    }
    PrtfTensor t;
    t.scale = static_cast<PrtfScale>(scale);
    t.n_subjects = reader.count(reader.u64(), "subject count");
    t.n_freqs = reader.count(reader.u64(), "frequency count");
    t.n_dirs = reader.count(reader.u64(), "direction count");

    t.freqs_hz.resize(t.n_freqs);
    for (Eigen::Index f = 0; f < t.n_freqs; ++f) {
        t.freqs_hz(f) = reader.f64();
        if (f > 0 && !(t.freqs_hz(f) > t.freqs_hz(f - 1))) {
            throw FormatError("tensor: frequencies must be strictly increasing");
        }
    }
    t.directions.resize(t.n_dirs, 2);
    for (Eigen::Index d = 0; d < t.n_dirs; ++d) {
        t.directions(d, 0) = reader.f64();
        t.directions(d, 1) = reader.f64();
    }
    Eigen::Index total = 0;
    if (t.n_subjects > 0 && t.n_freqs > 0 && t.n_dirs > 0) {
        constexpr Eigen::Index kMax = std::numeric_limits<Eigen::Index>::max() / 8;
        if (t.n_freqs > kMax / t.n_dirs || t.n_subjects > kMax / (t.n_freqs * t.n_dirs)) {
            throw FormatError("tensor: declared value payload overflows");
        }
        total = t.n_subjects * t.n_freqs * t.n_dirs;
    }
    reader.require(static_cast<std::size_t>(total) * 8);
    t.values.resize(static_cast<std::size_t>(total));
    for (double& v : t.values) {
        v = reader.f64();
        if (t.scale == PrtfScale::Db && !std::isfinite(v)) {
            throw FormatError("tensor: dB values must be finite");
        }
        if (t.scale == PrtfScale::Linear && !(v >= 0.0)) {
            throw FormatError("tensor: linear magnitudes must be non-negative");
        }
    }
    reader.expect_end();
    return t;
}

void write_tensor(const PrtfTensor& t, const std::filesystem::path& path) {
    atomic_write(path, tensor_to_bytes(t));
}

PrtfTensor read_tensor(const std::filesystem::path& path) {
    return tensor_from_bytes(read_file(path));
}

// ---------------------------------------------------------------------------
// Partition CSV

void write_partition(const FoldPartition& part, const std::filesystem::path& path) {
    validate_partition(part);
    std::string out = "subject_index,fold\n";
    for (Eigen::Index i = 0; i < part.n_subjects; ++i) {
        out += std::to_string(i);
        out += ',';
        out += std::to_string(part.assignments[static_cast<std::size_t>(i)]);
        out += '\n';
    }
    atomic_write(path, out);
}

FoldPartition read_partition(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::size_t first = 0;
    if (!lines.empty() && !is_numeric_row(split_csv_line(lines[0]))) {
        first = 1; // header
    }
    const std::size_t n = lines.size() - first;
    if (n == 0) {
        throw FormatError("partition: no assignment rows");
    }
    FoldPartition part;
    part.n_subjects = static_cast<Eigen::Index>(n);
    part.assignments.assign(n, -1);
    std::int64_t max_fold = -1;
    for (std::size_t i = first; i < lines.size(); ++i) {
        const auto tokens = split_csv_line(lines[i]);
        const Eigen::Index row = static_cast<Eigen::Index>(i + 1);
        if (tokens.size() != 2) {
            throw ParseError("row " + std::to_string(row) + ": expected subject_index,fold");
        }
        const double sub_d = parse_double(tokens[0], row, 1);
        const double fold_d = parse_double(tokens[1], row, 2);
        const auto sub = static_cast<std::int64_t>(sub_d);
        const auto fold = static_cast<std::int64_t>(fold_d);
        if (static_cast<double>(sub) != sub_d || static_cast<double>(fold) != fold_d) {
            throw ParseError("row " + std::to_string(row) + ": indices must be integers");
        }
        if (sub < 0 || sub >= static_cast<std::int64_t>(n)) {
            throw FormatError("partition: subject index " + std::to_string(sub) +
                              " outside [0, " + std::to_string(n) + ")");
        }
        if (part.assignments[static_cast<std::size_t>(sub)] != -1) {
            throw FormatError("partition: duplicate subject index " + std::to_string(sub));
        }
        if (fold < 0) {
            throw FormatError("partition: negative fold index");
        }
        part.assignments[static_cast<std::size_t>(sub)] = static_cast<std::int32_t>(fold);
        max_fold = std::max(max_fold, fold);
    }
    part.k_folds = static_cast<Eigen::Index>(max_fold + 1);
    part.seed = 0;
    validate_partition(part);
    return part;
}

// ---------------------------------------------------------------------------
// CSV matrix and error curve

DataMatrix read_csv_matrix(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    std::size_t first = 0;
    if (!lines.empty() && !is_numeric_row(split_csv_line(lines[0]))) {
        first = 1;
    }
    if (first >= lines.size()) {
        throw ParseError("csv: no data rows");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(lines.size() - first);
    const Eigen::Index cols = static_cast<Eigen::Index>(split_csv_line(lines[first]).size());
    DataMatrix m;
    m.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t line_no = first + static_cast<std::size_t>(r);
        const auto tokens = split_csv_line(lines[line_no]);
        if (static_cast<Eigen::Index>(tokens.size()) != cols) {
            throw ParseError("row " + std::to_string(line_no + 1) + " has " +
                             std::to_string(tokens.size()) + " columns, expected " +
                             std::to_string(cols));
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m.values(r, c) = parse_double(tokens[static_cast<std::size_t>(c)],
                                          static_cast<Eigen::Index>(line_no + 1), c + 1);
        }
    }
    return m;
}

void write_error_curve(const ErrorCurve& curve, const std::filesystem::path& path) {
    if (curve.m_values.size() != curve.errors.size()) {
        throw DimensionMismatch("write_error_curve: m/error length mismatch");
    }
    std::string out = "m,mse\n";
    for (std::size_t i = 0; i < curve.m_values.size(); ++i) {
        out += std::to_string(curve.m_values[i]);
        out += ',';
        out += format_g17(curve.errors[i]);
        out += '\n';
    }
    atomic_write(path, out);
}

} // namespace wds
