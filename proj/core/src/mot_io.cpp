// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/mot_io.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

static_assert(std::endian::native == std::endian::little,
              "embedding sidecar I/O assumes a little-endian host");

namespace ucsl {

namespace {

constexpr char kMagic[8] = {'U', 'C', 'S', 'L', 'E', 'M', 'B', '\0'};
constexpr std::uint32_t kSidecarVersion = 1;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line, std::string(name) + " is not a number: '" + std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line, std::string(name) + " is not an integer: '" + std::string(field) + "'");
    }
    return value;
}

std::vector<MotRecord> parse_file_order(std::istream& in, RecordKind kind) {
    std::vector<MotRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            const std::size_t comma = rest.find(',');
            if (comma == std::string_view::npos) {
                fields.push_back(rest);
                break;
            }
            fields.push_back(rest.substr(0, comma));
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 10) {
            throw ParseError(line_number,
                             "expected 10 comma-separated fields, got " +
                                 std::to_string(fields.size()));
        }
        MotRecord r;
        r.frame = parse_int(fields[0], line_number, "frame");
        r.id = parse_int(fields[1], line_number, "id");
        r.bb_left = parse_double(fields[2], line_number, "bb_left");
        r.bb_top = parse_double(fields[3], line_number, "bb_top");
        r.bb_width = parse_double(fields[4], line_number, "bb_width");
        r.bb_height = parse_double(fields[5], line_number, "bb_height");
        r.conf = parse_double(fields[6], line_number, "conf");
        r.x = parse_double(fields[7], line_number, "x");
        r.y = parse_double(fields[8], line_number, "y");
        r.z = parse_double(fields[9], line_number, "z");
        if (r.frame < 1) {
            throw ParseError(line_number, "frame must be >= 1");
        }
        if (r.bb_width <= 0.0 || r.bb_height <= 0.0) {
            throw ParseError(line_number, "box extents must be positive");
        }
        if (kind == RecordKind::GroundTruth && r.id < 1) {
            throw IdRequiredError("line " + std::to_string(line_number) +
                                  ": ground-truth records require id >= 1");
        }
        records.push_back(r);
    }
    return records;
}

void sort_records(std::vector<MotRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const MotRecord& a, const MotRecord& b) {
        if (a.frame != b.frame) {
            return a.frame < b.frame;
        }
        return a.id < b.id;
    });
}

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void append_number(std::string& out, int v) {
    char buf[16];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_raw(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return static_cast<bool>(in);
}

}  // namespace

std::vector<MotRecord> read_records(std::istream& in, RecordKind kind) {
    std::vector<MotRecord> records = parse_file_order(in, kind);
    sort_records(records);
    return records;
}

std::vector<MotRecord> read_records(const std::filesystem::path& path, RecordKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_records(in, kind);
}

void write_records(const std::vector<MotRecord>& records, std::ostream& out) {
    std::string buf;
    for (const MotRecord& r : records) {
        if (r.frame < 1) {
            throw Error("write_records: frame must be >= 1");
        }
        if (r.bb_width <= 0.0 || r.bb_height <= 0.0) {
            throw Error("write_records: box extents must be positive");
        }
        buf.clear();
        append_number(buf, r.frame);
        buf.push_back(',');
        append_number(buf, r.id);
        for (double v : {r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf, r.x, r.y, r.z}) {
            buf.push_back(',');
            append_number(buf, v);
        }
        buf.push_back('\n');
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) {
        throw IoError("write_records: stream failure");
    }
}

void write_records(const std::vector<MotRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_records(records, out);
}

Eigen::MatrixXd read_embeddings(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw HeaderMismatchError("embedding sidecar: bad magic");
    }
    std::uint32_t version = 0;
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    if (!read_raw(in, version) || !read_raw(in, dim) || !read_raw(in, count)) {
        throw HeaderMismatchError("embedding sidecar: truncated header");
    }
    if (version != kSidecarVersion) {
        throw HeaderMismatchError("embedding sidecar: unsupported version " +
                                  std::to_string(version));
    }
    Eigen::MatrixXd out(static_cast<int>(dim), static_cast<int>(count));
    std::vector<float> row(dim);
    for (std::uint64_t r = 0; r < count; ++r) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(float) * dim));
        if (!in) {
            throw IoError("embedding sidecar: truncated payload");
        }
        for (std::uint32_t d = 0; d < dim; ++d) {
            out(static_cast<int>(d), static_cast<int>(r)) = static_cast<double>(row[d]);
        }
    }
    return out;
}

Eigen::MatrixXd read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_embeddings(in);
}

void write_embeddings(const Eigen::MatrixXd& embeddings, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, kSidecarVersion);
    write_raw(out, static_cast<std::uint32_t>(embeddings.rows()));
    write_raw(out, static_cast<std::uint64_t>(embeddings.cols()));
    std::vector<float> row(embeddings.rows());
    for (int c = 0; c < embeddings.cols(); ++c) {
        for (int d = 0; d < embeddings.rows(); ++d) {
            row[static_cast<std::size_t>(d)] = static_cast<float>(embeddings(d, c));
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(sizeof(float) * row.size()));
    }
    if (!out) {
        throw IoError("write_embeddings: stream failure");
    }
}

void write_embeddings(const Eigen::MatrixXd& embeddings, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_embeddings(embeddings, out);
}

std::vector<Detection> read_detections(const std::filesystem::path& det_path,
                                       const std::filesystem::path& emb_path) {
    std::ifstream in(det_path);
    if (!in) {
        throw IoError("cannot open " + det_path.string());
    }
    std::vector<MotRecord> records = parse_file_order(in, RecordKind::Detection);
    const Eigen::MatrixXd embeddings = read_embeddings(emb_path);
    if (static_cast<std::size_t>(embeddings.cols()) != records.size()) {
        throw CountMismatchError("sidecar has " + std::to_string(embeddings.cols()) +
                                 " rows but record file has " + std::to_string(records.size()));
    }

    // Pair rows with records in file order, then sort the pairs together.
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].frame != records[b].frame) {
            return records[a].frame < records[b].frame;
        }
        return records[a].id < records[b].id;
    });

    std::vector<Detection> out;
    out.reserve(records.size());
    for (std::size_t i : order) {
        Detection d;
        d.frame = records[i].frame;
        d.box = records[i].box();
        d.confidence = records[i].conf;
        d.embedding = embeddings.col(static_cast<int>(i));
        out.push_back(std::move(d));
    }
    return out;
}

void write_detections(const std::vector<Detection>& detections,
                      const std::filesystem::path& det_path,
                      const std::filesystem::path& emb_path) {
    std::vector<std::size_t> order(detections.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].frame < detections[b].frame;
    });

    std::vector<MotRecord> records;
    records.reserve(detections.size());
    const int dim = detections.empty() ? 0 : static_cast<int>(detections.front().embedding.size());
    Eigen::MatrixXd embeddings(dim, static_cast<int>(detections.size()));
    int col = 0;
    for (std::size_t i : order) {
        const Detection& d = detections[i];
        MotRecord r;
        r.frame = d.frame;
        r.id = -1;
        r.bb_left = d.box.x;
        r.bb_top = d.box.y;
        r.bb_width = d.box.w;
        r.bb_height = d.box.h;
        r.conf = d.confidence;
        records.push_back(r);
        embeddings.col(col++) = d.embedding;
    }
    write_records(records, det_path);
    write_embeddings(embeddings, emb_path);
}

}  // namespace ucsl
