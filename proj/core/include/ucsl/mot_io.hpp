// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <ucsl/detection.hpp>
#include <ucsl/errors.hpp>

namespace ucsl {

/// One line of a MOT-style comma-separated file:
/// frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
/// with id = -1 for anonymous detections and x, y, z written as -1.
struct MotRecord {
    int frame = 1;
    int id = -1;
    double bb_left = 0.0;
    double bb_top = 0.0;
    double bb_width = 0.0;
    double bb_height = 0.0;
    double conf = 1.0;
    double x = -1.0;
    double y = -1.0;
    double z = -1.0;

    Box box() const { return Box{bb_left, bb_top, bb_width, bb_height}; }
};

enum class RecordKind { Detection, GroundTruth, Result };

/// Parses records and returns them sorted by (frame, id); sorting is stable so
/// same-key lines keep file order. GroundTruth requires id >= 1.
std::vector<MotRecord> read_records(std::istream& in, RecordKind kind);
std::vector<MotRecord> read_records(const std::filesystem::path& path, RecordKind kind);

/// Writes one line per record. Integers carry no decimal point; reals use the
/// shortest decimal form that round-trips, so write(read(f)) is byte-stable.
void write_records(const std::vector<MotRecord>& records, std::ostream& out);
void write_records(const std::vector<MotRecord>& records, const std::filesystem::path& path);

/// Binary embedding sidecar: 8-byte magic, u32 version, u32 dim, u64 count,
/// then count rows of dim little-endian 32-bit floats, one row per record of
/// the paired record file, in that file's (frame, id)-sorted order.
/// Returned matrix is dim x count, one column per record.
Eigen::MatrixXd read_embeddings(std::istream& in);
Eigen::MatrixXd read_embeddings(const std::filesystem::path& path);
void write_embeddings(const Eigen::MatrixXd& embeddings, std::ostream& out);
void write_embeddings(const Eigen::MatrixXd& embeddings, const std::filesystem::path& path);

/// Reads a detection file plus its sidecar and pairs them row by row.
/// Throws CountMismatchError when the counts differ.
std::vector<Detection> read_detections(const std::filesystem::path& det_path,
                                       const std::filesystem::path& emb_path);

/// Writes detections as a det-kind record file plus aligned sidecar.
void write_detections(const std::vector<Detection>& detections,
                      const std::filesystem::path& det_path,
                      const std::filesystem::path& emb_path);

}  // namespace ucsl
