// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#pragma once

#include <Eigen/Dense>
#include <array>

#include <ucsl/errors.hpp>

namespace ucsl {

/// D x count bundle of per-object identity embeddings for one frame.
/// One column per object, column-major storage (Eigen default).
struct EmbeddingMatrix {
    Eigen::MatrixXd data;

    EmbeddingMatrix() = default;
    explicit EmbeddingMatrix(Eigen::MatrixXd m) : data(std::move(m)) {}

    int dim() const { return static_cast<int>(data.rows()); }
    int count() const { return static_cast<int>(data.cols()); }
};

/// Cosine similarities between two embedding sets, entry (i, j) = cos(a_i, b_j).
struct SimilarityMatrix {
    Eigen::MatrixXd data;

    SimilarityMatrix() = default;
    explicit SimilarityMatrix(Eigen::MatrixXd m) : data(std::move(m)) {}

    int rows() const { return static_cast<int>(data.rows()); }
    int cols() const { return static_cast<int>(data.cols()); }
};

/// Row-stochastic matching probabilities; entry (i, j) is the probability that
/// object i of the source frame matches object j of the target frame.
struct AssignmentMatrix {
    Eigen::MatrixXd data;

    AssignmentMatrix() = default;
    explicit AssignmentMatrix(Eigen::MatrixXd m) : data(std::move(m)) {}

    int rows() const { return static_cast<int>(data.rows()); }
    int cols() const { return static_cast<int>(data.cols()); }
};

/// Three consecutive-frame embedding matrices (the loss input unit).
using FrameTriple = std::array<EmbeddingMatrix, 3>;

/// Divides every column by its L2 norm. Throws ZeroColumnError if a column
/// norm falls below 1e-12.
EmbeddingMatrix normalize_columns(const EmbeddingMatrix& e);

/// A^T B over unit columns. Throws DimMismatchError when dims differ.
SimilarityMatrix similarity(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

/// Row-wise temperature softmax, stabilized by subtracting each row's max
/// before exponentiation. Throws EmptyMatrixError on zero rows or columns.
AssignmentMatrix row_softmax(const SimilarityMatrix& s, double tau);

/// Matrix product of two assignments; the result is row-stochastic.
AssignmentMatrix compose(const AssignmentMatrix& a, const AssignmentMatrix& b);

namespace detail {

/// Softmax core shared by row_softmax and the loss/gradient internals.
Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& s, double tau);

}  // namespace detail

}  // namespace ucsl
