// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <ucsl/embedding.hpp>

namespace ucsl {

EmbeddingMatrix normalize_columns(const EmbeddingMatrix& e) {
    Eigen::MatrixXd out = e.data;
    for (int j = 0; j < out.cols(); ++j) {
        const double norm = out.col(j).norm();
        if (norm < 1e-12) {
            throw ZeroColumnError(j);
        }
        out.col(j) /= norm;
    }
    return EmbeddingMatrix(std::move(out));
}

SimilarityMatrix similarity(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimMismatchError("similarity: embedding dims differ (" +
                               std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    }
    return SimilarityMatrix(a.data.transpose() * b.data);
}

namespace detail {

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& s, double tau) {
    if (tau <= 0.0) {
        throw Error("row_softmax: tau must be positive");
    }
    Eigen::MatrixXd out(s.rows(), s.cols());
    for (int i = 0; i < s.rows(); ++i) {
        const double row_max = s.row(i).maxCoeff();
        Eigen::ArrayXd z = ((s.row(i).array() - row_max) / tau).exp();
        out.row(i) = z / z.sum();
    }
    return out;
}

}  // namespace detail

AssignmentMatrix row_softmax(const SimilarityMatrix& s, double tau) {
    if (s.rows() == 0 || s.cols() == 0) {
        throw EmptyMatrixError("row_softmax: matrix has zero rows or columns");
    }
    return AssignmentMatrix(detail::row_softmax(s.data, tau));
}

AssignmentMatrix compose(const AssignmentMatrix& a, const AssignmentMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeMismatchError("compose: inner dimensions differ (" +
                                 std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
    }
    return AssignmentMatrix(a.data * b.data);
}

}  // namespace ucsl
