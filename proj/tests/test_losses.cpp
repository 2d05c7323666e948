// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucsl contributors

#include <doctest.h>

#include <cmath>
#include <cstring>

#include <ucsl/losses.hpp>
#include <ucsl/rng.hpp>

#include "support/instances.hpp"
#include "support/naive_losses.hpp"

using namespace ucsl;

namespace {

EmbeddingMatrix orthonormal_pair() {
    return EmbeddingMatrix(Eigen::MatrixXd::Identity(2, 2));
}

EmbeddingMatrix single_object() {
    Eigen::MatrixXd m(3, 1);
    m << 1.0, 0.0, 0.0;
    return EmbeddingMatrix(m);
}

LossConfig tau1_config() {
    LossConfig cfg;
    cfg.tau = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("direct self assignment of orthonormal columns at tau 1") {
    const AssignmentMatrix p = direct_self_assignment(orthonormal_pair(), tau1_config());
    const double e = std::exp(1.0);
    const double hi = e / (e + 1.0);
    CHECK(p.data(0, 0) == doctest::Approx(hi).epsilon(1e-12));
    CHECK(p.data(0, 1) == doctest::Approx(1.0 - hi).epsilon(1e-12));
    CHECK(p.data(1, 1) == doctest::Approx(hi).epsilon(1e-12));
    CHECK(p.data(0, 0) > p.data(0, 1));
}

TEST_CASE("direct self assignment of a single object is [[1]]") {
    const AssignmentMatrix p = direct_self_assignment(single_object(), LossConfig{});
    REQUIRE(p.rows() == 1);
    CHECK(p.data(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("direct self assignment of identical columns is uniform") {
    Eigen::MatrixXd m(3, 2);
    m.col(0) << 1.0, 0.0, 0.0;
    m.col(1) << 1.0, 0.0, 0.0;
    const AssignmentMatrix p = direct_self_assignment(EmbeddingMatrix(m), LossConfig{});
    CHECK((p.data.array() - 0.5).abs().maxCoeff() < 1e-12);
}

TEST_CASE("direct self assignment rejects an empty frame") {
    CHECK_THROWS_AS(direct_self_assignment(EmbeddingMatrix(Eigen::MatrixXd(4, 0)), LossConfig{}),
                    EmptyFrameError);
}

TEST_CASE("indirect self assignment diagonal for the orthonormal pair") {
    const AssignmentMatrix p =
        indirect_self_assignment(orthonormal_pair(), orthonormal_pair(), tau1_config());
    const double e = std::exp(1.0);
    const double q = e / (e + 1.0);
    const double diag = q * q + (1.0 - q) * (1.0 - q);
    CHECK(p.data(0, 0) == doctest::Approx(diag).epsilon(1e-12));
    CHECK(p.data(1, 1) == doctest::Approx(diag).epsilon(1e-12));
}

TEST_CASE("indirect self assignment of a single object is [[1]]") {
    const AssignmentMatrix p =
        indirect_self_assignment(single_object(), single_object(), LossConfig{});
    CHECK(p.data(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("indirect self assignment diagonal survives column permutation of the second frame") {
    const EmbeddingMatrix x1(Eigen::MatrixXd::Identity(4, 4));
    Eigen::MatrixXd perm(4, 4);
    perm.setZero();
    perm(0, 2) = 1.0;
    perm(1, 0) = 1.0;
    perm(2, 3) = 1.0;
    perm(3, 1) = 1.0;
    const EmbeddingMatrix x2(Eigen::MatrixXd(Eigen::MatrixXd::Identity(4, 4) * perm));
    const LossConfig cfg = tau1_config();
    const Eigen::VectorXd straight =
        indirect_self_assignment(x1, x1, cfg).data.diagonal();
    const Eigen::VectorXd permuted =
        indirect_self_assignment(x1, x2, cfg).data.diagonal();
    CHECK((straight - permuted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("self contrast loss is zero for a lone identical object") {
    CHECK(self_contrast_loss(single_object(), single_object(), LossConfig{}) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("self contrast loss closed form for two orthonormal objects at tau 1") {
    // Scalar oracle: diag(S_dsc) = e/(e+1); diag(S_isc) = q^2 + (1-q)^2.
    const double e = std::exp(1.0);
    const double q = e / (e + 1.0);
    const double expected = -(std::log(q) + std::log(q * q + (1.0 - q) * (1.0 - q)));
    const double got = self_contrast_loss(orthonormal_pair(), orthonormal_pair(), tau1_config());
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("self contrast loss matches the naive-loop reference") {
    for (std::uint64_t seed : {101, 102, 103, 104}) {
        const FrameTriple t = testing_support::random_triple(seed, 5, 7, 4, 8);
        LossConfig cfg;
        cfg.tau = 0.1;
        const double got =
            self_contrast_loss(normalize_columns(t[0]), normalize_columns(t[1]), cfg);
        const double want =
            naive::self_contrast(naive::from_eigen(t[0].data), naive::from_eigen(t[1].data), cfg);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("kl divergence trivia") {
    Eigen::VectorXd p(2);
    Eigen::VectorXd q(2);
    p << 0.5, 0.5;
    q << 0.5, 0.5;
    CHECK(kl_divergence(p, q) == doctest::Approx(0.0).epsilon(1e-15));

    p << 1.0, 0.0;
    CHECK(kl_divergence(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    p << 0.75, 0.25;
    q << 0.25, 0.75;
    const double expected = 0.75 * std::log(3.0) + 0.25 * std::log(1.0 / 3.0);
    CHECK(kl_divergence(p, q) == doctest::Approx(expected).epsilon(1e-12));

    Eigen::VectorXd longer(3);
    longer << 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(kl_divergence(p, longer), LengthMismatchError);
}

TEST_CASE("kl divergence of a distribution with itself is exactly zero") {
    SeededRng rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd p(4);
        for (int i = 0; i < 4; ++i) {
            p[i] = rng.uniform01() + 1e-6;
        }
        p /= p.sum();
        CHECK(kl_divergence(p, p) == 0.0);
    }
}

TEST_CASE("js divergence basics and symmetry") {
    Eigen::MatrixXd a(1, 2);
    a << 1.0, 0.0;
    Eigen::MatrixXd b(1, 2);
    b << 0.0, 1.0;
    CHECK(js_divergence(AssignmentMatrix(a), AssignmentMatrix(a)) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(js_divergence(AssignmentMatrix(a), AssignmentMatrix(b)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    SeededRng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::MatrixXd p(3, 4);
        Eigen::MatrixXd q(3, 4);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 4; ++j) {
                p(i, j) = rng.uniform01() + 1e-6;
                q(i, j) = rng.uniform01() + 1e-6;
            }
        }
        p.array().colwise() /= p.rowwise().sum().array();
        q.array().colwise() /= q.rowwise().sum().array();
        const AssignmentMatrix pm(p);
        const AssignmentMatrix qm(q);
        CHECK(std::abs(js_divergence(pm, qm) - js_divergence(qm, pm)) < 1e-12);
    }

    Eigen::MatrixXd wide(1, 3);
    wide << 0.2, 0.3, 0.5;
    CHECK_THROWS_AS(js_divergence(AssignmentMatrix(a), AssignmentMatrix(wide)),
                    ShapeMismatchError);
}

TEST_CASE("cross contrast loss vanishes for a single repeated object") {
    const double got =
        cross_contrast_loss(single_object(), single_object(), single_object(), LossConfig{});
    CHECK(got == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("cross contrast loss matches the naive-loop reference") {
    LossConfig cfg;
    cfg.tau = 1.0;
    const EmbeddingMatrix x = orthonormal_pair();
    CHECK(cross_contrast_loss(x, x, x, cfg) ==
          doctest::Approx(naive::cross_contrast(naive::from_eigen(x.data),
                                                naive::from_eigen(x.data),
                                                naive::from_eigen(x.data), cfg))
              .epsilon(1e-10));

    cfg.tau = 0.1;
    for (std::uint64_t seed : {201, 202, 203}) {
        const FrameTriple t = testing_support::random_triple(seed, 4, 6, 5, 8);
        const double got = cross_contrast_loss(normalize_columns(t[0]), normalize_columns(t[1]),
                                               normalize_columns(t[2]), cfg);
        const double want =
            naive::cross_contrast(naive::from_eigen(t[0].data), naive::from_eigen(t[1].data),
                                  naive::from_eigen(t[2].data), cfg);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("scrambling the middle frame raises the cross contrast loss") {
    LossConfig cfg;
    for (std::uint64_t seed : {301, 302, 303, 304, 305}) {
        const FrameTriple clean = testing_support::identity_triple(seed, 6, 16, 0.0);
        const double base = cross_contrast_loss(normalize_columns(clean[0]),
                                                normalize_columns(clean[1]),
                                                normalize_columns(clean[2]), cfg);
        SeededRng rng(seed ^ 0xabcdef);
        const EmbeddingMatrix noise = testing_support::random_unit(rng, 16, 6);
        const double scrambled =
            cross_contrast_loss(normalize_columns(clean[0]), noise,
                                normalize_columns(clean[2]), cfg);
        CHECK(scrambled > base);
    }
}

TEST_CASE("find_ambiguous flags exactly the rows below theta") {
    LossConfig cfg;  // theta = 0.7
    Eigen::MatrixXd sim(3, 3);
    sim << 0.95, 0.1, 0.2,
           0.05, 0.92, 0.1,
           0.1, 0.2, 0.9;
    const AssignmentMatrix assign = row_softmax(SimilarityMatrix(sim), cfg.tau);
    CHECK(find_ambiguous(assign, SimilarityMatrix(sim), cfg).indices.empty());

    sim(2, 2) = 0.5;  // row 2's max drops below theta
    const AmbiguousSet set = find_ambiguous(assign, SimilarityMatrix(sim), cfg);
    REQUIRE(set.count() == 1);
    CHECK(set.indices[0] == 2);

    CHECK_THROWS_AS(
        find_ambiguous(AssignmentMatrix(Eigen::MatrixXd::Constant(2, 2, 0.5)),
                       SimilarityMatrix(sim), cfg),
        ShapeMismatchError);
}

TEST_CASE("ambiguity contrast loss is zero without ambiguous objects") {
    // Same latents in both frames: every cosine on the diagonal is 1.
    const FrameTriple t = testing_support::identity_triple(401, 4, 12, 0.0);
    CHECK(ambiguity_contrast_loss(normalize_columns(t[0]), normalize_columns(t[1]), LossConfig{}) ==
          0.0);
}

TEST_CASE("ambiguity contrast loss is zero for singleton ambiguous sets") {
    // Two orthogonal objects: each is the other frame's only candidate, both
    // ambiguous, and a one-entry softmax row carries no entropy.
    Eigen::MatrixXd a(2, 1);
    a << 1.0, 0.0;
    Eigen::MatrixXd b(2, 1);
    b << 0.0, 1.0;
    CHECK(ambiguity_contrast_loss(EmbeddingMatrix(a), EmbeddingMatrix(b), LossConfig{}) ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("ambiguity contrast loss equals log 2 for a uniform 2x2 ambiguity block") {
    // Four mutually orthogonal columns: all cross-frame cosines are 0, both
    // frames' objects are ambiguous, every refined row is uniform over two.
    Eigen::MatrixXd x1(4, 2);
    x1.setZero();
    x1(0, 0) = 1.0;
    x1(1, 1) = 1.0;
    Eigen::MatrixXd x2(4, 2);
    x2.setZero();
    x2(2, 0) = 1.0;
    x2(3, 1) = 1.0;
    const double got = ambiguity_contrast_loss(EmbeddingMatrix(x1), EmbeddingMatrix(x2),
                                               LossConfig{});
    CHECK(got == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const double want = naive::ambiguity_contrast(naive::from_eigen(x1), naive::from_eigen(x2),
                                                  LossConfig{});
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("ambiguity coefficient halves per unit count difference") {
    CHECK(ambiguity_coefficient(3, 3) == 1.0);
    CHECK(ambiguity_coefficient(2, 3) == 0.5);
    CHECK(ambiguity_coefficient(3, 2) == 0.5);
    CHECK(ambiguity_coefficient(1, 3) == doctest::Approx(1.0 / 3.0));

    // Padding one ambiguous set by one object halves the loss exactly when
    // the per-direction entropy terms are held fixed.
    const double h1 = 0.37;
    const double h2 = 0.81;
    const double equal_counts = ambiguity_coefficient(2, 2) * 0.5 * (h1 + h2);
    const double off_by_one = ambiguity_coefficient(2, 3) * 0.5 * (h1 + h2);
    CHECK(off_by_one == doctest::Approx(0.5 * equal_counts).epsilon(1e-15));
}

TEST_CASE("ambiguity contrast loss matches the naive-loop reference on random instances") {
    LossConfig cfg;
    for (std::uint64_t seed : {501, 502, 503, 504}) {
        const FrameTriple t = testing_support::random_triple(seed, 5, 6, 4, 8);
        const double got =
            ambiguity_contrast_loss(normalize_columns(t[0]), normalize_columns(t[1]), cfg);
        const double want = naive::ambiguity_contrast(naive::from_eigen(t[0].data),
                                                      naive::from_eigen(t[1].data), cfg);
        CHECK(got == doctest::Approx(want).epsilon(1e-10));
        CHECK(got >= 0.0);
    }
}

TEST_CASE("total loss of a lone identical object is zero everywhere") {
    const LossReport r = total_loss(single_object(), single_object(), single_object(),
                                    LossConfig{});
    CHECK(r.l_sc == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.l_cc == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.l_ac == 0.0);
    CHECK(r.total == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_FALSE(r.skipped);
}

TEST_CASE("total loss equals the sum of its parts and the naive reference") {
    const FrameTriple t = testing_support::identity_triple(601, 6, 16, 0.3);
    LossConfig cfg;
    const EmbeddingMatrix x1 = normalize_columns(t[0]);
    const EmbeddingMatrix x2 = normalize_columns(t[1]);
    const EmbeddingMatrix x3 = normalize_columns(t[2]);
    const LossReport r = total_loss(x1, x2, x3, cfg);
    CHECK(r.total == r.l_sc + r.l_cc + r.l_ac);
    CHECK(r.l_sc == doctest::Approx(self_contrast_loss(x1, x2, cfg)).epsilon(1e-12));
    CHECK(r.l_cc == doctest::Approx(cross_contrast_loss(x1, x2, x3, cfg)).epsilon(1e-12));
    CHECK(r.l_ac == doctest::Approx(ambiguity_contrast_loss(x1, x2, cfg)).epsilon(1e-12));

    const double want = naive::total(naive::from_eigen(t[0].data), naive::from_eigen(t[1].data),
                                     naive::from_eigen(t[2].data), cfg);
    CHECK(r.total == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("total loss skips batches with an empty frame") {
    const LossReport r = total_loss(single_object(), EmbeddingMatrix(Eigen::MatrixXd(3, 0)),
                                    single_object(), LossConfig{});
    CHECK(r.skipped);
    CHECK(r.total == 0.0);
}

TEST_CASE("losses are deterministic bit for bit") {
    const FrameTriple t = testing_support::random_triple(701, 5, 5, 5, 8);
    LossConfig cfg;
    const EmbeddingMatrix x1 = normalize_columns(t[0]);
    const EmbeddingMatrix x2 = normalize_columns(t[1]);
    const EmbeddingMatrix x3 = normalize_columns(t[2]);
    const LossReport a = total_loss(x1, x2, x3, cfg);
    const LossReport b = total_loss(x1, x2, x3, cfg);
    CHECK(std::memcmp(&a.total, &b.total, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.l_sc, &b.l_sc, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.l_cc, &b.l_cc, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.l_ac, &b.l_ac, sizeof(double)) == 0);
}

TEST_CASE("self contrast loss is non-negative and permutation invariant") {
    SeededRng perm_rng(24);
    for (std::uint64_t seed : {801, 802, 803, 804, 805}) {
        const FrameTriple t = testing_support::random_triple(seed, 6, 6, 4, 10);
        LossConfig cfg;
        const EmbeddingMatrix x1 = normalize_columns(t[0]);
        const EmbeddingMatrix x2 = normalize_columns(t[1]);
        const double base = self_contrast_loss(x1, x2, cfg);
        CHECK(base >= 0.0);

        // Relabeling objects: the same permutation applied to both frames.
        std::vector<int> perm(6);
        for (int i = 0; i < 6; ++i) {
            perm[i] = i;
        }
        for (int i = 5; i > 0; --i) {
            std::swap(perm[i], perm[static_cast<int>(perm_rng.uniform01() * (i + 1))]);
        }
        Eigen::MatrixXd p1(x1.dim(), 6);
        Eigen::MatrixXd p2(x2.dim(), 6);
        for (int i = 0; i < 6; ++i) {
            p1.col(i) = x1.data.col(perm[i]);
            p2.col(i) = x2.data.col(perm[i]);
        }
        const double permuted =
            self_contrast_loss(EmbeddingMatrix(p1), EmbeddingMatrix(p2), cfg);
        CHECK(permuted == doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("per-row JSD contributions in the cross loss stay below log 2") {
    for (std::uint64_t seed : {901, 902, 903}) {
        const FrameTriple t = testing_support::random_triple(seed, 5, 4, 6, 8);
        LossConfig cfg;
        const EmbeddingMatrix x1 = normalize_columns(t[0]);
        const EmbeddingMatrix x3 = normalize_columns(t[2]);
        const AssignmentMatrix p = row_softmax(similarity(x1, x3), cfg.tau);
        SeededRng rng(seed);
        Eigen::MatrixXd q(p.rows(), p.cols());
        for (int i = 0; i < p.rows(); ++i) {
            for (int j = 0; j < p.cols(); ++j) {
                q(i, j) = rng.uniform01() + 1e-9;
            }
        }
        q.array().colwise() /= q.rowwise().sum().array();
        for (int i = 0; i < p.rows(); ++i) {
            const AssignmentMatrix pr(Eigen::MatrixXd(p.data.row(i)));
            const AssignmentMatrix qr(Eigen::MatrixXd(q.row(i)));
            const double row_jsd = js_divergence(pr, qr);
            CHECK(row_jsd >= 0.0);
            CHECK(row_jsd <= std::log(2.0) + 1e-9);
        }
    }
}
