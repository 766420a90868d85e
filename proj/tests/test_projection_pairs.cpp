#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "restdiag/projection_pairs.hpp"

using namespace restdiag;

namespace {

std::mt19937_64 rng(424242);

Matrix random_matrix(std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

Matrix random_unitary(std::size_t n) {
    return Eigen::HouseholderQR<Matrix>(random_matrix(n)).householderQ();
}

Projection conjugated_coordinate(const Matrix& u, std::size_t rank, bool identity_tail = false) {
    const std::size_t n = static_cast<std::size_t>(u.rows());
    Matrix c = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < rank; ++i) c(i, i) = 1.0;
    return Projection(TruncOperator(u * c * u.adjoint(),
                                    identity_tail ? OpTail::identity() : OpTail::zero()));
}

// Trace oracle: for projections with finite-rank difference the index equals
// the rounded trace of the difference.
long trace_oracle(const Projection& p, const Projection& q) {
    return std::lround((p.block() - q.block()).trace().real());
}

}  // namespace

TEST_CASE("ess_codim computes the index by rank arithmetic") {
    SECTION("equal projections have index zero") {
        Projection p = conjugated_coordinate(random_unitary(8), 3);
        auto r = ess_codim(p, p);
        REQUIRE(r.value == 0);
        REQUIRE(r.dim_kernel_side == 0);
        REQUIRE(r.dim_cokernel_side == 0);
    }

    SECTION("coordinate spans: index equals the trace difference") {
        Projection p = Projection::coordinate(6, {0, 1, 2});
        Projection q = Projection::coordinate(6, {0});
        auto r = ess_codim(p, q);
        REQUIRE(r.value == 2);
        REQUIRE(r.trace_crosscheck.has_value());
        REQUIRE(*r.trace_crosscheck == Catch::Approx(2.0).margin(1e-10));
    }

    SECTION("200 random pairs match the trace oracle exactly") {
        std::uniform_int_distribution<std::size_t> dims(4, 64);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = dims(rng);
            std::uniform_int_distribution<std::size_t> ranks(0, n);
            Projection p = conjugated_coordinate(random_unitary(n), ranks(rng));
            Projection q = conjugated_coordinate(random_unitary(n), ranks(rng));
            auto r = ess_codim(p, q);
            REQUIRE(r.value == trace_oracle(p, q));
            REQUIRE(r.trace_crosscheck.has_value());
            REQUIRE(std::abs(static_cast<double>(r.value) - *r.trace_crosscheck) <= 1e-6);
        }
    }

    SECTION("identity tails on both sides count only block defects") {
        Projection p = Projection::coordinate(6, {0, 1}, true);
        Projection q = Projection::coordinate(6, {0}, true);
        REQUIRE(ess_codim(p, q).value == 1);
    }

    SECTION("mismatched tails are rejected") {
        Projection p = Projection::coordinate(4, {0, 1}, true);
        Projection q = Projection::coordinate(4, {0, 1}, false);
        REQUIRE_THROWS_AS(ess_codim(p, q), Error);
    }
}

TEST_CASE("ess_codim laws") {
    SECTION("antisymmetry") {
        for (int trial = 0; trial < 50; ++trial) {
            Matrix u = random_unitary(10);
            Matrix w = random_unitary(10);
            Projection p = conjugated_coordinate(u, 4);
            Projection q = conjugated_coordinate(w, 6);
            REQUIRE(ess_codim(p, q).value == -ess_codim(q, p).value);
        }
    }

    SECTION("additivity over orthogonal pairs") {
        std::uniform_int_distribution<std::size_t> halves(2, 8);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t h = halves(rng);
            const std::size_t n = 2 * h + 2;
            Matrix u = random_unitary(n), w = random_unitary(n);
            std::uniform_int_distribution<std::size_t> ranks(0, h);
            Matrix c1 = Matrix::Zero(n, n), c2 = Matrix::Zero(n, n);
            Matrix d1 = Matrix::Zero(n, n), d2 = Matrix::Zero(n, n);
            for (std::size_t i = 0; i < ranks(rng); ++i) c1(i, i) = 1.0;
            for (std::size_t i = h; i < h + ranks(rng); ++i) c2(i, i) = 1.0;
            for (std::size_t i = 0; i < ranks(rng); ++i) d1(i, i) = 1.0;
            for (std::size_t i = h; i < h + ranks(rng); ++i) d2(i, i) = 1.0;
            Projection p1(TruncOperator(u * c1 * u.adjoint(), OpTail::zero()));
            Projection p2(TruncOperator(u * c2 * u.adjoint(), OpTail::zero()));
            Projection q1(TruncOperator(w * d1 * w.adjoint(), OpTail::zero()));
            Projection q2(TruncOperator(w * d2 * w.adjoint(), OpTail::zero()));
            Projection psum(p1.op() + p2.op());
            Projection qsum(q1.op() + q2.op());
            REQUIRE(ess_codim(psum, qsum).value ==
                    ess_codim(p1, q1).value + ess_codim(p2, q2).value);
        }
    }

    SECTION("chain rule for finite-rank differences") {
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 12;
            std::uniform_int_distribution<std::size_t> ranks(0, n);
            Projection p = conjugated_coordinate(random_unitary(n), ranks(rng));
            Projection q = conjugated_coordinate(random_unitary(n), ranks(rng));
            Projection r = conjugated_coordinate(random_unitary(n), ranks(rng));
            REQUIRE(ess_codim(p, r).value ==
                    ess_codim(p, q).value + ess_codim(q, r).value);
        }
    }
}

TEST_CASE("is_fredholm_pair") {
    SECTION("equal projections pass") {
        Projection p = conjugated_coordinate(random_unitary(8), 5);
        REQUIRE(is_fredholm_pair(p, p));
    }

    SECTION("orthogonal finite ranges pass with index zero") {
        Projection p = Projection::coordinate(4, {0});
        Projection q = Projection::coordinate(4, {1});
        REQUIRE(is_fredholm_pair(p, q));
        REQUIRE(ess_codim(p, q).value == 0);
    }

    SECTION("a near-orthogonal overlap inside the dead zone is flagged") {
        const double theta = M_PI / 2 - 1e-8;  // residual overlap ~1e-8
        Matrix q = Matrix::Zero(2, 2);
        q(0, 0) = std::cos(theta) * std::cos(theta);
        q(0, 1) = std::cos(theta) * std::sin(theta);
        q(1, 0) = q(0, 1);
        q(1, 1) = std::sin(theta) * std::sin(theta);
        Projection pp = Projection::coordinate(2, {0});
        Projection qq{TruncOperator(q, OpTail::zero())};
        REQUIRE_FALSE(is_fredholm_pair(pp, qq));
    }
}

TEST_CASE("conjugating_unitary") {
    SECTION("equal projections give the identity") {
        Projection p = conjugated_coordinate(random_unitary(6), 2);
        TruncOperator u = conjugating_unitary(p, p, IdealTag::compact());
        REQUIRE(spectral_norm(u.block() - Matrix::Identity(6, 6)) <= 1e-9);
    }

    SECTION("2x2 rotated pair recovers the rotation") {
        const double theta = 0.3;
        Matrix rot(2, 2);
        rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        Projection p = Projection::coordinate(2, {0});
        Projection q(TruncOperator(rot * p.block() * rot.adjoint(), OpTail::zero()));
        TruncOperator u = conjugating_unitary(p, q, IdealTag::finite_rank());
        REQUIRE(spectral_norm(u.block() - rot) <= 1e-10);
        const double gap = std::abs(1.0 - std::exp(Complex(0, theta)));
        REQUIRE(operator_norm(u - TruncOperator::identity(2)) == Catch::Approx(gap).margin(1e-12));
    }

    SECTION("nonzero codimension is reported by name") {
        Projection p = Projection::coordinate(4, {0, 1});
        Projection q = Projection::coordinate(4, {0});
        try {
            conjugating_unitary(p, q, IdealTag::compact());
            FAIL("expected a precondition failure");
        } catch (const Error& e) {
            REQUIRE(e.code() == std::string(errc::precondition_failed));
            REQUIRE(std::string(e.what()).find("codimension") != std::string::npos);
        }
    }

    SECTION("both conclusions hold and conjugation preserves membership") {
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t n = 10;
            Matrix u0 = random_unitary(n);
            Projection p = conjugated_coordinate(u0, 4);
            Projection q = conjugated_coordinate(random_unitary(n), 4);
            TruncOperator u = conjugating_unitary(p, q, IdealTag::schatten(2.0));
            REQUIRE(is_unitary(u, 1e-9));
            REQUIRE(spectral_norm(u.block() * p.block() * u.block().adjoint() - q.block()) <= 1e-8);
            REQUIRE(op_in_ideal(u - TruncOperator::identity(n), IdealTag::schatten(2.0)));
            // conjugating any projection pair by U leaves the membership of
            // the difference unchanged
            Projection pc(TruncOperator(u.block() * p.block() * u.block().adjoint(),
                                        OpTail::zero()));
            Projection qc(TruncOperator(u.block() * q.block() * u.block().adjoint(),
                                        OpTail::zero()));
            REQUIRE(op_in_ideal(pc.op() - qc.op(), IdealTag::schatten(2.0)) ==
                    op_in_ideal(p.op() - q.op(), IdealTag::schatten(2.0)));
        }
    }

    SECTION("identity-tail pairs align through the block") {
        Projection p = Projection::coordinate(6, {0, 1}, true);
        Projection q = Projection::coordinate(6, {2, 3}, true);
        TruncOperator u = conjugating_unitary(p, q, IdealTag::compact());
        REQUIRE(u.tail().is_identity());
        REQUIRE(spectral_norm(u.block() * p.block() * u.block().adjoint() - q.block()) <= 1e-8);
    }
}

TEST_CASE("intertwine_partial_isometries") {
    SECTION("equal partial isometries give the identity") {
        Matrix u = random_unitary(5);
        PartialIsometry v(TruncOperator(u.leftCols(2) * Matrix::Identity(2, 5), OpTail::zero()));
        TruncOperator w = intertwine_partial_isometries(v, v, IdealTag::compact());
        REQUIRE(spectral_norm(w.block() - Matrix::Identity(5, 5)) <= 1e-9);
    }

    SECTION("rank-one embeddings with shifted targets") {
        const std::size_t n = 5;
        Matrix m1 = Matrix::Zero(n, n), m2 = Matrix::Zero(n, n);
        m1(0, 0) = 1.0;  // e1 -> e1
        m2(1, 0) = 1.0;  // e1 -> e2
        PartialIsometry v1{TruncOperator(m1, OpTail::zero())};
        PartialIsometry v2{TruncOperator(m2, OpTail::zero())};
        TruncOperator u = intertwine_partial_isometries(v1, v2, IdealTag::finite_rank());
        REQUIRE(is_unitary(u, 1e-9));
        REQUIRE(spectral_norm(u.block() * m1 - m2) <= 1e-8);
    }

    SECTION("kernel mismatch is rejected") {
        const std::size_t n = 4;
        Matrix m1 = Matrix::Zero(n, n), m2 = Matrix::Zero(n, n);
        m1(0, 0) = 1.0;  // kernel = span{e2,e3,e4}
        m2(0, 1) = 1.0;  // kernel = span{e1,e3,e4}
        PartialIsometry v1{TruncOperator(m1, OpTail::zero())};
        PartialIsometry v2{TruncOperator(m2, OpTail::zero())};
        REQUIRE_THROWS_AS(intertwine_partial_isometries(v1, v2, IdealTag::compact()), Error);
    }

    SECTION("infinite-rank branch goes through the range projections") {
        const std::size_t n = 6;
        // unitaries as partial isometries with full kernel agreement
        Matrix u1 = random_unitary(n);
        Matrix rot = Matrix::Identity(n, n);
        const double theta = 0.2;
        rot(0, 0) = std::cos(theta);
        rot(0, 1) = -std::sin(theta);
        rot(1, 0) = std::sin(theta);
        rot(1, 1) = std::cos(theta);
        PartialIsometry v1{TruncOperator(u1, OpTail::identity())};
        PartialIsometry v2{TruncOperator(rot * u1, OpTail::identity())};
        TruncOperator u = intertwine_partial_isometries(v1, v2, IdealTag::compact());
        REQUIRE(is_unitary(u, 1e-9));
        REQUIRE(spectral_norm(u.block() * v1.block() - v2.block()) <= 1e-8);
    }
}

TEST_CASE("balance_codimensions") {
    auto tag = IdealTag::finite_rank();

    SECTION("already balanced families are returned unchanged") {
        auto ps = IdentityDecomposition::coordinate(6, {{0, 1}, {2, 3}, {4, 5}}, 0);
        auto es = IdentityDecomposition::coordinate(6, {{0, 1}, {2, 3}, {4, 5}}, 0);
        auto out = balance_codimensions(ps, es, tag);
        for (std::size_t i = 0; i < 3; ++i)
            REQUIRE(spectral_norm(out.part(i).block() - es.part(i).block()) <= 1e-12);
    }

    SECTION("a (+1, -1) imbalance moves exactly one coordinate") {
        auto ps = IdentityDecomposition::coordinate(6, {{0, 1, 2}, {3, 4, 5}}, std::nullopt);
        auto es = IdentityDecomposition::coordinate(6, {{0, 1}, {2, 3, 4, 5}}, std::nullopt);
        REQUIRE(ess_codim(ps.part(0), es.part(0)).value == 1);
        auto out = balance_codimensions(ps, es, tag);
        REQUIRE(ess_codim(ps.part(0), out.part(0)).value == 0);
        REQUIRE(ess_codim(ps.part(1), out.part(1)).value == 0);
        REQUIRE(rank_of((out.part(0).op() - es.part(0).op()).block()) == 1);
    }

    SECTION("nonzero total codimension is rejected") {
        auto ps = IdentityDecomposition::coordinate(4, {{0, 1}, {2, 3}}, std::nullopt);
        auto es = IdentityDecomposition::family(
            {Projection::coordinate(4, {0}), Projection::coordinate(4, {2, 3})});
        REQUIRE_THROWS_AS(balance_codimensions(ps, es, tag), Error);
    }

    SECTION("a fixed part is never touched") {
        auto ps = IdentityDecomposition::coordinate(9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}, 0);
        auto es = IdentityDecomposition::coordinate(9, {{0, 1, 2}, {3, 4}, {5, 6, 7, 8}}, 0);
        auto out = balance_codimensions(ps, es, IdealTag::finite_rank(), std::size_t{0});
        REQUIRE(spectral_norm(out.part(0).block() - es.part(0).block()) <= 1e-12);
        for (std::size_t i = 0; i < 3; ++i)
            REQUIRE(ess_codim(ps.part(i), out.part(i)).value == 0);
    }
}
